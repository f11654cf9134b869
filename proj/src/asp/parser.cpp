#include "spasp/asp/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>

namespace spasp::asp {
namespace {

enum class Tok : std::uint8_t {
  identifier,
  variable,
  anonymous,
  integer,
  string,
  kw_not,
  directive,  // #name
  if_,        // :-
  colon,
  comma,
  semicolon,
  dot,
  lparen,
  rparen,
  cmp,
  plus,
  minus,
  slash,
  end,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier/variable name, string contents, directive name
  std::int64_t number = 0;
  CompareOp cmp = CompareOp::eq;
  SourceSpan span;
};

// Thrown inside the parser only; converted to ParseError at the API boundary.
struct Failure {
  ParseError error;
};

[[noreturn]] void fail(std::string detail, const SourceSpan& at) {
  throw Failure{ParseError{std::move(detail), at}};
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::end: return "end of input";
    case Tok::string: return "string \"" + t.text + "\"";
    case Tok::integer: return "'" + std::to_string(t.number) + "'";
    case Tok::directive: return "'#" + t.text + "'";
    case Tok::cmp: return "'" + std::string(to_string(t.cmp)) + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : src_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t = next();
      bool done = t.kind == Tok::end;
      out.push_back(std::move(t));
      if (done) break;
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceSpan here() const { return {line_, col_, pos_, pos_}; }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%' && peek(1) == '*') {
        SourceSpan start = here();
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '%')) advance();
        if (pos_ >= src_.size()) fail("unterminated block comment", start);
        advance();
        advance();
      } else if (c == '%') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  Token make(Tok kind, SourceSpan start, std::string text) const {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = start;
    t.span.end = pos_;
    return t;
  }

  Token next() {
    SourceSpan start = here();
    if (pos_ >= src_.size()) return make(Tok::end, start, "");
    char c = peek();

    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t b = pos_;
      while (ident_char(peek())) advance();
      std::string word(src_.substr(b, pos_ - b));
      return make(word == "not" ? Tok::kw_not : Tok::identifier, start, word);
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      advance();
      while (ident_char(peek())) advance();
      std::string word(src_.substr(b, pos_ - b));
      return make(word == "_" ? Tok::anonymous : Tok::variable, start, word);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t b = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      Token t = make(Tok::integer, start, std::string(src_.substr(b, pos_ - b)));
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc()) fail("integer literal '" + t.text + "' out of range", start);
      return t;
    }
    if (c == '"') {
      advance();
      std::string text;
      for (;;) {
        if (pos_ >= src_.size() || peek() == '\n') fail("unterminated string literal", start);
        char d = peek();
        advance();
        if (d == '"') break;
        if (d == '\\') {
          char e = peek();
          if (e == 'n') text += '\n';
          else if (e == '"' || e == '\\') text += e;
          else fail(std::string("unknown escape '\\") + e + "'", here());
          advance();
          continue;
        }
        text += d;
      }
      return make(Tok::string, start, std::move(text));
    }
    if (c == '#') {
      advance();
      std::size_t b = pos_;
      while (ident_char(peek())) advance();
      return make(Tok::directive, start, std::string(src_.substr(b, pos_ - b)));
    }

    auto single = [&](Tok kind, std::size_t len) {
      std::string text(src_.substr(pos_, len));
      for (std::size_t i = 0; i < len; ++i) advance();
      return make(kind, start, std::move(text));
    };
    auto comparison = [&](CompareOp op, std::size_t len) {
      Token t = single(Tok::cmp, len);
      t.cmp = op;
      return t;
    };

    switch (c) {
      case ':': return peek(1) == '-' ? single(Tok::if_, 2) : single(Tok::colon, 1);
      case ',': return single(Tok::comma, 1);
      case ';': return single(Tok::semicolon, 1);
      case '.': return single(Tok::dot, 1);
      case '(': return single(Tok::lparen, 1);
      case ')': return single(Tok::rparen, 1);
      case '+': return single(Tok::plus, 1);
      case '-': return single(Tok::minus, 1);
      case '/': return single(Tok::slash, 1);
      case '=': return comparison(CompareOp::eq, peek(1) == '=' ? 2 : 1);
      case '!':
        if (peek(1) == '=') return comparison(CompareOp::ne, 2);
        break;
      case '<':
        if (peek(1) == '=') return comparison(CompareOp::le, 2);
        if (peek(1) == '>') return comparison(CompareOp::ne, 2);
        return comparison(CompareOp::lt, 1);
      case '>':
        if (peek(1) == '=') return comparison(CompareOp::ge, 2);
        return comparison(CompareOp::gt, 1);
      default:
        break;
    }
    std::string shown(1, c);
    fail("unexpected character '" + shown + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program run() {
    Program program;
    while (cur().kind != Tok::end) {
      if (cur().kind == Tok::directive) {
        program.shows.push_back(parse_directive());
      } else {
        program.rules.push_back(parse_rule());
      }
    }
    return program;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  void bump() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }

  [[noreturn]] void unexpected(const std::string& expected) const {
    fail("unexpected " + describe(cur()) + ", expected " + expected, cur().span);
  }

  void expect(Tok kind, const std::string& expected) {
    if (cur().kind != kind) unexpected(expected);
    bump();
  }

  ShowDirective parse_directive() {
    ShowDirective show;
    show.span = cur().span;
    if (cur().text != "show") {
      fail("unsupported directive '#" + cur().text + "'", cur().span);
    }
    bump();
    if (cur().kind == Tok::identifier) {
      Signature sig{cur().text, 0};
      bump();
      expect(Tok::slash, "'/' in #show signature");
      if (cur().kind != Tok::integer || cur().number < 0) unexpected("arity");
      sig.arity = static_cast<std::size_t>(cur().number);
      bump();
      show.signature = std::move(sig);
    }
    show.span.end = cur().span.end;
    expect(Tok::dot, "'.' after #show");
    return show;
  }

  Rule parse_rule() {
    Rule rule;
    rule.span = cur().span;
    if (cur().kind == Tok::if_) {
      bump();
      parse_body(rule);
    } else {
      if (cur().kind != Tok::identifier) unexpected("a rule head or ':-'");
      rule.head = parse_atom();
      if (cur().kind == Tok::if_) {
        bump();
        parse_body(rule);
      } else if (cur().kind != Tok::dot) {
        unexpected("'.' or ':-'");
      }
    }
    rule.span.end = cur().span.end;
    expect(Tok::dot, "'.'");
    return rule;
  }

  void parse_body(Rule& rule) {
    for (;;) {
      Literal lit = parse_literal();
      if (cur().kind == Tok::colon) {
        bump();
        Conditional cond{std::move(lit), {}};
        cond.conditions.push_back(parse_literal());
        while (cur().kind == Tok::comma) {
          bump();
          cond.conditions.push_back(parse_literal());
        }
        rule.body.emplace_back(std::move(cond));
        if (cur().kind == Tok::semicolon) {
          bump();
          continue;
        }
        if (cur().kind == Tok::dot) return;
        unexpected("';' or '.' after conditional literal");
      }
      std::visit([&](auto&& l) { rule.body.emplace_back(std::move(l)); }, std::move(lit));
      if (cur().kind == Tok::comma || cur().kind == Tok::semicolon) {
        bump();
        continue;
      }
      if (cur().kind == Tok::dot) return;
      unexpected("',' or '.'");
    }
  }

  static bool starts_term_operator(Tok kind) {
    return kind == Tok::cmp || kind == Tok::plus || kind == Tok::minus;
  }

  Literal parse_literal() {
    if (cur().kind == Tok::kw_not) {
      bump();
      if (cur().kind != Tok::identifier) unexpected("an atom after 'not'");
      return AtomLiteral{Polarity::negative, parse_atom()};
    }
    if (cur().kind == Tok::identifier && !starts_term_operator(ahead().kind)) {
      return AtomLiteral{Polarity::positive, parse_atom()};
    }
    Comparison cmp;
    cmp.span = cur().span;
    cmp.lhs = parse_term();
    if (cur().kind != Tok::cmp) unexpected("a comparison operator");
    cmp.op = cur().cmp;
    bump();
    cmp.rhs = parse_term();
    cmp.span.end = toks_[pos_ - 1].span.end;
    return cmp;
  }

  Atom parse_atom() {
    Atom atom;
    atom.span = cur().span;
    atom.predicate = cur().text;
    bump();
    if (cur().kind == Tok::lparen) {
      bump();
      atom.args.push_back(parse_term());
      while (cur().kind != Tok::rparen) {
        if (cur().kind != Tok::comma) {
          fail("unclosed argument list of '" + atom.predicate + "': unexpected " + describe(cur()) +
                   ", expected ',' or ')'",
               cur().span);
        }
        bump();
        atom.args.push_back(parse_term());
      }
      bump();
    }
    atom.span.end = toks_[pos_ - 1].span.end;
    return atom;
  }

  Term parse_term() {
    Term lhs = parse_primary();
    while (cur().kind == Tok::plus || cur().kind == Tok::minus) {
      char op = cur().kind == Tok::plus ? '+' : '-';
      bump();
      lhs = Term::binary(op, std::move(lhs), parse_primary());
    }
    return lhs;
  }

  Term parse_primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::identifier: {
        Term term = Term::symbol(t.text);
        bump();
        if (cur().kind == Tok::lparen) {
          fail("function term '" + term.name + "(...)' is not supported", cur().span);
        }
        return term;
      }
      case Tok::variable: {
        Term term = Term::variable(t.text);
        bump();
        return term;
      }
      case Tok::anonymous:
        bump();
        return Term::anonymous();
      case Tok::integer: {
        Term term = Term::integer(t.number);
        bump();
        return term;
      }
      case Tok::string: {
        Term term = Term::string(t.text);
        bump();
        return term;
      }
      case Tok::minus: {
        SourceSpan at = t.span;
        bump();
        if (cur().kind != Tok::integer) {
          fail("unary minus is only supported on integer literals", at);
        }
        Term term = Term::integer(-cur().number);
        bump();
        return term;
      }
      case Tok::lparen: {
        bump();
        Term inner = parse_term();
        expect(Tok::rparen, "')'");
        return inner;
      }
      default:
        unexpected("a term");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void check_arities(const Program& program) {
  std::map<std::string, std::size_t> seen;
  auto visit_atom = [&](const Atom& atom) {
    auto [it, inserted] = seen.emplace(atom.predicate, atom.args.size());
    if (!inserted && it->second != atom.args.size()) {
      fail("predicate '" + atom.predicate + "' used with arity " + std::to_string(atom.args.size()) +
               " but earlier with arity " + std::to_string(it->second),
           atom.span);
    }
  };
  auto visit_literal = [&](const Literal& lit) {
    if (auto* a = std::get_if<AtomLiteral>(&lit)) visit_atom(a->atom);
  };
  for (const auto& rule : program.rules) {
    if (rule.head) visit_atom(*rule.head);
    for (const auto& element : rule.body) {
      if (auto* a = std::get_if<AtomLiteral>(&element)) {
        visit_atom(a->atom);
      } else if (auto* c = std::get_if<Conditional>(&element)) {
        visit_literal(c->head);
        for (const auto& cond : c->conditions) visit_literal(cond);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Printing

std::string print_string_literal(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string print_comparison(const Comparison& cmp) {
  return print_term(cmp.lhs) + " " + std::string(to_string(cmp.op)) + " " + print_term(cmp.rhs);
}

std::string print_body_element(const BodyElement& element) {
  if (auto* a = std::get_if<AtomLiteral>(&element)) return print_literal(*a);
  if (auto* c = std::get_if<Comparison>(&element)) return print_comparison(*c);
  const auto& cond = std::get<Conditional>(element);
  std::string out = print_literal(cond.head) + " : ";
  for (std::size_t i = 0; i < cond.conditions.size(); ++i) {
    if (i) out += ", ";
    out += print_literal(cond.conditions[i]);
  }
  return out;
}

}  // namespace

ParseResult parse_program(std::string_view text) {
  try {
    Program program = Parser(Lexer(text).run()).run();
    check_arities(program);
    return program;
  } catch (Failure& f) {
    return std::move(f.error);
  }
}

std::string print_term(const Term& term) {
  switch (term.kind) {
    case Term::Kind::symbol:
    case Term::Kind::variable:
      return term.name;
    case Term::Kind::string:
      return print_string_literal(term.name);
    case Term::Kind::integer:
      return std::to_string(term.number);
    case Term::Kind::anonymous:
      return "_";
    case Term::Kind::binary: {
      const Term& rhs = term.operands[1];
      bool wrap = rhs.kind == Term::Kind::binary ||
                  (rhs.kind == Term::Kind::integer && rhs.number < 0);
      std::string right = print_term(rhs);
      if (wrap) right = "(" + right + ")";
      return print_term(term.operands[0]) + term.op + right;
    }
  }
  return {};
}

std::string print_atom(const Atom& atom) {
  std::string out = atom.predicate;
  if (atom.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += print_term(atom.args[i]);
  }
  return out + ')';
}

std::string print_literal(const Literal& literal) {
  if (auto* c = std::get_if<Comparison>(&literal)) return print_comparison(*c);
  const auto& a = std::get<AtomLiteral>(literal);
  return (a.polarity == Polarity::negative ? "not " : "") + print_atom(a.atom);
}

std::string print_rule(const Rule& rule) {
  std::string out;
  if (rule.head) out = print_atom(*rule.head);
  if (!rule.body.empty()) {
    out += rule.head ? " :- " : ":- ";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (i) out += std::holds_alternative<Conditional>(rule.body[i - 1]) ? "; " : ", ";
      out += print_body_element(rule.body[i]);
    }
  }
  return out + ".";
}

std::string print_program(const Program& program) {
  std::string out;
  for (const auto& rule : program.rules) out += print_rule(rule) + "\n";
  for (const auto& show : program.shows) {
    out += "#show";
    if (show.signature) out += " " + to_string(*show.signature);
    out += ".\n";
  }
  return out;
}

}  // namespace spasp::asp
