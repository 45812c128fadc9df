#ifndef FUZZYLOSS_FORMULA_HPP
#define FUZZYLOSS_FORMULA_HPP

#include <cctype>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fuzzyloss {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Abstract syntax of the first-order formula language.
///
/// Nodes are immutable and may share subtrees. Quantifier nodes keep their
/// bound variable in `name()`; atoms keep the predicate name and arguments.
class Formula {
 public:
  enum class Kind { Atom, KnownAtom, Not, And, Or, Implies, Iff, Forall, Exists };

  static FormulaPtr atom(std::string predicate, std::vector<std::string> args) {
    return make(Kind::Atom, std::move(predicate), std::move(args), nullptr, nullptr);
  }
  static FormulaPtr known(std::string predicate, std::vector<std::string> args) {
    return make(Kind::KnownAtom, std::move(predicate), std::move(args), nullptr, nullptr);
  }
  static FormulaPtr negation(FormulaPtr f) { return make(Kind::Not, {}, {}, std::move(f), nullptr); }
  static FormulaPtr binary(Kind k, FormulaPtr a, FormulaPtr b) {
    return make(k, {}, {}, std::move(a), std::move(b));
  }
  static FormulaPtr forall(std::string var, FormulaPtr body) {
    return make(Kind::Forall, std::move(var), {}, std::move(body), nullptr);
  }
  static FormulaPtr exists(std::string var, FormulaPtr body) {
    return make(Kind::Exists, std::move(var), {}, std::move(body), nullptr);
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& args() const { return args_; }
  const FormulaPtr& left() const { return left_; }
  const FormulaPtr& right() const { return right_; }
  /// Body of a quantifier or operand of a negation.
  const FormulaPtr& body() const { return left_; }

  bool is_atom() const { return kind_ == Kind::Atom || kind_ == Kind::KnownAtom; }
  bool is_quantifier() const { return kind_ == Kind::Forall || kind_ == Kind::Exists; }
  bool is_binary() const {
    return kind_ == Kind::And || kind_ == Kind::Or || kind_ == Kind::Implies || kind_ == Kind::Iff;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.kind_ != b.kind_ || a.name_ != b.name_ || a.args_ != b.args_) return false;
    auto same = [](const FormulaPtr& x, const FormulaPtr& y) {
      if (!x || !y) return x == y;
      return *x == *y;
    };
    return same(a.left_, b.left_) && same(a.right_, b.right_);
  }

 private:
  static FormulaPtr make(Kind k, std::string name, std::vector<std::string> args, FormulaPtr l,
                         FormulaPtr r) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = k;
    f->name_ = std::move(name);
    f->args_ = std::move(args);
    f->left_ = std::move(l);
    f->right_ = std::move(r);
    return f;
  }

  Formula() = default;

  Kind kind_ = Kind::Atom;
  std::string name_;
  std::vector<std::string> args_;
  FormulaPtr left_;
  FormulaPtr right_;
};

/// Parse, scoping and arity errors, located at a 1-based line and column.
class FormulaError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnboundVariable, ArityMismatch, ShadowedVariable };

  FormulaError(Kind kind, int line, int column, const std::string& what)
      : std::runtime_error(describe(kind) + " at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + what),
        kind_(kind),
        line_(line),
        column_(column) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string describe(Kind k) {
    switch (k) {
      case Kind::Syntax: return "syntax error";
      case Kind::UnboundVariable: return "unbound variable";
      case Kind::ArityMismatch: return "arity mismatch";
      case Kind::ShadowedVariable: return "shadowed variable";
    }
    return "error";
  }

  Kind kind_;
  int line_;
  int column_;
};

/// Predicate arities seen so far, keyed by name (known predicates carry '@').
using ArityTable = std::map<std::string, std::size_t>;

namespace detail {

struct Token {
  enum class Type {
    Ident, At, LParen, RParen, Comma, Colon, Tilde, Amp, Bar, Arrow, DoubleArrow, Forall, Exists, End
  };
  Type type;
  std::string text;
  int line;
  int column;
};

inline std::string_view token_name(Token::Type t) {
  using T = Token::Type;
  switch (t) {
    case T::Ident: return "identifier";
    case T::At: return "'@'";
    case T::LParen: return "'('";
    case T::RParen: return "')'";
    case T::Comma: return "','";
    case T::Colon: return "':'";
    case T::Tilde: return "'~'";
    case T::Amp: return "'&'";
    case T::Bar: return "'|'";
    case T::Arrow: return "'->'";
    case T::DoubleArrow: return "'<->'";
    case T::Forall: return "'forall'";
    case T::Exists: return "'exists'";
    case T::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> tokenize(std::string_view text, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  int column = 1;
  std::size_t i = 0;
  auto push = [&](Token::Type t, std::string s, int col) { out.push_back({t, std::move(s), line, col}); };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++column;
      continue;
    }
    const int col = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      std::string word(text.substr(i, j - i));
      column += static_cast<int>(j - i);
      i = j;
      if (word == "forall") {
        push(Token::Type::Forall, word, col);
      } else if (word == "exists") {
        push(Token::Type::Exists, word, col);
      } else {
        push(Token::Type::Ident, word, col);
      }
      continue;
    }
    if (text.substr(i, 3) == "<->") {
      push(Token::Type::DoubleArrow, "<->", col);
      i += 3;
      column += 3;
      continue;
    }
    if (text.substr(i, 2) == "->") {
      push(Token::Type::Arrow, "->", col);
      i += 2;
      column += 2;
      continue;
    }
    Token::Type t;
    switch (c) {
      case '@': t = Token::Type::At; break;
      case '(': t = Token::Type::LParen; break;
      case ')': t = Token::Type::RParen; break;
      case ',': t = Token::Type::Comma; break;
      case ':': t = Token::Type::Colon; break;
      case '~': t = Token::Type::Tilde; break;
      case '&': t = Token::Type::Amp; break;
      case '|': t = Token::Type::Bar; break;
      default:
        throw FormulaError(FormulaError::Kind::Syntax, line, col,
                           std::string("unexpected character '") + c + "'");
    }
    push(t, std::string(1, c), col);
    ++i;
    ++column;
  }
  out.push_back({Token::Type::End, "", line, column});
  return out;
}

// Recursive descent, lowest precedence first: <->, ->, |, &, then ~ and
// quantifiers. A quantifier body extends as far right as possible.
class Parser {
 public:
  Parser(std::vector<Token> tokens, ArityTable& arities)
      : tokens_(std::move(tokens)), arities_(arities) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_iff();
    if (peek().type != Token::Type::End) fail_expected("end of input");
    return f;
  }

 private:
  using T = Token::Type;

  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }
  bool accept(T t) {
    if (peek().type != t) return false;
    ++pos_;
    return true;
  }
  const Token& expect(T t) {
    if (peek().type != t) fail_expected(token_name(t));
    return advance();
  }
  [[noreturn]] void fail_expected(std::string_view what) const {
    const Token& tok = peek();
    throw FormulaError(FormulaError::Kind::Syntax, tok.line, tok.column,
                       "expected " + std::string(what) + ", found " +
                           std::string(token_name(tok.type)) +
                           (tok.text.empty() ? "" : " '" + tok.text + "'"));
  }

  FormulaPtr parse_iff() {
    FormulaPtr lhs = parse_implies();
    while (accept(T::DoubleArrow)) {
      lhs = Formula::binary(Formula::Kind::Iff, lhs, parse_implies());
    }
    return lhs;
  }

  FormulaPtr parse_implies() {
    FormulaPtr lhs = parse_or();
    if (accept(T::Arrow)) return Formula::binary(Formula::Kind::Implies, lhs, parse_implies());
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr lhs = parse_and();
    while (accept(T::Bar)) lhs = Formula::binary(Formula::Kind::Or, lhs, parse_and());
    return lhs;
  }

  FormulaPtr parse_and() {
    FormulaPtr lhs = parse_unary();
    while (accept(T::Amp)) lhs = Formula::binary(Formula::Kind::And, lhs, parse_unary());
    return lhs;
  }

  FormulaPtr parse_unary() {
    if (accept(T::Tilde)) return Formula::negation(parse_unary());
    if (peek().type == T::Forall || peek().type == T::Exists) {
      const bool universal = advance().type == T::Forall;
      const Token& var = expect(T::Ident);
      for (const auto& bound : scope_) {
        if (bound == var.text) {
          throw FormulaError(FormulaError::Kind::ShadowedVariable, var.line, var.column,
                             "'" + var.text + "' is already bound by an enclosing quantifier");
        }
      }
      expect(T::Colon);
      scope_.push_back(var.text);
      FormulaPtr body = parse_iff();
      scope_.pop_back();
      return universal ? Formula::forall(var.text, body) : Formula::exists(var.text, body);
    }
    if (accept(T::LParen)) {
      FormulaPtr inner = parse_iff();
      expect(T::RParen);
      return inner;
    }
    return parse_atom();
  }

  FormulaPtr parse_atom() {
    const bool is_known = accept(T::At);
    if (peek().type != T::Ident) fail_expected(is_known ? "predicate name" : "formula");
    const Token& name = advance();
    expect(T::LParen);
    std::vector<std::string> args;
    do {
      const Token& arg = expect(T::Ident);
      bool bound = false;
      for (const auto& v : scope_) bound = bound || v == arg.text;
      if (!bound) {
        throw FormulaError(FormulaError::Kind::UnboundVariable, arg.line, arg.column,
                           "'" + arg.text + "' is not bound by any quantifier");
      }
      args.push_back(arg.text);
    } while (accept(T::Comma));
    expect(T::RParen);

    const std::string key = (is_known ? "@" : "") + name.text;
    auto [it, inserted] = arities_.emplace(key, args.size());
    if (!inserted && it->second != args.size()) {
      throw FormulaError(FormulaError::Kind::ArityMismatch, name.line, name.column,
                         "'" + key + "' used with " + std::to_string(args.size()) +
                             " arguments, previously " + std::to_string(it->second));
    }
    return is_known ? Formula::known(name.text, std::move(args))
                    : Formula::atom(name.text, std::move(args));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ArityTable& arities_;
  std::vector<std::string> scope_;
};

}  // namespace detail

/// Parses one closed formula.
///
/// Grammar: `forall v:` / `exists v:` prefixes, infix `&`, `|`, `->`, `<->`,
/// prefix `~`, atoms `Name(v, ...)`, known predicates `@Name(v, ...)`.
/// Precedence from tightest: ~, &, |, ->, <->; `->` associates to the right.
inline FormulaPtr parse_formula(std::string_view text, ArityTable& arities, int first_line = 1) {
  detail::Parser parser(detail::tokenize(text, first_line), arities);
  return parser.parse();
}

inline FormulaPtr parse_formula(std::string_view text) {
  ArityTable arities;
  return parse_formula(text, arities);
}

/// Fully parenthesised rendering that parses back to the same tree.
inline std::string to_string(const Formula& f) {
  using K = Formula::Kind;
  auto join_args = [&] {
    std::string out = f.name() + "(";
    for (std::size_t i = 0; i < f.args().size(); ++i) {
      if (i) out += ", ";
      out += f.args()[i];
    }
    return out + ")";
  };
  switch (f.kind()) {
    case K::Atom: return join_args();
    case K::KnownAtom: return "@" + join_args();
    case K::Not: return "~" + to_string(*f.body());
    case K::And: return "(" + to_string(*f.left()) + " & " + to_string(*f.right()) + ")";
    case K::Or: return "(" + to_string(*f.left()) + " | " + to_string(*f.right()) + ")";
    case K::Implies: return "(" + to_string(*f.left()) + " -> " + to_string(*f.right()) + ")";
    case K::Iff: return "(" + to_string(*f.left()) + " <-> " + to_string(*f.right()) + ")";
    case K::Forall: return "(forall " + f.name() + ": " + to_string(*f.body()) + ")";
    case K::Exists: return "(exists " + f.name() + ": " + to_string(*f.body()) + ")";
  }
  return {};
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_FORMULA_HPP
