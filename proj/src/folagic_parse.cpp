#include <cctype>
#include <set>
#include <sstream>

#include "ell/folagic.hpp"
#include "ell/util.hpp"

namespace ell {

FormulaPtr f_true() {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::True;
  return f;
}
FormulaPtr f_false() {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::False;
  return f;
}
FormulaPtr f_atom(int symbol, std::vector<std::string> vars) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->symbol = symbol;
  f->vars = std::move(vars);
  return f;
}
FormulaPtr f_eq(std::string a, std::string b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Eq;
  f->vars = {std::move(a), std::move(b)};
  return f;
}
FormulaPtr f_not(FormulaPtr x) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->children = {std::move(x)};
  return f;
}
FormulaPtr f_and(std::vector<FormulaPtr> children) {
  if (children.empty()) return f_true();
  if (children.size() == 1) return children[0];
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::And;
  f->children = std::move(children);
  return f;
}
FormulaPtr f_or(std::vector<FormulaPtr> children) {
  if (children.empty()) return f_false();
  if (children.size() == 1) return children[0];
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Or;
  f->children = std::move(children);
  return f;
}
FormulaPtr f_exists(std::string v, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Exists;
  f->qvar = std::move(v);
  f->children = {std::move(body)};
  return f;
}
FormulaPtr f_forall(std::string v, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Forall;
  f->qvar = std::move(v);
  f->children = {std::move(body)};
  return f;
}
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return f_or({f_not(std::move(a)), std::move(b)});
}

namespace {

void collect_free(const FormulaPtr& f, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
  auto is_bound = [&](const std::string& v) {
    for (const auto& b : bound)
      if (b == v) return true;
    return false;
  };
  switch (f->kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::Eq:
      for (const auto& v : f->vars)
        if (!is_bound(v) &&
            std::find(out.begin(), out.end(), v) == out.end())
          out.push_back(v);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      bound.push_back(f->qvar);
      collect_free(f->children[0], bound, out);
      bound.pop_back();
      break;
    default:
      for (const auto& c : f->children) collect_free(c, bound, out);
  }
}

void collect_names(const FormulaPtr& f, std::set<std::string>& names) {
  for (const auto& v : f->vars) names.insert(v);
  if (!f->qvar.empty()) names.insert(f->qvar);
  for (const auto& c : f->children) collect_names(c, names);
}

FormulaPtr rename_free(const FormulaPtr& f, const std::string& from,
                       const std::string& to) {
  if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) {
    if (f->qvar == from) return f;  // shadowed
    auto g = std::make_shared<Formula>(*f);
    g->children = {rename_free(f->children[0], from, to)};
    return g;
  }
  auto g = std::make_shared<Formula>(*f);
  for (auto& v : g->vars)
    if (v == from) v = to;
  std::vector<FormulaPtr> cs;
  for (const auto& c : f->children) cs.push_back(rename_free(c, from, to));
  g->children = std::move(cs);
  return g;
}

}  // namespace

std::vector<std::string> free_vars(const FormulaPtr& f) {
  std::vector<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

struct Token {
  enum class Type { Name, Int, LParen, RParen, Comma, Dot, And, Or, Not,
                    Arrow, Eq, Neq, Ge, End };
  Type type;
  std::string text;
  int64_t value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() &&
           (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' ||
            s_[pos_] == '\r')) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= s_.size()) {
      tok_.type = Token::Type::End;
      return;
    }
    char c = s_[pos_];
    auto single = [&](Token::Type t) {
      tok_.type = t;
      tok_.text = std::string(1, c);
      ++pos_;
      ++col_;
    };
    if (c == '(') return single(Token::Type::LParen);
    if (c == ')') return single(Token::Type::RParen);
    if (c == ',') return single(Token::Type::Comma);
    if (c == '.') return single(Token::Type::Dot);
    if (c == '&') return single(Token::Type::And);
    if (c == '|') return single(Token::Type::Or);
    if (c == '=') return single(Token::Type::Eq);
    if (c == '!') {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
        tok_.type = Token::Type::Neq;
        tok_.text = "!=";
        pos_ += 2;
        col_ += 2;
        return;
      }
      return single(Token::Type::Not);
    }
    if (c == '-') {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
        tok_.type = Token::Type::Arrow;
        tok_.text = "->";
        pos_ += 2;
        col_ += 2;
        return;
      }
      throw ParseError("unexpected '-'", line_, col_);
    }
    if (c == '>') {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
        tok_.type = Token::Type::Ge;
        tok_.text = ">=";
        pos_ += 2;
        col_ += 2;
        return;
      }
      throw ParseError("unexpected '>'", line_, col_);
    }
    if (std::isdigit(uint8_t(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(uint8_t(s_[pos_]))) {
        ++pos_;
        ++col_;
      }
      tok_.type = Token::Type::Int;
      tok_.text = s_.substr(start, pos_ - start);
      tok_.value = std::stoll(tok_.text);
      return;
    }
    if (std::isalpha(uint8_t(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(uint8_t(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
        ++col_;
      }
      // Indexed symbol names carry a bracket suffix, e.g. E[0,1,1,0].
      if (pos_ < s_.size() && s_[pos_] == '[') {
        while (pos_ < s_.size() && s_[pos_] != ']') {
          ++pos_;
          ++col_;
        }
        if (pos_ >= s_.size()) throw ParseError("unterminated '['", line_, col_);
        ++pos_;
        ++col_;
      }
      tok_.type = Token::Type::Name;
      tok_.text = s_.substr(start, pos_ - start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const Signature& sig) : lex_(text), sig_(sig) {}

  FormulaPtr parse() {
    auto f = implied();
    if (lex_.peek().type != Token::Type::End)
      throw ParseError("trailing input", lex_.peek().line, lex_.peek().col);
    return f;
  }

 private:
  FormulaPtr implied() {
    auto lhs = disjunction();
    if (lex_.peek().type == Token::Type::Arrow) {
      lex_.take();
      return f_implies(lhs, implied());
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    std::vector<FormulaPtr> parts{conjunction()};
    while (lex_.peek().type == Token::Type::Or) {
      lex_.take();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts[0] : f_or(std::move(parts));
  }

  FormulaPtr conjunction() {
    std::vector<FormulaPtr> parts{unary()};
    while (lex_.peek().type == Token::Type::And) {
      lex_.take();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? parts[0] : f_and(std::move(parts));
  }

  FormulaPtr unary() {
    const Token& t = lex_.peek();
    if (t.type == Token::Type::Not) {
      lex_.take();
      return f_not(unary());
    }
    if (t.type == Token::Type::Name && (t.text == "exists" || t.text == "forall"))
      return quantified();
    return atomish();
  }

  FormulaPtr quantified() {
    Token q = lex_.take();
    bool is_exists = q.text == "exists";
    // counting forms: exists>=K, exists=K (K = 1 supported)
    int64_t at_least = -1, exactly = -1;
    if (lex_.peek().type == Token::Type::Ge) {
      lex_.take();
      at_least = expect_int("count after '>='");
    } else if (lex_.peek().type == Token::Type::Eq) {
      lex_.take();
      exactly = expect_int("count after '='");
    }
    if ((at_least >= 0 || exactly >= 0) && !is_exists)
      throw ParseError("counting is only supported on exists", q.line, q.col);
    if (exactly >= 0 && exactly != 1)
      throw ParseError("only exists=1 is supported", q.line, q.col);
    if (at_least == 0) throw ParseError("exists>=0 is trivial; not supported", q.line, q.col);

    std::string var = expect_name("variable");
    expect(Token::Type::Dot, "'.' after quantified variable");
    FormulaPtr body = implied();

    if (exactly == 1) {
      // exists x. (phi & forall u. (phi[x:=u] -> u=x))
      std::string u = fresh(var, body);
      return f_exists(var, f_and({body, f_forall(u, f_implies(rename_free(body, var, u),
                                                              f_eq(u, var)))}));
    }
    if (at_least > 0) {
      // exists x1..xm. (pairwise distinct & phi[x:=xi])
      std::vector<std::string> names;
      FormulaPtr probe = body;
      for (int64_t i = 0; i < at_least; ++i) {
        std::string ni = fresh(var + "_" + std::to_string(i + 1), probe);
        names.push_back(ni);
        probe = f_and({probe, f_eq(ni, ni)});  // reserve the name
      }
      std::vector<FormulaPtr> parts;
      for (size_t i = 0; i < names.size(); ++i)
        for (size_t j = i + 1; j < names.size(); ++j)
          parts.push_back(f_not(f_eq(names[i], names[j])));
      for (const auto& ni : names) parts.push_back(rename_free(body, var, ni));
      FormulaPtr out = f_and(std::move(parts));
      for (auto it = names.rbegin(); it != names.rend(); ++it)
        out = f_exists(*it, out);
      return out;
    }
    return is_exists ? f_exists(var, body) : f_forall(var, body);
  }

  FormulaPtr atomish() {
    Token t = lex_.take();
    if (t.type == Token::Type::LParen) {
      auto f = implied();
      expect(Token::Type::RParen, "')'");
      return f;
    }
    if (t.type != Token::Type::Name)
      throw ParseError("expected a formula", t.line, t.col);
    if (t.text == "true") return f_true();
    if (t.text == "false") return f_false();
    if (lex_.peek().type == Token::Type::LParen) {
      // relation atom
      int sym = sig_.find(t.text);
      if (sym < 0)
        throw ParseError("unknown relation symbol '" + t.text + "'", t.line, t.col);
      lex_.take();
      std::vector<std::string> args;
      if (lex_.peek().type != Token::Type::RParen) {
        args.push_back(expect_name("variable"));
        while (lex_.peek().type == Token::Type::Comma) {
          lex_.take();
          args.push_back(expect_name("variable"));
        }
      }
      expect(Token::Type::RParen, "')'");
      if (int(args.size()) != sig_.symbols[sym].arity)
        throw ParseError("arity mismatch for '" + t.text + "': got " +
                             std::to_string(args.size()) + ", want " +
                             std::to_string(sig_.symbols[sym].arity),
                         t.line, t.col);
      auto f = f_atom(sym, std::move(args));
      const_cast<Formula*>(f.get())->line = t.line;
      const_cast<Formula*>(f.get())->col = t.col;
      return f;
    }
    // equality or inequality
    if (lex_.peek().type == Token::Type::Eq) {
      lex_.take();
      return f_eq(t.text, expect_name("variable"));
    }
    if (lex_.peek().type == Token::Type::Neq) {
      lex_.take();
      return f_not(f_eq(t.text, expect_name("variable")));
    }
    throw ParseError("expected '(' or '=' after '" + t.text + "'", t.line, t.col);
  }

  std::string fresh(const std::string& base, const FormulaPtr& ctx) {
    std::set<std::string> used;
    collect_names(ctx, used);
    std::string name = base;
    int i = 0;
    while (used.count(name)) name = base + "_" + std::to_string(++i);
    return name;
  }

  void expect(Token::Type type, const std::string& what) {
    Token t = lex_.take();
    if (t.type != type) throw ParseError("expected " + what, t.line, t.col);
  }
  std::string expect_name(const std::string& what) {
    Token t = lex_.take();
    if (t.type != Token::Type::Name)
      throw ParseError("expected " + what, t.line, t.col);
    return t.text;
  }
  int64_t expect_int(const std::string& what) {
    Token t = lex_.take();
    if (t.type != Token::Type::Int)
      throw ParseError("expected " + what, t.line, t.col);
    return t.value;
  }

  Lexer lex_;
  const Signature& sig_;
};

void print_rec(std::ostringstream& os, const FormulaPtr& f, const Signature& sig,
               bool parens_if_compound) {
  auto compound = [](const FormulaPtr& g) {
    switch (g->kind) {
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Exists:
      case Formula::Kind::Forall:
      case Formula::Kind::Eq:
        return true;
      default:
        return false;
    }
  };
  switch (f->kind) {
    case Formula::Kind::True:
      os << "true";
      break;
    case Formula::Kind::False:
      os << "false";
      break;
    case Formula::Kind::Atom: {
      os << sig.symbols[f->symbol].name << "(";
      for (size_t i = 0; i < f->vars.size(); ++i)
        os << (i ? "," : "") << f->vars[i];
      os << ")";
      break;
    }
    case Formula::Kind::Eq:
      if (parens_if_compound) os << "(";
      os << f->vars[0] << "=" << f->vars[1];
      if (parens_if_compound) os << ")";
      break;
    case Formula::Kind::Not:
      os << "!";
      print_rec(os, f->children[0], sig, true);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      if (parens_if_compound) os << "(";
      const char* sep = f->kind == Formula::Kind::And ? " & " : " | ";
      for (size_t i = 0; i < f->children.size(); ++i) {
        if (i) os << sep;
        bool need = compound(f->children[i]) ||
                    (f->kind == Formula::Kind::And &&
                     f->children[i]->kind == Formula::Kind::Or);
        print_rec(os, f->children[i], sig, need);
      }
      if (parens_if_compound) os << ")";
      break;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (parens_if_compound) os << "(";
      os << (f->kind == Formula::Kind::Exists ? "exists " : "forall ") << f->qvar
         << ". ";
      print_rec(os, f->children[0], sig, false);
      if (parens_if_compound) os << ")";
      break;
    }
  }
}

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Signature& sig) {
  Parser p(text, sig);
  return p.parse();
}

std::string print_formula(const FormulaPtr& f, const Signature& sig) {
  std::ostringstream os;
  print_rec(os, f, sig, false);
  return os.str();
}

std::string PrefixClass::label() const {
  if (!prenex) return "non-prenex";
  if (blocks == 0) return "Sigma0/Pi0";
  return (leading_exists ? "Sigma" : "Pi") + std::to_string(blocks);
}

namespace {

bool quantifier_free(const FormulaPtr& f) {
  if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall)
    return false;
  for (const auto& c : f->children)
    if (!quantifier_free(c)) return false;
  return true;
}

}  // namespace

PrefixClass prefix_class(const FormulaPtr& f) {
  PrefixClass out;
  const Formula* cur = f.get();
  bool first = true;
  bool block_exists = false;
  while (cur->kind == Formula::Kind::Exists || cur->kind == Formula::Kind::Forall) {
    bool is_exists = cur->kind == Formula::Kind::Exists;
    if (first) {
      out.leading_exists = is_exists;
      out.blocks = 1;
      block_exists = is_exists;
      first = false;
    } else if (is_exists != block_exists) {
      ++out.blocks;
      block_exists = is_exists;
    }
    cur = cur->children[0].get();
  }
  // the matrix must be quantifier-free for a prenex classification
  FormulaPtr matrix(f, cur);  // aliasing shared_ptr
  if (!quantifier_free(matrix)) {
    out.prenex = false;
    out.blocks = 0;
    out.leading_exists = false;
  }
  return out;
}

}  // namespace ell
