#include <cctype>
#include <string>
#include <utility>

#include "tempabd/theory.hpp"

namespace tempabd {

namespace {

enum class Tok {
  Ident,
  Var,
  Int,
  LParen,
  RParen,
  Comma,
  Dot,
  Amp,
  Semi,
  LArrow,   // <-
  Implies,  // =>
  Iff,      // <=>
  Eq,       // =
  DColon,   // ::
  RArrow,   // ->
  Dollar,
  Minus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  Token next() {
    skip_space();
    Token t{Tok::End, {}, line_, col_};
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto single = [&](Tok k) {
      advance(1);
      t.kind = k;
      return t;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance(1);
      t.text = std::string(src_.substr(start, pos_ - start));
      t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance(1);
      t.text = std::string(src_.substr(start, pos_ - start));
      t.kind = Tok::Int;
      return t;
    }
    auto starts = [&](std::string_view s) { return src_.substr(pos_, s.size()) == s; };
    if (starts("<=>")) {
      advance(3);
      t.kind = Tok::Iff;
      return t;
    }
    if (starts("<-")) {
      advance(2);
      t.kind = Tok::LArrow;
      return t;
    }
    if (starts("=>")) {
      advance(2);
      t.kind = Tok::Implies;
      return t;
    }
    if (starts("::")) {
      advance(2);
      t.kind = Tok::DColon;
      return t;
    }
    if (starts("->")) {
      advance(2);
      t.kind = Tok::RArrow;
      return t;
    }
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      case '.': return single(Tok::Dot);
      case '&': return single(Tok::Amp);
      case ';': return single(Tok::Semi);
      case '=': return single(Tok::Eq);
      case '$': return single(Tok::Dollar);
      case '-': return single(Tok::Minus);
      default: break;
    }
    throw TheoryError(SourcePos{file_, line_, col_}, std::string("unexpected character '") + c + "'");
  }

  const std::string& file() const { return file_; }

 private:
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "not" || s == "exists" || s == "forall" || s == "true" || s == "false" ||
         s == "fol" || s == "of";
}

class Parser {
 public:
  Parser(std::string_view src, std::string file, VarId first_var)
      : lex_(src, std::move(file)), next_var_(first_var) {
    cur_ = lex_.next();
  }

  VarId next_var() const { return next_var_; }
  bool at_end() const { return cur_.kind == Tok::End; }

  Statement statement() {
    statement_vars_.clear();
    SourcePos pos = here();
    if (cur_.kind == Tok::Ident && cur_.text == "fol") {
      take();
      Formula f = formula();
      expect(Tok::Dot, "'.' after axiom");
      return Axiom{Formula::forall(free_vars(f), f), pos};
    }
    if (cur_.kind == Tok::Ident && cur_.text == "of") {
      take();
      return declaration(pos);
    }
    Formula head = primary();
    if (head.kind() != FormulaKind::Atom) throw error(pos, "rule head must be an atom");
    Formula body = Formula::truth();
    if (cur_.kind == Tok::LArrow) {
      take();
      body = formula();
    }
    expect(Tok::Dot, "'.' after rule");
    return Rule{head, body, pos};
  }

  Formula query() {
    statement_vars_.clear();
    Formula f = formula();
    if (cur_.kind == Tok::Dot) take();
    if (!at_end()) throw error(here(), "unexpected trailing input");
    return f;
  }

  Term lone_term() {
    statement_vars_.clear();
    Term t = term();
    if (!at_end()) throw error(here(), "unexpected trailing input");
    return t;
  }

 private:
  SourcePos here() const { return SourcePos{lex_.file(), cur_.line, cur_.column}; }

  TheoryError error(const SourcePos& pos, const std::string& msg) const { return TheoryError(pos, msg); }

  Token take() {
    Token t = std::move(cur_);
    cur_ = lex_.next();
    return t;
  }

  Token expect(Tok k, const char* what) {
    if (cur_.kind != k) throw error(here(), std::string("expected ") + what);
    return take();
  }

  Statement declaration(const SourcePos& pos) {
    Token name = expect(Tok::Ident, "open function name");
    expect(Tok::DColon, "'::'");
    OpenFunctionDecl d;
    d.name = Symbol(name.text);
    d.pos = pos;
    if (cur_.kind != Tok::RArrow) {
      d.domain_types.push_back(type_spec());
      while (cur_.kind == Tok::Comma) {
        take();
        d.domain_types.push_back(type_spec());
      }
    }
    expect(Tok::RArrow, "'->'");
    d.range_type = type_spec();
    expect(Tok::Dot, "'.' after declaration");
    return d;
  }

  Symbol type_spec() {
    Token t = expect(Tok::Ident, "type predicate");
    expect(Tok::LParen, "'('");
    Token u = expect(Tok::Var, "'_'");
    if (u.text != "_") throw error(here(), "type arguments are written '_'");
    expect(Tok::RParen, "')'");
    return Symbol(t.text);
  }

  // formula := disjunction [('=>' | '<=>') formula]
  Formula formula() {
    Formula lhs = disjunction();
    if (cur_.kind == Tok::Implies) {
      take();
      return Formula::implication(lhs, formula());
    }
    if (cur_.kind == Tok::Iff) {
      take();
      return Formula::equivalence(lhs, formula());
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (cur_.kind == Tok::Semi) {
      take();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? parts.front() : Formula::disjunction(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (cur_.kind == Tok::Amp || cur_.kind == Tok::Comma) {
      take();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? parts.front() : Formula::conjunction(std::move(parts));
  }

  Formula unary() {
    if (cur_.kind == Tok::Ident && cur_.text == "not") {
      take();
      return Formula::negation(unary());
    }
    if (cur_.kind == Tok::Ident && (cur_.text == "exists" || cur_.text == "forall")) {
      bool ex = take().text == "exists";
      expect(Tok::LParen, "'(' after quantifier");
      std::vector<Term> vars;
      scopes_.emplace_back();
      for (;;) {
        Token v = expect(Tok::Var, "quantified variable");
        Term t = Term::variable(next_var_++, Symbol(v.text));
        scopes_.back().emplace_back(v.text, t);
        vars.push_back(t);
        if (cur_.kind != Tok::Comma) break;
        take();
      }
      expect(Tok::RParen, "')'");
      expect(Tok::Dollar, "'$' after quantified variables");
      Formula body = formula();
      scopes_.pop_back();
      return ex ? Formula::exists(std::move(vars), body) : Formula::forall(std::move(vars), body);
    }
    return primary();
  }

  Formula primary() {
    SourcePos pos = here();
    if (cur_.kind == Tok::LParen) {
      take();
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (cur_.kind == Tok::Ident && cur_.text == "true") {
      take();
      return Formula::truth();
    }
    if (cur_.kind == Tok::Ident && cur_.text == "false") {
      take();
      return Formula::falsity();
    }
    Term t = term();
    if (cur_.kind == Tok::Eq) {
      take();
      return Formula::equality(t, term());
    }
    if (!t.is_compound()) throw error(pos, "expected a formula, found term " + t.to_string());
    return Formula::atom(t.functor(), std::vector<Term>(t.args().begin(), t.args().end()));
  }

  Term term() {
    SourcePos pos = here();
    if (cur_.kind == Tok::Minus) {
      take();
      Token n = expect(Tok::Int, "integer after '-'");
      return Term::integer(-std::stoll(n.text));
    }
    if (cur_.kind == Tok::Int) return Term::integer(std::stoll(take().text));
    if (cur_.kind == Tok::Var) return variable(take().text);
    if (cur_.kind != Tok::Ident) throw error(pos, "expected a term");
    if (is_keyword(cur_.text)) throw error(pos, "keyword '" + cur_.text + "' cannot be used as a term");
    Token f = take();
    std::vector<Term> args;
    if (cur_.kind == Tok::LParen) {
      take();
      args.push_back(term());
      while (cur_.kind == Tok::Comma) {
        take();
        args.push_back(term());
      }
      expect(Tok::RParen, "')'");
    }
    return Term::compound(Symbol(f.text), std::move(args));
  }

  Term variable(const std::string& name) {
    if (name == "_") return Term::variable(next_var_++, Symbol("_"));
    for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s)
      for (const auto& [n, t] : *s)
        if (n == name) return t;
    for (const auto& [n, t] : statement_vars_)
      if (n == name) return t;
    Term t = Term::variable(next_var_++, Symbol(name));
    statement_vars_.emplace_back(name, t);
    return t;
  }

  Lexer lex_;
  Token cur_;
  VarId next_var_;
  std::vector<std::pair<std::string, Term>> statement_vars_;
  std::vector<std::vector<std::pair<std::string, Term>>> scopes_;
};

}  // namespace

Theory parse_theory(std::string_view source, std::string_view file, VarId first_var) {
  Parser p(source, std::string(file), first_var);
  Theory t;
  while (!p.at_end()) t.add(p.statement());
  t.note_var_limit(p.next_var());
  t.validate();
  return t;
}

Formula parse_query(std::string_view source, const Theory& theory, VarId& next_var) {
  Parser p(source, "<query>", next_var);
  Formula f = p.query();
  theory.check_arities(f, SourcePos{"<query>", 1, 1});
  next_var = p.next_var();
  return f;
}

Term parse_term(std::string_view source, VarId& next_var) {
  Parser p(source, "<term>", next_var);
  Term t = p.lone_term();
  next_var = p.next_var();
  return t;
}

}  // namespace tempabd
