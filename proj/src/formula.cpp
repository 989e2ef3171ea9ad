#include "tempabd/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempabd {

struct Formula::Node {
  FormulaKind kind;
  Symbol pred;
  std::vector<Term> terms;  // atom args, equality sides, or binder vars
  std::vector<Formula> kids;
};

namespace {

std::shared_ptr<Formula::Node> make(FormulaKind k) {
  auto n = std::make_shared<Formula::Node>();
  n->kind = k;
  return n;
}

}  // namespace

Formula Formula::truth() {
  static const Formula t(make(FormulaKind::Truth));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(make(FormulaKind::Falsity));
  return f;
}

Formula Formula::atom(Symbol predicate, std::vector<Term> args) {
  auto n = make(FormulaKind::Atom);
  n->pred = predicate;
  n->terms = std::move(args);
  return Formula(std::move(n));
}

Formula Formula::equality(Term lhs, Term rhs) {
  auto n = make(FormulaKind::Equality);
  n->terms = {std::move(lhs), std::move(rhs)};
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = make(FormulaKind::Not);
  n->kids = {std::move(f)};
  return Formula(std::move(n));
}

Formula Formula::conjunction(std::vector<Formula> fs) {
  auto n = make(FormulaKind::And);
  n->kids = std::move(fs);
  return Formula(std::move(n));
}

Formula Formula::disjunction(std::vector<Formula> fs) {
  auto n = make(FormulaKind::Or);
  n->kids = std::move(fs);
  return Formula(std::move(n));
}

Formula Formula::implication(Formula ante, Formula cons) {
  auto n = make(FormulaKind::Implies);
  n->kids = {std::move(ante), std::move(cons)};
  return Formula(std::move(n));
}

Formula Formula::equivalence(Formula lhs, Formula rhs) {
  auto n = make(FormulaKind::Iff);
  n->kids = {std::move(lhs), std::move(rhs)};
  return Formula(std::move(n));
}

Formula Formula::exists(std::vector<Term> vars, Formula body) {
  if (vars.empty()) return body;
  auto n = make(FormulaKind::Exists);
  n->terms = std::move(vars);
  n->kids = {std::move(body)};
  return Formula(std::move(n));
}

Formula Formula::forall(std::vector<Term> vars, Formula body) {
  if (vars.empty()) return body;
  auto n = make(FormulaKind::Forall);
  n->terms = std::move(vars);
  n->kids = {std::move(body)};
  return Formula(std::move(n));
}

FormulaKind Formula::kind() const { return node_->kind; }
Symbol Formula::predicate() const { return node_->pred; }
std::span<const Term> Formula::args() const { return node_->terms; }
const Term& Formula::lhs() const { return node_->terms[0]; }
const Term& Formula::rhs() const { return node_->terms[1]; }
std::span<const Formula> Formula::children() const { return node_->kids; }
std::span<const Term> Formula::vars() const { return node_->terms; }

namespace {

int level(const Formula& f);

// Binding strength: 1 implication/equivalence/quantifier, 2 or, 3 and, 4 unary.
int level(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Implies:
    case FormulaKind::Iff:
    case FormulaKind::Exists:
    case FormulaKind::Forall: return 1;
    case FormulaKind::Or:
      if (f.children().size() == 1) return level(f.child(0));
      return f.children().empty() ? 4 : 2;
    case FormulaKind::And:
      if (f.children().size() == 1) return level(f.child(0));
      return f.children().empty() ? 4 : 3;
    default: return 4;
  }
}

void print(const Formula& f, std::string& out);

void print_at(const Formula& f, int min_level, std::string& out) {
  bool paren = level(f) < min_level;
  if (paren) out += '(';
  print(f, out);
  if (paren) out += ')';
}

void print_terms(std::span<const Term> ts, std::string& out) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ',';
    out += ts[i].to_string();
  }
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FormulaKind::Truth: out += "true"; break;
    case FormulaKind::Falsity: out += "false"; break;
    case FormulaKind::Atom:
      out += f.predicate().str();
      if (!f.args().empty()) {
        out += '(';
        print_terms(f.args(), out);
        out += ')';
      }
      break;
    case FormulaKind::Equality:
      out += f.lhs().to_string();
      out += '=';
      out += f.rhs().to_string();
      break;
    case FormulaKind::Not:
      out += "not ";
      print_at(f.child(0), 4, out);
      break;
    case FormulaKind::And:
    case FormulaKind::Or: {
      bool is_and = f.kind() == FormulaKind::And;
      if (f.children().empty()) {
        out += is_and ? "true" : "false";
        break;
      }
      if (f.children().size() == 1) {
        // Singleton junctions have no concrete syntax; print the lone child.
        print(f.child(0), out);
        break;
      }
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += is_and ? " & " : " ; ";
        print_at(f.child(i), is_and ? 4 : 3, out);
      }
      break;
    }
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      print_at(f.child(0), 2, out);
      out += f.kind() == FormulaKind::Implies ? " => " : " <=> ";
      print_at(f.child(1), 1, out);
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      out += f.kind() == FormulaKind::Exists ? "exists(" : "forall(";
      print_terms(f.vars(), out);
      out += ")$ ";
      print_at(f.body(), 1, out);
      break;
  }
}

Term rename_term(const Term& t, const VarMap& m) {
  if (t.is_var()) {
    auto it = m.find(t.var_id());
    return it == m.end() ? t : it->second;
  }
  if (!t.is_compound() || t.ground()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(rename_term(a, m));
  return Term::compound(t.functor(), std::move(args));
}

template <class TermFn>
Formula map_formula(const Formula& f, const TermFn& fn, const VarMap* binders) {
  auto map_kids = [&] {
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const Formula& k : f.children()) kids.push_back(map_formula(k, fn, binders));
    return kids;
  };
  switch (f.kind()) {
    case FormulaKind::Truth:
    case FormulaKind::Falsity: return f;
    case FormulaKind::Atom: {
      std::vector<Term> args;
      args.reserve(f.args().size());
      for (const Term& a : f.args()) args.push_back(fn(a));
      return Formula::atom(f.predicate(), std::move(args));
    }
    case FormulaKind::Equality: return Formula::equality(fn(f.lhs()), fn(f.rhs()));
    case FormulaKind::Not: return Formula::negation(map_formula(f.child(0), fn, binders));
    case FormulaKind::And: return Formula::conjunction(map_kids());
    case FormulaKind::Or: return Formula::disjunction(map_kids());
    case FormulaKind::Implies: {
      auto k = map_kids();
      return Formula::implication(k[0], k[1]);
    }
    case FormulaKind::Iff: {
      auto k = map_kids();
      return Formula::equivalence(k[0], k[1]);
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<Term> vars;
      for (const Term& v : f.vars()) {
        if (binders) {
          auto it = binders->find(v.var_id());
          if (it != binders->end()) {
            if (it->second.is_var()) vars.push_back(it->second);
            continue;
          }
        }
        vars.push_back(v);
      }
      Formula body = map_formula(f.body(), fn, binders);
      return f.kind() == FormulaKind::Exists ? Formula::exists(std::move(vars), body)
                                             : Formula::forall(std::move(vars), body);
    }
  }
  return f;
}

void add_unique(std::vector<Term>& out, const Term& v) {
  for (const Term& o : out)
    if (o.var_id() == v.var_id()) return;
  out.push_back(v);
}

void free_vars_rec(const Formula& f, std::vector<VarId>& bound, std::vector<Term>& out) {
  auto visit_term = [&](const Term& t, auto&& self) -> void {
    if (t.is_var()) {
      for (VarId b : bound)
        if (b == t.var_id()) return;
      add_unique(out, t);
    } else if (t.is_compound() && !t.ground()) {
      for (const Term& a : t.args()) self(a, self);
    }
  };
  switch (f.kind()) {
    case FormulaKind::Atom:
      for (const Term& a : f.args()) visit_term(a, visit_term);
      break;
    case FormulaKind::Equality:
      visit_term(f.lhs(), visit_term);
      visit_term(f.rhs(), visit_term);
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::size_t mark = bound.size();
      for (const Term& v : f.vars()) bound.push_back(v.var_id());
      free_vars_rec(f.body(), bound, out);
      bound.resize(mark);
      break;
    }
    default:
      for (const Formula& k : f.children()) free_vars_rec(k, bound, out);
  }
}

struct AlphaMap {
  std::unordered_map<VarId, VarId> fwd, bwd;
  bool link(VarId a, VarId b) {
    auto f = fwd.find(a);
    auto r = bwd.find(b);
    if (f == fwd.end() && r == bwd.end()) {
      fwd[a] = b;
      bwd[b] = a;
      return true;
    }
    return f != fwd.end() && r != bwd.end() && f->second == b && r->second == a;
  }
};

bool alpha_terms(const Term& a, const Term& b, AlphaMap& m) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Variable: return m.link(a.var_id(), b.var_id());
    case TermKind::Integer: return a.int_value() == b.int_value();
    case TermKind::Compound:
      if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (!alpha_terms(a.arg(i), b.arg(i), m)) return false;
      return true;
  }
  return false;
}

bool alpha_rec(const Formula& a, const Formula& b, AlphaMap& m) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::Truth:
    case FormulaKind::Falsity: return true;
    case FormulaKind::Atom:
      if (a.predicate() != b.predicate() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!alpha_terms(a.args()[i], b.args()[i], m)) return false;
      return true;
    case FormulaKind::Equality:
      return alpha_terms(a.lhs(), b.lhs(), m) && alpha_terms(a.rhs(), b.rhs(), m);
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      if (a.vars().size() != b.vars().size()) return false;
      for (std::size_t i = 0; i < a.vars().size(); ++i)
        if (!m.link(a.vars()[i].var_id(), b.vars()[i].var_id())) return false;
      return alpha_rec(a.body(), b.body(), m);
    default:
      if (a.children().size() != b.children().size()) return false;
      for (std::size_t i = 0; i < a.children().size(); ++i)
        if (!alpha_rec(a.child(i), b.child(i), m)) return false;
      return true;
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

void Formula::collect_free_vars(std::vector<Term>& out) const {
  std::vector<VarId> bound;
  free_vars_rec(*this, bound, out);
}

std::vector<Term> free_vars(const Formula& f) {
  std::vector<Term> out;
  f.collect_free_vars(out);
  return out;
}

Formula rename(const Formula& f, const VarMap& m) {
  if (m.empty()) return f;
  return map_formula(f, [&](const Term& t) { return rename_term(t, m); }, &m);
}

Formula apply(const Substitution& s, const Formula& f) {
  if (s.size() == 0) return f;
  return map_formula(f, [&](const Term& t) { return s.apply(t); }, nullptr);
}

bool alpha_equivalent(const Formula& a, const Formula& b) {
  AlphaMap m;
  return alpha_rec(a, b, m);
}

namespace {

void all_vars_term(const Term& t, std::vector<VarId>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var_id()) == out.end()) out.push_back(t.var_id());
  } else if (t.is_compound() && !t.ground()) {
    for (const Term& a : t.args()) all_vars_term(a, out);
  }
}

void all_vars_rec(const Formula& f, std::vector<VarId>& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      for (const Term& a : f.args()) all_vars_term(a, out);
      break;
    case FormulaKind::Equality:
      all_vars_term(f.lhs(), out);
      all_vars_term(f.rhs(), out);
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      for (const Term& v : f.vars()) all_vars_term(v, out);
      all_vars_rec(f.body(), out);
      break;
    default:
      for (const Formula& k : f.children()) all_vars_rec(k, out);
  }
}

}  // namespace

std::vector<VarId> all_vars(const Formula& f) {
  std::vector<VarId> out;
  all_vars_rec(f, out);
  return out;
}

Formula map_terms(const Formula& f, const std::function<Term(const Term&)>& fn) {
  return map_formula(f, fn, nullptr);
}

}  // namespace tempabd
