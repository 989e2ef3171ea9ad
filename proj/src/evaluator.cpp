#include "tempabd/evaluator.hpp"

#include <algorithm>
#include <stdexcept>

#include "tempabd/temporal.hpp"

namespace tempabd {

namespace {

VarId max_var(const Formula& f) {
  VarId m = 0;
  for (VarId v : all_vars(f)) m = std::max(m, v + 1);
  return m;
}

bool builtin_holds(Symbol p, std::span<const Term> args) {
  if (p.str() == "int") return ground_interval(args[0]).has_value();
  if (auto r = try_relation(p.str())) {
    auto a = ground_interval(args[0]);
    auto b = ground_interval(args[1]);
    return a && b && holds(*r, *a, *b);
  }
  if (auto q = try_property(p.str())) {
    auto a = ground_interval(args[0]);
    return a && holds(*q, *a);
  }
  throw std::logic_error("unknown builtin " + p.str());
}

}  // namespace

Evaluator::Evaluator(const Theory& theory, const AtomSet* atoms, std::vector<Term> domain)
    : theory_(theory), atoms_(atoms), domain_(std::move(domain)), next_var_(theory.var_limit()) {
  for (Symbol p : theory.defined_predicates()) {
    auto& list = rules_[p];
    for (const Rule& r : theory.rules_for(p)) {
      list.emplace_back(r, all_vars(Formula::conjunction({r.head, r.body})));
    }
  }
}

Term Evaluator::deref(const Term& t) const {
  Term cur = t;
  while (cur.is_var()) {
    auto it = env_.find(cur.var_id());
    if (it == env_.end()) break;
    cur = it->second;
  }
  return cur;
}

Term Evaluator::resolve(const Term& t) const {
  Term d = deref(t);
  if (!d.is_compound() || d.ground()) return d;
  std::vector<Term> args;
  args.reserve(d.arity());
  for (const Term& a : d.args()) args.push_back(resolve(a));
  return Term::compound(d.functor(), std::move(args));
}

void Evaluator::undo(std::size_t m) {
  while (trail_.size() > m) {
    env_.erase(trail_.back());
    trail_.pop_back();
  }
}

Formula Evaluator::fresh(const Formula& f, const std::vector<VarId>& vars) {
  VarMap m;
  for (VarId v : vars) m.emplace(v, Term::variable(next_var_++));
  return rename(f, m);
}

bool Evaluator::closed(const Formula& f) const {
  for (const Term& v : free_vars(f)) {
    if (!resolve(v).ground()) return false;
  }
  return true;
}

std::optional<VarId> Evaluator::first_unbound(const Formula& f) const {
  for (const Term& v : free_vars(f)) {
    Term r = resolve(v);
    if (r.ground()) continue;
    std::vector<VarId> ids;
    r.collect_vars(ids);
    return ids.front();
  }
  return std::nullopt;
}

int Evaluator::readiness(const Formula& f) const {
  switch (f.kind()) {
    case FormulaKind::Truth:
    case FormulaKind::Falsity:
    case FormulaKind::Equality:
      return 0;
    case FormulaKind::Atom:
      if (is_builtin_predicate(f.predicate())) return closed(f) ? 0 : 2;
      return 0;
    case FormulaKind::Not: {
      auto k = f.child(0).kind();
      if (k == FormulaKind::Atom || k == FormulaKind::Equality || k == FormulaKind::Exists) return closed(f) ? 0 : 2;
      return closed(f) ? 0 : 1;
    }
    default:
      return closed(f) ? 0 : 1;
  }
}

bool Evaluator::enumerate(VarId v, const Cont& k) {
  for (const Term& d : domain_) {
    std::size_t m = mark();
    bind(v, d);
    bool r = k();
    undo(m);
    if (r) return true;
  }
  return false;
}

bool Evaluator::solve(const Formula& f, const Cont& k) {
  switch (f.kind()) {
    case FormulaKind::Truth:
      return k();
    case FormulaKind::Falsity:
      return false;
    case FormulaKind::Atom:
      return solve_atom(f, k);
    case FormulaKind::Equality: {
      std::size_t m = mark();
      bool r = unify(f.lhs(), f.rhs()) && k();
      undo(m);
      return r;
    }
    case FormulaKind::And:
      return solve_conj({f.children().begin(), f.children().end()}, k);
    case FormulaKind::Or:
      for (const Formula& c : f.children()) {
        if (solve(c, k)) return true;
      }
      return false;
    case FormulaKind::Exists: {
      std::vector<VarId> ids;
      for (const Term& v : f.vars()) ids.push_back(v.var_id());
      return solve(fresh(f.body(), ids), k);
    }
    case FormulaKind::Forall:
      return solve_negation(Formula::exists({f.vars().begin(), f.vars().end()}, Formula::negation(f.body())), k);
    case FormulaKind::Implies:
      return solve(Formula::disjunction({Formula::negation(f.child(0)), f.child(1)}), k);
    case FormulaKind::Iff: {
      const Formula &a = f.child(0), &b = f.child(1);
      return solve(Formula::disjunction({Formula::conjunction({a, b}),
                                         Formula::conjunction({Formula::negation(a), Formula::negation(b)})}),
                   k);
    }
    case FormulaKind::Not:
      break;
  }
  const Formula& g = f.child(0);
  auto negs = [&] {
    std::vector<Formula> out;
    for (const Formula& c : g.children()) out.push_back(Formula::negation(c));
    return out;
  };
  switch (g.kind()) {
    case FormulaKind::Truth:
      return false;
    case FormulaKind::Falsity:
      return k();
    case FormulaKind::Not:
      return solve(g.child(0), k);
    case FormulaKind::And:
      return solve(Formula::disjunction(negs()), k);
    case FormulaKind::Or:
      return solve(Formula::conjunction(negs()), k);
    case FormulaKind::Implies:
      return solve(Formula::conjunction({g.child(0), Formula::negation(g.child(1))}), k);
    case FormulaKind::Iff: {
      const Formula &a = g.child(0), &b = g.child(1);
      return solve(Formula::disjunction({Formula::conjunction({a, Formula::negation(b)}),
                                         Formula::conjunction({Formula::negation(a), b})}),
                   k);
    }
    case FormulaKind::Forall:
      return solve(Formula::exists({g.vars().begin(), g.vars().end()}, Formula::negation(g.body())), k);
    default:
      return solve_negation(g, k);
  }
}

bool Evaluator::solve_negation(const Formula& inner, const Cont& k) {
  if (!closed(inner)) {
    VarId v = *first_unbound(inner);
    return enumerate(v, [&] { return solve_negation(inner, k); });
  }
  if (solve(inner, [] { return true; })) return false;
  return k();
}

bool Evaluator::solve_conj(std::vector<Formula> pending, const Cont& k) {
  // flatten nested conjunctions
  for (std::size_t i = 0; i < pending.size();) {
    if (pending[i].kind() == FormulaKind::And) {
      Formula c = pending[i];
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
      pending.insert(pending.begin() + static_cast<std::ptrdiff_t>(i), c.children().begin(), c.children().end());
    } else {
      ++i;
    }
  }
  if (pending.empty()) return k();
  std::size_t best = 0;
  int best_rank = 3;
  for (std::size_t i = 0; i < pending.size() && best_rank > 0; ++i) {
    int r = readiness(pending[i]);
    if (r < best_rank) {
      best = i;
      best_rank = r;
    }
  }
  if (best_rank == 2) {
    VarId v = *first_unbound(pending[best]);
    return enumerate(v, [&] { return solve_conj(pending, k); });
  }
  Formula lit = pending[best];
  std::vector<Formula> rest = pending;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
  return solve(lit, [&] { return solve_conj(rest, k); });
}

bool Evaluator::solve_atom(const Formula& f, const Cont& k) {
  Symbol p = f.predicate();
  if (is_builtin_predicate(p)) {
    std::vector<Term> args;
    for (const Term& a : f.args()) args.push_back(resolve(a));
    for (const Term& a : args) {
      if (!a.ground()) {
        std::vector<VarId> ids;
        a.collect_vars(ids);
        return enumerate(ids.front(), [&] { return solve_atom(f, k); });
      }
    }
    return builtin_holds(p, args) && k();
  }
  if (theory_.is_defined(p)) {
    for (const auto& [rule, vars] : rules_.at(p)) {
      VarMap m;
      for (VarId v : vars) m.emplace(v, Term::variable(next_var_++));
      Formula head = rename(rule.head, m);
      std::size_t mk = mark();
      bool ok = true;
      for (std::size_t i = 0; ok && i < head.args().size(); ++i) ok = unify(f.args()[i], head.args()[i]);
      bool r = ok && solve(rename(rule.body, m), k);
      undo(mk);
      if (r) return true;
    }
    return false;
  }
  if (atoms_ == nullptr) throw std::logic_error("open predicate " + p.str() + " reached in definition-only evaluation");
  auto it = atoms_->find(p);
  if (it == atoms_->end()) return false;
  for (const Term& atom : it->second) {
    if (atom.arity() != f.args().size()) continue;
    std::size_t mk = mark();
    bool ok = true;
    for (std::size_t i = 0; ok && i < atom.arity(); ++i) ok = unify(f.args()[i], atom.arg(i));
    bool r = ok && k();
    undo(mk);
    if (r) return true;
  }
  return false;
}

bool Evaluator::satisfiable(const Formula& f) {
  next_var_ = std::max(next_var_, max_var(f));
  return solve(f, [] { return true; });
}

std::vector<Term> Evaluator::answers(const Formula& f, const Term& x) {
  next_var_ = std::max(next_var_, max_var(f));
  if (x.is_var()) next_var_ = std::max(next_var_, x.var_id() + 1);
  std::vector<Term> out;
  solve(f, [&] {
    Term t = resolve(x);
    if (!t.ground()) throw std::logic_error("non-ground answer " + t.to_string());
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return false;
  });
  return out;
}

}  // namespace tempabd
