#include "tempabd/engine.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tempabd/temporal.hpp"

namespace tempabd {

namespace {

// `<- literals` read as: no instance of the universals makes every literal true.
struct Denial {
  std::vector<VarId> universals;
  std::vector<Formula> literals;

  bool universal(VarId v) const { return std::find(universals.begin(), universals.end(), v) != universals.end(); }
};

using DenialPtr = std::shared_ptr<const Denial>;

struct Goal {
  Formula positive;  // null for a denial
  DenialPtr denial;
};

struct Suspended {
  DenialPtr denial;
  std::uint64_t generation;
};

struct State {
  std::deque<Goal> agenda;
  Substitution subst;
  Store store;
  AtomSet abduced;
  std::unordered_map<Symbol, std::vector<DenialPtr>> watchers;
  std::vector<DenialPtr> watch_order;
  std::vector<Suspended> suspended;
  std::unordered_map<VarId, int> numeric;
  std::vector<std::pair<Term, TimeVars>> points;
  std::set<std::pair<int, int>> nonempty;
  std::uint64_t generation = 0;
  std::uint64_t woken_at = 0;
  VarId next_var = 0;
  int skolems = 0;

  Term fresh_var() { return Term::variable(next_var++); }
};

const Symbol kTs("ts");
const Symbol kInt("int");
const Symbol kMinf("minf");
const Symbol kPinf("pinf");

// Bindings layered over the global substitution. Which variables may be
// bound is decided by `allowed`.
struct Overlay {
  const Substitution& global;
  std::function<bool(VarId)> allowed;
  std::unordered_map<VarId, Term> local;
  std::vector<VarId> order;

  Term deref(const Term& t) const {
    Term cur = t;
    while (cur.is_var()) {
      if (global.bound(cur.var_id())) {
        cur = global.lookup(cur.var_id());
        continue;
      }
      auto it = local.find(cur.var_id());
      if (it == local.end()) break;
      cur = it->second;
    }
    return cur;
  }
  bool can_bind(VarId id) const { return !global.bound(id) && !local.contains(id) && allowed(id); }
  void bind(VarId id, Term value) {
    local.emplace(id, std::move(value));
    order.push_back(id);
  }
  Term resolve(const Term& t) const {
    Term d = deref(t);
    if (!d.is_compound() || d.ground()) return d;
    std::vector<Term> args;
    for (const Term& a : d.args()) args.push_back(resolve(a));
    return Term::compound(d.functor(), std::move(args));
  }
};

// Global bindings that remember which variables they bound.
struct Recorder {
  Substitution& s;
  std::vector<VarId> bound;

  Term deref(const Term& t) const { return s.deref(t); }
  bool can_bind(VarId id) const { return !s.bound(id); }
  void bind(VarId id, Term value) {
    s.bind(id, std::move(value));
    bound.push_back(id);
  }
};

Term atom_term(const Formula& a) { return Term::compound(a.predicate(), {a.args().begin(), a.args().end()}); }

Formula apply_formula(const State& s, const Formula& f) { return apply(s.subst, f); }

bool is_type_check(Symbol p) { return p == kInt; }

Formula neg(const Formula& f) { return Formula::negation(f); }

}  // namespace

namespace {

enum class Step { Continue, Fail, Done, Flounder };

class Search {
 public:
  Search(const Theory& theory, const SolveOptions& options, std::size_t& nodes);

  State initial(const Formula& query);
  // Runs depth-first from `root`; `on_model` returns false to stop.
  void run(State root, const std::function<bool(AbductiveModel)>& on_model);

  const std::string& floundered() const { return floundered_; }

 private:
  struct RuleInfo {
    const Rule* rule;
    std::vector<VarId> vars;
  };

  Step step(State& s, std::vector<State>& alts);
  Step positive(State& s, const Formula& f, std::vector<State>& alts);
  Step deny(State& s, Denial d, std::vector<State>& alts);
  Step defined_positive(State& s, const Formula& atom, std::vector<State>& alts);
  Step open_positive(State& s, const Formula& atom, std::vector<State>& alts);
  Step builtin_positive(State& s, const Formula& atom);
  Step finish(State& s);

  // bookkeeping
  bool unify(State& s, const Term& a, const Term& b);
  bool numeric_hook(State& s, VarId id);
  bool sync_points(State& s);
  int numeric_var(State& s, VarId id);
  std::optional<PointRef> point_ref(State& s, const Term& t);
  std::optional<IntervalRef> interval_ref(State& s, const Term& t);
  // nullopt when some argument is not an interval
  std::optional<Compiled> compile_builtin(State& s, const Formula& atom);
  void abduce(State& s, const Term& atom);
  void watch(State& s, Denial d);
  Denial resolvent(State& s, const Denial& w, const Term& atom);
  Formula rename_fresh(State& s, const Formula& f, const std::vector<VarId>& vars, std::vector<VarId>* fresh);
  bool skolemize(State& s);
  std::optional<AbductiveModel> extract(State& s);

  void push_denial(State& s, Denial d) { s.agenda.push_front(Goal{{}, std::make_shared<const Denial>(std::move(d))}); }
  void push_positive(State& s, Formula f) { s.agenda.push_front(Goal{std::move(f), nullptr}); }

  bool functional(Symbol p) const { return functional_.contains(p); }

  const Theory& theory_;
  const SolveOptions& options_;
  std::size_t& nodes_;
  std::unordered_map<Symbol, std::vector<RuleInfo>> rules_;
  std::unordered_set<Symbol> functional_;
  std::unordered_set<Symbol> total_;
  std::string floundered_;
};

// Recognizes `forall(..)$ p(X..,Y1) & p(X..,Y2) => Y1 = Y2`.
std::optional<Symbol> functional_axiom(const Formula& f) {
  Formula body = f;
  while (body.kind() == FormulaKind::Forall) body = body.body();
  if (body.kind() != FormulaKind::Implies) return std::nullopt;
  const Formula& ante = body.child(0);
  const Formula& cons = body.child(1);
  if (ante.kind() != FormulaKind::And || ante.children().size() != 2 || cons.kind() != FormulaKind::Equality)
    return std::nullopt;
  const Formula& a = ante.child(0);
  const Formula& b = ante.child(1);
  if (a.kind() != FormulaKind::Atom || b.kind() != FormulaKind::Atom || a.predicate() != b.predicate())
    return std::nullopt;
  std::size_t n = a.args().size();
  if (n == 0) return std::nullopt;
  std::set<VarId> keys;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!a.args()[i].is_var() || a.args()[i] != b.args()[i]) return std::nullopt;
    keys.insert(a.args()[i].var_id());
  }
  const Term& y1 = a.args()[n - 1];
  const Term& y2 = b.args()[n - 1];
  if (!y1.is_var() || !y2.is_var() || y1 == y2 || keys.contains(y1.var_id()) || keys.contains(y2.var_id()))
    return std::nullopt;
  bool match = (cons.lhs() == y1 && cons.rhs() == y2) || (cons.lhs() == y2 && cons.rhs() == y1);
  return match ? std::optional<Symbol>(a.predicate()) : std::nullopt;
}

Search::Search(const Theory& theory, const SolveOptions& options, std::size_t& nodes)
    : theory_(theory), options_(options), nodes_(nodes) {
  for (Symbol p : theory.defined_predicates()) {
    auto& list = rules_[p];
    for (const Rule& r : theory.rules_for(p)) list.push_back({&r, all_vars(Formula::conjunction({r.head, r.body}))});
  }
  for (const Axiom& a : theory.axioms()) {
    if (auto p = functional_axiom(a.formula)) functional_.insert(*p);
  }
  for (const OpenFunctionDecl& d : theory.open_functions()) {
    functional_.insert(d.name);
    total_.insert(d.name);
  }
}

int Search::numeric_var(State& s, VarId id) {
  auto it = s.numeric.find(id);
  if (it != s.numeric.end()) return it->second;
  int v = s.store.new_var(-(std::int64_t{1} << 40), std::int64_t{1} << 40);
  s.numeric.emplace(id, v);
  return v;
}

bool Search::numeric_hook(State& s, VarId id) {
  auto it = s.numeric.find(id);
  if (it == s.numeric.end()) return true;
  int x = it->second;
  Term v = s.subst.deref(Term::variable(id));
  if (v.is_int()) return s.store.assert_atom({x, -1, v.int_value(), Cmp::Eq});
  if (v.is_var()) {
    auto jt = s.numeric.find(v.var_id());
    if (jt == s.numeric.end()) {
      s.numeric.emplace(v.var_id(), x);
      return true;
    }
    return jt->second == x || s.store.assert_atom({x, jt->second, 0, Cmp::Eq});
  }
  return false;
}

bool Search::sync_points(State& s) {
  std::map<std::string, TimeVars> seen;
  std::vector<std::pair<Term, TimeVars>> kept;
  for (auto& [t, tv] : s.points) {
    Term cur = s.subst.apply(t);
    auto [it, inserted] = seen.emplace(cur.to_string(), tv);
    if (inserted) {
      kept.emplace_back(cur, tv);
    } else if (it->second.absolute != tv.absolute) {
      if (!s.store.assert_atom({it->second.absolute, tv.absolute, 0, Cmp::Eq})) return false;
    }
  }
  s.points = std::move(kept);
  return true;
}

bool Search::unify(State& s, const Term& a, const Term& b) {
  Recorder r{s.subst, {}};
  if (!unify_into(r, a, b)) return false;
  if (r.bound.empty()) return true;
  ++s.generation;
  for (VarId id : r.bound) {
    if (!numeric_hook(s, id)) return false;
  }
  return sync_points(s) && s.store.consistent();
}

std::optional<PointRef> Search::point_ref(State& s, const Term& term) {
  Term t = s.subst.apply(term);
  if (t.is_var()) {
    if (s.numeric.contains(t.var_id())) return std::nullopt;
    Term p = Term::compound(kTs, {s.fresh_var(), s.fresh_var(), s.fresh_var(), s.fresh_var()});
    if (!unify(s, t, p)) return std::nullopt;
    t = p;
  }
  if (!t.is_compound()) return std::nullopt;
  if (t.is_constant() && t.functor() == kMinf) return PointRef::minus_infinity();
  if (t.is_constant() && t.functor() == kPinf) return PointRef::plus_infinity();
  if (t.functor() != kTs || t.arity() != 4) return std::nullopt;
  for (auto& [pt, tv] : s.points) {
    if (s.subst.apply(pt) == t) return PointRef::finite(tv.absolute, tv.hour);
  }
  for (const Term& a : t.args()) {
    if (!a.is_int() && !a.is_var()) return std::nullopt;
  }
  TimeVars tv = s.store.new_time_point();
  const int comps[] = {tv.year, tv.month, tv.day, tv.hour};
  for (std::size_t i = 0; i < 4; ++i) {
    const Term& a = t.arg(i);
    if (a.is_int()) {
      s.store.assert_atom({comps[i], -1, a.int_value(), Cmp::Eq});
      continue;
    }
    auto it = s.numeric.find(a.var_id());
    if (it == s.numeric.end()) {
      s.numeric.emplace(a.var_id(), comps[i]);
    } else {
      s.store.assert_atom({comps[i], it->second, 0, Cmp::Eq});
    }
  }
  s.points.emplace_back(t, tv);
  return PointRef::finite(tv.absolute, tv.hour);
}

std::optional<IntervalRef> Search::interval_ref(State& s, const Term& term) {
  Term t = s.subst.apply(term);
  if (t.is_var()) {
    if (s.numeric.contains(t.var_id())) return std::nullopt;
    Term i = Term::compound(kInt, {s.fresh_var(), s.fresh_var()});
    if (!unify(s, t, i)) return std::nullopt;
    t = i;
  }
  if (!t.is_compound() || t.functor() != kInt || t.arity() != 2) return std::nullopt;
  auto a = point_ref(s, t.arg(0));
  if (!a) return std::nullopt;
  auto b = point_ref(s, t.arg(1));
  if (!b) return std::nullopt;
  IntervalRef r{*a, *b};
  auto code = [](const PointRef& p) {
    if (p.kind == GroundPoint::Kind::MinusInfinity) return -2;
    if (p.kind == GroundPoint::Kind::PlusInfinity) return -3;
    return p.absolute;
  };
  if (s.nonempty.emplace(code(*a), code(*b)).second) s.store.assert_all(compile_nonempty(r));
  return r;
}

std::optional<Compiled> Search::compile_builtin(State& s, const Formula& atom) {
  Symbol p = atom.predicate();
  std::vector<IntervalRef> refs;
  for (const Term& a : atom.args()) {
    auto r = interval_ref(s, a);
    if (!r) return std::nullopt;
    refs.push_back(*r);
  }
  if (is_type_check(p)) return Compiled{};
  if (auto rel = try_relation(p.str())) return compile_relation(*rel, refs[0], refs[1]);
  return compile_property(property_from_name(p.str()), refs[0]);
}

}  // namespace

namespace {

Formula Search::rename_fresh(State& s, const Formula& f, const std::vector<VarId>& vars, std::vector<VarId>* fresh) {
  VarMap m;
  for (VarId v : vars) {
    Term n = s.fresh_var();
    m.emplace(v, n);
    if (fresh) fresh->push_back(n.var_id());
  }
  return rename(f, m);
}

std::vector<VarId> binder_ids(const Formula& f) {
  std::vector<VarId> ids;
  for (const Term& v : f.vars()) ids.push_back(v.var_id());
  return ids;
}

Step Search::positive(State& s, const Formula& f, std::vector<State>& alts) {
  switch (f.kind()) {
    case FormulaKind::Truth:
      return Step::Continue;
    case FormulaKind::Falsity:
      return Step::Fail;
    case FormulaKind::And:
      for (std::size_t i = f.children().size(); i-- > 0;) push_positive(s, f.child(i));
      return Step::Continue;
    case FormulaKind::Or: {
      auto kids = f.children();
      if (kids.empty()) return Step::Fail;
      for (std::size_t i = 1; i < kids.size(); ++i) {
        alts.push_back(s);
        push_positive(alts.back(), kids[i]);
      }
      push_positive(s, kids[0]);
      return Step::Continue;
    }
    case FormulaKind::Exists:
      push_positive(s, rename_fresh(s, f.body(), binder_ids(f), nullptr));
      return Step::Continue;
    case FormulaKind::Forall: {
      Denial d;
      Formula body = rename_fresh(s, f.body(), binder_ids(f), &d.universals);
      d.literals.push_back(neg(body));
      push_denial(s, std::move(d));
      return Step::Continue;
    }
    case FormulaKind::Implies:
      push_denial(s, Denial{{}, {f.child(0), neg(f.child(1))}});
      return Step::Continue;
    case FormulaKind::Iff:
      push_denial(s, Denial{{}, {f.child(1), neg(f.child(0))}});
      push_denial(s, Denial{{}, {f.child(0), neg(f.child(1))}});
      return Step::Continue;
    case FormulaKind::Equality:
      return unify(s, f.lhs(), f.rhs()) ? Step::Continue : Step::Fail;
    case FormulaKind::Atom: {
      Formula a = apply_formula(s, f);
      if (is_builtin_predicate(a.predicate())) return builtin_positive(s, a);
      if (theory_.is_defined(a.predicate())) return defined_positive(s, a, alts);
      return open_positive(s, a, alts);
    }
    case FormulaKind::Not:
      break;
  }
  const Formula& g = f.child(0);
  auto negs = [&] {
    std::vector<Formula> out;
    for (const Formula& c : g.children()) out.push_back(neg(c));
    return out;
  };
  switch (g.kind()) {
    case FormulaKind::Truth:
      return Step::Fail;
    case FormulaKind::Falsity:
      return Step::Continue;
    case FormulaKind::Not:
      push_positive(s, g.child(0));
      return Step::Continue;
    case FormulaKind::And:
      push_positive(s, Formula::disjunction(negs()));
      return Step::Continue;
    case FormulaKind::Or:
      push_positive(s, Formula::conjunction(negs()));
      return Step::Continue;
    case FormulaKind::Implies:
      push_positive(s, Formula::conjunction({g.child(0), neg(g.child(1))}));
      return Step::Continue;
    case FormulaKind::Iff:
      push_positive(s, Formula::disjunction({Formula::conjunction({g.child(0), neg(g.child(1))}),
                                             Formula::conjunction({neg(g.child(0)), g.child(1)})}));
      return Step::Continue;
    case FormulaKind::Forall:
      push_positive(s, Formula::exists({g.vars().begin(), g.vars().end()}, neg(g.body())));
      return Step::Continue;
    case FormulaKind::Exists: {
      Denial d;
      d.literals.push_back(rename_fresh(s, g.body(), binder_ids(g), &d.universals));
      push_denial(s, std::move(d));
      return Step::Continue;
    }
    default:
      push_denial(s, Denial{{}, {g}});
      return Step::Continue;
  }
}

Step Search::builtin_positive(State& s, const Formula& atom) {
  auto c = compile_builtin(s, atom);
  if (!c || !s.store.consistent()) return Step::Fail;
  return s.store.assert_all(*c) ? Step::Continue : Step::Fail;
}

Step Search::defined_positive(State& s, const Formula& atom, std::vector<State>& alts) {
  struct Case {
    Formula head, body;
  };
  std::vector<Case> cases;
  for (const RuleInfo& r : rules_.at(atom.predicate())) {
    VarMap m;
    for (VarId v : r.vars) m.emplace(v, s.fresh_var());
    Formula head = rename(r.rule->head, m);
    Overlay o{s.subst, [](VarId) { return true; }, {}, {}};
    bool ok = true;
    for (std::size_t i = 0; ok && i < head.args().size(); ++i) ok = unify_into(o, atom.args()[i], head.args()[i]);
    if (ok) cases.push_back({head, rename(r.rule->body, m)});
  }
  if (cases.empty()) return Step::Fail;
  auto take = [&](State& st, const Case& c) {
    for (std::size_t i = 0; i < c.head.args().size(); ++i) {
      if (!unify(st, atom.args()[i], c.head.args()[i])) return false;
    }
    push_positive(st, c.body);
    return true;
  };
  for (std::size_t i = 1; i < cases.size(); ++i) {
    State alt = s;
    if (take(alt, cases[i])) alts.push_back(std::move(alt));
  }
  return take(s, cases[0]) ? Step::Continue : Step::Fail;
}

Step Search::open_positive(State& s, const Formula& atom, std::vector<State>& alts) {
  Symbol p = atom.predicate();
  Term t = atom_term(atom);
  auto& existing = s.abduced[p];
  for (const Term& e : existing) {
    if (s.subst.apply(e) == t) return Step::Continue;
  }
  if (functional(p) && t.arity() > 0) {
    for (const Term& e : existing) {
      Term ea = s.subst.apply(e);
      bool same_key = true;
      for (std::size_t i = 0; same_key && i + 1 < t.arity(); ++i) same_key = ea.arg(i) == t.arg(i);
      if (same_key) return unify(s, ea, t) ? Step::Continue : Step::Fail;
    }
  }
  std::vector<Term> candidates;
  for (const Term& e : existing) {
    Overlay o{s.subst, [](VarId) { return true; }, {}, {}};
    if (unify_into(o, e, t)) candidates.push_back(e);
  }
  bool may_abduce = !total_.contains(p);
  std::size_t n = candidates.size() + (may_abduce ? 1 : 0);
  if (n == 0) return Step::Fail;
  // alternatives after the first
  for (std::size_t i = 1; i < n; ++i) {
    State alt = s;
    if (i < candidates.size()) {
      if (unify(alt, candidates[i], t)) alts.push_back(std::move(alt));
    } else {
      abduce(alt, t);
      alts.push_back(std::move(alt));
    }
  }
  if (!candidates.empty()) return unify(s, candidates[0], t) ? Step::Continue : Step::Fail;
  abduce(s, t);
  return Step::Continue;
}

void Search::abduce(State& s, const Term& atom) {
  s.abduced[atom.functor()].push_back(atom);
  auto it = s.watchers.find(atom.functor());
  if (it == s.watchers.end()) return;
  std::vector<Denial> out;
  for (const DenialPtr& w : it->second) out.push_back(resolvent(s, *w, atom));
  for (std::size_t i = out.size(); i-- > 0;) push_denial(s, std::move(out[i]));
}

Denial Search::resolvent(State& s, const Denial& w, const Term& atom) {
  VarMap m;
  Denial r;
  for (VarId u : w.universals) {
    Term n = s.fresh_var();
    m.emplace(u, n);
    r.universals.push_back(n.var_id());
  }
  const Formula& lit = w.literals.front();
  for (std::size_t i = 0; i < atom.arity(); ++i) {
    r.literals.push_back(rename(Formula::equality(lit.args()[i], atom.arg(i)), m));
  }
  for (std::size_t i = 1; i < w.literals.size(); ++i) r.literals.push_back(rename(w.literals[i], m));
  return r;
}

void Search::watch(State& s, Denial d) {
  Symbol p = d.literals.front().predicate();
  auto w = std::make_shared<const Denial>(std::move(d));
  s.watchers[p].push_back(w);
  s.watch_order.push_back(w);
  auto it = s.abduced.find(p);
  if (it == s.abduced.end()) return;
  std::vector<Denial> out;
  for (const Term& e : it->second) out.push_back(resolvent(s, *w, s.subst.apply(e)));
  for (std::size_t i = out.size(); i-- > 0;) push_denial(s, std::move(out[i]));
}

}  // namespace

namespace {

bool mentions_any(const Formula& f, const Denial& d) {
  if (d.universals.empty()) return false;
  for (const Term& v : free_vars(f)) {
    if (d.universal(v.var_id())) return true;
  }
  return false;
}

void replace_with(std::vector<Formula>& lits, std::size_t i, std::span<const Formula> with) {
  lits.erase(lits.begin() + static_cast<std::ptrdiff_t>(i));
  lits.insert(lits.begin() + static_cast<std::ptrdiff_t>(i), with.begin(), with.end());
}

Step Search::deny(State& s, Denial d, std::vector<State>& alts) {
restart:
  for (Formula& l : d.literals) l = apply(s.subst, l);

  // Normalize until every literal is an atom, an equality, a disjunction to
  // split on, or a negated atom/equality/existential.
  for (std::size_t i = 0; i < d.literals.size();) {
    Formula l = d.literals[i];
    switch (l.kind()) {
      case FormulaKind::Truth:
        replace_with(d.literals, i, {});
        continue;
      case FormulaKind::Falsity:
        return Step::Continue;
      case FormulaKind::And:
        replace_with(d.literals, i, l.children());
        continue;
      case FormulaKind::Exists:
        d.literals[i] = rename_fresh(s, l.body(), binder_ids(l), &d.universals);
        continue;
      case FormulaKind::Forall:
        d.literals[i] = neg(Formula::exists({l.vars().begin(), l.vars().end()}, neg(l.body())));
        continue;
      case FormulaKind::Implies:
        d.literals[i] = Formula::disjunction({neg(l.child(0)), l.child(1)});
        continue;
      case FormulaKind::Iff:
        d.literals[i] = Formula::disjunction({Formula::conjunction({l.child(0), l.child(1)}),
                                              Formula::conjunction({neg(l.child(0)), neg(l.child(1))})});
        continue;
      case FormulaKind::Or: {
        // <- (A ; B), R  is  (<- A, R) and (<- B, R)
        auto kids = l.children();
        for (std::size_t k = kids.size(); k-- > 0;) {
          Denial copy = d;
          copy.literals[i] = kids[k];
          push_denial(s, std::move(copy));
        }
        return Step::Continue;
      }
      case FormulaKind::Not: {
        const Formula& g = l.child(0);
        std::vector<Formula> negs;
        for (const Formula& c : g.children()) negs.push_back(neg(c));
        switch (g.kind()) {
          case FormulaKind::Truth:
            return Step::Continue;
          case FormulaKind::Falsity:
            replace_with(d.literals, i, {});
            continue;
          case FormulaKind::Not:
            d.literals[i] = g.child(0);
            continue;
          case FormulaKind::And:
            d.literals[i] = Formula::disjunction(std::move(negs));
            continue;
          case FormulaKind::Or:
            replace_with(d.literals, i, negs);
            continue;
          case FormulaKind::Implies: {
            const Formula parts[] = {g.child(0), neg(g.child(1))};
            replace_with(d.literals, i, parts);
            continue;
          }
          case FormulaKind::Iff:
            d.literals[i] = Formula::disjunction({Formula::conjunction({g.child(0), neg(g.child(1))}),
                                                  Formula::conjunction({neg(g.child(0)), g.child(1)})});
            continue;
          case FormulaKind::Forall:
            d.literals[i] = Formula::exists({g.vars().begin(), g.vars().end()}, neg(g.body()));
            continue;
          default:
            ++i;
            continue;
        }
      }
      default:
        ++i;
    }
  }
  if (d.literals.empty()) return Step::Fail;

  for (std::size_t i = 0; i < d.literals.size(); ++i) {
    const Formula l = d.literals[i];
    std::vector<Formula> rest = d.literals;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));

    if (l.kind() == FormulaKind::Equality) {
      Overlay rigid{s.subst, [&](VarId v) { return d.universal(v); }, {}, {}};
      if (unify_into(rigid, l.lhs(), l.rhs())) {
        VarMap m;
        for (VarId v : rigid.order) m.emplace(v, rigid.resolve(Term::variable(v)));
        d.literals = std::move(rest);
        for (Formula& r : d.literals) r = rename(r, m);
        std::erase_if(d.universals, [&](VarId v) { return m.contains(v); });
        goto restart;
      }
      Overlay full{s.subst, [](VarId) { return true; }, {}, {}};
      if (!unify_into(full, l.lhs(), l.rhs())) return Step::Continue;
      std::optional<std::pair<VarId, Term>> need;
      for (VarId v : full.order) {
        Term val = full.resolve(Term::variable(v));
        if (s.numeric.contains(v) && !val.is_int() && !val.is_var()) return Step::Continue;
        if (d.universal(v)) continue;
        if (val.is_var() && d.universal(val.var_id())) continue;
        if (!need) need.emplace(v, val);
      }
      if (!need) continue;
      auto [x, val] = *need;
      if (!s.numeric.contains(x) || !(val.is_int() || (val.is_var() && s.numeric.contains(val.var_id())))) continue;
      int cx = s.numeric.at(x);
      NumAtom lt, gt;
      if (val.is_int()) {
        lt = {cx, -1, val.int_value(), Cmp::Lt};
        gt = {-1, cx, -val.int_value(), Cmp::Lt};
      } else {
        int cy = numeric_var(s, val.var_id());
        lt = {cx, cy, 0, Cmp::Lt};
        gt = {cy, cx, 0, Cmp::Lt};
      }
      // x differs from the value (either side), or x takes it
      State below = s;
      State above = s;
      State equal = s;
      std::vector<State> branches;
      if (below.store.assert_atom(lt)) branches.push_back(std::move(below));
      if (above.store.assert_atom(gt)) branches.push_back(std::move(above));
      if (unify(equal, Term::variable(x), val)) {
        push_denial(equal, d);
        branches.push_back(std::move(equal));
      }
      if (branches.empty()) return Step::Fail;
      s = std::move(branches.front());
      for (std::size_t b = 1; b < branches.size(); ++b) alts.push_back(std::move(branches[b]));
      return Step::Continue;
    }

    if (l.kind() == FormulaKind::Atom) {
      Symbol p = l.predicate();
      if (is_builtin_predicate(p)) {
        if (mentions_any(l, d)) continue;
        auto c = compile_builtin(s, l);
        if (!s.store.consistent()) return Step::Fail;
        if (!c || c->never) return Step::Continue;
        if (c->always()) {
          d.literals = std::move(rest);
          goto restart;
        }
        if (!s.store.admits(*c)) return Step::Continue;
        std::vector<Compiled> open_negs;
        for (const Compiled& n : negate(*c)) {
          if (s.store.admits(n)) open_negs.push_back(n);
        }
        if (open_negs.empty()) {
          d.literals = std::move(rest);
          goto restart;
        }
        for (std::size_t k = 1; k < open_negs.size(); ++k) {
          alts.push_back(s);
          alts.back().store.assert_all(open_negs[k]);
        }
        alts.push_back(s);
        alts.back().store.assert_all(*c);
        push_denial(alts.back(), Denial{d.universals, rest});
        s.store.assert_all(open_negs.front());
        return Step::Continue;
      }
      if (theory_.is_defined(p)) {
        std::vector<Denial> out;
        for (const RuleInfo& r : rules_.at(p)) {
          Denial u{d.universals, {}};
          VarMap m;
          for (VarId v : r.vars) {
            Term n = s.fresh_var();
            m.emplace(v, n);
            u.universals.push_back(n.var_id());
          }
          Formula head = rename(r.rule->head, m);
          Overlay o{s.subst, [](VarId) { return true; }, {}, {}};
          bool ok = true;
          for (std::size_t k = 0; ok && k < head.args().size(); ++k) ok = unify_into(o, l.args()[k], head.args()[k]);
          if (!ok) continue;
          u.literals.assign(d.literals.begin(), d.literals.begin() + static_cast<std::ptrdiff_t>(i));
          for (std::size_t k = 0; k < head.args().size(); ++k)
            u.literals.push_back(Formula::equality(l.args()[k], head.args()[k]));
          u.literals.push_back(rename(r.rule->body, m));
          u.literals.insert(u.literals.end(), d.literals.begin() + static_cast<std::ptrdiff_t>(i) + 1, d.literals.end());
          out.push_back(std::move(u));
        }
        for (std::size_t k = out.size(); k-- > 0;) push_denial(s, std::move(out[k]));
        return Step::Continue;
      }
      Denial w{d.universals, {l}};
      w.literals.insert(w.literals.end(), rest.begin(), rest.end());
      watch(s, std::move(w));
      return Step::Continue;
    }

    if (l.kind() == FormulaKind::Not) {
      const Formula& g = l.child(0);
      if (mentions_any(g, d)) continue;
      if (!rest.empty()) {
        alts.push_back(s);
        push_denial(alts.back(), Denial{d.universals, rest});
        push_denial(alts.back(), Denial{{}, {g}});
      }
      push_positive(s, g);
      return Step::Continue;
    }
  }
  s.suspended.push_back({std::make_shared<const Denial>(std::move(d)), s.generation});
  return Step::Continue;
}

}  // namespace

namespace {

Step Search::step(State& s, std::vector<State>& alts) {
  if (++nodes_ > options_.node_limit) {
    throw ResourceLimitError("search exceeded the node limit of " + std::to_string(options_.node_limit));
  }
  if (s.generation != s.woken_at) {
    s.woken_at = s.generation;
    for (Suspended& sp : s.suspended) s.agenda.push_back(Goal{{}, sp.denial});
    s.suspended.clear();
  }
  if (s.agenda.empty()) {
    if (s.suspended.empty()) return Step::Done;
    if (skolemize(s)) return Step::Continue;
    const Denial& d = *s.suspended.front().denial;
    if (floundered_.empty()) {
      Formula lits = Formula::conjunction(d.literals);
      for (const Formula& l : d.literals) {
        if (l.kind() == FormulaKind::Not || l.kind() == FormulaKind::Atom) {
          lits = l;
          break;
        }
      }
      floundered_ = apply(s.subst, lits).to_string();
    }
    return Step::Flounder;
  }
  Goal g = std::move(s.agenda.front());
  s.agenda.pop_front();
  if (g.denial) return deny(s, *g.denial, alts);
  return positive(s, g.positive, alts);
}

bool Search::skolemize(State& s) {
  std::vector<VarId> targets;
  auto consider = [&](const Term& t, const Denial* d) {
    std::vector<VarId> ids;
    s.subst.apply(t).collect_vars(ids);
    for (VarId v : ids) {
      if (s.numeric.contains(v) || (d && d->universal(v))) continue;
      if (std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
    }
  };
  for (const Suspended& sp : s.suspended) {
    for (const Formula& l : sp.denial->literals) {
      for (const Term& v : free_vars(l)) consider(v, sp.denial.get());
    }
  }
  for (auto& [p, atoms] : s.abduced) {
    for (const Term& a : atoms) consider(a, nullptr);
  }
  if (targets.empty()) return false;
  for (VarId v : targets) {
    std::string name;
    do {
      name = "sk" + std::to_string(++s.skolems);
    } while (theory_.functor_arity(Symbol(name)).has_value());
    if (!unify(s, Term::variable(v), Term::constant(name))) return false;
  }
  return true;
}

std::optional<AbductiveModel> Search::extract(State& s) {
  skolemize(s);
  if (!s.store.consistent()) return std::nullopt;
  auto values = label(s.store, options_.labeling);
  if (!values) return std::nullopt;
  std::function<Term(const Term&)> ground = [&](const Term& t) -> Term {
    Term d = s.subst.deref(t);
    if (d.is_var()) {
      auto it = s.numeric.find(d.var_id());
      if (it != s.numeric.end()) return Term::integer((*values)[static_cast<std::size_t>(it->second)]);
      return d;
    }
    if (!d.is_compound() || d.ground()) return d;
    std::vector<Term> args;
    for (const Term& a : d.args()) args.push_back(ground(a));
    return Term::compound(d.functor(), std::move(args));
  };
  AbductiveModel m;
  for (auto& [p, atoms] : s.abduced) {
    std::vector<Term> out;
    for (const Term& a : atoms) {
      Term g = ground(a);
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    }
    if (!out.empty()) m.abduced.emplace(p, std::move(out));
  }
  for (const DenialPtr& w : s.watch_order) {
    if (!w->universals.empty() || w->literals.size() != 1) continue;
    Term g = ground(atom_term(w->literals.front()));
    if (!g.ground()) continue;
    if (std::find(m.negative_assumptions.begin(), m.negative_assumptions.end(), g) == m.negative_assumptions.end())
      m.negative_assumptions.push_back(g);
  }
  m.assignment = std::move(*values);
  return m;
}

State Search::initial(const Formula& query) {
  State s;
  s.next_var = theory_.var_limit();
  if (!query.null()) {
    for (VarId v : all_vars(query)) s.next_var = std::max(s.next_var, v + 1);
  }
  Evaluator ev(theory_, nullptr);
  for (const OpenFunctionDecl& decl : theory_.open_functions()) {
    std::vector<std::vector<Term>> exts;
    for (Symbol dt : decl.domain_types) {
      if (!theory_.is_defined(dt)) {
        throw std::invalid_argument("domain type " + dt.str() + " of open function " + decl.name.str() +
                                    " must be a defined predicate");
      }
      Term x = s.fresh_var();
      try {
        exts.push_back(ev.answers(Formula::atom(dt, {x}), x));
      } catch (const std::logic_error& e) {
        throw std::invalid_argument("cannot enumerate domain " + dt.str() + " of open function " +
                                    decl.name.str() + ": " + e.what());
      }
      s.next_var = std::max(s.next_var, x.var_id() + 1);
    }
    std::vector<std::size_t> idx(exts.size(), 0);
    bool empty = std::any_of(exts.begin(), exts.end(), [](const auto& e) { return e.empty(); });
    while (!empty) {
      std::vector<Term> args;
      for (std::size_t k = 0; k < exts.size(); ++k) args.push_back(exts[k][idx[k]]);
      Term r = s.fresh_var();
      args.push_back(r);
      s.abduced[decl.name].push_back(Term::compound(decl.name, std::move(args)));
      s.agenda.push_back(Goal{Formula::atom(decl.range_type, {r}), nullptr});
      // odometer
      std::size_t k = exts.size();
      while (k > 0) {
        --k;
        if (++idx[k] < exts[k].size()) break;
        idx[k] = 0;
        if (k == 0) empty = true;
      }
      if (exts.empty()) empty = true;
    }
  }
  auto fresh_all = [&](const Formula& f) {
    VarMap m;
    for (const Term& v : free_vars(f)) m.emplace(v.var_id(), Term::variable(s.next_var++, v.var_name()));
    for (VarId v : all_vars(f)) {
      if (!m.contains(v)) m.emplace(v, s.fresh_var());
    }
    return rename(f, m);
  };
  if (!query.null()) s.agenda.push_back(Goal{fresh_all(query), nullptr});
  for (const Axiom& a : theory_.axioms()) s.agenda.push_back(Goal{fresh_all(a.formula), nullptr});
  return s;
}

void Search::run(State root, const std::function<bool(AbductiveModel)>& on_model) {
  std::vector<State> stack;
  stack.push_back(std::move(root));
  std::vector<State> alts;
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    while (true) {
      alts.clear();
      Step r = step(s, alts);
      for (std::size_t i = alts.size(); i-- > 0;) stack.push_back(std::move(alts[i]));
      if (r == Step::Continue) continue;
      if (r == Step::Done) {
        auto m = extract(s);
        if (m && !on_model(std::move(*m))) return;
      }
      break;
    }
  }
}

Term placeholder_times(const Term& t) {
  if (!t.is_compound()) return t;
  if ((t.functor() == kTs && t.arity() == 4) || (t.is_constant() && (t.functor() == kMinf || t.functor() == kPinf)))
    return Term::constant("_");
  if (t.is_constant()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(placeholder_times(a));
  return Term::compound(t.functor(), std::move(args));
}

}  // namespace

std::string structural_key(const AbductiveModel& m) {
  std::vector<std::string> atoms;
  for (const auto& [p, list] : m.abduced) {
    for (const Term& a : list) atoms.push_back(placeholder_times(a).to_string());
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  std::string key;
  for (const std::string& a : atoms) key += a + "\n";
  return key;
}

Engine::Engine(const Theory& theory, SolveOptions options) : theory_(theory), options_(std::move(options)) {}

SolveOutcome Engine::solve(const Formula& query) {
  Search search(theory_, options_, nodes_);
  SolveOutcome out;
  search.run(search.initial(query), [&](AbductiveModel m) {
    if (options_.verify_models) {
      auto v = verify(theory_, m, query);
      if (!v.ok) throw std::logic_error("model fails verification: " + v.violation);
    }
    out.model = std::move(m);
    return false;
  });
  if (out.model) {
    out.kind = OutcomeKind::Model;
  } else if (!search.floundered().empty()) {
    out.kind = OutcomeKind::Floundered;
    out.offending = search.floundered();
  }
  return out;
}

Enumeration Engine::enumerate(const Formula& query, std::size_t limit) {
  Search search(theory_, options_, nodes_);
  Enumeration out;
  std::set<std::string> keys;
  if (limit == 0) return out;
  search.run(search.initial(query), [&](AbductiveModel m) {
    if (!keys.insert(structural_key(m)).second) return true;
    if (options_.verify_models) {
      auto v = verify(theory_, m, query);
      if (!v.ok) throw std::logic_error("model fails verification: " + v.violation);
    }
    out.models.push_back(std::move(m));
    return out.models.size() < limit;
  });
  out.floundered = search.floundered();
  return out;
}

}  // namespace tempabd
