#include <algorithm>
#include <set>
#include <optional>

#include "tempabd/engine.hpp"
#include "tempabd/temporal.hpp"

namespace tempabd {

namespace {

struct DomainBuilder {
  std::vector<Term> terms;
  std::set<std::string> seen;

  void add(const Term& t) {
    if (t.is_var()) return;
    if (t.ground()) {
      if (seen.insert(t.to_string()).second) terms.push_back(t);
    }
    if (t.is_compound()) {
      for (const Term& a : t.args()) add(a);
    }
  }
  void add(const Formula& f) {
    map_terms(f, [&](const Term& t) {
      add(t);
      return t;
    });
  }
};

// Ground points of the model and the day and hour boundaries around them.
std::vector<CalendarHour> boundary_points(const AbductiveModel& m) {
  std::set<std::int64_t> hours;
  std::function<void(const Term&)> visit = [&](const Term& t) {
    if (auto p = ground_point(t); p && p->finite()) {
      CalendarHour c = p->at;
      CalendarHour midnight{c.year, c.month, c.day, 0};
      std::int64_t h = to_hours(c);
      std::int64_t mid = to_hours(midnight);
      for (std::int64_t x : {h, h + 1, mid, mid + 24, mid - 24}) {
        if (x >= min_hours() && x <= max_hours()) hours.insert(x);
      }
      return;
    }
    if (t.is_compound()) {
      for (const Term& a : t.args()) visit(a);
    }
  };
  for (const auto& [p, atoms] : m.abduced) {
    for (const Term& a : atoms) visit(a);
  }
  std::vector<CalendarHour> out;
  for (std::int64_t h : hours) out.push_back(from_hours(h));
  return out;
}

// Predicates used only by the query are open too.
std::optional<std::size_t> predicate_arity_in(const Formula& f, Symbol p) {
  if (f.kind() == FormulaKind::Atom) {
    if (f.predicate() == p) return f.args().size();
    return std::nullopt;
  }
  if (f.kind() == FormulaKind::Equality || f.kind() == FormulaKind::Truth || f.kind() == FormulaKind::Falsity)
    return std::nullopt;
  for (const Formula& c : f.children())
    if (auto a = predicate_arity_in(c, p)) return a;
  return std::nullopt;
}

}  // namespace

VerifyResult verify(const Theory& theory, const AbductiveModel& m, const Formula& query) {
  for (const auto& [p, atoms] : m.abduced) {
    auto arity = theory.predicate_arity(p);
    if (!arity && !query.null()) arity = predicate_arity_in(query, p);
    if (!arity) throw std::invalid_argument("model mentions unknown predicate " + p.str());
    if (theory.is_defined(p) || is_builtin_predicate(p)) {
      return {false, "atom of non-open predicate " + p.str() + " in the model"};
    }
    for (const Term& a : atoms) {
      if (!a.ground() || a.arity() != *arity) return {false, "malformed atom " + a.to_string()};
    }
  }

  DomainBuilder dom;
  for (const Statement& st : theory.statements()) {
    if (const Rule* r = std::get_if<Rule>(&st)) {
      dom.add(r->head);
      dom.add(r->body);
    } else if (const Axiom* a = std::get_if<Axiom>(&st)) {
      dom.add(a->formula);
    }
  }
  if (!query.null()) dom.add(query);
  for (const auto& [p, atoms] : m.abduced) {
    for (const Term& a : atoms) dom.add(a);
  }
  std::vector<CalendarHour> pts = boundary_points(m);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      dom.add(to_term(GroundInterval{GroundPoint::finite(pts[i]), GroundPoint::finite(pts[j])}));
    }
  }

  Evaluator ev(theory, &m.abduced, dom.terms);
  for (const Axiom& a : theory.axioms()) {
    if (!ev.satisfiable(a.formula)) return {false, a.formula.to_string()};
  }
  VarId next = theory.var_limit();
  if (!query.null()) {
    for (VarId v : all_vars(query)) next = std::max(next, v + 1);
  }
  for (const OpenFunctionDecl& d : theory.open_functions()) {
    for (const Formula& f : expand_open_function(d, next)) {
      if (!ev.satisfiable(f)) return {false, f.to_string()};
    }
  }
  if (!query.null() && !ev.satisfiable(query)) return {false, "query " + query.to_string()};
  return {};
}

}  // namespace tempabd
