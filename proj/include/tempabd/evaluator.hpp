#pragma once

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tempabd/theory.hpp"

namespace tempabd {

/// Ground atoms of open predicates, each stored as the compound `p(args)`.
using AtomSet = std::map<Symbol, std::vector<Term>>;

/// Finite evaluation of formulas under a closed-world interpretation of the
/// open predicates. Defined predicates are evaluated through their rules and
/// builtins through ground interval semantics. Variables that no literal can
/// bind range over `domain`.
class Evaluator {
 public:
  /// With `atoms == nullptr`, reaching an open predicate throws
  /// std::logic_error (defined-only mode).
  Evaluator(const Theory& theory, const AtomSet* atoms, std::vector<Term> domain = {});

  /// Truth of a formula whose free variables are read existentially.
  bool satisfiable(const Formula& f);

  /// Ground answers for `x` in the solutions of `f`, without duplicates, in
  /// order of discovery. Throws std::logic_error if an answer is non-ground.
  std::vector<Term> answers(const Formula& f, const Term& x);

  // Binding interface used by unification.
  Term deref(const Term& t) const;
  bool can_bind(VarId id) const { return !env_.contains(id); }
  void bind(VarId id, Term value) {
    env_.emplace(id, std::move(value));
    trail_.push_back(id);
  }

 private:
  using Cont = std::function<bool()>;

  bool solve(const Formula& f, const Cont& k);
  bool solve_conj(std::vector<Formula> pending, const Cont& k);
  bool solve_atom(const Formula& f, const Cont& k);
  bool solve_negation(const Formula& inner, const Cont& k);
  bool enumerate(VarId v, const Cont& k);

  // 0: can run now, 1: can run but may need domain enumeration, 2: blocked
  int readiness(const Formula& f) const;
  bool closed(const Formula& f) const;
  std::optional<VarId> first_unbound(const Formula& f) const;
  Formula fresh(const Formula& f, const std::vector<VarId>& vars);
  Term resolve(const Term& t) const;

  bool unify(const Term& a, const Term& b) { return unify_into(*this, a, b); }
  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t m);

  const Theory& theory_;
  const AtomSet* atoms_;
  std::vector<Term> domain_;
  std::unordered_map<VarId, Term> env_;
  std::vector<VarId> trail_;
  VarId next_var_;
  std::unordered_map<Symbol, std::vector<std::pair<Rule, std::vector<VarId>>>> rules_;
};

}  // namespace tempabd
