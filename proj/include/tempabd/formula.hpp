#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tempabd/term.hpp"

namespace tempabd {

enum class FormulaKind : std::uint8_t {
  Truth,
  Falsity,
  Atom,
  Equality,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Exists,
  Forall,
};

/// Immutable first-order formula over `Term`s.
///
/// Quantified variables are stored as variable terms so that their source
/// names survive printing. Every binder introduces variable ids distinct from
/// all other variables of the enclosing statement.
class Formula {
 public:
  Formula() = default;

  static Formula truth();
  static Formula falsity();
  static Formula atom(Symbol predicate, std::vector<Term> args);
  static Formula equality(Term lhs, Term rhs);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> fs);
  static Formula disjunction(std::vector<Formula> fs);
  static Formula implication(Formula ante, Formula cons);
  static Formula equivalence(Formula lhs, Formula rhs);
  static Formula exists(std::vector<Term> vars, Formula body);
  static Formula forall(std::vector<Term> vars, Formula body);

  bool null() const { return node_ == nullptr; }
  FormulaKind kind() const;

  // Atom
  Symbol predicate() const;
  std::span<const Term> args() const;
  // Equality
  const Term& lhs() const;
  const Term& rhs() const;
  // Not, And, Or, Implies, Iff (two children), Exists/Forall (one child)
  std::span<const Formula> children() const;
  const Formula& child(std::size_t i) const { return children()[i]; }
  // Exists, Forall
  std::span<const Term> vars() const;
  const Formula& body() const { return child(0); }

  /// Concrete syntax that the parser reads back to an alpha-equivalent formula.
  std::string to_string() const;

  void collect_free_vars(std::vector<Term>& out) const;

 struct Node;

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using VarMap = std::unordered_map<VarId, Term>;

/// Replaces variables according to `m` everywhere, including binder lists
/// (a binder mapped to a non-variable term is dropped from its list).
Formula rename(const Formula& f, const VarMap& m);

/// Applies `s` to every term. Bound variables must not be in `s`'s domain.
Formula apply(const Substitution& s, const Formula& f);

/// Structural equality modulo a consistent bijective renaming of variables.
bool alpha_equivalent(const Formula& a, const Formula& b);

std::vector<Term> free_vars(const Formula& f);

/// Every variable id occurring in `f`, free or bound, in first-occurrence order.
std::vector<VarId> all_vars(const Formula& f);

/// Applies `fn` to every argument term. Binder lists are left untouched.
Formula map_terms(const Formula& f, const std::function<Term(const Term&)>& fn);

}  // namespace tempabd
