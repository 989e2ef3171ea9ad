#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tempabd {

/// Interned identifier. Equality is pointer equality; ordering is lexical.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view name);

  const std::string& str() const;
  bool empty() const { return name_ == nullptr; }

  friend bool operator==(Symbol a, Symbol b) { return a.name_ == b.name_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    return a.str() <=> b.str();
  }

  std::size_t hash() const { return std::hash<const void*>{}(name_); }

 private:
  const std::string* name_ = nullptr;
};

using VarId = std::uint32_t;

enum class TermKind : std::uint8_t { Variable, Integer, Compound };

/// Immutable first-order term. Copies share structure.
///
/// Compounds act as constructors (unique names): two compounds are equal only
/// when functor, arity and all arguments coincide. A constant is a zero-arity
/// compound.
class Term {
 public:
  Term() = default;

  static Term variable(VarId id, Symbol name = {});
  static Term integer(std::int64_t value);
  static Term compound(Symbol functor, std::vector<Term> args);
  static Term constant(Symbol functor) { return compound(functor, {}); }
  static Term constant(std::string_view functor) { return constant(Symbol(functor)); }

  bool null() const { return node_ == nullptr; }
  TermKind kind() const;
  bool is_var() const { return kind() == TermKind::Variable; }
  bool is_int() const { return kind() == TermKind::Integer; }
  bool is_compound() const { return kind() == TermKind::Compound; }
  bool is_constant() const { return is_compound() && arity() == 0; }

  VarId var_id() const;
  Symbol var_name() const;
  std::int64_t int_value() const;
  Symbol functor() const;
  std::span<const Term> args() const;
  std::size_t arity() const { return args().size(); }
  const Term& arg(std::size_t i) const { return args()[i]; }

  bool ground() const;
  bool contains_var(VarId id) const;
  void collect_vars(std::vector<VarId>& out) const;

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Triangular variable bindings. `apply` resolves chains fully, so applying a
/// substitution to its own output is the identity.
class Substitution {
 public:
  bool bound(VarId id) const { return id < slots_.size() && !slots_[id].null(); }
  const Term& lookup(VarId id) const { return slots_[id]; }
  bool can_bind(VarId id) const { return !bound(id); }
  void bind(VarId id, Term value);
  std::size_t size() const { return count_; }

  /// Follows variable bindings at the top level only.
  Term deref(const Term& t) const;
  Term apply(const Term& t) const;

  /// Variables bound by this substitution, in increasing id order.
  std::vector<VarId> domain() const;

 private:
  std::vector<Term> slots_;
  std::size_t count_ = 0;
};

/// Generic unification with occurs check against any binding store providing
/// `deref`, `can_bind` and `bind`. Returns false on clash; partial bindings
/// may remain in `b` on failure, callers work on a copy or overlay.
template <class Bindings>
bool occurs_in(const Bindings& b, VarId id, const Term& t) {
  Term d = b.deref(t);
  if (d.is_var()) return d.var_id() == id;
  if (d.is_int() || d.ground()) return false;
  for (const Term& a : d.args())
    if (occurs_in(b, id, a)) return true;
  return false;
}

template <class Bindings>
bool unify_into(Bindings& b, const Term& x, const Term& y) {
  Term a = b.deref(x);
  Term c = b.deref(y);
  if (a.is_var() && c.is_var() && a.var_id() == c.var_id()) return true;
  if (a.is_var() && b.can_bind(a.var_id())) {
    if (occurs_in(b, a.var_id(), c)) return false;
    b.bind(a.var_id(), c);
    return true;
  }
  if (c.is_var() && b.can_bind(c.var_id())) {
    if (occurs_in(b, c.var_id(), a)) return false;
    b.bind(c.var_id(), a);
    return true;
  }
  if (a.is_var() || c.is_var()) return false;
  if (a.is_int() || c.is_int()) return a.is_int() && c.is_int() && a.int_value() == c.int_value();
  if (a.functor() != c.functor() || a.arity() != c.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!unify_into(b, a.arg(i), c.arg(i))) return false;
  return true;
}

/// Most general unifier of t1 and t2 extending s, or nullopt under UNA.
std::optional<Substitution> unify(const Term& t1, const Term& t2, const Substitution& s);

Term apply(const Substitution& s, const Term& t);

}  // namespace tempabd

template <>
struct std::hash<tempabd::Symbol> {
  std::size_t operator()(tempabd::Symbol s) const noexcept { return s.hash(); }
};
