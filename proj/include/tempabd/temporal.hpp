#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tempabd/calendar.hpp"
#include "tempabd/term.hpp"

namespace tempabd {

// Relations between half-open intervals [a,b) and [c,d):
//   before      b <= c          meets       b = c
//   within      c <= a, b <= d  overlap     a < d, c < b
//   after       d <= a          not_before  c < b
enum class TemporalRelation { Overlap, Within, Before, Meets, After, NotBefore };

// day_a: a whole calendar day; hour and point: one hour; bounded: no
// infinite endpoint.
enum class TemporalProperty { DayA, Hour, Bounded, Point };

/// Throws std::invalid_argument for unknown names.
TemporalRelation relation_from_name(std::string_view name);
TemporalProperty property_from_name(std::string_view name);
std::optional<TemporalRelation> try_relation(std::string_view name);
std::optional<TemporalProperty> try_property(std::string_view name);

// ---------------------------------------------------------------------------
// Ground time points, as they appear in labeled models.

struct GroundPoint {
  enum class Kind { MinusInfinity, Finite, PlusInfinity };
  Kind kind = Kind::Finite;
  CalendarHour at;

  static GroundPoint minus_infinity() { return {Kind::MinusInfinity, {}}; }
  static GroundPoint plus_infinity() { return {Kind::PlusInfinity, {}}; }
  static GroundPoint finite(CalendarHour t) { return {Kind::Finite, t}; }

  bool finite() const { return kind == Kind::Finite; }
};

/// Total order: -infinity < every finite point < +infinity.
int compare(const GroundPoint& p, const GroundPoint& q);

struct GroundInterval {
  GroundPoint start;
  GroundPoint end;
};

/// `ts(Y,M,D,H)`, `minf` or `pinf`, when ground and a valid calendar hour.
std::optional<GroundPoint> ground_point(const Term& t);
/// `int(S,E)` with ground endpoints and S < E.
std::optional<GroundInterval> ground_interval(const Term& t);

Term to_term(const GroundPoint& p);
Term to_term(const GroundInterval& i);

bool holds(TemporalRelation r, const GroundInterval& i1, const GroundInterval& i2);
bool holds(TemporalProperty p, const GroundInterval& i);

/// Midnight of the day after `p`. Throws std::invalid_argument unless `p` is
/// a ground, finite, valid `ts/4` term.
Term next_day(const Term& p);

// ---------------------------------------------------------------------------
// Compilation to numeric constraints over constraint-store variables.

/// A finite endpoint is represented by two store variables: its absolute
/// hour count and its hour-of-day component.
struct PointRef {
  GroundPoint::Kind kind = GroundPoint::Kind::Finite;
  int absolute = -1;
  int hour = -1;

  static PointRef minus_infinity() { return {GroundPoint::Kind::MinusInfinity, -1, -1}; }
  static PointRef plus_infinity() { return {GroundPoint::Kind::PlusInfinity, -1, -1}; }
  static PointRef finite(int absolute, int hour) { return {GroundPoint::Kind::Finite, absolute, hour}; }
};

struct IntervalRef {
  PointRef start;
  PointRef end;
};

enum class Cmp { Le, Lt, Eq };

/// `x cmp y + k`; a variable index of -1 stands for the constant 0.
struct NumAtom {
  int x = -1;
  int y = -1;
  std::int64_t k = 0;
  Cmp cmp = Cmp::Le;

  friend bool operator==(const NumAtom&, const NumAtom&) = default;
};

/// A conjunction of numeric atoms, or a statically false condition.
struct Compiled {
  bool never = false;
  std::vector<NumAtom> atoms;

  bool always() const { return !never && atoms.empty(); }
  static Compiled falsity() { return Compiled{true, {}}; }
};

Compiled compile_relation(TemporalRelation r, const IntervalRef& i1, const IntervalRef& i2);
Compiled compile_property(TemporalProperty p, const IntervalRef& i);
/// Non-emptiness of the interval: start < end.
Compiled compile_nonempty(const IntervalRef& i);

/// The negation of `c` as a disjunction of conjunctions.
std::vector<Compiled> negate(const Compiled& c);

bool satisfied(const NumAtom& a, std::span<const std::int64_t> values);
bool satisfied(const Compiled& c, std::span<const std::int64_t> values);

}  // namespace tempabd
