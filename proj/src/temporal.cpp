#include "tempabd/temporal.hpp"

#include <stdexcept>
#include <string>

namespace tempabd {

namespace {

using Kind = GroundPoint::Kind;

int rank(Kind k) { return k == Kind::MinusInfinity ? -1 : k == Kind::PlusInfinity ? 1 : 0; }

Compiled always() { return Compiled{}; }

Compiled from_bool(bool b) { return b ? always() : Compiled::falsity(); }

// p cmp q + k
Compiled point_cmp(const PointRef& p, Cmp cmp, const PointRef& q, std::int64_t k = 0) {
  if (p.kind == Kind::Finite && q.kind == Kind::Finite) return Compiled{false, {NumAtom{p.absolute, q.absolute, k, cmp}}};
  int a = rank(p.kind);
  int b = rank(q.kind);
  if (a == b) return from_bool(cmp != Cmp::Lt);  // both the same infinity
  switch (cmp) {
    case Cmp::Le: return from_bool(a <= b);
    case Cmp::Lt: return from_bool(a < b);
    case Cmp::Eq: return from_bool(false);
  }
  return Compiled::falsity();
}

Compiled both(Compiled a, const Compiled& b) {
  if (a.never || b.never) return Compiled::falsity();
  a.atoms.insert(a.atoms.end(), b.atoms.begin(), b.atoms.end());
  return a;
}

NumAtom flip(const NumAtom& a, Cmp cmp) { return NumAtom{a.y, a.x, -a.k, cmp}; }

Symbol sym_ts() {
  static const Symbol s("ts");
  return s;
}
Symbol sym_int() {
  static const Symbol s("int");
  return s;
}
Symbol sym_minf() {
  static const Symbol s("minf");
  return s;
}
Symbol sym_pinf() {
  static const Symbol s("pinf");
  return s;
}

}  // namespace

std::optional<TemporalRelation> try_relation(std::string_view name) {
  if (name == "overlap") return TemporalRelation::Overlap;
  if (name == "within") return TemporalRelation::Within;
  if (name == "before") return TemporalRelation::Before;
  if (name == "meets") return TemporalRelation::Meets;
  if (name == "after") return TemporalRelation::After;
  if (name == "not_before") return TemporalRelation::NotBefore;
  return std::nullopt;
}

std::optional<TemporalProperty> try_property(std::string_view name) {
  if (name == "day_a") return TemporalProperty::DayA;
  if (name == "hour") return TemporalProperty::Hour;
  if (name == "bounded") return TemporalProperty::Bounded;
  if (name == "point") return TemporalProperty::Point;
  return std::nullopt;
}

TemporalRelation relation_from_name(std::string_view name) {
  if (auto r = try_relation(name)) return *r;
  throw std::invalid_argument("unknown temporal relation '" + std::string(name) + "'");
}

TemporalProperty property_from_name(std::string_view name) {
  if (auto p = try_property(name)) return *p;
  throw std::invalid_argument("unknown interval property '" + std::string(name) + "'");
}

int compare(const GroundPoint& p, const GroundPoint& q) {
  if (!p.finite() || !q.finite()) {
    int a = rank(p.kind);
    int b = rank(q.kind);
    return (a > b) - (a < b);
  }
  if (p.at < q.at) return -1;
  return p.at == q.at ? 0 : 1;
}

std::optional<GroundPoint> ground_point(const Term& t) {
  if (!t.is_compound()) return std::nullopt;
  if (t.arity() == 0) {
    if (t.functor() == sym_minf()) return GroundPoint::minus_infinity();
    if (t.functor() == sym_pinf()) return GroundPoint::plus_infinity();
    return std::nullopt;
  }
  if (t.functor() != sym_ts() || t.arity() != 4) return std::nullopt;
  for (const Term& a : t.args())
    if (!a.is_int()) return std::nullopt;
  CalendarHour h{static_cast<int>(t.arg(0).int_value()), static_cast<int>(t.arg(1).int_value()),
                 static_cast<int>(t.arg(2).int_value()), static_cast<int>(t.arg(3).int_value())};
  if (!is_valid(h)) return std::nullopt;
  return GroundPoint::finite(h);
}

std::optional<GroundInterval> ground_interval(const Term& t) {
  if (!t.is_compound() || t.functor() != sym_int() || t.arity() != 2) return std::nullopt;
  auto s = ground_point(t.arg(0));
  auto e = ground_point(t.arg(1));
  if (!s || !e || compare(*s, *e) >= 0) return std::nullopt;
  return GroundInterval{*s, *e};
}

Term to_term(const GroundPoint& p) {
  switch (p.kind) {
    case Kind::MinusInfinity: return Term::constant(sym_minf());
    case Kind::PlusInfinity: return Term::constant(sym_pinf());
    case Kind::Finite: break;
  }
  return Term::compound(sym_ts(), {Term::integer(p.at.year), Term::integer(p.at.month),
                                   Term::integer(p.at.day), Term::integer(p.at.hour)});
}

Term to_term(const GroundInterval& i) { return Term::compound(sym_int(), {to_term(i.start), to_term(i.end)}); }

bool holds(TemporalRelation r, const GroundInterval& i1, const GroundInterval& i2) {
  const auto& [a, b] = i1;
  const auto& [c, d] = i2;
  switch (r) {
    case TemporalRelation::Before: return compare(b, c) <= 0;
    case TemporalRelation::Meets: return compare(b, c) == 0;
    case TemporalRelation::Within: return compare(c, a) <= 0 && compare(b, d) <= 0;
    case TemporalRelation::Overlap: return compare(a, d) < 0 && compare(c, b) < 0;
    case TemporalRelation::After: return compare(d, a) <= 0;
    case TemporalRelation::NotBefore: return compare(c, b) < 0;
  }
  return false;
}

bool holds(TemporalProperty p, const GroundInterval& i) {
  switch (p) {
    case TemporalProperty::Bounded: return i.start.finite() && i.end.finite();
    case TemporalProperty::DayA:
      return i.start.finite() && i.end.finite() && i.start.at.hour == 0 && i.end.at == next_day(i.start.at);
    case TemporalProperty::Hour:
    case TemporalProperty::Point:
      return i.start.finite() && i.end.finite() && to_hours(i.end.at) == to_hours(i.start.at) + 1;
  }
  return false;
}

Term next_day(const Term& p) {
  auto g = ground_point(p);
  if (!g || !g->finite()) throw std::invalid_argument("next_day needs a ground finite time point, got " + p.to_string());
  return to_term(GroundPoint::finite(next_day(g->at)));
}

Compiled compile_relation(TemporalRelation r, const IntervalRef& i1, const IntervalRef& i2) {
  const PointRef &a = i1.start, &b = i1.end, &c = i2.start, &d = i2.end;
  switch (r) {
    case TemporalRelation::Before: return point_cmp(b, Cmp::Le, c);
    case TemporalRelation::Meets: return point_cmp(b, Cmp::Eq, c);
    case TemporalRelation::Within: return both(point_cmp(c, Cmp::Le, a), point_cmp(b, Cmp::Le, d));
    case TemporalRelation::Overlap: return both(point_cmp(a, Cmp::Lt, d), point_cmp(c, Cmp::Lt, b));
    case TemporalRelation::After: return point_cmp(d, Cmp::Le, a);
    case TemporalRelation::NotBefore: return point_cmp(c, Cmp::Lt, b);
  }
  return Compiled::falsity();
}

Compiled compile_property(TemporalProperty p, const IntervalRef& i) {
  bool bounded = i.start.kind == Kind::Finite && i.end.kind == Kind::Finite;
  switch (p) {
    case TemporalProperty::Bounded: return from_bool(bounded);
    case TemporalProperty::DayA:
      if (!bounded) return Compiled::falsity();
      return both(Compiled{false, {NumAtom{i.start.hour, -1, 0, Cmp::Eq}}},
                  point_cmp(i.end, Cmp::Eq, i.start, 24));
    case TemporalProperty::Hour:
    case TemporalProperty::Point:
      if (!bounded) return Compiled::falsity();
      return point_cmp(i.end, Cmp::Eq, i.start, 1);
  }
  return Compiled::falsity();
}

Compiled compile_nonempty(const IntervalRef& i) { return point_cmp(i.start, Cmp::Lt, i.end); }

std::vector<Compiled> negate(const Compiled& c) {
  if (c.never) return {always()};
  std::vector<Compiled> out;
  // not(A1 & ... & An) as the disjoint cases A1 & ... & A(i-1) & not Ai.
  std::vector<NumAtom> prefix;
  for (const NumAtom& a : c.atoms) {
    auto with_prefix = [&](NumAtom n) {
      Compiled alt{false, prefix};
      alt.atoms.push_back(n);
      out.push_back(std::move(alt));
    };
    switch (a.cmp) {
      case Cmp::Le: with_prefix(flip(a, Cmp::Lt)); break;
      case Cmp::Lt: with_prefix(flip(a, Cmp::Le)); break;
      case Cmp::Eq:
        with_prefix(NumAtom{a.x, a.y, a.k, Cmp::Lt});
        with_prefix(flip(a, Cmp::Lt));
        break;
    }
    prefix.push_back(a);
  }
  return out;
}

bool satisfied(const NumAtom& a, std::span<const std::int64_t> values) {
  std::int64_t x = a.x < 0 ? 0 : values[a.x];
  std::int64_t y = a.y < 0 ? 0 : values[a.y];
  switch (a.cmp) {
    case Cmp::Le: return x <= y + a.k;
    case Cmp::Lt: return x < y + a.k;
    case Cmp::Eq: return x == y + a.k;
  }
  return false;
}

bool satisfied(const Compiled& c, std::span<const std::int64_t> values) {
  if (c.never) return false;
  for (const NumAtom& a : c.atoms)
    if (!satisfied(a, values)) return false;
  return true;
}

}  // namespace tempabd
