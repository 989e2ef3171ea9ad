#include <doctest.h>

#include <random>
#include <vector>

#include "tempabd/calendar.hpp"
#include "tempabd/temporal.hpp"
#include "tempabd/theory.hpp"

using namespace tempabd;

namespace {

// Day count from 0001-01-01 by plain iteration over years and months.
std::int64_t oracle_days(int y, int m, int d) {
  static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  auto leap = [](int yy) { return (yy % 4 == 0 && yy % 100 != 0) || yy % 400 == 0; };
  std::int64_t n = 0;
  for (int yy = 1; yy < y; ++yy) n += leap(yy) ? 366 : 365;
  for (int mm = 1; mm < m; ++mm) n += mdays[mm - 1] + (mm == 2 && leap(y) ? 1 : 0);
  return n + d - 1;
}

Term term(const char* s) {
  VarId next = 0;
  return parse_term(s, next);
}

GroundInterval interval(const char* s) { return *ground_interval(term(s)); }

// A 6-point totally ordered grid: -inf, 1, 2, 3, 4, +inf.
constexpr int kGrid[] = {-100, 1, 2, 3, 4, 100};

struct GridInterval {
  int s, e;  // grid indices
};

PointRef grid_ref(int idx, int var) {
  if (idx == 0) return PointRef::minus_infinity();
  if (idx == 5) return PointRef::plus_infinity();
  return PointRef::finite(var, -1);
}

bool set_relation(TemporalRelation r, GridInterval i1, GridInterval i2) {
  int a = kGrid[i1.s], b = kGrid[i1.e], c = kGrid[i2.s], d = kGrid[i2.e];
  auto all = [&](auto pred) {
    for (int x = a; x < b; ++x)
      for (int y = c; y < d; ++y)
        if (!pred(x, y)) return false;
    return true;
  };
  auto member2 = [&](int x) { return c <= x && x < d; };
  switch (r) {
    case TemporalRelation::Before: return all([](int x, int y) { return x < y; });
    case TemporalRelation::After: return all([](int x, int y) { return x > y; });
    case TemporalRelation::Meets: {
      // i1 wholly precedes i2 and their union has no gap
      if (!all([](int x, int y) { return x < y; })) return false;
      for (int z = a; z < d; ++z)
        if (!(z < b) && !member2(z)) return false;
      return true;
    }
    case TemporalRelation::Within: {
      for (int x = a; x < b; ++x)
        if (!member2(x)) return false;
      return true;
    }
    case TemporalRelation::Overlap: {
      for (int x = a; x < b; ++x)
        if (member2(x)) return true;
      return false;
    }
    case TemporalRelation::NotBefore: {
      for (int y = c; y < d; ++y)
        for (int x = a; x < b; ++x)
          if (!(x < y)) return true;
      return false;
    }
  }
  return false;
}

std::vector<GridInterval> grid_intervals() {
  std::vector<GridInterval> out;
  for (int s = 0; s < 6; ++s)
    for (int e = s + 1; e < 6; ++e) out.push_back({s, e});
  return out;
}

const TemporalRelation kRelations[] = {TemporalRelation::Overlap, TemporalRelation::Within,
                                       TemporalRelation::Before,  TemporalRelation::Meets,
                                       TemporalRelation::After,   TemporalRelation::NotBefore};

bool compiled_relation(TemporalRelation r, GridInterval i1, GridInterval i2) {
  IntervalRef r1{grid_ref(i1.s, 0), grid_ref(i1.e, 1)};
  IntervalRef r2{grid_ref(i2.s, 2), grid_ref(i2.e, 3)};
  std::vector<std::int64_t> values{kGrid[i1.s], kGrid[i1.e], kGrid[i2.s], kGrid[i2.e]};
  return satisfied(compile_relation(r, r1, r2), values);
}

GroundInterval grid_ground(GridInterval g) {
  auto p = [](int idx) {
    if (idx == 0) return GroundPoint::minus_infinity();
    if (idx == 5) return GroundPoint::plus_infinity();
    return GroundPoint::finite(from_hours(to_hours({1999, 1, 1, 0}) + kGrid[idx]));
  };
  return {p(g.s), p(g.e)};
}

}  // namespace

TEST_CASE("calendar agrees with a day-count oracle") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> year(1, 9999), month(1, 12), hour(0, 23);
  const std::int64_t base = to_hours({1970, 1, 1, 0}) / 24 - oracle_days(1970, 1, 1);
  CHECK(to_hours({1970, 1, 1, 0}) == 0);
  for (int i = 0; i < 1000; ++i) {
    int y = year(rng), m = month(rng);
    int d = std::uniform_int_distribution<int>(1, days_in_month(y, m))(rng);
    int h = hour(rng);
    CalendarHour t{y, m, d, h};
    REQUIRE(to_hours(t) == (oracle_days(y, m, d) + base) * 24 + h);
    REQUIRE(from_hours(to_hours(t)) == t);
  }
  CHECK(days_in_month(2000, 2) == 29);
  CHECK(days_in_month(1900, 2) == 28);
  CHECK_FALSE(is_valid({1999, 2, 29, 0}));
}

TEST_CASE("next_day") {
  CHECK(next_day(term("ts(1999,1,1,0)")) == term("ts(1999,1,2,0)"));
  CHECK(next_day(term("ts(1999,12,31,5)")) == term("ts(2000,1,1,0)"));
  CHECK(next_day(term("ts(2000,2,28,0)")) == term("ts(2000,2,29,0)"));
  CHECK_THROWS_AS(next_day(term("ts(1999,1,X,0)")), std::invalid_argument);
  CHECK_THROWS_AS(next_day(term("pinf")), std::invalid_argument);

  std::mt19937 rng(11);
  std::uniform_int_distribution<std::int64_t> hours(to_hours({1, 1, 1, 0}), to_hours({9998, 12, 1, 0}));
  for (int i = 0; i < 500; ++i) {
    CalendarHour t = from_hours(hours(rng));
    CalendarHour n = next_day(t);
    REQUIRE(n > t);
    CalendarHour midnight{t.year, t.month, t.day, 0};
    // day_a intervals tile the timeline
    GroundInterval day{GroundPoint::finite(midnight), GroundPoint::finite(next_day(midnight))};
    GroundInterval following{GroundPoint::finite(n), GroundPoint::finite(next_day(n))};
    REQUIRE(holds(TemporalProperty::DayA, day));
    REQUIRE(holds(TemporalProperty::DayA, following));
    REQUIRE(holds(TemporalRelation::Meets, day, following));
  }
}

TEST_CASE("property examples") {
  CHECK(holds(TemporalProperty::DayA, interval("int(ts(1976,5,21,0),ts(1976,5,22,0))")));
  CHECK(holds(TemporalProperty::Hour, interval("int(ts(2000,5,22,0),ts(2000,5,22,1))")));
  CHECK(holds(TemporalProperty::DayA, interval("int(ts(1999,1,31,0),ts(1999,2,1,0))")));
  CHECK(holds(TemporalProperty::Hour, interval("int(ts(1999,12,31,23),ts(2000,1,1,0))")));
  CHECK_FALSE(holds(TemporalProperty::DayA, interval("int(ts(1999,1,31,1),ts(1999,2,1,0))")));
  CHECK(holds(TemporalProperty::Bounded, interval("int(ts(1999,1,1,0),ts(1999,1,1,5))")));
  CHECK_FALSE(holds(TemporalProperty::Bounded, interval("int(minf,ts(1999,1,1,5))")));
  CHECK(holds(TemporalProperty::Point, interval("int(ts(1999,1,1,4),ts(1999,1,1,5))")));
  CHECK_FALSE(ground_interval(term("int(ts(1999,1,2,0),ts(1999,1,1,0))")));
  CHECK_FALSE(ground_interval(term("int(ts(1999,2,30,0),ts(1999,3,1,0))")));
}

TEST_CASE("relation examples") {
  auto jan1 = interval("int(ts(1999,1,1,0),ts(1999,1,2,0))");
  auto jan2 = interval("int(ts(1999,1,2,0),ts(1999,1,3,0))");
  CHECK(holds(TemporalRelation::Meets, jan1, jan2));
  CHECK(holds(TemporalRelation::Within, jan1, jan1));
  CHECK(holds(TemporalRelation::After, jan2, jan1));
  CHECK_FALSE(holds(TemporalRelation::Overlap, jan1, jan2));
  CHECK(relation_from_name("not_before") == TemporalRelation::NotBefore);
  CHECK_THROWS(relation_from_name("during"));
  CHECK_THROWS(property_from_name("week"));
}

TEST_CASE("relations agree with set semantics on a 6-point grid") {
  auto intervals = grid_intervals();
  REQUIRE(intervals.size() == 15);
  for (auto r : kRelations) {
    for (auto i1 : intervals) {
      for (auto i2 : intervals) {
        bool expected = set_relation(r, i1, i2);
        CAPTURE(static_cast<int>(r));
        CAPTURE(i1.s);
        CAPTURE(i1.e);
        CAPTURE(i2.s);
        CAPTURE(i2.e);
        REQUIRE(compiled_relation(r, i1, i2) == expected);
        REQUIRE(holds(r, grid_ground(i1), grid_ground(i2)) == expected);
        // the negation covers exactly the complement
        IntervalRef r1{grid_ref(i1.s, 0), grid_ref(i1.e, 1)};
        IntervalRef r2{grid_ref(i2.s, 2), grid_ref(i2.e, 3)};
        std::vector<std::int64_t> values{kGrid[i1.s], kGrid[i1.e], kGrid[i2.s], kGrid[i2.e]};
        int count = 0;
        for (const Compiled& c : negate(compile_relation(r, r1, r2))) count += satisfied(c, values) ? 1 : 0;
        REQUIRE(count == (expected ? 0 : 1));
      }
    }
  }
}

TEST_CASE("relation implications on the grid") {
  auto intervals = grid_intervals();
  for (auto i1 : intervals) {
    for (auto i2 : intervals) {
      auto h = [&](TemporalRelation r) { return set_relation(r, i1, i2); };
      if (h(TemporalRelation::Within)) CHECK(h(TemporalRelation::Overlap));
      if (h(TemporalRelation::Meets)) CHECK(h(TemporalRelation::Before));
      if (h(TemporalRelation::Before)) CHECK_FALSE(h(TemporalRelation::Overlap));
      CHECK(h(TemporalRelation::NotBefore) == !h(TemporalRelation::Before));
      CHECK(h(TemporalRelation::After) == set_relation(TemporalRelation::Before, i2, i1));
      CHECK_FALSE((h(TemporalRelation::Before) && set_relation(TemporalRelation::Before, i2, i1)));
    }
  }
}

TEST_CASE("compiled properties") {
  // vars: 0 start.abs, 1 start.hour, 2 end.abs, 3 end.hour
  IntervalRef i{PointRef::finite(0, 1), PointRef::finite(2, 3)};
  auto day = to_hours({1999, 3, 4, 0});
  CHECK(satisfied(compile_property(TemporalProperty::DayA, i), std::vector<std::int64_t>{day, 0, day + 24, 0}));
  CHECK_FALSE(satisfied(compile_property(TemporalProperty::DayA, i),
                        std::vector<std::int64_t>{day + 1, 1, day + 25, 1}));
  CHECK(satisfied(compile_property(TemporalProperty::Hour, i), std::vector<std::int64_t>{day, 0, day + 1, 1}));
  CHECK(compile_property(TemporalProperty::Bounded, i).always());
  IntervalRef open{PointRef::finite(0, 1), PointRef::plus_infinity()};
  CHECK(compile_property(TemporalProperty::Bounded, open).never);
  CHECK(compile_property(TemporalProperty::DayA, open).never);
}
