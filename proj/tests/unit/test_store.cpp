#include <doctest.h>

#include <chrono>
#include <random>

#include "tempabd/store.hpp"

using namespace tempabd;

namespace {

NumAtom le(int x, int y, std::int64_t k = 0) { return {x, y, k, Cmp::Le}; }
NumAtom lt(int x, int y, std::int64_t k = 0) { return {x, y, k, Cmp::Lt}; }
NumAtom eq(int x, int y, std::int64_t k = 0) { return {x, y, k, Cmp::Eq}; }

CalendarHour labeled_time(const Store& s, const TimeVars& t, const std::vector<std::int64_t>& v) {
  auto at = [&](int i) { return static_cast<int>(v[static_cast<std::size_t>(i)]); };
  CalendarHour c{at(t.year), at(t.month), at(t.day), at(t.hour)};
  REQUIRE(to_hours(c) == v[static_cast<std::size_t>(t.absolute)]);
  (void)s;
  return c;
}

}  // namespace

TEST_CASE("antisymmetry and strict cycles") {
  Store s;
  int x = s.new_var(min_hours(), max_hours());
  int y = s.new_var(min_hours(), max_hours());
  CHECK(s.assert_atom(le(x, y)));
  CHECK(s.assert_atom(le(y, x)));
  CHECK_FALSE(s.admits(Compiled{false, {lt(x, y)}}));
  CHECK_FALSE(s.admits(Compiled{false, {lt(y, x)}}));

  Store t;
  x = t.new_var(min_hours(), max_hours());
  y = t.new_var(min_hours(), max_hours());
  auto start = std::chrono::steady_clock::now();
  CHECK(t.assert_atom(lt(x, y)));
  CHECK_FALSE(t.assert_atom(lt(y, x)));
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(1));
}

TEST_CASE("checkpoint and rollback") {
  Store s;
  int x = s.new_var(0, 10);
  auto m = s.checkpoint();
  CHECK(s.assert_atom(lt(x, -1, 3)));
  CHECK(s.bounds(x).hi == 2);
  s.rollback(m);
  CHECK(s.bounds(x).hi == 10);
  CHECK(s.atoms().empty());

  auto outer = s.checkpoint();
  CHECK(s.assert_atom(le(-1, x, -2)));  // x >= 2
  auto inner = s.checkpoint();
  int y = s.new_var(0, 5);
  CHECK(s.assert_atom(lt(x, y)));
  CHECK(s.bounds(x).hi == 4);
  s.rollback(inner);
  CHECK(s.num_vars() == 1);
  CHECK(s.bounds(x).lo == 2);
  CHECK(s.bounds(x).hi == 10);
  s.rollback(outer);
  CHECK(s.bounds(x).lo == 0);
  CHECK_THROWS_AS(s.rollback(inner), std::invalid_argument);

  auto before_fail = s.checkpoint();
  CHECK_FALSE(s.assert_atom(lt(x, -1, 0)));
  CHECK_FALSE(s.consistent());
  CHECK_FALSE(s.assert_atom(le(x, -1, 100)));  // stays inconsistent
  s.rollback(before_fail);
  CHECK(s.consistent());
}

TEST_CASE("unregistered variables are rejected") {
  Store s;
  s.new_var(0, 1);
  CHECK_THROWS_AS(s.assert_atom(le(0, 3)), std::out_of_range);
}

TEST_CASE("calendar links") {
  Store s;
  TimeVars t = s.new_time_point();
  CHECK(s.assert_atom(eq(t.absolute, -1, to_hours({2000, 2, 29, 7}))));
  CHECK(s.bounds(t.year).lo == 2000);
  CHECK(s.bounds(t.month).lo == 2);
  CHECK(s.bounds(t.day).lo == 29);
  CHECK(s.bounds(t.hour).lo == 7);

  Store u;
  TimeVars p = u.new_time_point();
  CHECK(u.assert_atom(eq(p.year, -1, 1999)));
  CHECK(u.assert_atom(eq(p.month, -1, 2)));
  CHECK_FALSE(u.assert_atom(eq(p.day, -1, 30)));

  Store w;
  TimeVars q = w.new_time_point();
  CHECK(w.assert_atom(eq(q.year, -1, 1999)));
  CHECK(w.assert_atom(eq(q.hour, -1, 5)));
  CHECK(w.bounds(q.absolute).lo == to_hours({1999, 1, 1, 5}));
  CHECK(w.bounds(q.absolute).hi == to_hours({1999, 12, 31, 5}));
}

TEST_CASE("labeling defaults") {
  Store s;
  TimeVars t = s.new_time_point();
  auto v = label(s);
  REQUIRE(v);
  CHECK(labeled_time(s, t, *v) == CalendarHour{1999, 1, 1, 0});

  Store d;
  TimeVars p = d.new_time_point();
  auto day = to_hours({2000, 5, 22, 0});
  CHECK(d.assert_atom(le(-1, p.absolute, -day)));
  CHECK(d.assert_atom(lt(p.absolute, -1, day + 24)));
  v = label(d);
  REQUIRE(v);
  CHECK(labeled_time(d, p, *v) == CalendarHour{2000, 5, 22, 0});

  Store e;
  TimeVars q = e.new_time_point();
  CHECK(e.assert_atom(lt(q.absolute, -1, to_hours({1990, 6, 1, 0}))));
  v = label(e);
  REQUIRE(v);
  CHECK(labeled_time(e, q, *v) == CalendarHour{1990, 5, 31, 23});

  Store g;
  int x = g.new_var(3, 3);
  int y = g.new_var(-2, -2);
  v = label(g);
  REQUIRE(v);
  CHECK((*v)[static_cast<std::size_t>(x)] == 3);
  CHECK((*v)[static_cast<std::size_t>(y)] == -2);
}

TEST_CASE("labeling straddles the epoch") {
  Store s;
  TimeVars a = s.new_time_point();
  TimeVars b = s.new_time_point();
  auto epoch = to_hours({1999, 1, 1, 0});
  // a before b, b at most 3 hours after the epoch, a at least 10 hours before b
  CHECK(s.assert_atom(le(b.absolute, -1, epoch + 3)));
  CHECK(s.assert_atom(le(a.absolute, b.absolute, -10)));
  auto v = label(s);
  REQUIRE(v);
  CHECK(s.satisfied_by(*v));
  CHECK((*v)[static_cast<std::size_t>(a.absolute)] == epoch - 7);
  CHECK(label(s) == v);
}

TEST_CASE("labeling agrees with brute force on small stores") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 400; ++round) {
    Store s;
    int n = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int i = 0; i < n; ++i) s.new_var(0, 7);
    int m = std::uniform_int_distribution<int>(1, 6)(rng);
    std::uniform_int_distribution<int> var(-1, n - 1), k(-4, 4), cmp(0, 2);
    std::vector<NumAtom> atoms;
    for (int i = 0; i < m; ++i) {
      NumAtom a{var(rng), var(rng), k(rng), static_cast<Cmp>(cmp(rng))};
      atoms.push_back(a);
      s.assert_atom(a);
    }
    bool brute = false;
    std::vector<std::int64_t> vals(static_cast<std::size_t>(n), 0);
    for (int code = 0; code < (1 << (3 * n)) && !brute; ++code) {
      for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = (code >> (3 * i)) & 7;
      bool ok = true;
      for (const auto& a : atoms) ok = ok && satisfied(a, vals);
      brute = ok;
    }
    auto v = label(s);
    CAPTURE(round);
    REQUIRE(v.has_value() == brute);
    if (v) {
      for (const auto& a : atoms) REQUIRE(satisfied(a, *v));
      REQUIRE(label(s) == v);
    }
  }
}
