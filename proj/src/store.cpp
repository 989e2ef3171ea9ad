#include "tempabd/store.hpp"

#include <algorithm>
#include <stdexcept>

namespace tempabd {

namespace {

constexpr std::int64_t kNoValue = INT64_MIN;

struct Box {
  Bounds y, m, d, h;
};

std::int64_t first_of_next_month(int y, int m) {
  if (m == 12) {
    if (y + 1 > kMaxYear) return kNoValue;
    return to_hours({y + 1, 1, 1, 0});
  }
  return to_hours({y, m + 1, 1, 0});
}

std::int64_t last_of_prev_month(int y, int m) {
  if (m == 1) {
    if (y - 1 < kMinYear) return kNoValue;
    return to_hours({y - 1, 12, 31, 23});
  }
  return to_hours({y, m - 1, days_in_month(y, m - 1), 23});
}

// Smallest hour >= t (and <= limit) whose calendar decomposition lies in box.
std::int64_t next_valid(std::int64_t t, std::int64_t limit, const Box& b) {
  while (t <= limit) {
    if (t < min_hours()) t = min_hours();
    if (t > max_hours()) return kNoValue;
    CalendarHour c = from_hours(t);
    if (c.year < b.y.lo) {
      t = to_hours({static_cast<int>(b.y.lo), 1, 1, 0});
    } else if (c.year > b.y.hi) {
      return kNoValue;
    } else if (c.month < b.m.lo) {
      t = to_hours({c.year, static_cast<int>(b.m.lo), 1, 0});
    } else if (c.month > b.m.hi) {
      t = first_of_next_month(c.year, 12);
    } else if (c.day < b.d.lo) {
      t = b.d.lo <= days_in_month(c.year, c.month) ? to_hours({c.year, c.month, static_cast<int>(b.d.lo), 0})
                                                    : first_of_next_month(c.year, c.month);
    } else if (c.day > b.d.hi) {
      t = first_of_next_month(c.year, c.month);
    } else if (c.hour < b.h.lo) {
      t = to_hours({c.year, c.month, c.day, static_cast<int>(b.h.lo)});
    } else if (c.hour > b.h.hi) {
      t += 24 - c.hour;
    } else {
      return t;
    }
    if (t == kNoValue) return kNoValue;
  }
  return kNoValue;
}

// Largest hour <= t (and >= limit) whose calendar decomposition lies in box.
std::int64_t prev_valid(std::int64_t t, std::int64_t limit, const Box& b) {
  while (t >= limit) {
    if (t > max_hours()) t = max_hours();
    if (t < min_hours()) return kNoValue;
    CalendarHour c = from_hours(t);
    if (c.year > b.y.hi) {
      t = to_hours({static_cast<int>(b.y.hi), 12, 31, 23});
    } else if (c.year < b.y.lo) {
      return kNoValue;
    } else if (c.month > b.m.hi) {
      int m = static_cast<int>(b.m.hi);
      t = to_hours({c.year, m, days_in_month(c.year, m), 23});
    } else if (c.month < b.m.lo) {
      t = last_of_prev_month(c.year, 1);
    } else if (c.day > b.d.hi) {
      int d = std::min(static_cast<int>(b.d.hi), days_in_month(c.year, c.month));
      t = to_hours({c.year, c.month, d, 23});
    } else if (c.day < b.d.lo) {
      t = last_of_prev_month(c.year, c.month);
    } else if (c.hour > b.h.hi) {
      t = to_hours({c.year, c.month, c.day, static_cast<int>(b.h.hi)});
    } else if (c.hour < b.h.lo) {
      t -= c.hour + 1;
    } else {
      return t;
    }
    if (t == kNoValue) return kNoValue;
  }
  return kNoValue;
}

}  // namespace

int Store::new_var(std::int64_t lo, std::int64_t hi) {
  int v = static_cast<int>(dom_.size());
  dom_.push_back({lo, hi});
  is_abs_.push_back(false);
  atom_watch_.emplace_back();
  link_watch_.emplace_back();
  queued_.push_back(false);
  if (lo > hi) failed_ = true;
  return v;
}

TimeVars Store::new_time_point() {
  TimeVars t;
  t.year = new_var(kMinYear, kMaxYear);
  t.month = new_var(1, 12);
  t.day = new_var(1, 31);
  t.hour = new_var(0, 23);
  t.absolute = new_var(min_hours(), max_hours());
  is_abs_[static_cast<std::size_t>(t.absolute)] = true;
  int idx = static_cast<int>(links_.size());
  links_.push_back(t);
  for (int v : {t.year, t.month, t.day, t.hour, t.absolute}) link_watch_[static_cast<std::size_t>(v)].push_back(idx);
  if (!failed_) {
    queue_.push_back(t.absolute);
    queued_[static_cast<std::size_t>(t.absolute)] = true;
    propagate();
  }
  return t;
}

bool Store::set_bounds(int v, std::int64_t lo, std::int64_t hi) {
  Bounds& b = dom_[static_cast<std::size_t>(v)];
  if (lo <= b.lo && hi >= b.hi) return true;
  trail_.push_back({v, b});
  b.lo = std::max(b.lo, lo);
  b.hi = std::min(b.hi, hi);
  if (b.lo > b.hi) {
    failed_ = true;
    return false;
  }
  if (!queued_[static_cast<std::size_t>(v)]) {
    queued_[static_cast<std::size_t>(v)] = true;
    queue_.push_back(v);
  }
  return true;
}

bool Store::revise_atom(const NumAtom& a) {
  // Normalize to x - y <= k (and y - x <= -k for equality).
  auto lo = [&](int v) { return v < 0 ? 0 : dom_[static_cast<std::size_t>(v)].lo; };
  auto hi = [&](int v) { return v < 0 ? 0 : dom_[static_cast<std::size_t>(v)].hi; };
  auto le = [&](int x, int y, std::int64_t k) {
    // x <= y + k
    if (x < 0 && y < 0) {
      if (0 > k) failed_ = true;
      return !failed_;
    }
    if (x >= 0 && !set_bounds(x, INT64_MIN, hi(y) + k)) return false;
    if (y >= 0 && !set_bounds(y, lo(x) - k, INT64_MAX)) return false;
    return true;
  };
  switch (a.cmp) {
    case Cmp::Le:
      return le(a.x, a.y, a.k);
    case Cmp::Lt:
      return le(a.x, a.y, a.k - 1);
    case Cmp::Eq:
      return le(a.x, a.y, a.k) && le(a.y, a.x, -a.k);
  }
  return true;
}

bool Store::revise_link(const TimeVars& l) {
  for (int round = 0; round < 8; ++round) {
    Box box{bounds(l.year), bounds(l.month), bounds(l.day), bounds(l.hour)};
    Bounds a = bounds(l.absolute);
    std::int64_t lo = next_valid(a.lo, a.hi, box);
    if (lo == kNoValue) {
      failed_ = true;
      return false;
    }
    std::int64_t hi = prev_valid(a.hi, lo, box);
    if (hi == kNoValue) {
      failed_ = true;
      return false;
    }
    if (!set_bounds(l.absolute, lo, hi)) return false;
    CalendarHour cl = from_hours(lo);
    CalendarHour ch = from_hours(hi);
    std::size_t before = trail_.size();
    if (!set_bounds(l.year, cl.year, ch.year)) return false;
    if (cl.year == ch.year) {
      if (!set_bounds(l.month, cl.month, ch.month)) return false;
      if (cl.month == ch.month) {
        if (!set_bounds(l.day, cl.day, ch.day)) return false;
        if (cl.day == ch.day && !set_bounds(l.hour, cl.hour, ch.hour)) return false;
      }
    }
    if (trail_.size() == before) return true;
  }
  return true;
}

bool Store::negative_cycle() const {
  // Bellman-Ford from a virtual source over the difference graph: an edge
  // y -> x with weight k for every x <= y + k. Node n is the constant 0.
  const std::size_t n = dom_.size();
  struct Edge {
    std::size_t from, to;
    std::int64_t w;
  };
  std::vector<Edge> edges;
  auto idx = [&](int v) { return v < 0 ? n : static_cast<std::size_t>(v); };
  for (const NumAtom& a : atoms_) {
    std::int64_t k = a.cmp == Cmp::Lt ? a.k - 1 : a.k;
    edges.push_back({idx(a.y), idx(a.x), k});
    if (a.cmp == Cmp::Eq) edges.push_back({idx(a.x), idx(a.y), -a.k});
  }
  std::vector<std::int64_t> dist(n + 1, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    bool changed = false;
    for (const Edge& e : edges) {
      if (dist[e.from] + e.w < dist[e.to]) {
        dist[e.to] = dist[e.from] + e.w;
        changed = true;
      }
    }
    if (!changed) return false;
  }
  return true;
}

bool Store::propagate() {
  std::size_t updates = 0;
  const std::size_t cycle_check_at = 4 * (dom_.size() + 2) + 64;
  bool cycle_checked = false;
  const std::size_t hard_cap = 200 * (dom_.size() + atoms_.size() + 2);
  while (!queue_.empty() && !failed_) {
    int v = queue_.back();
    queue_.pop_back();
    queued_[static_cast<std::size_t>(v)] = false;
    for (int ai : atom_watch_[static_cast<std::size_t>(v)]) {
      if (!revise_atom(atoms_[static_cast<std::size_t>(ai)])) break;
    }
    if (failed_) break;
    for (int li : link_watch_[static_cast<std::size_t>(v)]) {
      if (!revise_link(links_[static_cast<std::size_t>(li)])) break;
    }
    ++updates;
    if (!cycle_checked && updates > cycle_check_at) {
      cycle_checked = true;
      if (negative_cycle()) failed_ = true;
    }
    if (updates > hard_cap) break;
  }
  for (int v : queue_) queued_[static_cast<std::size_t>(v)] = false;
  queue_.clear();
  return !failed_;
}

bool Store::assert_atom(const NumAtom& a) {
  const auto n = static_cast<int>(dom_.size());
  if (a.x < -1 || a.x >= n || a.y < -1 || a.y >= n) throw std::out_of_range("unregistered store variable");
  if (failed_) return false;
  int idx = static_cast<int>(atoms_.size());
  atoms_.push_back(a);
  if (a.x >= 0) atom_watch_[static_cast<std::size_t>(a.x)].push_back(idx);
  if (a.y >= 0 && a.y != a.x) atom_watch_[static_cast<std::size_t>(a.y)].push_back(idx);
  if (!revise_atom(a)) return false;
  return propagate();
}

bool Store::assert_all(const Compiled& c) {
  if (c.never) {
    failed_ = true;
    return false;
  }
  for (const NumAtom& a : c.atoms) {
    if (!assert_atom(a)) return false;
  }
  return !failed_;
}

bool Store::admits(const Compiled& c) {
  if (failed_ || c.never) return false;
  Mark m = checkpoint();
  bool ok = assert_all(c);
  rollback(m);
  return ok;
}

Store::Mark Store::checkpoint() {
  frames_.push_back({trail_.size(), atoms_.size(), links_.size(), dom_.size(), failed_});
  return Mark{frames_.size() - 1};
}

void Store::rollback(Mark m) {
  if (m.id >= frames_.size()) throw std::invalid_argument("unknown store checkpoint");
  Frame f = frames_[m.id];
  frames_.resize(m.id);
  while (trail_.size() > f.trail) {
    dom_[static_cast<std::size_t>(trail_.back().var)] = trail_.back().old;
    trail_.pop_back();
  }
  while (atoms_.size() > f.atoms) {
    const NumAtom& a = atoms_.back();
    int idx = static_cast<int>(atoms_.size()) - 1;
    for (int v : {a.x, a.y}) {
      if (v < 0 || v >= static_cast<int>(f.vars)) continue;
      auto& w = atom_watch_[static_cast<std::size_t>(v)];
      if (!w.empty() && w.back() == idx) w.pop_back();
    }
    atoms_.pop_back();
  }
  while (links_.size() > f.links) {
    const TimeVars& l = links_.back();
    int idx = static_cast<int>(links_.size()) - 1;
    for (int v : {l.year, l.month, l.day, l.hour, l.absolute}) {
      if (v >= static_cast<int>(f.vars)) continue;
      auto& w = link_watch_[static_cast<std::size_t>(v)];
      if (!w.empty() && w.back() == idx) w.pop_back();
    }
    links_.pop_back();
  }
  dom_.resize(f.vars);
  is_abs_.resize(f.vars);
  atom_watch_.resize(f.vars);
  link_watch_.resize(f.vars);
  queued_.assign(f.vars, false);
  queue_.clear();
  failed_ = f.failed;
}

bool Store::satisfied_by(const std::vector<std::int64_t>& values) const {
  if (values.size() != dom_.size()) return false;
  for (std::size_t v = 0; v < dom_.size(); ++v) {
    if (values[v] < dom_[v].lo || values[v] > dom_[v].hi) return false;
  }
  for (const NumAtom& a : atoms_) {
    if (!satisfied(a, values)) return false;
  }
  for (const TimeVars& l : links_) {
    auto at = [&](int v) { return static_cast<int>(values[static_cast<std::size_t>(v)]); };
    CalendarHour c{at(l.year), at(l.month), at(l.day), at(l.hour)};
    if (!is_valid(c) || to_hours(c) != values[static_cast<std::size_t>(l.absolute)]) return false;
  }
  return true;
}

class Labeler {
 public:
  Labeler(Store& s, const LabelingPolicy& p) : s_(s), target_(to_hours(p.epoch)), limit_(p.node_limit) {
    for (const TimeVars& l : s.links_) order_.push_back(l.absolute);
    earliest_first();
    std::vector<bool> seen(s.num_vars(), false);
    for (int v : order_) seen[static_cast<std::size_t>(v)] = true;
    for (std::size_t v = 0; v < s.num_vars(); ++v) {
      if (!seen[v]) order_.push_back(static_cast<int>(v));
    }
  }

  bool search(std::size_t i) {
    while (i < order_.size() && s_.bounds(order_[i]).fixed()) ++i;
    if (i == order_.size()) return true;
    int v = order_[i];
    Bounds b = s_.bounds(v);
    if (!s_.is_absolute(v) || b.lo >= target_) return ascend(v, i);
    if (b.hi < target_) return descend(v, i);
    {
      auto m = s_.checkpoint();
      if (s_.assert_atom({-1, v, -target_, Cmp::Le}) && ascend(v, i)) return true;
      s_.rollback(m);
    }
    auto m = s_.checkpoint();
    if (s_.assert_atom({v, -1, target_, Cmp::Lt}) && descend(v, i)) return true;
    s_.rollback(m);
    return false;
  }

  bool exhausted() const { return nodes_ > limit_; }

 private:
  bool step() { return ++nodes_ <= limit_; }

  // Orders points by how late they must be relative to the others (longest
  // path over the difference atoms), so the earliest points meet the epoch.
  void earliest_first() {
    std::vector<std::int64_t> d(s_.num_vars(), 0);
    auto relax = [&](int from, int to, std::int64_t w) {
      if (from < 0 || to < 0) return false;
      auto& dt = d[static_cast<std::size_t>(to)];
      std::int64_t cand = d[static_cast<std::size_t>(from)] + w;
      if (cand <= dt) return false;
      dt = cand;
      return true;
    };
    for (std::size_t round = 0; round <= order_.size(); ++round) {
      bool changed = false;
      for (const NumAtom& a : s_.atoms()) {
        // x cmp y + k bounds y from below by x - k.
        std::int64_t w = a.cmp == Cmp::Lt ? 1 - a.k : -a.k;
        changed |= relax(a.x, a.y, w);
        if (a.cmp == Cmp::Eq) changed |= relax(a.y, a.x, a.k);
      }
      if (!changed) break;
    }
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return d[static_cast<std::size_t>(a)] < d[static_cast<std::size_t>(b)];
    });
  }

  bool ascend(int v, std::size_t i) {
    while (step()) {
      std::int64_t lo = s_.bounds(v).lo;
      auto m = s_.checkpoint();
      if (s_.assert_atom({v, -1, lo, Cmp::Eq}) && search(i + 1)) return true;
      s_.rollback(m);
      if (!s_.assert_atom({-1, v, -(lo + 1), Cmp::Le})) return false;
    }
    return false;
  }

  bool descend(int v, std::size_t i) {
    while (step()) {
      std::int64_t hi = s_.bounds(v).hi;
      auto m = s_.checkpoint();
      if (s_.assert_atom({v, -1, hi, Cmp::Eq}) && search(i + 1)) return true;
      s_.rollback(m);
      if (!s_.assert_atom({v, -1, hi - 1, Cmp::Le})) return false;
    }
    return false;
  }

  Store& s_;
  std::int64_t target_;
  std::size_t limit_;
  std::size_t nodes_ = 0;
  std::vector<int> order_;
};

std::optional<std::vector<std::int64_t>> label(const Store& store, const LabelingPolicy& policy) {
  if (!store.consistent()) return std::nullopt;
  Store work = store;
  Labeler labeler(work, policy);
  if (!labeler.search(0)) return std::nullopt;
  std::vector<std::int64_t> values;
  values.reserve(work.num_vars());
  for (std::size_t v = 0; v < work.num_vars(); ++v) values.push_back(work.bounds(static_cast<int>(v)).lo);
  if (!store.satisfied_by(values)) return std::nullopt;
  return values;
}

}  // namespace tempabd
