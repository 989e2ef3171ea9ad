#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempabd/calendar.hpp"
#include "tempabd/temporal.hpp"

namespace tempabd {

struct Bounds {
  std::int64_t lo;
  std::int64_t hi;

  bool fixed() const { return lo == hi; }
};

/// Store variables of one calendar time point. `absolute` counts hours since
/// 1970-01-01 and is kept consistent with the components by a calendar link.
struct TimeVars {
  int year = -1;
  int month = -1;
  int day = -1;
  int hour = -1;
  int absolute = -1;
};

/// Integer constraint store with bounds propagation and an undo trail.
///
/// Primitive constraints are difference atoms `x cmp y + k` and calendar
/// links. Propagation runs to a fixpoint after every assertion; cycles of
/// difference atoms with negative weight are detected directly so that
/// contradictory orderings fail without walking the (large) hour domains.
class Store {
 public:
  struct Mark {
    std::size_t id;
  };

  int new_var(std::int64_t lo, std::int64_t hi);
  TimeVars new_time_point();

  std::size_t num_vars() const { return dom_.size(); }
  const Bounds& bounds(int v) const { return dom_.at(static_cast<std::size_t>(v)); }
  bool is_absolute(int v) const { return is_abs_.at(static_cast<std::size_t>(v)); }
  bool consistent() const { return !failed_; }

  /// Adds `a` and propagates. Returns `consistent()`. Throws
  /// std::out_of_range for unregistered variables.
  bool assert_atom(const NumAtom& a);
  bool assert_all(const Compiled& c);

  /// Would `c` be consistent with the store (after propagation)?
  bool admits(const Compiled& c);

  Mark checkpoint();
  /// Restores the exact state at `m`, discarding later marks. Throws
  /// std::invalid_argument for unknown marks.
  void rollback(Mark m);

  const std::vector<NumAtom>& atoms() const { return atoms_; }
  const std::vector<TimeVars>& links() const { return links_; }

  /// Re-evaluates every constraint on a total assignment.
  bool satisfied_by(const std::vector<std::int64_t>& values) const;

 private:
  friend class Labeler;

  bool set_bounds(int v, std::int64_t lo, std::int64_t hi);
  bool revise_atom(const NumAtom& a);
  bool revise_link(const TimeVars& l);
  bool propagate();
  bool negative_cycle() const;

  struct TrailEntry {
    int var;
    Bounds old;
  };
  struct Frame {
    std::size_t trail;
    std::size_t atoms;
    std::size_t links;
    std::size_t vars;
    bool failed;
  };

  std::vector<Bounds> dom_;
  std::vector<bool> is_abs_;
  std::vector<std::vector<int>> atom_watch_;
  std::vector<std::vector<int>> link_watch_;
  std::vector<NumAtom> atoms_;
  std::vector<TimeVars> links_;
  std::vector<TrailEntry> trail_;
  std::vector<Frame> frames_;
  std::vector<int> queue_;
  std::vector<bool> queued_;
  bool failed_ = false;
};

/// Deterministic labeling: absolute time variables in creation order first,
/// each taking the smallest consistent value at or above the epoch (or the
/// largest below it when nothing above fits); other variables take their
/// smallest consistent value.
struct LabelingPolicy {
  CalendarHour epoch{1999, 1, 1, 0};
  std::size_t node_limit = 200000;
};

/// A total assignment satisfying every constraint, or nullopt when the store
/// is inconsistent or the search finds no solution within the node limit.
std::optional<std::vector<std::int64_t>> label(const Store& store, const LabelingPolicy& policy = {});

}  // namespace tempabd
