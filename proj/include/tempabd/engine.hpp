#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempabd/evaluator.hpp"
#include "tempabd/store.hpp"
#include "tempabd/theory.hpp"

namespace tempabd {

/// A model of the open predicates. Atoms are ground and kept per predicate
/// in the order in which they were abduced.
struct AbductiveModel {
  AtomSet abduced;
  std::vector<Term> negative_assumptions;
  std::vector<std::int64_t> assignment;
};

enum class OutcomeKind { Model, Unsatisfiable, Floundered };

struct SolveOutcome {
  OutcomeKind kind = OutcomeKind::Unsatisfiable;
  std::optional<AbductiveModel> model;
  std::string offending;  // the literal that could not be selected
};

struct Enumeration {
  std::vector<AbductiveModel> models;
  std::string floundered;  // non-empty when some branch floundered
};

/// Thrown when the search visits more nodes than allowed.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  std::size_t node_limit = 1000000;
  LabelingPolicy labeling;
  /// Re-check every model with `verify` and throw std::logic_error on failure.
  bool verify_models = false;
};

class Engine {
 public:
  explicit Engine(const Theory& theory, SolveOptions options = {});

  /// `query` may be null (empty query). Throws ResourceLimitError.
  SolveOutcome solve(const Formula& query = {});
  /// Up to `limit` structurally distinct models.
  Enumeration enumerate(const Formula& query, std::size_t limit);

  std::size_t nodes() const { return nodes_; }

 private:
  const Theory& theory_;
  SolveOptions options_;
  std::size_t nodes_ = 0;
};

/// The abduced atoms with every time point replaced by a placeholder,
/// sorted. Two models with equal keys differ only in their time values.
std::string structural_key(const AbductiveModel& m);

struct VerifyResult {
  bool ok = true;
  std::string violation;
};

/// Independent check of `m` against every axiom, every open-function
/// expansion and the query, reading the open predicates closed-world.
/// Throws std::invalid_argument for predicates unknown to the theory.
VerifyResult verify(const Theory& theory, const AbductiveModel& m, const Formula& query = {});

}  // namespace tempabd
