#pragma once

#include <string>
#include <string_view>

#include "tempabd/engine.hpp"

namespace tempabd {

/// Atoms of one predicate in display order: most recently abduced first.
std::vector<Term> display_order(const std::vector<Term>& atoms);

/// One `name: [atom,...]` line per non-empty open predicate, sorted by name.
std::string render_text(const AbductiveModel& m);

/// JSON object from predicate name to its atoms in display order. Atoms are
/// `{"functor": f, "args": [...]}`; integer arguments are numbers, constants
/// are strings, ground `ts/4` points are `{"year","month","day","hour"}`
/// objects and other compounds nest as atoms do.
std::string render_json(const AbductiveModel& m, int indent = 2);

/// Inverse of render_json for the abduced atoms. Throws std::invalid_argument.
AbductiveModel parse_json_model(std::string_view text);

/// Same abduced atoms per predicate, in the same order.
bool same_atoms(const AbductiveModel& a, const AbductiveModel& b);

}  // namespace tempabd
