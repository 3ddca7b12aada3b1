#pragma once

// Admissibility of interventional constraints from the structure among the
// causes alone. A cause whose only possible child is Y has an identifiable
// atomic intervention, adjusted for by all remaining causes; the set-wise rule
// extends this to any set none of whose members has a directed child outside it.

#include <span>
#include <vector>

#include "icmaxent/types.hpp"

namespace icmaxent {

namespace reason {
inline constexpr const char* kOk = "ok";
inline constexpr const char* kDirectedChild = "has_directed_child";
inline constexpr const char* kObservational = "observational";
}  // namespace reason

IdentifiabilityVerdict intervenable(const GraphSpec& graph, VarId j);

/// Throws DomainError for an empty or out-of-range set.
IdentifiabilityVerdict intervenable_set(const GraphSpec& graph, const VarSet& s);

/// One verdict per constraint. Marginal and conditional constraints are always
/// admissible (vars empty, reason "observational").
std::vector<IdentifiabilityVerdict> validate_constraints(const GraphSpec& graph,
                                                         std::span<const ConstraintSpec> constraints);

}  // namespace icmaxent
