#include "icmaxent/identify.hpp"

#include <string>

#include "icmaxent/errors.hpp"

namespace icmaxent {

IdentifiabilityVerdict intervenable(const GraphSpec& graph, VarId j) {
  if (j.index >= graph.n_causes()) {
    throw DomainError("cause index " + std::to_string(j.index) + " out of range");
  }
  return intervenable_set(graph, VarSet{j});
}

IdentifiabilityVerdict intervenable_set(const GraphSpec& graph, const VarSet& s) {
  if (s.empty()) throw DomainError("intervenable_set: the intervened set must be nonempty");
  validate_varset(s, graph.n_causes(), "intervened set");

  IdentifiabilityVerdict v;
  v.vars = s;
  v.admissible = true;
  v.reason = reason::kOk;
  for (const auto& e : graph.directed_edges()) {
    if (contains(s, e.from) && !contains(s, e.to)) {
      v.admissible = false;
      v.reason = reason::kDirectedChild;
      break;
    }
  }
  if (v.admissible) v.adjustment_set = set_difference(all_vars(graph.n_causes()), s);
  return v;
}

std::vector<IdentifiabilityVerdict> validate_constraints(const GraphSpec& graph,
                                                         std::span<const ConstraintSpec> constraints) {
  std::vector<IdentifiabilityVerdict> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) {
    if (c.kind == ConstraintKind::interventional) {
      out.push_back(intervenable_set(graph, c.int_set));
    } else {
      IdentifiabilityVerdict v;
      v.admissible = true;
      v.reason = reason::kObservational;
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace icmaxent
