#pragma once

// Loaded models as interchangeable compressors.

#include <memory>
#include <string>

#include "qfc/eval.hpp"
#include "qfc/model_io.hpp"

namespace qfc {

/// A System that owns its model. The random policy is reseeded per
/// instance from (seed, instance id), so outputs do not depend on call
/// order or threading. ILP graphs are root-transformed on the fly when the
/// caller has not done so already.
System make_system(std::shared_ptr<const AnyModel> model, long ilp_node_limit = kDefaultNodeLimit);

/// Keeps every vertex it is offered.
class AcceptAll final : public DecisionModel {
 public:
  double score(const CompressionState&, Position) const override { return 1.0; }
};

/// name \t index \t weight for every feature name that occurs in the
/// corpus decisions (LR) or edges (ILP) and carries a nonzero weight,
/// sorted by name.
std::string feature_dump(const AnyModel& model, const std::vector<Instance>& instances);

}  // namespace qfc
