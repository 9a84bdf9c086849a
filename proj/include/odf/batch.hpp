#pragma once

#include <cstdint>
#include <vector>

#include "odf/grpo.hpp"

namespace odf {

/// Groups accepted for one training step. Holds exactly N groups unless
/// `underfilled` is set.
struct TrainBatch {
  std::vector<RolloutGroup> groups;
  bool underfilled = false;
  std::uint64_t step = 0;

  bool operator==(const TrainBatch&) const = default;
};

}  // namespace odf
