// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace dickman {

// A batch of Monte Carlo draws plus the metadata needed to reproduce it.
// certified_d1 is set only by generators carrying an a priori Wasserstein-1
// bound to their target law (the perpetuity recursions and the reference
// oracle); plain sum samplers leave it empty.
struct SampleBatch {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t depth_n = 0;
    std::optional<double> certified_d1;
};

}  // namespace dickman
