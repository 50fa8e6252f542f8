#pragma once

#include <cstdint>

#include "elicit/dataset.hpp"

namespace elicit {

inline constexpr std::uint64_t kSampleSeed = 2013;

/// Synthetic dataset sized like a real cohort: 10 attack vectors over
/// 26 hops (with the same path structure, including repeated hops), 39
/// experts in seven groups of uneven size and agreement, one reference
/// expert, and an overall interval for every hop from every expert.
Dataset make_sample_dataset(std::uint64_t seed = kSampleSeed);

/// The 26-hop, 10-vector scenario used by the sample.
Scenario make_sample_scenario();

}  // namespace elicit
