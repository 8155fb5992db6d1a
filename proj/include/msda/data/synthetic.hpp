#pragma once

#include <cstdint>
#include <vector>

#include "msda/data/domain.hpp"

namespace msda::data {

enum class SyntheticFamily { RotatedMoons, GaussianShift };

// Description of a k-source + 1-target synthetic dataset. Per-domain
// parameters hold k source entries followed by the target entry.
struct SyntheticSpec {
    SyntheticFamily family = SyntheticFamily::RotatedMoons;
    int k = 1;
    std::vector<double> angles;              // rotated_moons: radians, size k+1
    std::vector<std::vector<double>> shifts; // gaussian_shift: mean shift vectors, size k+1
    std::size_t n_per_domain = 200;
    double noise = 0.1;
    std::uint64_t seed = 0;
};

struct SyntheticData {
    std::vector<LabeledDomain> sources; // k entries
    UnlabeledDomain target;             // oracle labels retained
};

// Two interleaved half-circles, swept per domain around a pivot left of the
// cloud, so larger angles both rotate and displace the data. Deterministic
// per spec.seed; each domain draws from an independent stream.
SyntheticData gen_rotated_moons(const SyntheticSpec& spec);

// Two isotropic Gaussian classes at -e1/+e1, shifted per domain by the
// spec's shift vector (applied to both classes).
SyntheticData gen_gaussian_shift(const SyntheticSpec& spec);

SyntheticData generate(const SyntheticSpec& spec);

} // namespace msda::data
