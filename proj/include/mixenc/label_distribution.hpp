#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mixenc {

/// Probability vector aligned with a task's label set. Entries are
/// non-negative and sum to 1 within 1e-9.
struct LabelDistribution {
    std::vector<double> probabilities;

    std::size_t size() const { return probabilities.size(); }

    /// Normalizes non-negative weights to a distribution. Throws
    /// std::invalid_argument on negative weights or zero total mass.
    static LabelDistribution normalized(std::vector<double> weights);
    static LabelDistribution uniform(std::size_t n);
    static LabelDistribution one_hot(std::size_t n, std::size_t index);
};

}  // namespace mixenc
