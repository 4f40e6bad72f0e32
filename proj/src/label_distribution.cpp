#include "mixenc/label_distribution.hpp"

namespace mixenc {

LabelDistribution LabelDistribution::normalized(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("empty weight vector");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("zero total mass");
    for (double& w : weights) w /= total;
    return LabelDistribution{std::move(weights)};
}

LabelDistribution LabelDistribution::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("empty label set");
    return LabelDistribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

LabelDistribution LabelDistribution::one_hot(std::size_t n, std::size_t index) {
    if (index >= n) throw std::invalid_argument("one-hot index out of range");
    std::vector<double> p(n, 0.0);
    p[index] = 1.0;
    return LabelDistribution{std::move(p)};
}

}  // namespace mixenc
