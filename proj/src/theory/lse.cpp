#include "msda/theory/lse.hpp"

#include <algorithm>
#include <cmath>

#include "msda/error.hpp"

namespace msda::theory {

double lse_max(const std::vector<double>& values, double gamma) {
    if (values.empty()) {
        throw InputError("soft maximum of an empty list");
    }
    if (!(gamma > 0.0)) {
        throw InputError("smoothing parameter must be positive");
    }
    const double vmax = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) {
        acc += std::exp(gamma * (v - vmax));
    }
    return vmax + std::log(acc) / gamma;
}

} // namespace msda::theory
