#pragma once

#include <vector>

namespace msda::theory {

// Soft maximum (1/gamma) * log(sum exp(gamma * v_i)), evaluated with the
// max subtracted so large gamma cannot overflow. Sandwiched between max(v)
// and max(v) + log(k)/gamma.
double lse_max(const std::vector<double>& values, double gamma);

} // namespace msda::theory
