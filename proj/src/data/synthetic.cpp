#include "msda/data/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "msda/error.hpp"
#include "msda/rng.hpp"

namespace msda::data {

namespace {

void check_spec(const SyntheticSpec& spec, std::size_t params_len) {
    if (spec.k < 1) throw InputError("synthetic spec: k must be >= 1");
    if (params_len != static_cast<std::size_t>(spec.k) + 1)
        throw InputError("synthetic spec: need k+1 per-domain parameters, got " +
                         std::to_string(params_len));
    if (spec.n_per_domain < 2) throw InputError("synthetic spec: n per domain must be >= 2");
}

// One two-moons cloud: class 0 on the upper arc, class 1 on the lower arc.
// The arcs sit well to the right of the rotation pivot (the origin), so turning
// the domain sweeps the whole cloud along a circle: part rotation, part
// translation. Small angle steps displace the cloud noticeably.
void moons_domain(std::size_t n, double angle, double noise, Rng& rng, Matrix& x,
                  std::vector<int>& y) {
    x = Matrix(n, 2);
    y.assign(n, 0);
    const double ca = std::cos(angle), sa = std::sin(angle);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        const double t = rng.uniform(0.0, std::numbers::pi);
        double px, py;
        if (label == 0) {
            px = std::cos(t);
            py = std::sin(t);
        } else {
            px = 1.0 - std::cos(t);
            py = 0.5 - std::sin(t);
        }
        px += 1.0;  // arc frame -> rotation pivot far left of the cloud
        px += rng.normal(0.0, noise);
        py += rng.normal(0.0, noise);
        x(i, 0) = ca * px - sa * py;
        x(i, 1) = sa * px + ca * py;
        y[i] = label;
    }
}

} // namespace

SyntheticData gen_rotated_moons(const SyntheticSpec& spec) {
    check_spec(spec, spec.angles.size());
    for (double a : spec.angles)
        if (!std::isfinite(a)) throw InputError("rotated_moons: non-finite angle");

    SyntheticData out;
    for (int d = 0; d <= spec.k; ++d) {
        Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(d)));
        Matrix x;
        std::vector<int> y;
        moons_domain(spec.n_per_domain, spec.angles[d], spec.noise, rng, x, y);
        if (d < spec.k)
            out.sources.push_back({std::move(x), std::move(y), d});
        else
            out.target = UnlabeledDomain(std::move(x), d, std::move(y));
    }
    return out;
}

SyntheticData gen_gaussian_shift(const SyntheticSpec& spec) {
    check_spec(spec, spec.shifts.size());
    if (!(spec.noise > 0.0)) throw InputError("gaussian_shift: sigma must be > 0");
    const std::size_t dim = spec.shifts.front().size();
    if (dim < 1) throw InputError("gaussian_shift: empty shift vector");
    for (const auto& s : spec.shifts)
        if (s.size() != dim) throw InputError("gaussian_shift: shift vectors must share one dim");

    SyntheticData out;
    for (int d = 0; d <= spec.k; ++d) {
        Rng rng(Rng::derive(spec.seed, static_cast<std::uint64_t>(d)));
        Matrix x(spec.n_per_domain, dim);
        std::vector<int> y(spec.n_per_domain, 0);
        for (std::size_t i = 0; i < spec.n_per_domain; ++i) {
            const int label = static_cast<int>(i % 2);
            for (std::size_t j = 0; j < dim; ++j) {
                double mean = (j == 0) ? (label == 0 ? -1.0 : 1.0) : 0.0;
                x(i, j) = mean + spec.shifts[d][j] + rng.normal(0.0, spec.noise);
            }
            y[i] = label;
        }
        if (d < spec.k)
            out.sources.push_back({std::move(x), std::move(y), d});
        else
            out.target = UnlabeledDomain(std::move(x), d, std::move(y));
    }
    return out;
}

SyntheticData generate(const SyntheticSpec& spec) {
    switch (spec.family) {
        case SyntheticFamily::RotatedMoons: return gen_rotated_moons(spec);
        case SyntheticFamily::GaussianShift: return gen_gaussian_shift(spec);
    }
    throw InputError("generate: unknown synthetic family");
}

LabeledDomain UnlabeledDomain::as_labeled_oracle() const {
    if (!oracle_) throw ModeError("domain " + std::to_string(id_) + " has no oracle labels");
    return LabeledDomain{x_, *oracle_, id_};
}

} // namespace msda::data
