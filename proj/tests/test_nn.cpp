#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "msda/error.hpp"
#include "msda/matrix.hpp"
#include "msda/nn/adam.hpp"
#include "msda/nn/checkpoint.hpp"
#include "msda/nn/mlp.hpp"
#include "msda/rng.hpp"

using namespace msda;

namespace {

// Scalar-loop forward pass sharing no code with nn::forward: plain vector of
// rows, explicit dot products, relu by if-statement.
std::vector<std::vector<double>> oracle_forward(const nn::Mlp& net,
                                                const std::vector<std::vector<double>>& x) {
    std::vector<std::vector<double>> cur = x;
    for (const nn::Layer& l : net.layers) {
        std::vector<std::vector<double>> next(cur.size());
        for (std::size_t r = 0; r < cur.size(); ++r) {
            next[r].resize(l.out_dim());
            for (std::size_t o = 0; o < l.out_dim(); ++o) {
                double acc = l.bias[o];
                for (std::size_t i = 0; i < l.in_dim(); ++i) {
                    acc += l.weight(o, i) * cur[r][i];
                }
                if (l.act == nn::Activation::Relu && acc < 0.0) {
                    acc = 0.0;
                }
                next[r][o] = acc;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Flat views over every parameter of a network, for finite differencing.
std::vector<double*> param_ptrs(nn::Mlp& net) {
    std::vector<double*> out;
    for (nn::Layer& l : net.layers) {
        for (double& w : l.weight.data()) out.push_back(&w);
        for (double& b : l.bias) out.push_back(&b);
    }
    return out;
}

std::vector<double> grad_flat(const nn::Gradients& g) {
    std::vector<double> out;
    for (std::size_t li = 0; li < g.weight.size(); ++li) {
        out.insert(out.end(), g.weight[li].data().begin(), g.weight[li].data().end());
        out.insert(out.end(), g.bias[li].begin(), g.bias[li].end());
    }
    return out;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

// Scalar objective used by the gradient checks: fixed random projection of
// the network output, <R, f(x)>.
double projected_output(const nn::Mlp& net, const Matrix& x, const Matrix& r,
                        double drop = 0.0, std::uint64_t seed = 0) {
    const Matrix out = nn::forward(net, x, drop, seed).output();
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += r.data()[i] * out.data()[i];
    return acc;
}

} // namespace

TEST_CASE("matrix products match hand results") {
    const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix b(3, 2, {7, 8, 9, 10, 11, 12});
    const Matrix ab = matmul(a, b);
    CHECK(ab.rows() == 2);
    CHECK(ab.cols() == 2);
    CHECK(ab(0, 0) == 58);
    CHECK(ab(0, 1) == 64);
    CHECK(ab(1, 0) == 139);
    CHECK(ab(1, 1) == 154);

    const Matrix bt = transpose(b); // 2 x 3
    const Matrix ab2 = matmul_nt(a, bt);
    const Matrix ab3 = matmul_tn(transpose(a), b);
    for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK(ab2.data()[i] == ab.data()[i]);
        CHECK(ab3.data()[i] == ab.data()[i]);
    }
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("vstack and take_rows") {
    const Matrix a(2, 2, {1, 2, 3, 4});
    const Matrix b(1, 2, {5, 6});
    const Matrix s = vstack(a, b);
    CHECK(s.rows() == 3);
    CHECK(s(2, 1) == 6);
    const Matrix t = take_rows(s, {2, 0});
    CHECK(t(0, 0) == 5);
    CHECK(t(1, 1) == 2);
    CHECK_THROWS_AS(vstack(a, Matrix(1, 3)), ShapeError);
}

TEST_CASE("make_mlp shapes, init range, identity logits") {
    Rng rng(7);
    const nn::Mlp net = nn::make_mlp(4, {5, 3}, 2, nn::Activation::Relu, rng);
    REQUIRE(net.layers.size() == 3);
    CHECK(net.in_dim() == 4);
    CHECK(net.out_dim() == 2);
    CHECK(net.layers[0].act == nn::Activation::Relu);
    CHECK(net.layers[1].act == nn::Activation::Relu);
    CHECK(net.layers[2].act == nn::Activation::Identity);
    CHECK(net.parameter_count() == (4 * 5 + 5) + (5 * 3 + 3) + (3 * 2 + 2));
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const nn::Layer& l = net.layers[li];
        const double bound = std::sqrt(6.0 / double(l.in_dim() + l.out_dim()));
        for (double w : l.weight.data()) {
            CHECK(std::abs(w) <= bound);
        }
        for (double b : l.bias) CHECK(b == 0.0);
    }
}

TEST_CASE("forward equals a scalar-loop oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t in = 1 + rng.uniform_index(5);
        const std::size_t h1 = 1 + rng.uniform_index(6);
        const std::size_t out = 1 + rng.uniform_index(4);
        nn::Mlp net = nn::make_mlp(in, {h1}, out, nn::Activation::Relu, rng);
        const std::size_t m = 1 + rng.uniform_index(5);
        const Matrix x = random_matrix(m, in, rng, -2.0, 2.0);

        std::vector<std::vector<double>> rows(m);
        for (std::size_t r = 0; r < m; ++r) {
            rows[r].assign(x.row_ptr(r), x.row_ptr(r) + in);
        }
        const auto want = oracle_forward(net, rows);
        const Matrix got = nn::forward(net, x).output();
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < out; ++c) {
                CHECK(got(r, c) == doctest::Approx(want[r][c]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("backward matches central finite differences") {
    Rng rng(55);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t in = 1 + rng.uniform_index(4);
        const std::size_t hid = 1 + rng.uniform_index(5);
        const std::size_t out = 1 + rng.uniform_index(3);
        nn::Mlp net = nn::make_mlp(in, {hid}, out, nn::Activation::Relu, rng);
        const std::size_t m = 1 + rng.uniform_index(4);
        const Matrix x = random_matrix(m, in, rng);
        const Matrix r = random_matrix(m, out, rng);

        const nn::ForwardCache cache = nn::forward(net, x);
        const nn::Gradients grads = nn::backward(net, cache, r);
        const std::vector<double> flat = grad_flat(grads);

        const std::vector<double*> ptrs = param_ptrs(net);
        REQUIRE(ptrs.size() == flat.size());
        const double h = 1e-5;
        for (std::size_t p = 0; p < ptrs.size(); ++p) {
            const double keep = *ptrs[p];
            *ptrs[p] = keep + h;
            const double up = projected_output(net, x, r);
            *ptrs[p] = keep - h;
            const double dn = projected_output(net, x, r);
            *ptrs[p] = keep;
            worst = std::max(worst, rel_err(flat[p], (up - dn) / (2.0 * h)));
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("grad_input matches finite differences over the input") {
    Rng rng(56);
    nn::Mlp net = nn::make_mlp(3, {4}, 2, nn::Activation::Relu, rng);
    Matrix x = random_matrix(2, 3, rng);
    const Matrix r = random_matrix(2, 2, rng);

    Matrix gin;
    const nn::ForwardCache cache = nn::forward(net, x);
    nn::backward(net, cache, r, &gin);
    REQUIRE(gin.rows() == 2);
    REQUIRE(gin.cols() == 3);

    const double h = 1e-5;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x.data()[i];
        x.data()[i] = keep + h;
        const double up = projected_output(net, x, r);
        x.data()[i] = keep - h;
        const double dn = projected_output(net, x, r);
        x.data()[i] = keep;
        CHECK(rel_err(gin.data()[i], (up - dn) / (2.0 * h)) < 1e-4);
    }
}

TEST_CASE("softmax cross-entropy value and gradient") {
    const Matrix logits(2, 3, {1.0, 2.0, 0.5, -1.0, 0.0, 3.0});
    const std::vector<int> y = {1, 2};
    const nn::LossResult res = nn::loss(logits, y, nn::LossKind::SoftmaxXent);

    // Scalar recomputation with explicit log-sum-exp.
    double want = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 3; ++j) sum += std::exp(logits(i, j));
        want += std::log(sum) - logits(i, std::size_t(y[i]));
    }
    want /= 2.0;
    CHECK(res.value == doctest::Approx(want).epsilon(1e-12));

    // Gradient rows sum to zero (softmax minus one-hot, mean-reduced).
    for (std::size_t i = 0; i < 2; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 3; ++j) row += res.grad(i, j);
        CHECK(std::abs(row) < 1e-12);
    }

    // Finite differences of the loss value.
    Matrix l2 = logits;
    const double h = 1e-6;
    for (std::size_t i = 0; i < l2.size(); ++i) {
        const double keep = l2.data()[i];
        l2.data()[i] = keep + h;
        const double up = nn::loss(l2, y, nn::LossKind::SoftmaxXent).value;
        l2.data()[i] = keep - h;
        const double dn = nn::loss(l2, y, nn::LossKind::SoftmaxXent).value;
        l2.data()[i] = keep;
        CHECK(rel_err(res.grad.data()[i], (up - dn) / (2.0 * h)) < 1e-5);
    }
}

TEST_CASE("logistic loss: 1-column and 2-column forms agree") {
    Rng rng(77);
    const Matrix one = random_matrix(5, 1, rng, -3.0, 3.0);
    Matrix two(5, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        two(i, 0) = rng.uniform(-1.0, 1.0);
        two(i, 1) = two(i, 0) + one(i, 0); // logit difference equals the single logit
    }
    const std::vector<int> y = {0, 1, 1, 0, 1};
    const nn::LossResult a = nn::loss(one, y, nn::LossKind::Logistic);
    const nn::LossResult b = nn::loss(two, y, nn::LossKind::Logistic);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(a.grad(i, 0) == doctest::Approx(b.grad(i, 1)).epsilon(1e-12));
        CHECK(b.grad(i, 0) == doctest::Approx(-b.grad(i, 1)).epsilon(1e-12));
    }

    Matrix probe = one;
    const double h = 1e-6;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double keep = probe.data()[i];
        probe.data()[i] = keep + h;
        const double up = nn::loss(probe, y, nn::LossKind::Logistic).value;
        probe.data()[i] = keep - h;
        const double dn = nn::loss(probe, y, nn::LossKind::Logistic).value;
        probe.data()[i] = keep;
        CHECK(rel_err(a.grad.data()[i], (up - dn) / (2.0 * h)) < 1e-5);
    }
}

TEST_CASE("loss input validation") {
    const Matrix logits(2, 3, {0, 0, 0, 0, 0, 0});
    CHECK_THROWS_AS(nn::loss(logits, {0, 3}, nn::LossKind::SoftmaxXent), InputError);
    CHECK_THROWS_AS(nn::loss(logits, {0}, nn::LossKind::SoftmaxXent), ShapeError);
    CHECK_THROWS_AS(nn::loss(logits, {0, 1}, nn::LossKind::Logistic), InputError);
    CHECK_THROWS_AS(nn::loss(Matrix(0, 2), {}, nn::LossKind::SoftmaxXent), InputError);
}

TEST_CASE("adam matches a scalar recurrence") {
    // One 2x2 identity-activation layer so every parameter is independent.
    nn::Mlp net;
    nn::Layer l;
    l.weight = Matrix(2, 2, {0.5, -0.3, 0.1, 0.9});
    l.bias = {0.2, -0.7};
    net.layers.push_back(l);

    nn::AdamConfig cfg;
    cfg.learning_rate = 0.01;
    nn::AdamState state = nn::AdamState::init(net, cfg);

    // Independent per-parameter recurrence.
    std::vector<double> p = {0.5, -0.3, 0.1, 0.9, 0.2, -0.7};
    std::vector<double> m(6, 0.0), v(6, 0.0);

    Rng rng(3);
    for (int step = 1; step <= 7; ++step) {
        std::vector<double> g(6);
        for (double& x : g) x = rng.uniform(-1.0, 1.0);

        nn::Gradients grads = nn::Gradients::zeros_like(net);
        grads.weight[0] = Matrix(2, 2, {g[0], g[1], g[2], g[3]});
        grads.bias[0] = {g[4], g[5]};
        nn::opt_step(net, grads, state);

        for (int i = 0; i < 6; ++i) {
            m[i] = 0.9 * m[i] + 0.1 * g[i];
            v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
            const double mh = m[i] / (1.0 - std::pow(0.9, step));
            const double vh = v[i] / (1.0 - std::pow(0.999, step));
            p[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
        }
        const std::vector<double> got = {net.layers[0].weight(0, 0), net.layers[0].weight(0, 1),
                                         net.layers[0].weight(1, 0), net.layers[0].weight(1, 1),
                                         net.layers[0].bias[0], net.layers[0].bias[1]};
        for (int i = 0; i < 6; ++i) {
            CHECK(std::abs(got[i] - p[i]) < 1e-12);
        }
    }
    CHECK(state.step == 7);
}

TEST_CASE("adam rejects non-finite gradients") {
    Rng rng(4);
    nn::Mlp net = nn::make_mlp(2, {}, 2, nn::Activation::Identity, rng);
    nn::AdamState state = nn::AdamState::init(net, {});
    nn::Gradients g = nn::Gradients::zeros_like(net);
    g.weight[0](0, 0) = std::nan("");
    CHECK_THROWS_AS(nn::opt_step(net, g, state), NumericError);
    CHECK(state.step == 0); // rejected before touching state
}

TEST_CASE("grad_reverse scales by minus mu") {
    const Matrix g(1, 3, {1.0, -2.0, 0.5});
    const Matrix r = nn::grad_reverse(g, 0.25);
    CHECK(r(0, 0) == -0.25);
    CHECK(r(0, 1) == 0.5);
    CHECK(r(0, 2) == -0.125);

    Rng rng(5);
    nn::Mlp net = nn::make_mlp(2, {3}, 1, nn::Activation::Relu, rng);
    nn::Gradients grads = nn::Gradients::zeros_like(net);
    grads.weight[0](0, 0) = 2.0;
    grads.bias[1][0] = -4.0;
    const nn::Gradients rg = nn::grad_reverse(grads, 0.5);
    CHECK(rg.weight[0](0, 0) == -1.0);
    CHECK(rg.bias[1][0] == 2.0);
}

TEST_CASE("dropout: determinism, inverted scaling, zero-rate identity") {
    Rng rng(8);
    nn::Mlp net = nn::make_mlp(3, {16}, 2, nn::Activation::Relu, rng);
    const Matrix x = random_matrix(4, 3, rng);

    const nn::ForwardCache clean = nn::forward(net, x);
    CHECK(clean.dropout_scale.empty());

    const nn::ForwardCache a = nn::forward(net, x, 0.5, 42);
    const nn::ForwardCache b = nn::forward(net, x, 0.5, 42);
    const nn::ForwardCache c = nn::forward(net, x, 0.5, 43);
    REQUIRE(a.dropout_scale.size() == 2);
    CHECK(a.dropout_scale[1].empty()); // identity output layer is never masked
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.output().size(); ++i) {
        same = same && a.output().data()[i] == b.output().data()[i];
        diff = diff || a.output().data()[i] != c.output().data()[i];
    }
    CHECK(same);
    CHECK(diff);

    // Masked activations are either zeroed or scaled up by 1/keep.
    const Matrix& mask = a.dropout_scale[0];
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const bool zeroed = mask.data()[i] == 0.0;
        const bool scaled = mask.data()[i] == doctest::Approx(2.0);
        CHECK((zeroed || scaled));
        const double relu = std::max(0.0, a.pre[0].data()[i]);
        CHECK(a.post[0].data()[i] == doctest::Approx(relu * mask.data()[i]));
    }
    CHECK_THROWS_AS(nn::forward(net, x, 1.0), InputError);
}

TEST_CASE("backward under a fixed dropout mask still matches finite differences") {
    Rng rng(66);
    nn::Mlp net = nn::make_mlp(3, {8}, 2, nn::Activation::Relu, rng);
    const Matrix x = random_matrix(3, 3, rng);
    const Matrix r = random_matrix(3, 2, rng);
    const double rate = 0.3;
    const std::uint64_t seed = 9;

    const nn::ForwardCache cache = nn::forward(net, x, rate, seed);
    const std::vector<double> flat = grad_flat(nn::backward(net, cache, r));
    const std::vector<double*> ptrs = param_ptrs(net);
    const double h = 1e-5;
    for (std::size_t p = 0; p < ptrs.size(); ++p) {
        const double keep = *ptrs[p];
        *ptrs[p] = keep + h;
        const double up = projected_output(net, x, r, rate, seed);
        *ptrs[p] = keep - h;
        const double dn = projected_output(net, x, r, rate, seed);
        *ptrs[p] = keep;
        CHECK(rel_err(flat[p], (up - dn) / (2.0 * h)) < 1e-4);
    }
}

TEST_CASE("checkpoint round-trips parameters exactly") {
    Rng rng(91);
    const nn::Mlp net = nn::make_mlp(5, {7, 3}, 2, nn::Activation::Relu, rng);
    std::stringstream buf;
    nn::save_mlp(buf, net);
    const nn::Mlp back = nn::load_mlp(buf);

    REQUIRE(back.layers.size() == net.layers.size());
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        CHECK(back.layers[li].act == net.layers[li].act);
        REQUIRE(back.layers[li].weight.size() == net.layers[li].weight.size());
        for (std::size_t i = 0; i < net.layers[li].weight.size(); ++i) {
            CHECK(back.layers[li].weight.data()[i] == net.layers[li].weight.data()[i]);
        }
        for (std::size_t i = 0; i < net.layers[li].bias.size(); ++i) {
            CHECK(back.layers[li].bias[i] == net.layers[li].bias[i]);
        }
    }
}

TEST_CASE("checkpoint rejects malformed input") {
    std::stringstream empty;
    CHECK_THROWS_AS(nn::load_mlp(empty), ParseError);

    std::stringstream bad("MSDA-CKPT v1\nlayers x\n");
    CHECK_THROWS_AS(nn::load_mlp(bad), ParseError);

    std::stringstream wrong_magic("NOPE v1\nlayers 1\n");
    CHECK_THROWS_AS(nn::load_mlp(wrong_magic), ParseError);
}

TEST_CASE("shape validation raises early") {
    Rng rng(14);
    nn::Mlp net = nn::make_mlp(3, {4}, 2, nn::Activation::Relu, rng);
    CHECK_THROWS_AS(nn::forward(net, Matrix(2, 5)), ShapeError);

    nn::Mlp broken = net;
    broken.layers[1].weight = Matrix(2, 9);
    CHECK_THROWS_AS(broken.check_shapes(), ShapeError);

    const nn::ForwardCache cache = nn::forward(net, Matrix(2, 3));
    CHECK_THROWS_AS(nn::backward(net, cache, Matrix(2, 5)), ShapeError);
}
