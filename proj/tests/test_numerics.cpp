#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mtrec/common.hpp"
#include "mtrec/numerics/adam.hpp"
#include "mtrec/numerics/finite_diff.hpp"
#include "mtrec/numerics/net.hpp"
#include "mtrec/numerics/reductions.hpp"
#include "mtrec/numerics/rng.hpp"

using namespace mtrec;

TEST_CASE("logsumexp worked examples") {
    const double x = 3.7;
    CHECK(logsumexp(std::vector<double>{x}) == doctest::Approx(x).epsilon(1e-12));
    CHECK(logsumexp(std::vector<double>{0.0, 0.0}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(logsumexp({}), std::invalid_argument);
}

TEST_CASE("logsumexp shift symmetry and bounds") {
    SeededRng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + rng.uniform_int(6);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-50.0, 50.0);
        const double c = rng.uniform(-100.0, 100.0);
        std::vector<double> shifted = v;
        for (auto& x : shifted) x += c;
        const double base = logsumexp(v);
        CHECK(logsumexp(shifted) == doctest::Approx(base + c).epsilon(1e-9));
        double mx = v[0];
        for (double x : v) mx = std::max(mx, x);
        CHECK(base >= mx);
        CHECK(base <= mx + std::log(static_cast<double>(n)) + 1e-12);
    }
}

TEST_CASE("logsumexp huge magnitudes do not overflow") {
    CHECK(std::isfinite(logsumexp(std::vector<double>{1e300, 1e300})));
    CHECK(logsumexp(std::vector<double>{-1e300, 0.0}) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax worked examples") {
    const auto even = softmax(std::vector<double>{0.0, 0.0});
    CHECK(even[0] == doctest::Approx(0.5).epsilon(1e-12));
    const auto p = softmax(std::vector<double>{1.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.7310585786300049).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.2689414213699951).epsilon(1e-9));
    CHECK_THROWS_AS(softmax({}), std::invalid_argument);
}

TEST_CASE("softmax properties: normalization, shift invariance, argmax") {
    SeededRng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + rng.uniform_int(5);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform(-20.0, 20.0);
        const auto p = softmax(v);
        double sum = 0.0;
        std::size_t argmax_v = 0, argmax_p = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] > 0.0);
            CHECK(p[i] < 1.0);
            sum += p[i];
            if (v[i] > v[argmax_v]) argmax_v = i;
            if (p[i] > p[argmax_p]) argmax_p = i;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(argmax_v == argmax_p);
        const double c = rng.uniform(-30.0, 30.0);
        std::vector<double> shifted = v;
        for (auto& x : shifted) x += c;
        const auto q = softmax(shifted);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-9));
    }
}

TEST_CASE("pinball loss worked examples") {
    CHECK(pinball_loss(0.3, 0.0) == 0.0);
    CHECK(pinball_loss(0.5, 4.0) == doctest::Approx(2.0));
    CHECK(pinball_loss(0.5, -4.0) == doctest::Approx(2.0));
    CHECK(pinball_loss(0.9, -1.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_AS(pinball_loss(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pinball_loss(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pinball complementary identity and nonnegativity") {
    SeededRng rng(13);
    for (int trial = 0; trial < 500; ++trial) {
        const double tau = rng.uniform(0.01, 0.99);
        const double u = rng.uniform(-10.0, 10.0);
        const double p = pinball_loss(tau, u);
        CHECK(p >= 0.0);
        if (u != 0.0) CHECK(p > 0.0);
        CHECK(p + pinball_loss(1.0 - tau, -u) == doctest::Approx(std::abs(u)));
    }
}

TEST_CASE("SeededRng determinism and child independence") {
    SeededRng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    SeededRng parent(7);
    parent.next_u64();  // children must not depend on consumption
    SeededRng c1 = parent.child("x", 0);
    SeededRng c2 = SeededRng(7).child("x", 0);
    CHECK(c1.next_u64() == c2.next_u64());
    SeededRng d1 = SeededRng(7).child("x", 1);
    CHECK(SeededRng(7).child("x", 0).next_u64() != d1.next_u64());
    CHECK(SeededRng(7).child("y", 0).next_u64() !=
          SeededRng(7).child("x", 0).next_u64());
}

TEST_CASE("SeededRng distribution transforms stay in range") {
    SeededRng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int k = rng.uniform_int(7);
        CHECK(k >= 0);
        CHECK(k < 7);
        CHECK(std::isfinite(rng.normal()));
    }
}

TEST_CASE("net forward: zero weights and identity layer") {
    SeededRng rng(3);
    FeedForwardNet zero_net(4, {3}, 2, Activation::relu, Activation::identity, rng);
    auto params = zero_net.params();
    std::fill(params.begin(), params.end(), 0.0);
    const auto y = zero_net.forward(std::vector<double>{1.0, -2.0, 3.0, 4.0});
    for (double v : y) CHECK(v == 0.0);

    // Single linear layer with identity weights reproduces the input.
    std::vector<LayerSpec> spec{{3, 3, Activation::identity}};
    std::vector<double> id_params(3 * 3 + 3, 0.0);
    id_params[0] = id_params[4] = id_params[8] = 1.0;
    const FeedForwardNet id_net = FeedForwardNet::from_spec(spec, id_params);
    const std::vector<double> x{0.5, -1.5, 2.0};
    const auto out = id_net.forward(x);
    for (int i = 0; i < 3; ++i) CHECK(out[i] == x[i]);

    CHECK_THROWS_AS(id_net.forward(std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("net forward determinism across instances with the same seed") {
    SeededRng r1(21), r2(21);
    FeedForwardNet n1(5, {8, 8}, 3, Activation::relu, Activation::identity, r1);
    FeedForwardNet n2(5, {8, 8}, 3, Activation::relu, Activation::identity, r2);
    SeededRng xs(22);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x(5);
        for (auto& v : x) v = xs.uniform(-2.0, 2.0);
        const auto y1 = n1.forward(x);
        const auto y2 = n2.forward(x);
        for (int j = 0; j < 3; ++j) CHECK(y1[j] == y2[j]);
    }
}

TEST_CASE("net_gradients: constant loss gives zero gradients") {
    SeededRng rng(31);
    FeedForwardNet net(3, {4}, 2, Activation::relu, Activation::identity, rng);
    std::vector<double> xs(5 * 3);
    for (auto& v : xs) v = rng.uniform(-1.0, 1.0);
    const BatchGrad bg = net_gradients(
        net, xs.data(), 5,
        [](std::size_t, std::span<const double>, std::span<double>) { return 2.5; },
        Exec::serial);
    CHECK(bg.loss == doctest::Approx(2.5));
    for (double g : bg.grad) CHECK(g == 0.0);
}

TEST_CASE("net_gradients: single linear layer squared loss matches hand gradient") {
    // loss = (w.x + b - t)^2 on one sample: dw = 2 e x, db = 2 e.
    std::vector<LayerSpec> spec{{2, 1, Activation::identity}};
    std::vector<double> params{0.7, -0.3, 0.1};
    const FeedForwardNet net = FeedForwardNet::from_spec(spec, params);
    const std::vector<double> x{1.5, -2.0};
    const double target = 0.4;
    const BatchGrad bg = net_gradients(
        net, x.data(), 1,
        [&](std::size_t, std::span<const double> y, std::span<double> dLdy) {
            const double e = y[0] - target;
            dLdy[0] = 2.0 * e;
            return e * e;
        },
        Exec::serial);
    const double pred = 0.7 * 1.5 + (-0.3) * (-2.0) + 0.1;
    const double e = pred - target;
    CHECK(bg.grad[0] == doctest::Approx(2.0 * e * 1.5).epsilon(1e-12));
    CHECK(bg.grad[1] == doctest::Approx(2.0 * e * -2.0).epsilon(1e-12));
    CHECK(bg.grad[2] == doctest::Approx(2.0 * e).epsilon(1e-12));
}

TEST_CASE("net_gradients: non-finite loss reports the batch index") {
    SeededRng rng(32);
    FeedForwardNet net(2, {}, 1, Activation::relu, Activation::identity, rng);
    std::vector<double> xs(4 * 2, 0.5);
    try {
        net_gradients(
            net, xs.data(), 4,
            [](std::size_t s, std::span<const double>, std::span<double>) {
                return s == 2 ? std::numeric_limits<double>::infinity() : 1.0;
            },
            Exec::serial);
        FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
        CHECK(e.index == 2);
    }
}

TEST_CASE("net gradients pass finite differences on pinball and squared losses") {
    SeededRng rng(33);
    for (int trial = 0; trial < 5; ++trial) {
        FeedForwardNet net(3, {6}, 2, Activation::relu, Activation::identity, rng);
        std::vector<double> xs(4 * 3);
        for (auto& v : xs) v = rng.uniform(-1.0, 1.0);
        std::vector<double> targets(4 * 2);
        for (auto& v : targets) v = rng.uniform(-1.0, 1.0);
        const double tau = rng.uniform(0.1, 0.9);

        auto eval = [&](std::vector<double>* grad) {
            BatchGrad bg = net_gradients(
                net, xs.data(), 4,
                [&](std::size_t s, std::span<const double> y, std::span<double> d) {
                    double loss = 0.0;
                    for (int j = 0; j < 2; ++j) {
                        const double u = y[j] - targets[s * 2 + j];
                        loss += pinball_loss(tau, u) + u * u;
                        d[j] = pinball_grad(tau, u) + 2.0 * u;
                    }
                    return loss;
                },
                Exec::serial);
            if (grad) *grad = bg.grad;
            return bg.loss;
        };
        std::vector<double> grad;
        eval(&grad);
        const double err = finite_diff_check(
            net.params(), [&] { return eval(nullptr); }, grad, 1e-5);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("finite_diff_check: quadratic analytic oracle and epsilon guard") {
    std::vector<double> params{1.0, -2.0, 3.0};
    auto loss = [&] {
        return params[0] * params[0] + 2.0 * params[1] * params[1] +
               0.5 * params[2] * params[2];
    };
    const std::vector<double> grad{2.0 * params[0], 4.0 * params[1], params[2]};
    CHECK(finite_diff_check(params, loss, grad, 1e-5) < 1e-8);
    const std::vector<double> zero{0.0, 0.0, 0.0};
    auto constant = [] { return 1.0; };
    CHECK(finite_diff_check(params, constant, zero, 1e-5) == 0.0);
    CHECK_THROWS_AS(finite_diff_check(params, loss, grad, 1e-2),
                    std::invalid_argument);
}

TEST_CASE("adam: zero gradient and zero learning rate leave parameters fixed") {
    std::vector<double> params{1.0, 2.0, -3.0};
    const std::vector<double> zeros(3, 0.0);
    Adam opt(3, {});
    const std::vector<double> before = params;
    for (int i = 0; i < 5; ++i) opt.step(params, zeros);
    CHECK(params == before);

    Adam frozen(3, {0.0});
    const std::vector<double> g{1.0, -2.0, 0.5};
    frozen.step(params, g);
    CHECK(params == before);
    CHECK_THROWS_AS(opt.step(params, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("adam: identical runs give identical trajectories") {
    auto run = [] {
        std::vector<double> params{0.5, -0.5};
        Adam opt(2, {1e-2});
        SeededRng rng(77);
        for (int i = 0; i < 50; ++i) {
            const std::vector<double> g{rng.uniform(-1.0, 1.0),
                                        rng.uniform(-1.0, 1.0)};
            opt.step(params, g);
        }
        return params;
    };
    CHECK(run() == run());
}

TEST_CASE("pairwise_sum matches plain summation") {
    SeededRng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.uniform_int(300);
        std::vector<double> v(n);
        double plain = 0.0;
        for (auto& x : v) {
            x = rng.uniform(-1.0, 1.0);
            plain += x;
        }
        CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-9));
    }
}

TEST_CASE("format_double round-trips") {
    SeededRng rng(55);
    for (int i = 0; i < 500; ++i) {
        const double x = rng.normal(0.0, 1e3);
        CHECK(std::stod(format_double(x)) == x);
    }
}
