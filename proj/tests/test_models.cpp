#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "igfl/models.hpp"

using namespace igfl;

namespace {

Batch random_batch(std::mt19937_64& rng, std::size_t rows, std::size_t dim, int classes) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Batch b;
    b.rows = rows;
    b.dim = dim;
    b.x.resize(rows * dim);
    b.y.resize(rows);
    for (double& v : b.x) v = u(rng);
    for (int& y : b.y) y = static_cast<int>(rng() % classes);
    return b;
}

ParamVector random_params(std::mt19937_64& rng, std::size_t n, double scale = 0.5) {
    std::uniform_real_distribution<double> u(-scale, scale);
    ParamVector w(n);
    for (double& v : w) v = u(rng);
    return w;
}

double rel_error(const ParamVector& a, const ParamVector& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return std::sqrt(num) / (std::sqrt(den) + 1e-12);
}

}  // namespace

TEST_CASE("quadratic loss and gradient") {
    const QuadraticModel m({1.0, 1.0}, {1.0, 1.0});
    CHECK(m.loss({1.0, 1.0}, {}) == 0.0);

    const QuadraticModel m1({0.0}, {1.0});
    CHECK(m1.loss({2.0}, {}) == 2.0);  // 1/2 * 2^2

    const QuadraticModel m2({1.0}, {1.0});
    CHECK(m2.gradient({3.0}, {}) == ParamVector{2.0});
    CHECK(m2.gradient({1.0}, {}) == ParamVector{0.0});

    CHECK_THROWS_AS(QuadraticModel({1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(m2.loss({1.0, 2.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(m2.predict({1.0}, {}), std::logic_error);
}

TEST_CASE("logistic loss at zero weights is ln(num_classes)") {
    std::mt19937_64 rng(3);
    const LogisticModel m(4, 2);
    const Batch b = random_batch(rng, 8, 4, 2);
    CHECK(m.loss(zeros(m.param_count()), b) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const LogisticModel m5(3, 5);
    const Batch b5 = random_batch(rng, 6, 3, 5);
    CHECK(m5.loss(zeros(m5.param_count()), b5) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("finite difference oracle on the quadratic closed form") {
    const QuadraticModel m({0.0}, {1.0});
    const ParamVector g = finite_diff_gradient(m, {1.0}, {}, 1e-5);
    CHECK(std::abs(g[0] - 1.0) < 1e-9);
    CHECK_THROWS_AS(finite_diff_gradient(m, {1.0}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("analytic gradients match central differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> upos(0.5, 2.0);

    SUBCASE("quadratic") {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + rng() % 6;
            ParamVector c = random_params(rng, n, 2.0), a(n);
            for (double& v : a) v = upos(rng);
            const QuadraticModel m(c, a);
            const ParamVector w = random_params(rng, n, 2.0);
            CHECK(rel_error(m.gradient(w, {}), finite_diff_gradient(m, w, {})) < 1e-5);
        }
    }
    SUBCASE("logistic") {
        for (int trial = 0; trial < 20; ++trial) {
            const LogisticModel m(5, 3);
            const Batch b = random_batch(rng, 7, 5, 3);
            const ParamVector w = random_params(rng, m.param_count());
            CHECK(rel_error(m.gradient(w, b), finite_diff_gradient(m, w, b)) < 1e-5);
        }
    }
    SUBCASE("mlp") {
        for (int trial = 0; trial < 20; ++trial) {
            const MlpModel m(4, 5, 3);
            const Batch b = random_batch(rng, 6, 4, 3);
            ParamVector w = m.init_params(rng);
            CHECK(rel_error(m.gradient(w, b), finite_diff_gradient(m, w, b)) < 1e-5);
        }
    }
}

TEST_CASE("averaged quadratic objective is flat at the analytic optimum") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> upos(0.5, 3.0);
    const std::size_t n = 5;
    std::vector<QuadraticModel> models;
    std::vector<const QuadraticModel*> ptrs;
    for (int i = 0; i < 8; ++i) {
        ParamVector c = random_params(rng, n, 3.0), a(n);
        for (double& v : a) v = upos(rng);
        models.emplace_back(c, a);
    }
    for (const auto& m : models) ptrs.push_back(&m);
    const ParamVector wstar = QuadraticModel::average_optimum(ptrs);
    ParamVector g_avg = zeros(n);
    for (const auto& m : models) axpy(1.0 / models.size(), m.gradient(wstar, {}), g_avg);
    for (double v : g_avg) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("loss is invariant under batch row permutation") {
    std::mt19937_64 rng(41);
    const MlpModel m(4, 3, 3);
    Batch b = random_batch(rng, 10, 4, 3);
    ParamVector w = m.init_params(rng);
    const double base = m.loss(w, b);

    Batch reversed;
    reversed.rows = b.rows;
    reversed.dim = b.dim;
    reversed.x.resize(b.x.size());
    reversed.y.resize(b.y.size());
    for (std::size_t r = 0; r < b.rows; ++r) {
        const std::size_t src = b.rows - 1 - r;
        std::copy(&b.x[src * b.dim], &b.x[(src + 1) * b.dim], &reversed.x[r * b.dim]);
        reversed.y[r] = b.y[src];
    }
    CHECK(m.loss(w, reversed) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("predict_accuracy counts argmax hits with lowest-index ties") {
    const LogisticModel m(2, 2);
    // Zero weights: all logits tie, every row predicted class 0.
    Batch b;
    b.rows = 4;
    b.dim = 2;
    b.x = {1, 0, 0, 1, 1, 1, 0, 0};
    b.y = {0, 0, 1, 1};
    CHECK(predict_accuracy(m, zeros(m.param_count()), b) == 0.5);

    // Weights favoring class matching the first feature.
    ParamVector w = zeros(m.param_count());
    w[0] = 5.0;   // class 0 weight on x0
    w[3] = 5.0;   // class 1 weight on x1
    Batch sep;
    sep.rows = 4;
    sep.dim = 2;
    sep.x = {1, 0, 1, 0, 0, 1, 0, 1};
    sep.y = {0, 0, 1, 1};
    CHECK(predict_accuracy(m, w, sep) == 1.0);
    sep.y = {0, 1, 1, 1};  // 3 of 4 correct
    CHECK(predict_accuracy(m, w, sep) == 0.75);

    const QuadraticModel q({0.0}, {1.0});
    CHECK_THROWS_AS(predict_accuracy(q, {0.0}, b), std::logic_error);
}
