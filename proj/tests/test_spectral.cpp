// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "matweight/error.hpp"
#include "matweight/spectral.hpp"
#include "support/oracle.hpp"

using namespace matweight;

namespace {

LinearMap dense_map(const std::vector<double>& a, std::size_t n) {
    return [a, n](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
            y[i] = s;
        }
    };
}

std::vector<double> random_spd(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<double> b(n * n), a(n * n, 0.0);
    for (double& x : b) x = g(rng);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) a[i * n + j] += b[i * n + k] * b[j * n + k];
        }
        a[i * n + i] += 0.5;
    }
    return a;
}

}  // namespace

TEST(Spectral, PowerIterationDiagonal) {
    const std::vector<double> a{1, 0, 0, 0, 5, 0, 0, 0, 2};
    const PowerResult r = power_iteration(dense_map(a, 3), 3);
    EXPECT_NEAR(r.value, 5.0, 1e-9);
    EXPECT_LE(r.residual, 1e-8 * 5.0);
}

TEST(Spectral, PowerMatchesJacobi) {
    std::mt19937_64 rng(51);
    for (std::size_t n : {2, 5, 12, 30}) {
        const auto a = random_spd(rng, n);
        const double ref = oracle::jacobi_eigenvalues(a, static_cast<int>(n)).back();
        EXPECT_NEAR(power_iteration(dense_map(a, n), n).value, ref, 1e-6 * ref);
        EXPECT_NEAR(dense_eigenvalues(a, n).back(), ref, 1e-12 * ref);
    }
}

TEST(Spectral, PowerIsDeterministic) {
    std::mt19937_64 rng(52);
    const auto a = random_spd(rng, 8);
    EXPECT_EQ(power_iteration(dense_map(a, 8), 8).value, power_iteration(dense_map(a, 8), 8).value);
}

TEST(Spectral, PowerReportsNonConvergence) {
    // Rotation by 90 degrees has no dominant real eigenvalue.
    const std::vector<double> a{0, -1, 1, 0};
    PowerOptions opts;
    opts.max_iterations = 50;
    EXPECT_THROW(power_iteration(dense_map(a, 2), 2, opts), NonConvergence);
}

TEST(Spectral, ConjugateGradientSolves) {
    std::mt19937_64 rng(53);
    const std::size_t n = 20;
    const auto a = random_spd(rng, n);
    std::vector<double> b(n, 1.0), x(n, 0.0), ax(n);
    conjugate_gradient(dense_map(a, n), b, x);
    dense_map(a, n)(x, ax);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ax[i], 1.0, 1e-9);
}

TEST(Spectral, GeneralizedAndInverse) {
    const std::vector<double> a{2, 0, 0, 6}, b{1, 0, 0, 2};
    const Vec ev = dense_generalized_eigenvalues(a, b, 2);
    EXPECT_NEAR(ev.front(), 2.0, 1e-14);
    EXPECT_NEAR(ev.back(), 3.0, 1e-14);
    const auto inv = dense_spd_inverse(std::vector<double>{2, 1, 1, 2}, 2);
    EXPECT_NEAR(inv[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(inv[1], -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(dense_singular_max(std::vector<double>{0, 2, 0, 0, 0, 0}, 2, 3), 2.0, 1e-14);
}

TEST(Spectral, AssembleColumns) {
    const auto m = assemble([](std::span<const double> x, std::span<double> y) { y[0] = x[0] + 2 * x[1]; }, 2, 1);
    EXPECT_EQ(m, (std::vector<double>{1, 2}));
}

TEST(Spectral, DenseLimit) {
    EXPECT_TRUE(use_dense(Method::automatic, kDenseLimit));
    EXPECT_FALSE(use_dense(Method::automatic, kDenseLimit + 1));
    EXPECT_FALSE(use_dense(Method::power, 4));
    EXPECT_THROW((void)use_dense(Method::dense, kDenseLimit + 1), InputError);
}

TEST(Spectral, LanczosMatchesJacobi) {
    std::mt19937_64 rng(54);
    for (std::size_t n : {1, 3, 17, 60, 130}) {
        const auto a = random_spd(rng, n);
        const double ref = oracle::jacobi_eigenvalues(a, static_cast<int>(n)).back();
        const PowerResult r = lanczos_max(dense_map(a, n), n);
        EXPECT_NEAR(r.value, ref, 1e-10 * ref);
        EXPECT_LE(r.residual, 1e-8 * ref);
    }
}

// Top gap 1e-6: power iteration stalls on the residual test, Lanczos does not.
TEST(Spectral, LanczosHandlesClusteredTop) {
    const std::size_t n = 80;
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0 + static_cast<double>(i) / n;
    a[(n - 2) * n + (n - 2)] = a[(n - 1) * n + (n - 1)] - 1e-6;
    EXPECT_THROW(power_iteration(dense_map(a, n), n), NonConvergence);
    const PowerResult r = lanczos_max(dense_map(a, n), n);
    EXPECT_NEAR(r.value, a[n * n - 1], 1e-12);
}

TEST(Spectral, LanczosZeroOperator) {
    const PowerResult r = lanczos_max([](std::span<const double>, std::span<double> y) { std::fill(y.begin(), y.end(), 0.0); }, 5);
    EXPECT_EQ(r.value, 0.0);
}
