// SPDX-License-Identifier: Apache-2.0
//
// Large symmetric eigenproblems on tree-sized state spaces: matrix-free power
// iteration and conjugate gradient, plus dense reference solvers.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "matweight/matlin.hpp"

namespace matweight {

/// y = A x for a symmetric operator on R^n; y arrives zeroed.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Dense paths are used up to this state dimension.
inline constexpr std::size_t kDenseLimit = 4096;

enum class Method { automatic, dense, power };

struct PowerOptions {
    double increment_tol = 1e-10;  // relative eigenvalue increment
    int stable_steps = 3;          // consecutive iterations under increment_tol
    double residual_tol = 1e-8;    // ||Ax - lx|| <= residual_tol * |l|
    int max_iterations = 10000;
    std::uint64_t seed = 0x5eedULL;
};

struct PowerResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    Vec vector;
};

/// Largest eigenvalue of a symmetric positive semidefinite operator.
/// Throws NonConvergence with the last iterate diagnostics.
PowerResult power_iteration(const LinearMap& op, std::size_t n, const PowerOptions& opts = {});

/// Same contract as power_iteration, solved by restarted Lanczos with full
/// reorthogonalization. Clustered top eigenvalues converge in few restarts.
/// `iterations` counts operator applications.
PowerResult lanczos_max(const LinearMap& op, std::size_t n, const PowerOptions& opts = {});

/// Solves A x = b for symmetric positive definite A; x holds the initial guess.
/// Returns the iteration count. Throws NonConvergence.
int conjugate_gradient(const LinearMap& op, std::span<const double> b, std::span<double> x,
                       double rel_tol = 1e-13, int max_iterations = 0);

/// Dense n x n matrix assembled column by column from a linear map with m outputs.
std::vector<double> assemble(const std::function<void(std::span<const double>, std::span<double>)>& op,
                             std::size_t n, std::size_t m);

/// Ascending eigenvalues of a dense symmetric n x n matrix.
Vec dense_eigenvalues(std::span<const double> a, std::size_t n);
/// Ascending eigenvalues of A x = l B x for symmetric A and symmetric PD B.
Vec dense_generalized_eigenvalues(std::span<const double> a, std::span<const double> b, std::size_t n);
/// Inverse of a dense symmetric PD matrix.
std::vector<double> dense_spd_inverse(std::span<const double> a, std::size_t n);
/// Largest singular value of a dense row-major m x n matrix.
double dense_singular_max(std::span<const double> k, std::size_t m, std::size_t n);

bool use_dense(Method m, std::size_t n);

}  // namespace matweight
