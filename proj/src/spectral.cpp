// SPDX-License-Identifier: Apache-2.0
#include "matweight/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>

#include "matweight/error.hpp"

namespace matweight {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> view(std::span<const double> a, std::size_t rows, std::size_t cols) {
    if (a.size() != rows * cols) throw InputError("dense matrix has the wrong number of entries");
    return {a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

Vec to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void normalize(std::span<double> x) {
    const double n = norm2(x);
    for (double& v : x) v /= n;
}

}  // namespace

PowerResult power_iteration(const LinearMap& op, std::size_t n, const PowerOptions& opts) {
    PowerResult r;
    if (n == 0) return r;
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Vec x(n), y(n);
    for (double& v : x) v = gauss(rng);
    normalize(x);

    double previous = 0.0;
    int stable = 0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        op(x, y);
        const double lambda = dot(x, y);
        const double ynorm = norm2(y);
        r.iterations = it;
        if (ynorm == 0.0) {
            r.value = 0.0;
            r.residual = 0.0;
            r.vector = x;
            return r;
        }
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
        res = std::sqrt(res);
        const double scale = std::abs(lambda);
        if (it > 1 && std::abs(lambda - previous) <= opts.increment_tol * scale) {
            ++stable;
        } else {
            stable = 0;
        }
        previous = lambda;
        r.value = lambda;
        r.residual = res;
        if (stable >= opts.stable_steps && res <= opts.residual_tol * scale) {
            r.vector = x;
            return r;
        }
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ynorm;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge after " << r.iterations << " iterations (n=" << n
        << ", estimate=" << r.value << ", residual=" << r.residual << ")";
    throw NonConvergence(msg.str());
}

PowerResult lanczos_max(const LinearMap& op, std::size_t n, const PowerOptions& opts) {
    PowerResult r;
    if (n == 0) return r;
    constexpr std::size_t kBasis = 48;
    const std::size_t m = std::min(n, kBasis);
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Vec start(n);
    for (double& v : start) v = gauss(rng);
    normalize(start);

    std::vector<Vec> basis;
    Vec w(n), ritz(n), ax(n);
    double previous = 0.0;
    int stable = 0, applied = 0;
    while (applied < opts.max_iterations) {
        basis.assign(1, start);
        std::vector<double> alpha, beta;
        double theta = 0.0;
        Vec coeffs{1.0};
        bool exhausted = false;
        for (std::size_t j = 0; j < m && applied < opts.max_iterations; ++j) {
            std::fill(w.begin(), w.end(), 0.0);
            op(basis[j], w);
            ++applied;
            alpha.push_back(dot(basis[j], w));
            // two passes of classical Gram-Schmidt against the whole basis
            for (int pass = 0; pass < 2; ++pass) {
                for (const Vec& v : basis) {
                    const double c = dot(v, w);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
                }
            }
            const double b = norm2(w);
            const int k = static_cast<int>(alpha.size());
            SymMatrix t(k);
            for (int i = 0; i < k; ++i) {
                t.set(i, i, alpha[i]);
                if (i + 1 < k) t.set(i, i + 1, beta[i]);
            }
            const EigenDecomp e = eig_sym(t);
            theta = e.values.back();
            coeffs = e.column(k - 1);
            const double estimate = b * std::abs(coeffs.back());
            const double scale = std::abs(theta);
            if (applied > 1 && std::abs(theta - previous) <= opts.increment_tol * scale) {
                ++stable;
            } else {
                stable = 0;
            }
            previous = theta;
            r.value = theta;
            r.residual = estimate;
            r.iterations = applied;
            exhausted = b <= 1e-14 * std::max(scale, 1e-300) || b == 0.0;
            if (exhausted || (stable >= opts.stable_steps && estimate <= opts.residual_tol * scale)) break;
            if (j + 1 < m) {
                Vec next(n);
                for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
                basis.push_back(std::move(next));
                beta.push_back(b);
            }
        }
        std::fill(ritz.begin(), ritz.end(), 0.0);
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            for (std::size_t i = 0; i < n; ++i) ritz[i] += coeffs[j] * basis[j][i];
        }
        normalize(ritz);
        std::fill(ax.begin(), ax.end(), 0.0);
        op(ritz, ax);
        ++applied;
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res += (ax[i] - theta * ritz[i]) * (ax[i] - theta * ritz[i]);
        res = std::sqrt(res);
        r.value = theta;
        r.residual = res;
        r.iterations = applied;
        if (res <= opts.residual_tol * std::abs(theta) || (theta == 0.0 && res == 0.0)) {
            if (exhausted || stable >= opts.stable_steps || res == 0.0) {
                r.vector = ritz;
                return r;
            }
        }
        start = ritz;
    }
    std::ostringstream msg;
    msg << "lanczos iteration did not converge after " << r.iterations << " operator applications (n=" << n
        << ", estimate=" << r.value << ", residual=" << r.residual << ")";
    throw NonConvergence(msg.str());
}

int conjugate_gradient(const LinearMap& op, std::span<const double> b, std::span<double> x, double rel_tol,
                       int max_iterations) {
    const std::size_t n = b.size();
    if (max_iterations <= 0) max_iterations = static_cast<int>(10 * n + 100);
    Vec r(n), p(n), ap(n);
    std::fill(ap.begin(), ap.end(), 0.0);
    op(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    p = r;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    double rr = dot(r, r);
    for (int it = 0; it < max_iterations; ++it) {
        if (std::sqrt(rr) <= rel_tol * bnorm) return it;
        std::fill(ap.begin(), ap.end(), 0.0);
        op(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) throw NonConvergence("conjugate gradient met a non-positive curvature direction");
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    if (std::sqrt(rr) <= rel_tol * bnorm) return max_iterations;
    std::ostringstream msg;
    msg << "conjugate gradient did not converge (n=" << n << ", relative residual=" << std::sqrt(rr) / bnorm << ")";
    throw NonConvergence(msg.str());
}

std::vector<double> assemble(const std::function<void(std::span<const double>, std::span<double>)>& op,
                             std::size_t n, std::size_t m) {
    std::vector<double> out(m * n, 0.0);
    Vec e(n, 0.0), col(m);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        std::fill(col.begin(), col.end(), 0.0);
        op(e, col);
        for (std::size_t i = 0; i < m; ++i) out[i * n + j] = col[i];
        e[j] = 0.0;
    }
    return out;
}

Vec dense_eigenvalues(std::span<const double> a, std::size_t n) {
    const Eigen::MatrixXd m = view(a, n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NonConvergence("dense symmetric eigensolver failed");
    return to_vec(solver.eigenvalues());
}

Vec dense_generalized_eigenvalues(std::span<const double> a, std::span<const double> b, std::size_t n) {
    const Eigen::MatrixXd ma = view(a, n, n);
    const Eigen::MatrixXd mb = view(b, n, n);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(ma, mb, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) throw NotPositiveDefinite("generalized eigensolver: right-hand form is not PD");
    return to_vec(solver.eigenvalues());
}

std::vector<double> dense_spd_inverse(std::span<const double> a, std::size_t n) {
    const Eigen::MatrixXd m = view(a, n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("dense inverse: matrix is not PD");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = 0.5 * (inv(i, j) + inv(j, i));
    }
    return out;
}

double dense_singular_max(std::span<const double> k, std::size_t m, std::size_t n) {
    const Eigen::MatrixXd km = view(k, m, n);
    const Eigen::MatrixXd gram = km.transpose() * km;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NonConvergence("dense symmetric eigensolver failed");
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

bool use_dense(Method m, std::size_t n) {
    switch (m) {
        case Method::dense:
            if (n > kDenseLimit) throw InputError("dense method limited to state dimension 4096");
            return true;
        case Method::power:
            return false;
        case Method::automatic:
            break;
    }
    return n <= kDenseLimit;
}

}  // namespace matweight
