// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles that share no code with the library: a cyclic Jacobi
// eigensolver on plain vectors and a scalar (d = 1) pipeline written from the
// leaf-level definitions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Dense = std::vector<double>;  // row-major n x n

// Eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Dense a, int n) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, total = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                total += at(i, j) * at(i, j);
                if (i != j) off += at(i, j) * at(i, j);
            }
        }
        if (off <= 1e-32 * total || off == 0.0) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Largest singular value of a rows x cols matrix via the eigenvalues of K^T K.
inline double max_singular(const Dense& k, int rows, int cols) {
    Dense g(static_cast<std::size_t>(cols) * cols, 0.0);
    for (int i = 0; i < cols; ++i) {
        for (int j = 0; j < cols; ++j) {
            double s = 0.0;
            for (int r = 0; r < rows; ++r) s += k[static_cast<std::size_t>(r) * cols + i] * k[static_cast<std::size_t>(r) * cols + j];
            g[static_cast<std::size_t>(i) * cols + j] = s;
        }
    }
    return std::sqrt(std::max(0.0, jacobi_eigenvalues(g, cols).back()));
}

// Piecewise-constant scalar weight on 2^depth leaves of [0,1).
struct Scalar {
    int depth = 0;
    std::vector<double> w;

    [[nodiscard]] int leaves() const { return 1 << depth; }
    [[nodiscard]] bool in(int level, int pos, int leaf) const { return (leaf >> (depth - level)) == pos; }
    // h_I(leaf) = |I|^{-1/2} on the right half, minus on the left half.
    [[nodiscard]] double haar(int level, int pos, int leaf) const {
        if (!in(level, pos, leaf)) return 0.0;
        const bool right = ((leaf >> (depth - level - 1)) & 1) != 0;
        return (right ? 1.0 : -1.0) * std::sqrt(std::ldexp(1.0, level));
    }
    [[nodiscard]] double avg(int level, int pos, const std::function<double(double)>& g) const {
        double s = 0.0;
        int n = 0;
        for (int l = 0; l < leaves(); ++l) {
            if (in(level, pos, l)) {
                s += g(w[l]);
                ++n;
            }
        }
        return s / n;
    }
    [[nodiscard]] double mean_w(int level, int pos) const { return avg(level, pos, [](double x) { return x; }); }
};

inline double a2(const Scalar& s) {
    double best = 0.0;
    for (int j = 0; j <= s.depth; ++j) {
        for (int k = 0; k < (1 << j); ++k) {
            best = std::max(best, s.mean_w(j, k) * s.avg(j, k, [](double x) { return 1.0 / x; }));
        }
    }
    return best;
}

struct SquarePair {
    double c_up;
    double c_low;
};

// Haar basis coordinates: D = diag(<w>_I), M_IJ = int w h_I h_J.
inline SquarePair square(const Scalar& s) {
    std::vector<std::pair<int, int>> nodes;
    for (int j = 0; j < s.depth; ++j) {
        for (int k = 0; k < (1 << j); ++k) nodes.emplace_back(j, k);
    }
    const int n = static_cast<int>(nodes.size());
    const double dx = std::ldexp(1.0, -s.depth);
    Dense c(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            double m = 0.0;
            for (int l = 0; l < s.leaves(); ++l) {
                m += s.w[l] * s.haar(nodes[a].first, nodes[a].second, l) * s.haar(nodes[b].first, nodes[b].second, l) * dx;
            }
            c[static_cast<std::size_t>(a) * n + b] =
                m / std::sqrt(s.mean_w(nodes[a].first, nodes[a].second) * s.mean_w(nodes[b].first, nodes[b].second));
        }
    }
    const auto ev = jacobi_eigenvalues(c, n);
    return {1.0 / ev.front(), ev.back()};
}

// || w^{1/2} S w^{-1/2} || where S acts on leaf values; the output weight
// lives at depth out_depth and is the input weight refined.
inline double weighted_norm(const Scalar& s, const Dense& op, int out_depth) {
    const int rows = 1 << out_depth, cols = s.leaves();
    const double measure = std::sqrt(std::ldexp(1.0, s.depth - out_depth));
    Dense k(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        const double wr = s.w[r >> (out_depth - s.depth)];
        for (int c = 0; c < cols; ++c) {
            k[static_cast<std::size_t>(r) * cols + c] =
                measure * std::sqrt(wr) * op[static_cast<std::size_t>(r) * cols + c] / std::sqrt(s.w[c]);
        }
    }
    return max_singular(k, rows, cols);
}

// (Sf)(x) = 2^{-1/2} sum_I <f, h_I> (h_{I-}(x) - h_{I+}(x)) on the tree one level deeper.
inline double shift_norm(const Scalar& s) {
    Scalar fine{s.depth + 1, {}};
    const int rows = fine.leaves(), cols = s.leaves();
    const double dx = std::ldexp(1.0, -s.depth);
    Dense op(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int j = 0; j < s.depth; ++j) {
        for (int k = 0; k < (1 << j); ++k) {
            for (int r = 0; r < rows; ++r) {
                const double out = fine.haar(j + 1, 2 * k, r) - fine.haar(j + 1, 2 * k + 1, r);
                if (out == 0.0) continue;
                for (int c = 0; c < cols; ++c) op[static_cast<std::size_t>(r) * cols + c] += out * s.haar(j, k, c) * dx / std::sqrt(2.0);
            }
        }
    }
    return weighted_norm(s, op, s.depth + 1);
}

// T f = sum_I sigma_I <f, h_I> h_I.
inline double multiplier_norm(const Scalar& s, const std::function<double(int, int)>& sigma) {
    const int n = s.leaves();
    const double dx = std::ldexp(1.0, -s.depth);
    Dense op(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < s.depth; ++j) {
        for (int k = 0; k < (1 << j); ++k) {
            const double sg = sigma(j, k);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) op[static_cast<std::size_t>(r) * n + c] += sg * s.haar(j, k, r) * s.haar(j, k, c) * dx;
            }
        }
    }
    return weighted_norm(s, op, s.depth);
}

// sup_f sum_I |I| alpha_I <w^{1/2} f>_I^2 / <w>_I over ||f||^2 = 1.
inline double tv_sup(const Scalar& s) {
    const int n = s.leaves();
    const double dx = std::ldexp(1.0, -s.depth);
    Dense q(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < s.depth; ++j) {
        for (int k = 0; k < (1 << j); ++k) {
            const double len = std::ldexp(1.0, -j), m = s.mean_w(j, k);
            const double diff = s.mean_w(j + 1, 2 * k) - s.mean_w(j + 1, 2 * k + 1);
            const double coef = len * (diff / m) * (diff / m) / m;
            std::vector<double> b(n, 0.0);
            for (int l = 0; l < n; ++l) {
                if (s.in(j, k, l)) b[l] = std::sqrt(s.w[l]) * dx / len;
            }
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) q[static_cast<std::size_t>(r) * n + c] += coef * b[r] * b[c] / dx;
            }
        }
    }
    return jacobi_eigenvalues(q, n).back();
}

// sup_J (1/|J|) sum_{I in J} What(I)^2 / <w>_I / <w>_J over a2^2.
inline double testing_ratio(const Scalar& s) {
    const double dx = std::ldexp(1.0, -s.depth);
    double best = 0.0;
    for (int jl = 0; jl < s.depth; ++jl) {
        for (int jp = 0; jp < (1 << jl); ++jp) {
            double sum = 0.0;
            for (int il = jl; il < s.depth; ++il) {
                for (int ip = jp << (il - jl); ip < (jp + 1) << (il - jl); ++ip) {
                    double hat = 0.0;
                    for (int l = 0; l < s.leaves(); ++l) hat += s.w[l] * s.haar(il, ip, l) * dx;
                    sum += hat * hat / s.mean_w(il, ip);
                }
            }
            best = std::max(best, sum * std::ldexp(1.0, jl) / s.mean_w(jl, jp));
        }
    }
    const double a = a2(s);
    return best / (a * a);
}

inline Scalar random_scalar(std::mt19937_64& rng, int depth, double spread) {
    std::normal_distribution<double> g(0.0, spread);
    Scalar s{depth, {}};
    for (int l = 0; l < s.leaves(); ++l) s.w.push_back(std::exp(g(rng)));
    return s;
}

}  // namespace oracle
