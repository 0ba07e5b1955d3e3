// arrowhead.hpp: eigensolver for real symmetric arrowhead matrices
//
//     [ alpha  z^T ]
//     [ z      D   ]      D = diag(d_0 .. d_{n-1})
//
// Spokes with zero coupling or equal diagonal entries are deflated first; the
// remaining eigenvalues are roots of the secular equation
//
//     lambda - alpha + sum_k z_k^2 / (d_k - lambda) = 0,
//
// one per pole interval. Each root is stored as (anchor pole, offset) so that
// differences d_k - lambda are formed without cancellation, and the couplings
// are recomputed from the computed roots (Loewner / Gu-Eisenstat) before the
// eigenvectors are assembled, which keeps them orthogonal to working precision.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringqed/error.hpp"

namespace ringqed::arrowhead {

struct Decomposition {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns; row 0 is the hub, row 1 + k is spoke k
};

namespace detail {

// A secular root expressed as d[anchor] + offset.
struct Root {
    std::size_t anchor;
    double offset;
};

class SecularEquation {
public:
    SecularEquation(double alpha, const std::vector<double>& d, const std::vector<double>& z)
        : alpha_(alpha)
        , d_(d)
        , z2_(z.size()) {
        for (std::size_t k = 0; k < z.size(); ++k)
            z2_[k] = z[k] * z[k];
    }

    // F(d[anchor] + tau); increasing in tau between poles.
    double value(std::size_t anchor, double tau) const {
        const double origin = d_[anchor];
        double sum = (origin - alpha_) + tau;
        for (std::size_t k = 0; k < d_.size(); ++k) {
            const double delta = (d_[k] - origin) - tau;
            sum += z2_[k] / delta;
        }
        return sum;
    }

    // Bisection on tau in the open interval (lo, hi) where F(lo+) < 0 < F(hi-).
    double solve(std::size_t anchor, double lo, double hi) const {
        for (int it = 0; it < 2000; ++it) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid <= lo || mid >= hi)
                return mid;
            if (value(anchor, mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        throw Error(ErrorKind::ConvergenceFailure,
                    "secular bisection did not converge (n=" + std::to_string(d_.size()) + ")");
    }

private:
    double alpha_;
    const std::vector<double>& d_;
    std::vector<double> z2_;
};

// All n+1 roots of the secular equation for strictly increasing d and z != 0.
inline std::vector<Root> secular_roots(double alpha, const std::vector<double>& d,
                                       const std::vector<double>& z) {
    const std::size_t n = d.size();
    SecularEquation eq(alpha, d, z);
    const double znorm = std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
    const double reach = std::abs(alpha - d.front()) + std::abs(alpha - d.back()) + znorm + 1.0;

    std::vector<Root> roots;
    roots.reserve(n + 1);

    // below the first pole: tau in (-reach, 0) relative to d[0]
    roots.push_back({0, eq.solve(0, -reach, 0.0)});

    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double gap = d[k + 1] - d[k];
        // which half holds the root decides the anchor
        if (eq.value(k, 0.5 * gap) >= 0.0)
            roots.push_back({k, eq.solve(k, 0.0, 0.5 * gap)});
        else
            roots.push_back({k + 1, eq.solve(k + 1, -0.5 * gap, 0.0)});
    }

    roots.push_back({n - 1, eq.solve(n - 1, 0.0, reach)});
    return roots;
}

// Eigenpairs of an arrowhead with strictly increasing d and positive z.
inline Decomposition solve_reduced(double alpha, const std::vector<double>& d,
                                   const std::vector<double>& z) {
    const std::size_t n = d.size();
    Decomposition out;
    out.values.resize(static_cast<Eigen::Index>(n + 1));
    out.vectors.resize(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));

    if (n == 0) {
        out.values[0] = alpha;
        out.vectors(0, 0) = 1.0;
        return out;
    }

    const auto roots = secular_roots(alpha, d, z);
    // d[k] - lambda_j, formed relative to the root's anchor
    auto pole_minus_root = [&](std::size_t k, std::size_t j) {
        return (d[k] - d[roots[j].anchor]) - roots[j].offset;
    };

    // Loewner: zhat_k^2 = -prod_j (d_k - lambda_j) / prod_{i != k} (d_k - d_i)
    std::vector<double> zhat(n);
    for (std::size_t k = 0; k < n; ++k) {
        double prod = -pole_minus_root(k, n);
        for (std::size_t j = 0; j < n; ++j) {
            prod *= pole_minus_root(k, j);
            const std::size_t i = j < k ? j : j + 1;
            if (i < n)
                prod /= (d[k] - d[i]);
        }
        zhat[k] = std::copysign(std::sqrt(std::max(prod, 0.0)), z[k]);
    }

    for (std::size_t j = 0; j <= n; ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        out.values[col] = d[roots[j].anchor] + roots[j].offset;
        out.vectors(0, col) = 1.0;
        for (std::size_t k = 0; k < n; ++k)
            out.vectors(static_cast<Eigen::Index>(k + 1), col) = -zhat[k] / pole_minus_root(k, j);
        out.vectors.col(col).normalize();
    }
    return out;
}

} // namespace detail

/// Full eigendecomposition of the arrowhead (alpha, d, z). Eigenvalues are
/// returned ascending with orthonormal eigenvectors.
inline Decomposition eigendecompose(double alpha, const std::vector<double>& d,
                                    const std::vector<double>& z) {
    if (d.size() != z.size())
        throw Error(ErrorKind::DimensionMismatch, "arrowhead diagonal and coupling sizes differ");

    const std::size_t n = d.size();
    const auto dim = static_cast<Eigen::Index>(n + 1);

    double scale = std::abs(alpha);
    for (std::size_t k = 0; k < n; ++k)
        scale = std::max({scale, std::abs(d[k]), std::abs(z[k])});
    const double eps = std::numeric_limits<double>::epsilon();
    const double d_tol = 4.0 * eps * std::max(scale, 1e-300);
    const double z_tol = eps * std::max(scale, 1e-300);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    // Transformation from reduced coordinates back to the original basis.
    // Column 0 is the hub; reduced spokes and deflated vectors follow.
    std::vector<double> red_d;
    std::vector<double> red_z;
    std::vector<Eigen::VectorXd> red_basis; // spoke direction in original coordinates
    std::vector<double> defl_values;
    std::vector<Eigen::VectorXd> defl_vectors;

    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && d[order[stop]] - d[order[start]] <= d_tol)
            ++stop;
        const std::size_t m = stop - start;

        double d_group = 0.0;
        Eigen::VectorXd zg(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) {
            d_group += d[order[start + i]];
            zg[static_cast<Eigen::Index>(i)] = z[order[start + i]];
        }
        d_group /= static_cast<double>(m);

        auto embed = [&](const Eigen::VectorXd& local) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
            for (std::size_t i = 0; i < m; ++i)
                v[static_cast<Eigen::Index>(order[start + i] + 1)] = local[static_cast<Eigen::Index>(i)];
            return v;
        };

        const double rho = zg.norm();
        if (rho <= z_tol) {
            for (std::size_t i = 0; i < m; ++i) {
                defl_values.push_back(d_group);
                defl_vectors.push_back(embed(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(m),
                                                                   static_cast<Eigen::Index>(i))));
            }
        } else {
            const Eigen::VectorXd u = zg / rho;
            red_d.push_back(d_group);
            red_z.push_back(rho);
            red_basis.push_back(embed(u));
            if (m > 1) {
                // Householder reflector mapping u to e_0; its other columns span u-perp.
                Eigen::VectorXd w = u;
                w[0] += (u[0] >= 0.0 ? 1.0 : -1.0);
                w.normalize();
                const Eigen::MatrixXd reflector =
                    Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) -
                    2.0 * w * w.transpose();
                for (Eigen::Index c = 1; c < static_cast<Eigen::Index>(m); ++c) {
                    defl_values.push_back(d_group);
                    defl_vectors.push_back(embed(reflector.col(c)));
                }
            }
        }
        start = stop;
    }

    const auto reduced = detail::solve_reduced(alpha, red_d, red_z);

    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors;
    values.reserve(n + 1);
    vectors.reserve(n + 1);
    for (Eigen::Index j = 0; j < reduced.values.size(); ++j) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v[0] = reduced.vectors(0, j);
        for (std::size_t k = 0; k < red_basis.size(); ++k)
            v += reduced.vectors(static_cast<Eigen::Index>(k + 1), j) * red_basis[k];
        values.push_back(reduced.values[j]);
        vectors.push_back(std::move(v));
    }
    for (std::size_t k = 0; k < defl_values.size(); ++k) {
        values.push_back(defl_values[k]);
        vectors.push_back(std::move(defl_vectors[k]));
    }

    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    Decomposition out;
    out.values.resize(dim);
    out.vectors.resize(dim, dim);
    for (std::size_t c = 0; c < idx.size(); ++c) {
        out.values[static_cast<Eigen::Index>(c)] = values[idx[c]];
        out.vectors.col(static_cast<Eigen::Index>(c)) = vectors[idx[c]];
    }
    return out;
}

} // namespace ringqed::arrowhead
