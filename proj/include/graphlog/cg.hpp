#pragma once

// Conjugate gradients for A = -lap + (a+1), restricted to interior vertices
// with zero Dirichlet data. A is symmetric positive definite in the
// mu-weighted inner product (it represents the H inner product), so plain CG
// applies; inner solves for the H-gradient are run inexactly.

#include <cmath>
#include <span>
#include <vector>

#include "graphlog/graph.hpp"
#include "graphlog/numeric.hpp"
#include "graphlog/potential.hpp"

namespace graphlog {

struct CgResult {
    int iters = 0;
    double rel_residual = 0.0;
};

namespace detail {

inline void apply_operator(const WeightedGraph& g, const Potential& a,
                           std::span<const double> p, std::span<double> out) {
    parallel_for(g.size(), [&](std::size_t i) {
        const auto x = static_cast<VertexId>(i);
        if (g.is_boundary(x)) {
            out[i] = 0.0;
            return;
        }
        double lap = 0.0;
        for (const auto& [y, w] : g.neighbors(x))
            lap += w * (p[static_cast<std::size_t>(y)] - p[i]);
        out[i] = (a.values()[i] + 1.0) * p[i] - lap / g.mu(x);
    });
}

inline double mu_dot(const WeightedGraph& g, std::span<const double> f,
                     std::span<const double> h) {
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) terms[i] = g.mu()[i] * f[i] * h[i];
    return pairwise_sum(terms);
}

// Solves A x = rhs with x = 0 on the boundary; rhs must vanish there too.
// Stops when ||rhs - A x||_mu <= rtol * ||rhs||_mu.
inline CgResult cg_solve(const WeightedGraph& g, const Potential& a,
                         std::span<const double> rhs, std::vector<double>& x, double rtol,
                         int max_iters) {
    const std::size_t n = g.size();
    x.assign(n, 0.0);
    std::vector<double> r(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i)
        if (g.is_boundary(static_cast<VertexId>(i))) r[i] = 0.0;

    const double rhs_norm = std::sqrt(mu_dot(g, r, r));
    CgResult res;
    if (rhs_norm == 0.0) return res;

    std::vector<double> p(r), Ap(n, 0.0);
    double rr = rhs_norm * rhs_norm;
    for (res.iters = 0; res.iters < max_iters; ++res.iters) {
        res.rel_residual = std::sqrt(rr) / rhs_norm;
        if (res.rel_residual <= rtol) return res;
        apply_operator(g, a, p, Ap);
        const double pAp = mu_dot(g, p, Ap);
        if (!(pAp > 0.0)) break;  // numerically indefinite; bail with best x
        const double alpha = rr / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rr_next = mu_dot(g, r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res.rel_residual = std::sqrt(rr) / rhs_norm;
    return res;
}

}  // namespace detail
}  // namespace graphlog
