#pragma once

// The energy functional
//   J(u) = 1/2 ||u||_H^2 - 1/2 integral of u^2 log u^2
// together with its directional derivative, the pointwise residual
//   R(u) = -lap(u) + a u - u log u^2,
// and the Nehari machinery: the fiber t -> J(t u) has exactly one maximum at
//   t_u = exp((||u||_H^2 - ||u||_2^2 - log_energy) / (2 ||u||_2^2)),
// and on the manifold {J'(u).u = 0} the identity J(u) = 1/2 ||u||_2^2 holds.

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphlog/graph.hpp"
#include "graphlog/norms.hpp"
#include "graphlog/numeric.hpp"
#include "graphlog/potential.hpp"

namespace graphlog {

namespace detail {

// Signed log energy in one pass; callers that need the split use
// log_energy_span.
inline double log_energy_total_span(const WeightedGraph& g, std::span<const double> u) {
    const auto le = log_energy_span(g, u);
    return le.pos - le.neg;
}

// Pointwise residual at interior vertices; boundary slots are set to 0.
inline void residual_into(const WeightedGraph& g, const Potential& a,
                          std::span<const double> u, std::span<double> out) {
    parallel_for(g.size(), [&](std::size_t i) {
        const auto x = static_cast<VertexId>(i);
        if (g.is_boundary(x)) {
            out[i] = 0.0;
            return;
        }
        double lap = 0.0;
        for (const auto& [y, w] : g.neighbors(x))
            lap += w * (u[static_cast<std::size_t>(y)] - u[i]);
        lap /= g.mu(x);
        const double nl = u[i] == 0.0 ? 0.0 : u[i] * log_sq(u[i]);
        out[i] = -lap + a.values()[i] * u[i] - nl;
    });
}

inline double derivative_span(const WeightedGraph& g, const Potential& a,
                              std::span<const double> u, std::span<const double> v) {
    std::vector<double> terms(g.edges().size() + g.size());
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const Edge& e = g.edges()[k];
        const auto xi = static_cast<std::size_t>(e.x);
        const auto yi = static_cast<std::size_t>(e.y);
        terms[k] = e.w * (u[yi] - u[xi]) * (v[yi] - v[xi]);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double nl = u[i] == 0.0 ? 0.0 : u[i] * log_sq(u[i]);
        terms[g.edges().size() + i] = g.mu()[i] * (a.values()[i] * u[i] - nl) * v[i];
    }
    return pairwise_sum(terms);
}

}  // namespace detail

struct EnergyReport {
    double J = 0.0;
    double h_norm_sq = 0.0;
    double l2_sq = 0.0;
    double log_energy_pos = 0.0;
    double log_energy_neg = 0.0;
    double nehari_defect = 0.0;   // J'(u).u
    double residual_l2 = 0.0;     // sqrt(sum over interior of mu R^2)
    double residual_linf = 0.0;   // max over interior of |R|
    double log_energy() const { return log_energy_pos - log_energy_neg; }
};

// J'(u).v; the integrand u v log u^2 uses the 0 log 0 = 0 convention.
inline double directional_derivative(const WeightedGraph& g, const Potential& a,
                                     const VertexFunction& u, const VertexFunction& v) {
    require_same_graph(g, u, "directional_derivative");
    require_same_graph(g, v, "directional_derivative");
    require_same_graph(g, a, "directional_derivative");
    detail::require_a1(a);
    return detail::derivative_span(g, a, u.values(), v.values());
}

inline VertexFunction residual(const WeightedGraph& g, const Potential& a,
                               const VertexFunction& u) {
    require_same_graph(g, u, "residual");
    require_same_graph(g, a, "residual");
    std::vector<double> out(g.size());
    detail::residual_into(g, a, u.values(), out);
    return VertexFunction(g, std::move(out));
}

inline EnergyReport energy_report(const WeightedGraph& g, const Potential& a,
                                  const VertexFunction& u) {
    require_same_graph(g, u, "energy_report");
    require_same_graph(g, a, "energy_report");
    detail::require_a1(a);

    EnergyReport r;
    r.h_norm_sq = detail::h_norm_sq_span(g, a, u.values());
    r.l2_sq = detail::l2_sq_span(g, u.values());
    const auto le = detail::log_energy_span(g, u.values());
    r.log_energy_pos = le.pos;
    r.log_energy_neg = le.neg;
    r.J = 0.5 * (r.h_norm_sq - le.total());
    r.nehari_defect = r.h_norm_sq - r.l2_sq - le.total();

    std::vector<double> R(g.size());
    detail::residual_into(g, a, u.values(), R);
    std::vector<double> sq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        sq[i] = g.mu()[i] * R[i] * R[i];
        r.residual_linf = std::max(r.residual_linf, std::fabs(R[i]));
    }
    r.residual_l2 = std::sqrt(pairwise_sum(sq));

    // J - 1/2 J'(u).u = 1/2 ||u||_2^2 is algebraic; a violation beyond
    // rounding means the sums above disagree with themselves.
    const double lhs = r.J - 0.5 * r.nehari_defect - 0.5 * r.l2_sq;
    const double scale = std::fabs(r.J) + std::fabs(r.nehari_defect) + r.l2_sq + 1e-300;
    if (std::fabs(lhs) > 1e-10 * scale)
        throw std::logic_error("energy identity violated: J - J'(u).u/2 - ||u||_2^2/2 = " +
                               std::to_string(lhs));
    return r;
}

// J(t u) from the scaling law, using precomputed H = ||u||_H^2, m = ||u||_2^2
// and L = log energy of u.
inline double energy_at_scale(double H, double m, double L, double t) {
    const double t2 = t * t;
    return 0.5 * (t2 * H - t2 * L - t2 * std::log(t2) * m);
}

inline double nehari_t(const WeightedGraph& g, const Potential& a, const VertexFunction& u) {
    require_same_graph(g, u, "nehari_t");
    require_same_graph(g, a, "nehari_t");
    const double m = detail::l2_sq_span(g, u.values());
    if (m == 0.0) throw std::invalid_argument("nehari_t needs u != 0");
    const double H = detail::h_norm_sq_span(g, a, u.values());
    const double L = detail::log_energy_total_span(g, u.values());
    return std::exp((H - m - L) / (2.0 * m));
}

inline VertexFunction scale(const WeightedGraph& g, const VertexFunction& u, double t) {
    std::vector<double> v(u.values());
    for (double& x : v) x *= t;
    return VertexFunction(g, std::move(v));
}

struct FiberReport {
    double t_u = 0.0;
    double j_at_t = 0.0;
    // (t, j'(t)/t) sampled on a log grid around t_u; strictly decreasing.
    std::vector<std::pair<double, double>> slope_samples;
};

// Projection onto the Nehari manifold along the ray through u, with an audit
// of the fiber map. The slopes are evaluated through the full directional
// derivative at the scaled function rather than the closed form.
inline FiberReport nehari_project(const WeightedGraph& g, const Potential& a,
                                  const VertexFunction& u) {
    FiberReport rep;
    rep.t_u = nehari_t(g, a, u);

    const double H = detail::h_norm_sq_span(g, a, u.values());
    const double m = detail::l2_sq_span(g, u.values());
    const double L = detail::log_energy_total_span(g, u.values());
    rep.j_at_t = energy_at_scale(H, m, L, rep.t_u);

    double prev = 0.0;
    bool first = true;
    for (int k = -4; k <= 4; ++k) {
        const double t = rep.t_u * std::pow(10.0, k / 4.0);
        const VertexFunction tu = scale(g, u, t);
        const double slope = detail::derivative_span(g, a, tu.values(), u.values()) / t;
        if (!first && slope >= prev)
            throw std::logic_error("fiber slope j'(t)/t failed to decrease at t = " +
                                   std::to_string(t));
        prev = slope;
        first = false;
        rep.slope_samples.emplace_back(t, slope);
    }
    return rep;
}

inline VertexFunction nehari_project_fn(const WeightedGraph& g, const Potential& a,
                                        const VertexFunction& u) {
    return scale(g, u, nehari_t(g, a, u));
}

struct CertificateReport {
    double d_hat = 0.0;
    bool passed = false;
    double worst_gap = 0.0;  // min over trials of J(t_v v) - d_hat
    std::size_t trials = 0;
};

// One-sided minimality certificate: u_star must sit on the manifold, and no
// projected trial may achieve an energy below d_hat - tol.
inline CertificateReport nehari_level_certificate(const WeightedGraph& g, const Potential& a,
                                                  const VertexFunction& u_star,
                                                  const std::vector<VertexFunction>& pool,
                                                  double tol = 1e-9) {
    const EnergyReport er = energy_report(g, a, u_star);
    if (std::fabs(er.nehari_defect) > 1e-8 * std::max(er.h_norm_sq, 1e-300))
        throw std::invalid_argument(
            "certificate refused: u_star is not on the Nehari manifold (defect " +
            std::to_string(er.nehari_defect) + ")");

    for (const VertexFunction& v : pool) {
        require_same_graph(g, v, "nehari_level_certificate");
        if (linf_norm(v) == 0.0)
            throw std::invalid_argument("certificate pool contains u = 0");
    }

    CertificateReport rep;
    rep.d_hat = er.J;
    rep.trials = pool.size();
    std::vector<double> gaps(pool.size(), 0.0);
    parallel_for(
        pool.size(),
        [&](std::size_t i) {
            const VertexFunction& v = pool[i];
            const double m = detail::l2_sq_span(g, v.values());
            const double H = detail::h_norm_sq_span(g, a, v.values());
            const double L = detail::log_energy_total_span(g, v.values());
            const double t = std::exp((H - m - L) / (2.0 * m));
            gaps[i] = energy_at_scale(H, m, L, t) - rep.d_hat;
        },
        64);
    rep.worst_gap = pool.empty() ? 0.0 : *std::min_element(gaps.begin(), gaps.end());
    rep.passed = rep.worst_gap >= -tol;
    return rep;
}

// Measured constant in integral (u^2 log u^2)^+ <= C ||u||_H^3, maximized
// over a deterministic ensemble: one-vertex spikes, BFS plateau balls around
// spread-out centers, and seeded random shapes, each scanned over scales.
// The induced norm floor for Nehari functions is (1/C)^(1/(q-2)) with q = 3.
inline double calibrate_cq(const WeightedGraph& g, const Potential& a,
                           std::uint64_t seed = 7) {
    detail::require_a1(a);
    const std::size_t n = g.size();
    double best = 0.0;

    // Spikes admit a closed-form scan: the ratio for value s at x peaks at
    // s = e with value (2/e) mu(x) / kappa(x)^(3/2), where kappa(x) is the
    // H-norm energy of the unit spike.
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = static_cast<VertexId>(i);
        if (g.is_boundary(x)) continue;
        double kappa = g.mu(x) * (a.values()[i] + 1.0);
        for (const auto& [y, w] : g.neighbors(x)) {
            (void)y;
            kappa += w;
        }
        best = std::max(best, (2.0 / std::exp(1.0)) * g.mu(x) / std::pow(kappa, 1.5));
    }

    const auto scan_shape = [&](const std::vector<double>& shape) {
        const double H = detail::h_norm_sq_span(g, a, shape);
        if (H <= 0.0) return;
        const double norm = std::sqrt(H);
        std::vector<double> v(shape);
        for (double& x : v) x /= norm;
        for (int k = 0; k < 240; ++k) {
            const double s = std::pow(10.0, -2.0 + 5.0 * k / 239.0);
            std::vector<double> sv(v);
            for (double& x : sv) x *= s;
            const double pos = detail::log_energy_span(g, sv).pos;
            best = std::max(best, pos / (s * s * s));
        }
    };

    // Plateau balls around up to 8 interior centers spread across the graph.
    std::vector<VertexId> centers;
    {
        VertexId first = -1;
        for (std::size_t i = 0; i < n; ++i)
            if (!g.is_boundary(static_cast<VertexId>(i))) {
                first = static_cast<VertexId>(i);
                break;
            }
        if (first < 0) throw std::invalid_argument("calibrate_cq needs interior vertices");
        centers.push_back(first);
        auto depth = bfs_depth(g, first);
        for (int round = 0; round < 7; ++round) {
            VertexId far = -1;
            int far_d = -1;
            for (std::size_t i = 0; i < n; ++i)
                if (!g.is_boundary(static_cast<VertexId>(i)) && depth[i] > far_d) {
                    far_d = depth[i];
                    far = static_cast<VertexId>(i);
                }
            if (far < 0 || far_d <= 0) break;
            centers.push_back(far);
            const auto d2 = bfs_depth(g, far);
            for (std::size_t i = 0; i < n; ++i)
                depth[i] = std::min(depth[i], d2[i]);
        }
    }
    for (VertexId c : centers) {
        const auto depth = bfs_depth(g, c);
        for (int r = 0; r <= 8; ++r) {
            std::vector<double> shape(n, 0.0);
            bool any = false;
            for (std::size_t i = 0; i < n; ++i)
                if (depth[i] >= 0 && depth[i] <= r && !g.is_boundary(static_cast<VertexId>(i))) {
                    shape[i] = 1.0;
                    any = true;
                }
            if (any) scan_shape(shape);
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 32; ++trial) {
        std::vector<double> shape(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (!g.is_boundary(static_cast<VertexId>(i))) shape[i] = gauss(rng);
        scan_shape(shape);
    }
    return best;
}

inline double nehari_norm_floor(double cq, double q = 3.0) {
    if (!(cq > 0.0)) throw std::invalid_argument("norm floor needs a positive constant");
    return std::pow(1.0 / cq, 1.0 / (q - 2.0));
}

}  // namespace graphlog
