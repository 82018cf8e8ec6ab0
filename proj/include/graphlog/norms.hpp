#pragma once

// Norms on the weighted Sobolev space H with
//   ||u||_H^2 = integral of (|grad u|^2 + (a+1) u^2),
// the split log energy, and the sup-norm embedding
//   ||u||_inf^2 (1+a0) mu_min <= ||u||_H^2.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphlog/graph.hpp"
#include "graphlog/numeric.hpp"
#include "graphlog/potential.hpp"

namespace graphlog {

namespace detail {

inline void require_a1(const Potential& a) {
    // a+1 must stay positive for the H norm to be one; a0 > -1 is enforced at
    // construction, this guards hand-built Potential-free call paths.
    if (!(a.a0() > -1.0))
        throw potential_error("potential violates (A1): a0 = " + std::to_string(a.a0()) +
                              " is not > -1");
}

inline double h_norm_sq_span(const WeightedGraph& g, const Potential& a,
                             std::span<const double> u) {
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        terms[i] = g.mu()[i] * (a.values()[i] + 1.0) * u[i] * u[i];
    return dirichlet_energy_span(g, u) + pairwise_sum(terms);
}

// H inner product <u,v> = integral of (Gamma(u,v) + (a+1) u v); the Gamma
// integral collapses to an edge sum.
inline double h_inner_span(const WeightedGraph& g, const Potential& a,
                           std::span<const double> u, std::span<const double> v) {
    std::vector<double> terms(g.edges().size() + g.size());
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const Edge& e = g.edges()[k];
        const auto xi = static_cast<std::size_t>(e.x);
        const auto yi = static_cast<std::size_t>(e.y);
        terms[k] = e.w * (u[yi] - u[xi]) * (v[yi] - v[xi]);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        terms[g.edges().size() + i] = g.mu()[i] * (a.values()[i] + 1.0) * u[i] * v[i];
    return pairwise_sum(terms);
}

inline double l2_sq_span(const WeightedGraph& g, std::span<const double> u) {
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) terms[i] = g.mu()[i] * u[i] * u[i];
    return pairwise_sum(terms);
}

struct LogEnergySplit {
    double pos = 0.0;
    double neg = 0.0;
    double total() const { return pos - neg; }
};

inline LogEnergySplit log_energy_span(const WeightedGraph& g, std::span<const double> u) {
    std::vector<double> pos, neg;
    pos.reserve(g.size());
    neg.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.mu()[i] * sq_log_sq(u[i]);
        if (t > 0.0) pos.push_back(t);
        else if (t < 0.0) neg.push_back(-t);
    }
    return {pairwise_sum(pos), pairwise_sum(neg)};
}

}  // namespace detail

inline double h_norm_sq(const WeightedGraph& g, const Potential& a, const VertexFunction& u) {
    require_same_graph(g, u, "h_norm_sq");
    require_same_graph(g, a, "h_norm_sq");
    detail::require_a1(a);
    return detail::h_norm_sq_span(g, a, u.values());
}

inline double h_inner(const WeightedGraph& g, const Potential& a, const VertexFunction& u,
                      const VertexFunction& v) {
    require_same_graph(g, u, "h_inner");
    require_same_graph(g, v, "h_inner");
    require_same_graph(g, a, "h_inner");
    detail::require_a1(a);
    return detail::h_inner_span(g, a, u.values(), v.values());
}

inline double l2_norm_sq(const WeightedGraph& g, const VertexFunction& u) {
    require_same_graph(g, u, "l2_norm_sq");
    return detail::l2_sq_span(g, u.values());
}

inline double lp_norm(const WeightedGraph& g, const VertexFunction& u, double p) {
    require_same_graph(g, u, "lp_norm");
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        terms[i] = g.mu()[i] * std::pow(std::fabs(u.values()[i]), p);
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

inline double linf_norm(const VertexFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::fabs(v));
    return m;
}

using LogEnergySplit = detail::LogEnergySplit;

// pos = integral of (u^2 log u^2)^+, neg = integral of (u^2 log u^2)^-,
// both nonnegative; the signed log energy is pos - neg.
inline LogEnergySplit log_energy(const WeightedGraph& g, const VertexFunction& u) {
    require_same_graph(g, u, "log_energy");
    return detail::log_energy_span(g, u.values());
}

struct NormReport {
    double l2_sq = 0.0;
    double h_norm_sq = 0.0;
    double linf = 0.0;
    double log_energy_pos = 0.0;
    double log_energy_neg = 0.0;
};

inline NormReport norm_report(const WeightedGraph& g, const Potential& a,
                              const VertexFunction& u) {
    NormReport r;
    r.l2_sq = l2_norm_sq(g, u);
    r.h_norm_sq = h_norm_sq(g, a, u);
    r.linf = linf_norm(u);
    const auto le = log_energy(g, u);
    r.log_energy_pos = le.pos;
    r.log_energy_neg = le.neg;
    return r;
}

// ||u||_inf^2 (1+a0) mu_min <= ||u||_H^2; holds for every u != 0 since the H
// norm dominates the weighted mass of the maximizing vertex.
inline bool linf_embedding_check(const WeightedGraph& g, const Potential& a,
                                 const VertexFunction& u) {
    const double linf = linf_norm(u);
    if (linf == 0.0) throw std::invalid_argument("linf_embedding_check needs u != 0");
    const double lhs = linf * linf * (1.0 + a.a0()) * g.mu_min();
    const double rhs = h_norm_sq(g, a, u);
    return lhs <= rhs * (1.0 + 1e-14) + 1e-300;
}

}  // namespace graphlog
