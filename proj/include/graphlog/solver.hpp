#pragma once

// Ground-state solvers.
//
// nehari_descent: steepest descent in the H metric followed by projection
// back onto the Nehari manifold after every step. The descent direction is
// the Riesz representative G of J'(u), i.e. the solution of
// (-lap + (a+1)) G = R(u) on interior vertices, obtained by an inexact CG
// solve. Accepted steps never increase J.
//
// mountain_pass: a discrete path from 0 to a negative-energy endpoint is
// deformed by steepest descent at its maximizer. The maximizer is first
// refined along the polyline (ternary search on the two adjacent segments)
// so that the descent direction is transverse to the path. Points are never
// resampled globally: each descended point keeps its progress, and the
// elevated neighbors take their turns as the maximizer on later sweeps.
// When the pass level stagnates, midpoints are inserted around the peak (up
// to a point cap), since the polyline max cannot drop below the local chord
// discretization gap. The reported level c_hat is the maximum over all
// segments at termination, and the returned state is the maximizer polished
// by nehari_descent.
//
// exhaustion_study: solves on nested ball truncations with warm starts
// (previous solution, zero-extended) and reports level and mass diagnostics
// per radius.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphlog/cg.hpp"
#include "graphlog/families.hpp"
#include "graphlog/graph.hpp"
#include "graphlog/norms.hpp"
#include "graphlog/potential.hpp"
#include "graphlog/variational.hpp"

namespace graphlog {

enum class SolveMethod { nehari_descent, mountain_pass };

enum class InitKind { positive_bump, constant, random };

struct InitSpec {
    InitKind kind = InitKind::positive_bump;
    VertexId vertex = 0;   // bump center
    double height = 1.0;   // bump peak value
    double value = 1.0;    // constant value
    double scale = 1.0;    // random amplitude
};

struct SolverConfig {
    SolveMethod method = SolveMethod::nehari_descent;
    InitSpec init;
    int max_iters = 2000;
    double grad_tol = 1e-8;   // on residual_l2
    double step = 1.0;        // initial trial step
    double shrink = 0.5;      // backtracking factor
    double armijo = 1e-4;     // sufficient-decrease constant
    double cg_rtol = 1e-2;    // inexact inner solve tolerance
    int path_points = 17;     // mountain pass path resolution
    std::uint64_t seed = 1;
    std::vector<int> radius_schedule;  // exhaustion_study
};

struct TraceRow {
    int iter = 0;
    double J = 0.0;
    double grad_norm = 0.0;      // ||G||_H, dual-norm estimate of J'(u)
    double nehari_defect = 0.0;  // J'(u).u
    double residual_l2 = 0.0;
    double step = 0.0;           // step accepted on the previous iteration
    double cerami_product = 0.0;  // (1 + ||u||_H) ||G||_H
};

struct SolveTrace {
    std::vector<TraceRow> rows;
    std::string termination;  // converged | max_iters | stalled
};

struct SolveResult {
    VertexFunction u;
    SolveTrace trace;
    EnergyReport report;
    double level = 0.0;  // J(u)
    bool converged = false;
    bool positive_interior = false;
};

namespace detail {

inline std::vector<double> make_init(const WeightedGraph& g, const InitSpec& init,
                                     std::uint64_t seed) {
    const std::size_t n = g.size();
    if (g.interior_count() == 0)
        throw std::invalid_argument("solver needs at least one interior vertex");
    std::vector<double> u(n, 0.0);
    switch (init.kind) {
        case InitKind::positive_bump: {
            if (init.vertex < 0 || static_cast<std::size_t>(init.vertex) >= n)
                throw std::invalid_argument("bump vertex " + std::to_string(init.vertex) +
                                            " does not exist");
            if (!(init.height > 0.0))
                throw std::invalid_argument("bump height must be > 0");
            const auto depth = bfs_depth(g, init.vertex);
            for (std::size_t i = 0; i < n; ++i)
                if (depth[i] >= 0) u[i] = init.height * std::exp(-double(depth[i]));
            break;
        }
        case InitKind::constant: {
            if (init.value == 0.0) throw std::invalid_argument("constant init must be != 0");
            std::fill(u.begin(), u.end(), init.value);
            break;
        }
        case InitKind::random: {
            if (!(init.scale > 0.0)) throw std::invalid_argument("random init scale must be > 0");
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> dist(0.1 * init.scale, init.scale);
            for (double& x : u) x = dist(rng);
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (g.is_boundary(static_cast<VertexId>(i))) u[i] = 0.0;
    return u;
}

struct Gradient {
    std::vector<double> values;
    double h_norm = 0.0;
    int cg_iters = 0;
};

inline Gradient h_gradient(const WeightedGraph& g, const Potential& a,
                           std::span<const double> u, double cg_rtol) {
    const std::size_t n = g.size();
    std::vector<double> R(n);
    residual_into(g, a, u, R);
    Gradient grad;
    const CgResult cg = cg_solve(g, a, R, grad.values, cg_rtol, static_cast<int>(4 * n + 64));
    grad.cg_iters = cg.iters;
    grad.h_norm = std::sqrt(std::max(0.0, h_norm_sq_span(g, a, grad.values)));
    return grad;
}

inline double residual_l2_span(const WeightedGraph& g, std::span<const double> R) {
    std::vector<double> sq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sq[i] = g.mu()[i] * R[i] * R[i];
    return std::sqrt(pairwise_sum(sq));
}

struct FiberData {
    double H = 0.0, m = 0.0, L = 0.0;
    double t() const { return std::exp((H - m - L) / (2.0 * m)); }
};

inline FiberData fiber_data(const WeightedGraph& g, const Potential& a,
                            std::span<const double> u) {
    FiberData f;
    f.H = h_norm_sq_span(g, a, u);
    f.m = l2_sq_span(g, u);
    f.L = log_energy_total_span(g, u);
    return f;
}

}  // namespace detail

inline SolveResult nehari_descent(const WeightedGraph& g, const Potential& a,
                                  const SolverConfig& cfg,
                                  const std::vector<double>* init_override = nullptr) {
    require_same_graph(g, a, "nehari_descent");
    detail::require_a1(a);
    const std::size_t n = g.size();

    std::vector<double> u =
        init_override ? *init_override : detail::make_init(g, cfg.init, cfg.seed);
    for (std::size_t i = 0; i < n; ++i)
        if (g.is_boundary(static_cast<VertexId>(i))) u[i] = 0.0;

    detail::FiberData f = detail::fiber_data(g, a, u);
    if (f.m == 0.0) throw std::invalid_argument("initial point is identically zero");
    {
        const double t = f.t();
        if (!std::isfinite(t))
            throw std::runtime_error("nehari_descent: projection of the initial point "
                                     "overflowed; rescale the init");
        for (double& x : u) x *= t;
        f = detail::fiber_data(g, a, u);
    }
    double J = 0.5 * (f.H - f.L);
    if (!std::isfinite(J))
        throw std::runtime_error("nehari_descent: energy is not finite at the initial point");

    SolveTrace trace;
    trace.termination = "max_iters";
    std::vector<double> R(n), cand(n), proj(n), Rc(n);
    double last_step = 0.0;
    double step0 = cfg.step;
    bool converged = false;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        detail::residual_into(g, a, u, R);
        const double res_l2 = detail::residual_l2_span(g, R);
        const detail::Gradient grad = detail::h_gradient(g, a, u, cfg.cg_rtol);

        TraceRow row;
        row.iter = iter;
        row.J = J;
        row.grad_norm = grad.h_norm;
        row.nehari_defect = f.H - f.m - f.L;
        row.residual_l2 = res_l2;
        row.step = last_step;
        row.cerami_product = (1.0 + std::sqrt(f.H)) * grad.h_norm;
        trace.rows.push_back(row);

        if (res_l2 <= cfg.grad_tol) {
            trace.termination = "converged";
            converged = true;
            break;
        }

        const double gsq = grad.h_norm * grad.h_norm;
        // Rounding floor of the energy evaluation: once the sufficient-decrease
        // threshold drops below it the Armijo comparison is meaningless, and a
        // step is judged by a strict drop of the projected residual instead.
        const double j_noise = 64.0 * std::numeric_limits<double>::epsilon() *
                               (std::fabs(J) + f.H + f.m + std::fabs(f.L));
        double s = step0;
        bool accepted = false;
        for (int tries = 0; tries < 80 && s >= 1e-18; ++tries, s *= cfg.shrink) {
            for (std::size_t i = 0; i < n; ++i) cand[i] = u[i] - s * grad.values[i];
            detail::FiberData fc = detail::fiber_data(g, a, cand);
            if (fc.m == 0.0) continue;
            const double t = fc.t();
            if (!std::isfinite(t) || t == 0.0) continue;
            const double Jc = energy_at_scale(fc.H, fc.m, fc.L, t);
            if (!std::isfinite(Jc)) continue;
            bool ok;
            if (cfg.armijo * s * gsq > j_noise) {
                ok = Jc <= J - cfg.armijo * s * gsq;
            } else {
                ok = false;
                if (Jc <= J + j_noise) {
                    for (std::size_t i = 0; i < n; ++i) proj[i] = cand[i] * t;
                    detail::residual_into(g, a, proj, Rc);
                    ok = detail::residual_l2_span(g, Rc) <= 0.999 * res_l2;
                }
            }
            const bool tiny_ok = s < 1e-12 * step0 && Jc <= J;
            if (ok || tiny_ok) {
                for (std::size_t i = 0; i < n; ++i) u[i] = cand[i] * t;
                f = detail::fiber_data(g, a, u);
                J = 0.5 * (f.H - f.L);
                last_step = s;
                // Restart no lower than cfg.step: near the minimum the Armijo
                // comparison sits inside rounding noise and would otherwise pin
                // the step at whatever tiny value it last collapsed to.
                step0 = std::clamp(2.0 * s, cfg.step, cfg.step * 1e6);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            trace.termination = "stalled";
            break;
        }
    }

    // J is even and the residual odd, so u and -u solve the same equation;
    // report the representative with nonnegative mean. (Descent from a path
    // maximizer can overshoot through zero.)
    {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += g.mu()[i] * u[i];
        if (mean < 0.0)
            for (double& x : u) x = -x;
    }

    SolveResult out{VertexFunction(g, std::move(u)), std::move(trace), {}, 0.0, converged, false};
    out.report = energy_report(g, a, out.u);
    out.level = out.report.J;
    out.positive_interior = true;
    for (std::size_t i = 0; i < n; ++i)
        if (!g.is_boundary(static_cast<VertexId>(i)) && !(out.u.values()[i] > 0.0))
            out.positive_interior = false;
    return out;
}

struct GeometryReport {
    double rho = 0.0;    // sphere radius with a positive empirical bound
    double delta = 0.0;  // min of J over the sampled sphere
    double t_e = 0.0;    // endpoint scaling J(t_e * probe) < 0
    double j_e = 0.0;
    int doublings = 0;
    VertexFunction e;
};

inline GeometryReport geometry_check(const WeightedGraph& g, const Potential& a,
                                     const VertexFunction& probe, std::uint64_t seed = 1,
                                     int n_dirs = 32) {
    require_same_graph(g, probe, "geometry_check");
    require_same_graph(g, a, "geometry_check");
    detail::require_a1(a);
    const std::size_t n = g.size();
    if (linf_norm(probe) == 0.0)
        throw std::invalid_argument("geometry_check needs a nonzero probe");

    // Sampled directions: the probe plus seeded gaussians, interior-supported.
    std::vector<std::vector<double>> dirs;
    dirs.push_back(probe.values());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 1; k < n_dirs; ++k) {
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (!g.is_boundary(static_cast<VertexId>(i))) d[i] = gauss(rng);
        dirs.push_back(std::move(d));
    }

    GeometryReport rep;
    bool found = false;
    double rho = 1.0;
    for (int k = 0; k < 48 && !found; ++k, rho *= 0.5) {
        double delta = std::numeric_limits<double>::infinity();
        for (const auto& d : dirs) {
            const double H = detail::h_norm_sq_span(g, a, d);
            if (H <= 0.0) continue;
            std::vector<double> v(d);
            const double c = rho / std::sqrt(H);
            for (double& x : v) x *= c;
            const detail::FiberData f = detail::fiber_data(g, a, v);
            delta = std::min(delta, 0.5 * (f.H - f.L));
        }
        if (delta > 0.0) {
            rep.rho = rho;
            rep.delta = delta;
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("geometry_check: no sphere radius with positive energy "
                                 "bound found within 48 halvings");

    const detail::FiberData fp = detail::fiber_data(g, a, probe.values());
    double t = 1.0;
    for (rep.doublings = 0; rep.doublings <= 60; ++rep.doublings) {
        const double jt = energy_at_scale(fp.H, fp.m, fp.L, t);
        if (jt < 0.0 && t * t * fp.H > rep.rho * rep.rho) {
            rep.t_e = t;
            rep.j_e = jt;
            rep.e = scale(g, probe, t);
            return rep;
        }
        t *= 2.0;
    }
    throw std::runtime_error("geometry_check: no negative-energy endpoint within 60 "
                             "doublings of the probe");
}

struct MountainPassResult {
    VertexFunction u;     // polished maximizer
    SolveTrace trace;     // per-sweep rows at the path maximizer, then polish rows
    EnergyReport report;  // of the polished u
    double c_hat = 0.0;   // refined path maximum at termination
    double level = 0.0;   // J(u) after polish
    bool converged = false;
    bool positive_interior = false;
    GeometryReport geometry;
};

namespace detail {

inline double path_energy(const WeightedGraph& g, const Potential& a,
                          std::span<const double> u) {
    const FiberData f = fiber_data(g, a, u);
    return 0.5 * (f.H - f.L);
}

// Max of J along the segment (1-s) x + s y, ternary search; J is smooth so
// the local refinement converges quickly.
inline std::pair<double, std::vector<double>> segment_max(const WeightedGraph& g,
                                                          const Potential& a,
                                                          std::span<const double> x,
                                                          std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> p(n);
    const auto at = [&](double s) {
        for (std::size_t i = 0; i < n; ++i) p[i] = (1.0 - s) * x[i] + s * y[i];
        return path_energy(g, a, p);
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (at(m1) < at(m2)) lo = m1;
        else hi = m2;
    }
    const double s = 0.5 * (lo + hi);
    const double val = at(s);
    return {val, p};
}

}  // namespace detail

inline MountainPassResult mountain_pass(const WeightedGraph& g, const Potential& a,
                                        const SolverConfig& cfg) {
    require_same_graph(g, a, "mountain_pass");
    detail::require_a1(a);
    const std::size_t n = g.size();

    const VertexFunction probe(g, detail::make_init(g, cfg.init, cfg.seed));
    MountainPassResult out{VertexFunction::zeros(g), {}, {}, 0.0, 0.0, false, false,
                           geometry_check(g, a, probe, cfg.seed)};

    int P = std::max(cfg.path_points, 5);
    const int p_cap = std::max(129, 4 * P + 1);
    std::vector<std::vector<double>> path(static_cast<std::size_t>(P));
    std::vector<double> endpoint = out.geometry.e.values();
    const auto reset_path = [&] {
        path.resize(static_cast<std::size_t>(P));
        for (int i = 0; i < P; ++i) {
            auto& p = path[static_cast<std::size_t>(i)];
            p.assign(n, 0.0);
            const double lam = double(i) / double(P - 1);
            for (std::size_t j = 0; j < n; ++j) p[j] = lam * endpoint[j];
        }
    };
    reset_path();

    // Subdivide the two segments adjacent to the peak.
    const auto insert_midpoints = [&](int i) {
        std::vector<double> ml(n), mr(n);
        const auto& prev = path[static_cast<std::size_t>(i - 1)];
        const auto& here = path[static_cast<std::size_t>(i)];
        const auto& next = path[static_cast<std::size_t>(i + 1)];
        for (std::size_t j = 0; j < n; ++j) {
            ml[j] = 0.5 * (prev[j] + here[j]);
            mr[j] = 0.5 * (here[j] + next[j]);
        }
        path.insert(path.begin() + i + 1, std::move(mr));
        path.insert(path.begin() + i, std::move(ml));
        P += 2;
    };

    SolveTrace trace;
    trace.termination = "max_iters";
    std::vector<double> R(n), cand(n);
    double last_step = 0.0;
    double step0 = cfg.step;
    int reseeds = 0;
    bool converged = false;
    double c_hat = 0.0;
    double c_best = std::numeric_limits<double>::infinity();
    int stagnant = 0;

    for (int sweep = 0; sweep < cfg.max_iters; ++sweep) {
        int imax = 0;
        double jmax = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < P; ++i) {
            const double ji = detail::path_energy(g, a, path[static_cast<std::size_t>(i)]);
            if (ji > jmax) {
                jmax = ji;
                imax = i;
            }
        }

        if (imax == 0 || imax == P - 1) {
            // Path collapse: push the endpoint further out and start over.
            if (++reseeds > 40)
                throw std::runtime_error("mountain_pass: path maximizer pinned at an "
                                         "endpoint after 40 re-seeds");
            for (double& x : endpoint) x *= 2.0;
            if (detail::path_energy(g, a, endpoint) >= 0.0) continue;
            reset_path();
            continue;
        }

        // Refine the maximum along the two adjacent polyline segments so the
        // descent direction is transverse to the path.
        {
            auto [va, pa] = detail::segment_max(g, a, path[static_cast<std::size_t>(imax - 1)],
                                                path[static_cast<std::size_t>(imax)]);
            auto [vb, pb] = detail::segment_max(g, a, path[static_cast<std::size_t>(imax)],
                                                path[static_cast<std::size_t>(imax + 1)]);
            if (va >= vb && va > jmax) {
                path[static_cast<std::size_t>(imax)] = std::move(pa);
                jmax = va;
            } else if (vb > jmax) {
                path[static_cast<std::size_t>(imax)] = std::move(pb);
                jmax = vb;
            }
        }
        auto& peak = path[static_cast<std::size_t>(imax)];
        c_hat = jmax;

        detail::residual_into(g, a, peak, R);
        const double res_l2 = detail::residual_l2_span(g, R);
        const detail::Gradient grad = detail::h_gradient(g, a, peak, cfg.cg_rtol);
        const detail::FiberData f = detail::fiber_data(g, a, peak);

        TraceRow row;
        row.iter = sweep;
        row.J = jmax;
        row.grad_norm = grad.h_norm;
        row.nehari_defect = f.H - f.m - f.L;
        row.residual_l2 = res_l2;
        row.step = last_step;
        row.cerami_product = (1.0 + std::sqrt(f.H)) * grad.h_norm;
        trace.rows.push_back(row);

        // Either the peak solves the equation, or the pass level has stopped
        // improving. Stagnation first buys local path resolution (the
        // polyline max cannot drop below the chord discretization gap around
        // the peak); once the point cap is reached the deformation is
        // exhausted and the polish stage takes over.
        if (res_l2 <= cfg.grad_tol) {
            trace.termination = "converged";
            converged = true;
            break;
        }
        if (c_hat <= c_best - 1e-10 * std::max(1.0, std::fabs(c_best))) {
            c_best = c_hat;
            stagnant = 0;
        } else if (++stagnant >= 8) {
            if (P < p_cap) {
                insert_midpoints(imax);
                stagnant = 0;
                continue;
            }
            trace.termination = "converged";
            converged = true;
            break;
        }

        const double gsq = grad.h_norm * grad.h_norm;
        double s = step0;
        bool accepted = false;
        for (int tries = 0; tries < 80 && s >= 1e-18; ++tries, s *= cfg.shrink) {
            for (std::size_t i = 0; i < n; ++i) cand[i] = peak[i] - s * grad.values[i];
            const double Jc = detail::path_energy(g, a, cand);
            if (!std::isfinite(Jc)) continue;
            const bool armijo_ok = Jc <= jmax - cfg.armijo * s * gsq;
            const bool tiny_ok = s < 1e-12 * step0 && Jc <= jmax;
            if (armijo_ok || tiny_ok) {
                peak = cand;
                last_step = s;
                step0 = std::clamp(2.0 * s, cfg.step, cfg.step * 1e6);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            trace.termination = "stalled";
            break;
        }
    }

    // Final pass level: max over every segment of the polyline. The global
    // maximizer seeds the polish; trace rows continue numbering.
    std::vector<double> seed = path.front();
    double jmax = detail::path_energy(g, a, seed);
    for (int i = 1; i < P; ++i) {
        auto [v, p] = detail::segment_max(g, a, path[static_cast<std::size_t>(i - 1)],
                                          path[static_cast<std::size_t>(i)]);
        if (v > jmax) {
            jmax = v;
            seed = std::move(p);
        }
    }
    c_hat = jmax;
    SolverConfig polish_cfg = cfg;
    polish_cfg.method = SolveMethod::nehari_descent;
    SolveResult polished = nehari_descent(g, a, polish_cfg, &seed);
    const int offset = static_cast<int>(trace.rows.size());
    for (TraceRow row : polished.trace.rows) {
        row.iter += offset;
        trace.rows.push_back(row);
    }

    out.u = std::move(polished.u);
    out.report = polished.report;
    out.level = polished.level;
    out.c_hat = c_hat;
    out.converged = converged && polished.converged;
    out.positive_interior = polished.positive_interior;
    trace.termination = out.converged ? "converged" : trace.termination;
    out.trace = std::move(trace);
    return out;
}

struct ExhaustionRow {
    int radius = 0;
    std::size_t vertices = 0;
    double d_hat = 0.0;
    int iters = 0;
    bool converged = false;
    double com_distance = 0.0;  // center of mass of u^2 in hop distance
    double tail_mass = 0.0;     // u^2 mass beyond radius/2, normalized
};

inline std::vector<ExhaustionRow> exhaustion_study(const WeightedGraph& base,
                                                   const PotentialFamilySpec& pspec,
                                                   VertexId center, const SolverConfig& cfg) {
    std::vector<int> schedule = cfg.radius_schedule;
    if (schedule.empty())
        throw std::invalid_argument("exhaustion_study needs a radius schedule");
    std::sort(schedule.begin(), schedule.end());

    std::vector<double> prev_full;  // last solution on base ids, zero-extended
    std::vector<ExhaustionRow> rows;

    for (int R : schedule) {
        const WeightedGraph gR = ball_truncate(base, center, R);
        // Family centers refer to base vertex ids; remap onto the truncation.
        PotentialFamilySpec ps = pspec;
        {
            const auto& src = gR.source_ids();
            const auto it = std::find(src.begin(), src.end(), pspec.center);
            if (it == src.end())
                throw std::invalid_argument("potential center fell outside the truncation");
            ps.center = static_cast<VertexId>(it - src.begin());
        }
        const Potential aR = generate_potential(ps, gR);

        std::optional<std::vector<double>> warm;
        if (!prev_full.empty()) {
            std::vector<double> w(gR.size(), 0.0);
            double mass = 0.0;
            for (std::size_t i = 0; i < gR.size(); ++i) {
                if (gR.is_boundary(static_cast<VertexId>(i))) continue;
                w[i] = prev_full[static_cast<std::size_t>(gR.source_ids()[i])];
                mass += std::fabs(w[i]);
            }
            if (mass > 0.0) warm = std::move(w);
        }

        ExhaustionRow row;
        row.radius = R;
        row.vertices = gR.size();
        VertexFunction u = VertexFunction::zeros(gR);
        if (cfg.method == SolveMethod::mountain_pass) {
            const MountainPassResult res = mountain_pass(gR, aR, cfg);
            row.d_hat = res.c_hat;
            row.iters = static_cast<int>(res.trace.rows.size());
            row.converged = res.converged;
            u = res.u;
        } else {
            const SolveResult res =
                nehari_descent(gR, aR, cfg, warm ? &*warm : nullptr);
            row.d_hat = res.level;
            row.iters = static_cast<int>(res.trace.rows.size());
            row.converged = res.converged;
            u = res.u;
        }

        std::vector<double> mass(gR.size()), moment(gR.size()), tail(gR.size(), 0.0);
        for (std::size_t i = 0; i < gR.size(); ++i) {
            mass[i] = gR.mu()[i] * u.values()[i] * u.values()[i];
            moment[i] = mass[i] * gR.depth()[i];
            if (gR.depth()[i] > R / 2) tail[i] = mass[i];
        }
        const double total = pairwise_sum(mass);
        row.com_distance = total > 0.0 ? pairwise_sum(moment) / total : 0.0;
        row.tail_mass = total > 0.0 ? pairwise_sum(tail) / total : 0.0;
        rows.push_back(row);

        prev_full.assign(base.size(), 0.0);
        for (std::size_t i = 0; i < gR.size(); ++i)
            prev_full[static_cast<std::size_t>(gR.source_ids()[i])] = u.values()[i];
    }
    return rows;
}

}  // namespace graphlog
