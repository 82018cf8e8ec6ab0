#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "graphlog/families.hpp"
#include "graphlog/solver.hpp"

using namespace graphlog;

namespace {

WeightedGraph single_vertex(double mu) {
    GraphBuilder b;
    b.add_vertex(mu);
    return b.build();
}

// Dense Gaussian elimination with partial pivoting, the oracle for CG.
std::vector<double> dense_solve(std::vector<std::vector<double>> M, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        REQUIRE(M[col][col] != 0.0);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = M[r][col] / M[col][col];
            for (std::size_t c = col; c < n; ++c) M[r][c] -= f * M[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= M[i][c] * x[c];
        x[i] = s / M[i][i];
    }
    return x;
}

}  // namespace

TEST_CASE("cg matches a dense solve of the metric system") {
    const WeightedGraph g = ball_truncate(generate("path:21"), 10, 4);
    REQUIRE(g.size() == 9);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> pot(0.0, 3.0), rd(-1.0, 1.0);
    const double a0 = -0.4;
    std::vector<double> av(g.size());
    for (auto& x : av) x = a0 + pot(rng);
    const Potential a(g, av, a0);

    std::vector<double> rhs(g.size());
    for (auto& x : rhs) x = rd(rng);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.is_boundary(static_cast<VertexId>(i))) rhs[i] = 0.0;

    // Interior block of -lap + (a+1): diagonal carries the full edge sum, off
    // diagonals couple interior neighbors only (boundary values are 0).
    std::vector<std::size_t> interior;
    std::vector<std::ptrdiff_t> slot(g.size(), -1);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.is_boundary(static_cast<VertexId>(i))) {
            slot[i] = static_cast<std::ptrdiff_t>(interior.size());
            interior.push_back(i);
        }
    const std::size_t ni = interior.size();
    std::vector<std::vector<double>> M(ni, std::vector<double>(ni, 0.0));
    std::vector<double> rhs_i(ni);
    for (std::size_t k = 0; k < ni; ++k) {
        const auto x = static_cast<VertexId>(interior[k]);
        double diag = av[interior[k]] + 1.0;
        for (const auto& [y, w] : g.neighbors(x)) {
            diag += w / g.mu(x);
            const auto s = slot[static_cast<std::size_t>(y)];
            if (s >= 0) M[k][static_cast<std::size_t>(s)] -= w / g.mu(x);
        }
        M[k][k] += diag;
        rhs_i[k] = rhs[interior[k]];
    }
    const std::vector<double> oracle = dense_solve(M, rhs_i);

    std::vector<double> x;
    const CgResult res = detail::cg_solve(g, a, rhs, x, 1e-13, 400);
    CHECK(res.rel_residual <= 1e-13);
    CHECK(res.iters > 0);
    for (std::size_t k = 0; k < ni; ++k)
        CHECK(x[interior[k]] == Catch::Approx(oracle[k]).epsilon(1e-9).margin(1e-12));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.is_boundary(static_cast<VertexId>(i))) CHECK(x[i] == 0.0);

    std::vector<double> zero_rhs(g.size(), 0.0), x0;
    const CgResult res0 = detail::cg_solve(g, a, zero_rhs, x0, 1e-13, 400);
    CHECK(res0.iters == 0);
    for (double v : x0) CHECK(v == 0.0);
}

TEST_CASE("single vertex: both solvers land on the closed form") {
    const WeightedGraph g = single_vertex(2.0);
    const Potential a(g, {-0.7}, -0.7);
    SolverConfig cfg;
    cfg.grad_tol = 1e-12;

    const SolveResult nd = nehari_descent(g, a, cfg);
    CHECK(nd.converged);
    CHECK(nd.trace.termination == "converged");
    CHECK(nd.positive_interior);
    CHECK(nd.u.values()[0] == Catch::Approx(0.7046880897187134).epsilon(1e-13));
    CHECK(nd.level == Catch::Approx(0.4965853037914095).epsilon(1e-13));
    CHECK(nd.report.residual_linf <= 1e-12);

    cfg.method = SolveMethod::mountain_pass;
    const MountainPassResult mp = mountain_pass(g, a, cfg);
    CHECK(mp.converged);
    CHECK(mp.positive_interior);
    CHECK(mp.u.values()[0] == Catch::Approx(0.7046880897187134).epsilon(1e-11));
    CHECK(mp.level == Catch::Approx(0.4965853037914095).epsilon(1e-11));
    CHECK(std::fabs(mp.c_hat - nd.level) <= 1e-4);
    CHECK(mp.report.residual_linf <= 1e-10);
    CHECK(mp.geometry.rho > 0.0);
    CHECK(mp.geometry.delta > 0.0);
    CHECK(mp.geometry.j_e < 0.0);
}

TEST_CASE("constant init projects straight onto the flat state") {
    SolverConfig cfg;
    cfg.init.kind = InitKind::constant;
    cfg.init.value = 1.0;

    const WeightedGraph g8 = generate("cycle:8");
    const SolveResult r8 = nehari_descent(g8, generate_potential("constant:-0.5", g8), cfg);
    CHECK(r8.converged);
    CHECK(r8.trace.rows.size() == 1);  // projection alone solves it
    CHECK(r8.level == Catch::Approx(2.4261226388505337).epsilon(1e-13));
    for (double v : r8.u.values())
        CHECK(v == Catch::Approx(std::exp(-0.25)).epsilon(1e-14));

    const WeightedGraph g6 = generate("cycle:6");
    const SolveResult r6 = nehari_descent(g6, generate_potential("constant:0.5", g6), cfg);
    CHECK(r6.converged);
    CHECK(r6.trace.rows.size() == 1);
    CHECK(r6.level == Catch::Approx(4.946163812100385).epsilon(1e-13));
    for (double v : r6.u.values())
        CHECK(v == Catch::Approx(std::exp(0.25)).epsilon(1e-14));
}

TEST_CASE("localized states: rotation symmetry, monotone trace, certificate") {
    const WeightedGraph g = generate("cycle:31");
    const Potential a = generate_potential("constant:-0.5", g);

    SolverConfig cfg;
    cfg.grad_tol = 1e-10;
    cfg.max_iters = 4000;
    cfg.init.kind = InitKind::positive_bump;

    cfg.init.vertex = 5;
    const SolveResult r1 = nehari_descent(g, a, cfg);
    cfg.init.vertex = 25;
    const SolveResult r2 = nehari_descent(g, a, cfg);

    REQUIRE(r1.converged);
    REQUIRE(r2.converged);
    CHECK(std::fabs(r1.level - r2.level) <= 1e-8);
    CHECK(r1.level < 2.0);  // strictly below the flat state's 2.426...

    for (std::size_t k = 1; k < r1.trace.rows.size(); ++k) {
        const double prev = r1.trace.rows[k - 1].J;
        CHECK(r1.trace.rows[k].J <= prev + 1e-9 * std::max(1.0, std::fabs(prev)));
    }

    // Converged gradient norms obey the metric bound
    // ||G||_H <= (1 + cg_rtol) residual_l2 / sqrt(1 + a0).
    const TraceRow last = r1.trace.rows.back();
    CHECK(last.residual_l2 <= cfg.grad_tol);
    const double hnorm = std::sqrt(r1.report.h_norm_sq);
    CHECK(last.cerami_product <=
          2.0 * (1.0 + hnorm) * cfg.grad_tol / std::sqrt(1.0 + a.a0()));

    std::mt19937_64 rng(8);
    std::vector<VertexFunction> pool;
    for (int k = 0; k < 60; ++k) {
        std::vector<double> v(g.size());
        for (auto& x : v) x = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        pool.push_back(VertexFunction(g, std::move(v)));
    }
    const CertificateReport cert = nehari_level_certificate(g, a, r1.u, pool);
    CHECK(cert.passed);
    CHECK(cert.d_hat == Catch::Approx(r1.level).epsilon(1e-12));
    CHECK(cert.worst_gap > 0.0);
}

TEST_CASE("mountain pass agrees with the descent level on a cycle") {
    const WeightedGraph g = generate("cycle:8");
    const Potential a = generate_potential("constant:-0.5", g);
    SolverConfig cfg;
    cfg.grad_tol = 1e-9;
    cfg.init.kind = InitKind::positive_bump;
    cfg.init.vertex = 0;

    const SolveResult nd = nehari_descent(g, a, cfg);
    cfg.method = SolveMethod::mountain_pass;
    const MountainPassResult mp = mountain_pass(g, a, cfg);

    REQUIRE(nd.converged);
    REQUIRE(mp.converged);
    CHECK(std::fabs(mp.c_hat - nd.level) <= 1e-4 * std::max(nd.level, 1.0));
    CHECK(mp.level == Catch::Approx(nd.level).epsilon(1e-8));
    CHECK(mp.positive_interior);
    CHECK(mp.geometry.rho > 0.0);
    CHECK(mp.geometry.delta > 0.0);
    CHECK(mp.geometry.t_e >= 1.0);
    CHECK(mp.geometry.j_e < 0.0);
    CHECK(linf_norm(mp.geometry.e) > 0.0);
}

TEST_CASE("geometry check reports a usable sphere and endpoint") {
    std::mt19937_64 rng(3);
    for (const char* spec : {"cycle:12", "path:15", "lattice2d:4x4"}) {
        const WeightedGraph g = generate(spec);
        for (double alpha : {-0.9, 0.5}) {
            const Potential a = generate_potential("constant:" + std::to_string(alpha), g);
            std::vector<double> pv(g.size());
            for (auto& x : pv) x = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
            const GeometryReport rep = geometry_check(g, a, VertexFunction(g, pv));
            INFO(spec << " alpha " << alpha);
            CHECK(rep.rho > 0.0);
            CHECK(rep.delta > 0.0);
            CHECK(rep.j_e < 0.0);
            CHECK(rep.t_e > 0.0);
            // The endpoint sits outside the sphere.
            CHECK(h_norm_sq(g, a, rep.e) > rep.rho * rep.rho);
        }
    }
    const WeightedGraph g = generate("cycle:5");
    const Potential a = generate_potential("constant:0.0", g);
    CHECK_THROWS_AS(geometry_check(g, a, VertexFunction::zeros(g)), std::invalid_argument);
}

TEST_CASE("exhaustion study: nested truncations with a coercive potential") {
    const WeightedGraph base = generate("path:61");
    PotentialFamilySpec ps = parse_potential_spec("coercive:2:-0.5:scale=3");

    SolverConfig cfg;
    cfg.grad_tol = 1e-10;
    cfg.max_iters = 4000;
    cfg.init.kind = InitKind::positive_bump;
    cfg.init.vertex = 0;
    cfg.radius_schedule = {6, 12, 18, 24};

    const std::vector<ExhaustionRow> rows = exhaustion_study(base, ps, 0, cfg);
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].radius == 6 * static_cast<int>(k + 1));
        CHECK(rows[k].vertices == static_cast<std::size_t>(rows[k].radius) + 1);
        CHECK(rows[k].converged);
        CHECK(rows[k].d_hat > 0.0);
        CHECK(rows[k].com_distance < 3.0);
    }
    // Enlarging the domain can only lower the constrained minimum.
    for (std::size_t k = 1; k < rows.size(); ++k)
        CHECK(rows[k].d_hat <= rows[k - 1].d_hat + 1e-9);
    // The state is pinned at the origin, so the far half empties out.
    CHECK(rows.back().tail_mass < 1e-8);
    CHECK(rows.back().tail_mass <= rows.front().tail_mass + 1e-12);

    SolverConfig bad = cfg;
    bad.radius_schedule = {};
    CHECK_THROWS_AS(exhaustion_study(base, ps, 0, bad), std::invalid_argument);
    PotentialFamilySpec off = ps;
    off.center = 50;
    bad.radius_schedule = {6};
    CHECK_THROWS_AS(exhaustion_study(base, off, 0, bad), std::invalid_argument);
}

TEST_CASE("iteration budget and init validation") {
    const WeightedGraph g = generate("cycle:8");
    const Potential a = generate_potential("constant:-0.5", g);

    SolverConfig cfg;
    cfg.init.kind = InitKind::positive_bump;
    cfg.max_iters = 1;
    cfg.grad_tol = 1e-14;
    const SolveResult r = nehari_descent(g, a, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.trace.termination == "max_iters");
    CHECK(r.trace.rows.size() == 1);
    CHECK(std::isfinite(r.level));

    SolverConfig bad;
    bad.init.kind = InitKind::positive_bump;
    bad.init.vertex = 99;
    CHECK_THROWS_AS(nehari_descent(g, a, bad), std::invalid_argument);
    bad.init.vertex = 0;
    bad.init.height = 0.0;
    CHECK_THROWS_AS(nehari_descent(g, a, bad), std::invalid_argument);
    SolverConfig cz;
    cz.init.kind = InitKind::constant;
    cz.init.value = 0.0;
    CHECK_THROWS_AS(nehari_descent(g, a, cz), std::invalid_argument);
    SolverConfig rz;
    rz.init.kind = InitKind::random;
    rz.init.scale = -1.0;
    CHECK_THROWS_AS(nehari_descent(g, a, rz), std::invalid_argument);

    const std::vector<double> zero(g.size(), 0.0);
    SolverConfig ok;
    CHECK_THROWS_AS(nehari_descent(g, a, ok, &zero), std::invalid_argument);
}
