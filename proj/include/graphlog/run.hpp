#pragma once

// Config-driven entry points behind the CLI subcommands. Each run_* function
// takes a merged JSON config, validates it against a key whitelist (unknown
// keys are hard errors), writes its artifacts under output_dir, and returns
// the process exit code:
//   0  converged / verified,
//   1  config or input error (thrown; the caller maps exceptions to 1),
//   2  solver finished without converging (artifacts are still written),
//   3  verification inconclusive (budget too small to certify).
// Identical config + seed produces byte-identical summary.json.

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "graphlog/io.hpp"
#include "graphlog/norms.hpp"
#include "graphlog/series.hpp"
#include "graphlog/solver.hpp"
#include "graphlog/variational.hpp"

namespace graphlog {

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& what) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : allowed)
            if (key == k) ok = true;
        if (!ok) {
            std::string list;
            for (const char* k : allowed) {
                if (!list.empty()) list += ", ";
                list += k;
            }
            throw std::invalid_argument(what + " config key '" + key +
                                        "' is not recognized (allowed: " + list + ")");
        }
    }
}

inline Problem load_problem(const json& cfg) {
    if (!cfg.contains("graph"))
        throw std::invalid_argument("config needs a 'graph' (family spec or {\"file\": ...})");
    const json& jg = cfg.at("graph");
    Problem p;
    if (jg.is_string()) {
        p.graph = generate(jg.get<std::string>());
    } else if (jg.is_object() && jg.contains("file")) {
        check_keys(jg, {"file"}, "graph");
        p = problem_from_json(load_json_file(jg.at("file").get<std::string>()));
    } else {
        throw std::invalid_argument("'graph' must be a family spec string or {\"file\": ...}");
    }
    if (cfg.contains("potential")) {
        p.a = generate_potential(cfg.at("potential").get<std::string>(), p.graph);
    }
    if (!p.a)
        throw std::invalid_argument(
            "no potential: pass 'potential' or embed one in the graph file; it must "
            "satisfy (A1), i.e. be bounded below by some a0 > -1");
    return p;
}

inline InitSpec init_from_json(const json& cfg, bool* embedded) {
    InitSpec init;
    *embedded = false;
    if (!cfg.contains("init")) return init;
    const json& ji = cfg.at("init");
    check_keys(ji, {"kind", "vertex", "height", "value", "scale"}, "init");
    const std::string kind = ji.value("kind", "positive_bump");
    if (kind == "positive_bump") init.kind = InitKind::positive_bump;
    else if (kind == "constant") init.kind = InitKind::constant;
    else if (kind == "random") init.kind = InitKind::random;
    else if (kind == "embedded") *embedded = true;
    else
        throw std::invalid_argument("init kind '" + kind +
                                    "' is not one of positive_bump, constant, random, embedded");
    init.vertex = ji.value("vertex", std::int64_t{0});
    init.height = ji.value("height", 1.0);
    init.value = ji.value("value", 1.0);
    init.scale = ji.value("scale", 1.0);
    return init;
}

inline SolverConfig solver_config_from_json(const json& cfg, bool* embedded_init) {
    SolverConfig sc;
    const std::string method = cfg.value("method", "nehari_descent");
    if (method == "nehari" || method == "nehari_descent")
        sc.method = SolveMethod::nehari_descent;
    else if (method == "mountain_pass")
        sc.method = SolveMethod::mountain_pass;
    else
        throw std::invalid_argument("method '" + method +
                                    "' is not one of nehari_descent, mountain_pass");
    sc.init = init_from_json(cfg, embedded_init);
    sc.max_iters = cfg.value("max_iters", 2000);
    sc.grad_tol = cfg.value("grad_tol", 1e-8);
    sc.step = cfg.value("step", 1.0);
    sc.shrink = cfg.value("shrink", 0.5);
    sc.armijo = cfg.value("armijo", 1e-4);
    sc.cg_rtol = cfg.value("cg_rtol", 1e-2);
    sc.path_points = cfg.value("path_points", 17);
    sc.seed = cfg.value("seed", std::uint64_t{1});
    if (cfg.contains("radii")) sc.radius_schedule = cfg.at("radii").get<std::vector<int>>();
    if (sc.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(sc.grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
    return sc;
}

inline std::filesystem::path prepare_output_dir(const json& cfg) {
    const std::string dir = cfg.value("output_dir", ".");
    std::filesystem::create_directories(dir);
    return dir;
}

inline void attach_compare(json& summary, const json& cfg, const char* level_key) {
    if (!cfg.contains("compare")) return;
    const json prior = load_json_file(cfg.at("compare").get<std::string>());
    if (!prior.contains(level_key))
        throw std::invalid_argument("compare summary lacks '" + std::string(level_key) + "'");
    const double before = prior.at(level_key).get<double>();
    const double now = summary.at(level_key).get<double>();
    summary["compare"] = {{"prior", before}, {"delta", now - before}};
}

}  // namespace detail

inline int run_solve(const json& cfg, std::ostream& log = std::cout) {
    detail::check_keys(cfg,
                       {"graph", "potential", "method", "init", "max_iters", "grad_tol",
                        "step", "shrink", "armijo", "cg_rtol", "path_points", "seed",
                        "output_dir", "compare"},
                       "solve");
    Problem p = detail::load_problem(cfg);
    bool embedded_init = false;
    const SolverConfig sc = detail::solver_config_from_json(cfg, &embedded_init);
    if (embedded_init && !p.u)
        throw std::invalid_argument("init kind 'embedded' needs a 'u' array in the graph file");

    json summary{{"config", cfg}, {"vertices", p.graph.size()},
                 {"interior", p.graph.interior_count()}};
    SolveTrace trace;
    EnergyReport report;
    VertexFunction u;
    bool converged = false;
    bool positive = false;

    if (sc.method == SolveMethod::mountain_pass) {
        if (embedded_init)
            throw std::invalid_argument("init kind 'embedded' only applies to nehari_descent");
        MountainPassResult res = mountain_pass(p.graph, *p.a, sc);
        summary["method"] = "mountain_pass";
        summary["c_hat"] = res.c_hat;
        summary["level"] = res.level;
        summary["geometry"] = {{"rho", res.geometry.rho},
                               {"delta", res.geometry.delta},
                               {"t_e", res.geometry.t_e},
                               {"j_e", res.geometry.j_e}};
        trace = std::move(res.trace);
        report = res.report;
        u = std::move(res.u);
        converged = res.converged;
        positive = res.positive_interior;
    } else {
        const std::vector<double>* init_override = nullptr;
        std::vector<double> warm;
        if (embedded_init) {
            warm = p.u->values();
            init_override = &warm;
        }
        SolveResult res = nehari_descent(p.graph, *p.a, sc, init_override);
        summary["method"] = "nehari_descent";
        summary["d_hat"] = res.level;
        summary["level"] = res.level;
        trace = std::move(res.trace);
        report = res.report;
        u = std::move(res.u);
        converged = res.converged;
        positive = res.positive_interior;
    }

    summary["iters"] = trace.rows.empty() ? 0 : trace.rows.back().iter + 1;
    summary["terminated"] = trace.termination;
    summary["converged"] = converged;
    summary["positive_interior"] = positive;
    summary["h_norm_sq"] = report.h_norm_sq;
    summary["l2_sq"] = report.l2_sq;
    summary["nehari_defect"] = report.nehari_defect;
    summary["residual_l2"] = report.residual_l2;
    summary["residual_linf"] = report.residual_linf;
    summary["embedding_ok"] =
        linf_norm(u) > 0.0 ? linf_embedding_check(p.graph, *p.a, u) : true;
    detail::attach_compare(summary, cfg, "level");

    const auto dir = detail::prepare_output_dir(cfg);
    p.u = u;
    write_text_file((dir / "solution.json").string(), problem_to_json(p).dump(2) + "\n");
    write_text_file((dir / "trace.csv").string(), trace_to_csv(trace));
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");

    log << summary["method"].get<std::string>() << ": level " << summary["level"].get<double>()
        << ", residual_linf " << report.residual_linf << ", " << trace.termination << " after "
        << summary["iters"].get<int>() << " iterations\n";
    if (summary.contains("compare"))
        log << "compare: prior " << summary["compare"]["prior"].get<double>() << ", delta "
            << summary["compare"]["delta"].get<double>() << "\n";
    return converged ? 0 : 2;
}

inline int run_exhaustion(const json& cfg, std::ostream& log = std::cout) {
    detail::check_keys(cfg,
                       {"graph", "potential", "method", "init", "max_iters", "grad_tol",
                        "step", "shrink", "armijo", "cg_rtol", "path_points", "seed",
                        "output_dir", "center", "radii"},
                       "exhaustion");
    if (!cfg.contains("graph") || !cfg.at("graph").is_string())
        throw std::invalid_argument("exhaustion needs a 'graph' family spec string");
    if (!cfg.contains("potential"))
        throw std::invalid_argument("exhaustion needs a 'potential' family spec (the "
                                    "potential is regenerated on every truncation)");
    if (!cfg.contains("radii"))
        throw std::invalid_argument("exhaustion needs a 'radii' array");

    const WeightedGraph base = generate(cfg.at("graph").get<std::string>());
    const PotentialFamilySpec pspec =
        parse_potential_spec(cfg.at("potential").get<std::string>());
    const VertexId center = cfg.value("center", std::int64_t{0});
    bool embedded_init = false;
    const SolverConfig sc = detail::solver_config_from_json(cfg, &embedded_init);
    if (embedded_init)
        throw std::invalid_argument("init kind 'embedded' only applies to solve");
    if (sc.radius_schedule.empty())
        throw std::invalid_argument("exhaustion needs a nonempty 'radii' array");

    const std::vector<ExhaustionRow> rows = exhaustion_study(base, pspec, center, sc);

    json jr = json::array();
    bool all_converged = true;
    for (const ExhaustionRow& r : rows) {
        jr.push_back({{"radius", r.radius},
                      {"vertices", r.vertices},
                      {"d_hat", r.d_hat},
                      {"iters", r.iters},
                      {"converged", r.converged},
                      {"com_distance", r.com_distance},
                      {"tail_mass", r.tail_mass}});
        all_converged = all_converged && r.converged;
    }
    json deltas = json::array();
    for (std::size_t i = 1; i < rows.size(); ++i)
        deltas.push_back(std::fabs(rows[i].d_hat - rows[i - 1].d_hat));
    json summary{{"config", cfg},
                 {"method", sc.method == SolveMethod::mountain_pass ? "mountain_pass"
                                                                    : "nehari_descent"},
                 {"rows", std::move(jr)},
                 {"level_deltas", std::move(deltas)},
                 {"final_d_hat", rows.back().d_hat},
                 {"all_converged", all_converged}};

    const auto dir = detail::prepare_output_dir(cfg);
    write_text_file((dir / "exhaustion.csv").string(), exhaustion_to_csv(rows));
    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");

    for (const ExhaustionRow& r : rows)
        log << "radius " << r.radius << ": d_hat " << r.d_hat << " (" << r.vertices
            << " vertices, " << (r.converged ? "converged" : "not converged")
            << ", tail mass " << r.tail_mass << ")\n";
    return all_converged ? 0 : 2;
}

namespace detail {

// Series/graph consistency: partial sums must agree with integrate() and
// dirichlet_energy() on the example graphs. A disagreement is a library bug.
inline json verify_consistency(std::int64_t ng) {
    const ExampleData d1 = example1_build(ng);
    const ExampleData d2 = example2_build(ng);
    const ExampleReport r1 = example1_verify(ng, 0);
    const ExampleReport r2 = example2_verify(ng, 0);
    std::vector<double> sq1(d1.graph.size()), sq2(d2.graph.size());
    for (std::size_t i = 0; i < d1.graph.size(); ++i)
        sq1[i] = d1.u.values()[i] * d1.u.values()[i];
    for (std::size_t i = 0; i < d2.graph.size(); ++i)
        sq2[i] = d2.u.values()[i] * d2.u.values()[i];
    const auto rel = [](double x, double y) {
        return std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1e-300});
    };
    const json out{
        {"n", ng},
        {"l2_rel_err_example1",
         rel(integrate_span(d1.graph, sq1), r1.l2.partial_sums.back().value)},
        {"l2_rel_err_example2",
         rel(integrate_span(d2.graph, sq2), r2.l2.partial_sums.back().value)},
        {"gradient_rel_err_example1",
         rel(dirichlet_energy(d1.graph, d1.u), r1.gradient.partial_sums.back().value)},
        {"gradient_rel_err_example2",
         rel(dirichlet_energy(d2.graph, d2.u), r2.gradient.partial_sums.back().value)},
    };
    for (const auto& [key, value] : out.items())
        if (key != "n" && value.get<double>() > 1e-11)
            throw std::logic_error("series/graph consistency failed at " + key);
    return out;
}

inline void log_example(std::ostream& log, const char* name, const ExampleReport& rep) {
    log << name << ": l2 " << to_string(rep.l2.verdict) << " (sum <= "
        << rep.l2.upper_bound << "), gradient " << to_string(rep.gradient.verdict)
        << " (sum <= " << rep.gradient.upper_bound << "), log-negative "
        << to_string(rep.log_negative.verdict) << " (S_N >= "
        << rep.log_negative.minorant_at_max << ")\n";
    for (const Crossing& c : rep.log_negative.crossings)
        log << "  S_N >= " << c.threshold << " at N " << (c.exact ? "= " : "<= ")
            << (std::isfinite(c.n) ? std::to_string(c.n)
                                   : "exp(" + std::to_string(c.log_n) + ")")
            << (c.exact ? " (exact)" : " (minorant bound)") << "\n";
}

}  // namespace detail

inline int run_verify(const json& cfg, std::ostream& log = std::cout) {
    detail::check_keys(cfg, {"target", "n", "crossing_budget", "epsilons", "output_dir"},
                       "verify");
    const std::string target = cfg.value("target", "all");
    if (target != "all" && target != "example1" && target != "example2" &&
        target != "cepsilon")
        throw std::invalid_argument("verify target '" + target +
                                    "' is not one of example1, example2, cepsilon, all");
    const std::int64_t n = cfg.value("n", std::int64_t{100000});
    const std::int64_t budget = cfg.value("crossing_budget", std::int64_t{1000000});
    std::vector<double> epsilons{0.1, 0.5, 0.9};
    if (cfg.contains("epsilons")) epsilons = cfg.at("epsilons").get<std::vector<double>>();

    json summary{{"config", cfg}};
    bool inconclusive = false;
    const auto dir = detail::prepare_output_dir(cfg);

    for (const char* name : {"example1", "example2"}) {
        if (target != "all" && target != name) continue;
        const ExampleReport rep = name == std::string("example1")
                                      ? example1_verify(n, budget)
                                      : example2_verify(n, budget);
        for (const SeriesReport* s : {&rep.l2, &rep.gradient, &rep.log_negative})
            if (s->verdict == SeriesVerdict::inconclusive) inconclusive = true;
        summary[name] = {{"l2", series_report_to_json(rep.l2)},
                         {"gradient", series_report_to_json(rep.gradient)},
                         {"log_negative", series_report_to_json(rep.log_negative)}};
        write_text_file((dir / (std::string(name) + "_l2.csv")).string(),
                        series_to_csv(rep.l2));
        write_text_file((dir / (std::string(name) + "_gradient.csv")).string(),
                        series_to_csv(rep.gradient));
        write_text_file((dir / (std::string(name) + "_log_negative.csv")).string(),
                        series_to_csv(rep.log_negative));
        detail::log_example(log, name, rep);
    }
    if (target == "all" || target == "example1" || target == "example2")
        summary["consistency"] = detail::verify_consistency(std::min<std::int64_t>(n, 20000));

    if (target == "all" || target == "cepsilon") {
        json jc;
        for (double eps : epsilons) {
            const double c = c_epsilon_estimate(eps);
            jc[std::to_string(eps)] = c;
            log << "C_eps(" << eps << ") = " << c
                << " (validated on 100000 fresh samples)\n";
        }
        summary["c_epsilon"] = std::move(jc);
    }
    summary["inconclusive"] = inconclusive;

    write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    if (inconclusive)
        log << "inconclusive: series budget n < 100 certifies nothing; raise --n\n";
    return inconclusive ? 3 : 0;
}

inline int run_export_dot(const json& cfg, std::ostream& log = std::cout) {
    detail::check_keys(cfg, {"graph", "potential", "out", "output_dir"}, "export-dot");
    if (!cfg.contains("graph"))
        throw std::invalid_argument("export-dot needs a 'graph'");
    const json& jg = cfg.at("graph");
    Problem p;
    if (jg.is_string()) {
        p.graph = generate(jg.get<std::string>());
    } else if (jg.is_object() && jg.contains("file")) {
        detail::check_keys(jg, {"file"}, "graph");
        p = problem_from_json(load_json_file(jg.at("file").get<std::string>()));
    } else {
        throw std::invalid_argument("'graph' must be a family spec string or {\"file\": ...}");
    }
    const std::string dot = to_dot(p.graph, p.u ? &*p.u : nullptr);
    const std::string out = cfg.value("out", std::string("-"));
    if (out == "-") {
        log << dot;
    } else {
        const auto dir = detail::prepare_output_dir(cfg);
        write_text_file((dir / out).string(), dot);
    }
    return 0;
}

}  // namespace graphlog
