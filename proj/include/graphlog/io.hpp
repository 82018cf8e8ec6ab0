#pragma once

// JSON graph format:
//   {"vertices": [{"id": 0, "mu": 1.0, "boundary": false}, ...],
//    "edges":    [{"x": 0, "y": 1, "w": 1.0}, ...],
//    "potential": {"values": [...], "a0": -0.5, "class": "A2"|"A2prime", "m0": 1.0},
//    "u": [...]}
// Vertex ids must be dense 0..n-1. "potential" may also be a bare array, in
// which case a0 defaults to the minimum value and the class to A2. Doubles
// round-trip bit exactly through the serializer.

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphlog/graph.hpp"
#include "graphlog/potential.hpp"
#include "graphlog/series.hpp"
#include "graphlog/solver.hpp"

namespace graphlog {

using nlohmann::json;

struct Problem {
    WeightedGraph graph;
    std::optional<Potential> a;
    std::optional<VertexFunction> u;
};

inline json graph_to_json(const WeightedGraph& g) {
    json jv = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = static_cast<VertexId>(i);
        jv.push_back({{"id", x}, {"mu", g.mu(x)}, {"boundary", g.is_boundary(x)}});
    }
    json je = json::array();
    for (const Edge& e : g.edges()) je.push_back({{"x", e.x}, {"y", e.y}, {"w", e.w}});
    return json{{"vertices", std::move(jv)}, {"edges", std::move(je)}};
}

inline json problem_to_json(const Problem& p) {
    json j = graph_to_json(p.graph);
    if (p.a) {
        json ja{{"values", p.a->values()},
                {"a0", p.a->a0()},
                {"class", p.a->potential_class() == PotentialClass::A2prime ? "A2prime" : "A2"}};
        if (p.a->m0()) ja["m0"] = *p.a->m0();
        j["potential"] = std::move(ja);
    }
    if (p.u) j["u"] = p.u->values();
    return j;
}

inline WeightedGraph graph_from_json(const json& j) {
    if (!j.contains("vertices") || !j.contains("edges"))
        throw std::invalid_argument("graph JSON needs 'vertices' and 'edges' arrays");
    const json& jv = j.at("vertices");
    GraphBuilder b;
    std::int64_t expect = 0;
    for (const json& v : jv) {
        const auto id = v.at("id").get<std::int64_t>();
        if (id != expect)
            throw std::invalid_argument("vertex ids must be dense 0..n-1; saw id " +
                                        std::to_string(id) + " at position " +
                                        std::to_string(expect));
        ++expect;
        b.add_vertex(v.at("mu").get<double>(), v.value("boundary", false));
    }
    for (const json& e : j.at("edges"))
        b.add_edge(e.at("x").get<VertexId>(), e.at("y").get<VertexId>(),
                   e.value("w", 1.0));
    return b.build();
}

inline Problem problem_from_json(const json& j) {
    Problem p{graph_from_json(j), std::nullopt, std::nullopt};
    if (j.contains("potential")) {
        const json& ja = j.at("potential");
        if (ja.is_array()) {
            auto values = ja.get<std::vector<double>>();
            if (values.empty()) throw std::invalid_argument("potential array is empty");
            const double a0 = *std::min_element(values.begin(), values.end());
            p.a = Potential(p.graph, std::move(values), a0, PotentialClass::A2);
        } else {
            auto values = ja.at("values").get<std::vector<double>>();
            const double a0 = ja.at("a0").get<double>();
            const std::string cls = ja.value("class", "A2");
            if (cls != "A2" && cls != "A2prime")
                throw std::invalid_argument("potential class must be A2 or A2prime, got '" +
                                            cls + "'");
            std::optional<double> m0;
            if (ja.contains("m0")) m0 = ja.at("m0").get<double>();
            p.a = Potential(p.graph, std::move(values),
                            a0, cls == "A2prime" ? PotentialClass::A2prime : PotentialClass::A2,
                            m0);
        }
    }
    if (j.contains("u"))
        p.u = VertexFunction(p.graph, j.at("u").get<std::vector<double>>());
    return p;
}

// Graphviz dump; vertex labels carry the attached function values, boundary
// vertices are drawn as boxes.
inline std::string to_dot(const WeightedGraph& g, const VertexFunction* u = nullptr,
                          const std::string& name = "G") {
    std::ostringstream out;
    out << std::setprecision(6);
    out << "graph " << name << " {\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = static_cast<VertexId>(i);
        out << "  v" << x << " [label=\"" << x;
        if (u) out << "\\n" << u->values()[i];
        out << "\"";
        if (g.is_boundary(x)) out << ", shape=box";
        out << "];\n";
    }
    for (const Edge& e : g.edges()) {
        out << "  v" << e.x << " -- v" << e.y;
        if (e.w != 1.0) out << " [label=\"" << e.w << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

namespace detail {
inline std::ostream& full_precision(std::ostream& os) {
    os << std::setprecision(17);
    return os;
}
}  // namespace detail

inline std::string trace_to_csv(const SolveTrace& trace) {
    std::ostringstream out;
    detail::full_precision(out);
    out << "iter,J,grad_norm,nehari_defect,residual_l2,step,cerami_product\n";
    for (const TraceRow& r : trace.rows)
        out << r.iter << ',' << r.J << ',' << r.grad_norm << ',' << r.nehari_defect << ','
            << r.residual_l2 << ',' << r.step << ',' << r.cerami_product << '\n';
    return out.str();
}

inline std::string series_to_csv(const SeriesReport& rep) {
    std::ostringstream out;
    detail::full_precision(out);
    out << "n,partial_sum\n";
    for (const SeriesPoint& p : rep.partial_sums) out << p.n << ',' << p.value << '\n';
    return out.str();
}

inline std::string exhaustion_to_csv(const std::vector<ExhaustionRow>& rows) {
    std::ostringstream out;
    detail::full_precision(out);
    out << "radius,vertices,d_hat,iters,converged,com_distance,tail_mass\n";
    for (const ExhaustionRow& r : rows)
        out << r.radius << ',' << r.vertices << ',' << r.d_hat << ',' << r.iters << ','
            << (r.converged ? 1 : 0) << ',' << r.com_distance << ',' << r.tail_mass << '\n';
    return out.str();
}

inline json series_report_to_json(const SeriesReport& rep) {
    json j{{"name", rep.name},
           {"verdict", to_string(rep.verdict)},
           {"n_max", rep.n_max}};
    json ps = json::array();
    for (const SeriesPoint& p : rep.partial_sums) ps.push_back({{"n", p.n}, {"S", p.value}});
    j["partial_sums"] = std::move(ps);
    if (rep.verdict == SeriesVerdict::convergent_with_tail_bound) {
        j["tail_bound"] = rep.tail_bound;
        j["upper_bound"] = rep.upper_bound;
    }
    if (rep.verdict == SeriesVerdict::divergent_beyond_all_bounds) {
        j["minorant_at_max"] = rep.minorant_at_max;
        json cs = json::array();
        for (const Crossing& c : rep.crossings) {
            json cj{{"threshold", c.threshold}, {"exact", c.exact}, {"log_n", c.log_n}};
            if (std::isfinite(c.n)) cj["n"] = c.n;
            cs.push_back(std::move(cj));
        }
        j["crossings"] = std::move(cs);
    }
    return j;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline json load_json_file(const std::string& path) {
    return json::parse(read_text_file(path));
}

}  // namespace graphlog
