#pragma once

// Built-in graph families. Every generator is deterministic; random_tree
// draws from a seeded mt19937_64. The optional mu_max metadata is set only
// for families whose infinite extension keeps a bounded measure, so the
// growing-measure half line leaves it unset.

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphlog/graph.hpp"

namespace graphlog {

enum class GraphFamily {
    path,
    cycle,
    star,
    lattice2d,
    half_line_example1,
    random_tree,
};

struct GraphFamilySpec {
    GraphFamily family = GraphFamily::path;
    std::int64_t n = 0;       // vertex count (rows*cols for lattice2d)
    std::int64_t rows = 0;    // lattice2d only
    std::int64_t cols = 0;    // lattice2d only
    std::uint64_t seed = 1;   // random_tree only
    double weight = 1.0;
    double measure = 1.0;
};

inline WeightedGraph generate(const GraphFamilySpec& spec) {
    const double w = spec.weight;
    const double m = spec.measure;
    if (!(w > 0.0) || !(m > 0.0))
        throw std::invalid_argument("graph family weight/measure options must be > 0");

    GraphBuilder b;
    switch (spec.family) {
        case GraphFamily::path: {
            if (spec.n < 2) throw std::invalid_argument("path needs n >= 2");
            for (std::int64_t i = 0; i < spec.n; ++i) b.add_vertex(m);
            for (std::int64_t i = 0; i + 1 < spec.n; ++i) b.add_edge(i, i + 1, w);
            b.set_mu_max_hint(m);
            break;
        }
        case GraphFamily::cycle: {
            if (spec.n < 3) throw std::invalid_argument("cycle needs n >= 3");
            for (std::int64_t i = 0; i < spec.n; ++i) b.add_vertex(m);
            for (std::int64_t i = 0; i + 1 < spec.n; ++i) b.add_edge(i, i + 1, w);
            b.add_edge(spec.n - 1, 0, w);
            b.set_mu_max_hint(m);
            break;
        }
        case GraphFamily::star: {
            if (spec.n < 2) throw std::invalid_argument("star needs n >= 2");
            for (std::int64_t i = 0; i < spec.n; ++i) b.add_vertex(m);
            for (std::int64_t i = 1; i < spec.n; ++i) b.add_edge(0, i, w);
            b.set_mu_max_hint(m);
            break;
        }
        case GraphFamily::lattice2d: {
            if (spec.rows < 2 || spec.cols < 2)
                throw std::invalid_argument("lattice2d needs rows, cols >= 2");
            for (std::int64_t r = 0; r < spec.rows; ++r)
                for (std::int64_t c = 0; c < spec.cols; ++c) b.add_vertex(m);
            const auto at = [&](std::int64_t r, std::int64_t c) { return r * spec.cols + c; };
            for (std::int64_t r = 0; r < spec.rows; ++r)
                for (std::int64_t c = 0; c < spec.cols; ++c) {
                    if (c + 1 < spec.cols) b.add_edge(at(r, c), at(r, c + 1), w);
                    if (r + 1 < spec.rows) b.add_edge(at(r, c), at(r + 1, c), w);
                }
            b.set_mu_max_hint(m);
            break;
        }
        case GraphFamily::half_line_example1: {
            // Vertices 0..n with mu(0)=1, mu(x)=x; unit weights regardless of
            // the weight option so the counterexample data stays exact.
            if (spec.n < 2) throw std::invalid_argument("half_line_example1 needs n >= 2");
            b.add_vertex(1.0);
            for (std::int64_t x = 1; x <= spec.n; ++x) b.add_vertex(static_cast<double>(x));
            for (std::int64_t x = 0; x < spec.n; ++x) b.add_edge(x, x + 1, 1.0);
            break;
        }
        case GraphFamily::random_tree: {
            if (spec.n < 2) throw std::invalid_argument("random_tree needs n >= 2");
            std::mt19937_64 rng(spec.seed);
            for (std::int64_t i = 0; i < spec.n; ++i) b.add_vertex(m);
            for (std::int64_t i = 1; i < spec.n; ++i) {
                std::uniform_int_distribution<std::int64_t> pick(0, i - 1);
                b.add_edge(pick(rng), i, w);
            }
            b.set_mu_max_hint(m);
            break;
        }
    }
    return b.build();
}

// Spec strings: "path:30", "cycle:8", "star:9", "lattice2d:4x4",
// "half_line_example1:50", "random_tree:50:seed=7"; optional ":w=..." and
// ":mu=..." set constant weight/measure.
inline GraphFamilySpec parse_graph_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() < 2)
        throw std::invalid_argument("graph spec '" + text + "' needs the form family:size");

    GraphFamilySpec spec;
    const std::string& name = parts[0];
    if (name == "path") spec.family = GraphFamily::path;
    else if (name == "cycle") spec.family = GraphFamily::cycle;
    else if (name == "star") spec.family = GraphFamily::star;
    else if (name == "lattice2d") spec.family = GraphFamily::lattice2d;
    else if (name == "half_line_example1") spec.family = GraphFamily::half_line_example1;
    else if (name == "random_tree") spec.family = GraphFamily::random_tree;
    else throw std::invalid_argument("unknown graph family '" + name + "'");

    try {
        if (spec.family == GraphFamily::lattice2d) {
            const auto xpos = parts[1].find('x');
            if (xpos == std::string::npos) throw std::invalid_argument("");
            spec.rows = std::stoll(parts[1].substr(0, xpos));
            spec.cols = std::stoll(parts[1].substr(xpos + 1));
            spec.n = spec.rows * spec.cols;
        } else {
            spec.n = std::stoll(parts[1]);
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("graph spec '" + text + "' has a malformed size field");
    }

    for (std::size_t i = 2; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("graph spec option '" + parts[i] +
                                        "' must look like key=value");
        const std::string key = parts[i].substr(0, eq);
        const std::string val = parts[i].substr(eq + 1);
        try {
            if (key == "seed") spec.seed = std::stoull(val);
            else if (key == "w") spec.weight = std::stod(val);
            else if (key == "mu") spec.measure = std::stod(val);
            else throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("graph spec option '" + parts[i] + "' is not valid");
        }
    }
    return spec;
}

inline WeightedGraph generate(const std::string& spec_text) {
    return generate(parse_graph_spec(spec_text));
}

}  // namespace graphlog
