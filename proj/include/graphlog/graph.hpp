#pragma once

// Weighted locally finite graphs and the discrete calculus on them:
//   integrate(f)      = sum_x mu(x) f(x)
//   laplacian(u)(x)   = (1/mu(x)) sum_{y~x} w_xy (u(y) - u(x))
//   gradient_form     Gamma(u,v)(x) = (1/(2 mu(x))) sum_{y~x} w_xy (u(y)-u(x))(v(y)-v(x))
//   dirichlet_energy  = integral of Gamma(u,u), accumulated once per edge.
//
// Infinite graphs are handled as finite generator output plus ball truncation
// with a zero (Dirichlet) extension outside the ball. A truncated vertex is
// flagged as boundary iff it still has a neighbor outside the ball in the
// parent graph, which keeps the plain Laplacian formula exact at every
// unflagged vertex under the zero extension.
//
// Per-vertex neighbor sums run in ascending neighbor order and integrals are
// pairwise sums over the vertex-indexed buffer, so all results are bitwise
// reproducible for any thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "graphlog/numeric.hpp"
#include "graphlog/parallel.hpp"

namespace graphlog {

using VertexId = std::int64_t;

struct Edge {
    VertexId x = 0;
    VertexId y = 0;
    double w = 1.0;
};

namespace detail {
inline std::uint64_t next_graph_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}
}  // namespace detail

class WeightedGraph {
public:
    std::size_t size() const { return mu_.size(); }
    std::uint64_t id() const { return id_; }

    double mu(VertexId x) const { return mu_[static_cast<std::size_t>(x)]; }
    const std::vector<double>& mu() const { return mu_; }
    bool is_boundary(VertexId x) const { return boundary_[static_cast<std::size_t>(x)] != 0; }
    std::size_t interior_count() const { return interior_count_; }

    const std::vector<Edge>& edges() const { return edges_; }

    // Neighbors of x as (vertex, weight) pairs in ascending vertex order.
    std::span<const std::pair<VertexId, double>> neighbors(VertexId x) const {
        const auto i = static_cast<std::size_t>(x);
        return {adj_.data() + offset_[i], offset_[i + 1] - offset_[i]};
    }

    double mu_min() const { return mu_min_; }
    std::optional<double> mu_max() const { return mu_max_; }

    // Truncation metadata; empty for graphs that are not ball truncations.
    const std::vector<VertexId>& source_ids() const { return source_ids_; }
    const std::vector<int>& depth() const { return depth_; }
    bool is_truncation() const { return !source_ids_.empty(); }

    friend class GraphBuilder;
    friend WeightedGraph ball_truncate(const WeightedGraph&, VertexId, int);

private:
    std::vector<double> mu_;
    std::vector<std::uint8_t> boundary_;
    std::vector<std::size_t> offset_;
    std::vector<std::pair<VertexId, double>> adj_;
    std::vector<Edge> edges_;
    double mu_min_ = 0.0;
    std::optional<double> mu_max_;
    std::size_t interior_count_ = 0;
    std::uint64_t id_ = 0;
    std::vector<VertexId> source_ids_;
    std::vector<int> depth_;
};

class GraphBuilder {
public:
    VertexId add_vertex(double mu, bool boundary = false) {
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw std::invalid_argument("vertex measure must be finite and > 0, got " +
                                        std::to_string(mu));
        mu_.push_back(mu);
        boundary_.push_back(boundary ? 1 : 0);
        return static_cast<VertexId>(mu_.size() - 1);
    }

    void add_edge(VertexId x, VertexId y, double w = 1.0) {
        check_vertex(x);
        check_vertex(y);
        if (x == y) throw std::invalid_argument("self-loops are not allowed");
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("edge weight must be finite and > 0, got " +
                                        std::to_string(w));
        edges_.push_back({std::min(x, y), std::max(x, y), w});
    }

    void set_mu_max_hint(double v) { mu_max_hint_ = v; }
    void set_truncation_info(std::vector<VertexId> source_ids, std::vector<int> depth) {
        source_ids_ = std::move(source_ids);
        depth_ = std::move(depth);
    }

    WeightedGraph build() {
        if (mu_.empty()) throw std::invalid_argument("graph needs at least one vertex");
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return std::tie(a.x, a.y) < std::tie(b.x, b.y);
        });
        for (std::size_t i = 1; i < edges_.size(); ++i)
            if (edges_[i].x == edges_[i - 1].x && edges_[i].y == edges_[i - 1].y)
                throw std::invalid_argument("duplicate edge " + std::to_string(edges_[i].x) +
                                            "-" + std::to_string(edges_[i].y));

        WeightedGraph g;
        g.mu_ = std::move(mu_);
        g.boundary_ = std::move(boundary_);
        g.edges_ = std::move(edges_);
        g.source_ids_ = std::move(source_ids_);
        g.depth_ = std::move(depth_);

        const std::size_t n = g.mu_.size();
        std::vector<std::size_t> deg(n, 0);
        for (const Edge& e : g.edges_) {
            ++deg[static_cast<std::size_t>(e.x)];
            ++deg[static_cast<std::size_t>(e.y)];
        }
        g.offset_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) g.offset_[i + 1] = g.offset_[i] + deg[i];
        g.adj_.resize(g.offset_[n]);
        std::vector<std::size_t> cursor(g.offset_.begin(), g.offset_.end() - 1);
        for (const Edge& e : g.edges_) {
            g.adj_[cursor[static_cast<std::size_t>(e.x)]++] = {e.y, e.w};
            g.adj_[cursor[static_cast<std::size_t>(e.y)]++] = {e.x, e.w};
        }
        // Edges were sorted by (x, y), so each adjacency range is already
        // ascending; this is the documented reduction order.

        g.mu_min_ = *std::min_element(g.mu_.begin(), g.mu_.end());
        if (mu_max_hint_) g.mu_max_ = mu_max_hint_;
        g.interior_count_ = 0;
        for (auto b : g.boundary_)
            if (!b) ++g.interior_count_;

        check_interior_connected(g);
        g.id_ = detail::next_graph_id();
        return g;
    }

private:
    void check_vertex(VertexId x) const {
        if (x < 0 || static_cast<std::size_t>(x) >= mu_.size())
            throw std::invalid_argument("vertex " + std::to_string(x) + " does not exist");
    }

    static void check_interior_connected(const WeightedGraph& g) {
        const std::size_t n = g.size();
        if (g.interior_count_ == 0) return;
        VertexId start = -1;
        for (std::size_t i = 0; i < n; ++i)
            if (!g.boundary_[i]) {
                start = static_cast<VertexId>(i);
                break;
            }
        std::vector<std::uint8_t> seen(n, 0);
        std::queue<VertexId> q;
        q.push(start);
        seen[static_cast<std::size_t>(start)] = 1;
        std::size_t reached = 1;
        while (!q.empty()) {
            const VertexId x = q.front();
            q.pop();
            for (const auto& [y, w] : g.neighbors(x)) {
                (void)w;
                const auto yi = static_cast<std::size_t>(y);
                if (seen[yi] || g.boundary_[yi]) continue;
                seen[yi] = 1;
                ++reached;
                q.push(y);
            }
        }
        if (reached != g.interior_count_)
            throw std::invalid_argument("interior vertices do not form a connected subgraph");
    }

    std::vector<double> mu_;
    std::vector<std::uint8_t> boundary_;
    std::vector<Edge> edges_;
    std::optional<double> mu_max_hint_;
    std::vector<VertexId> source_ids_;
    std::vector<int> depth_;
};

class VertexFunction {
public:
    VertexFunction() = default;
    VertexFunction(const WeightedGraph& g, std::vector<double> values)
        : graph_id_(g.id()), values_(std::move(values)) {
        if (values_.size() != g.size())
            throw std::invalid_argument("function has " + std::to_string(values_.size()) +
                                        " values for a graph of size " +
                                        std::to_string(g.size()));
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("function value is not finite");
    }

    static VertexFunction zeros(const WeightedGraph& g) {
        return VertexFunction(g, std::vector<double>(g.size(), 0.0));
    }
    // Constant on interior vertices, zero on Dirichlet-boundary vertices.
    static VertexFunction constant(const WeightedGraph& g, double c) {
        std::vector<double> v(g.size(), c);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.is_boundary(static_cast<VertexId>(i))) v[i] = 0.0;
        return VertexFunction(g, std::move(v));
    }

    std::uint64_t graph_id() const { return graph_id_; }
    bool belongs_to(const WeightedGraph& g) const { return graph_id_ == g.id(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](VertexId x) const { return values_[static_cast<std::size_t>(x)]; }
    std::size_t size() const { return values_.size(); }

private:
    std::uint64_t graph_id_ = 0;
    std::vector<double> values_;
};

inline void require_same_graph(const WeightedGraph& g, const VertexFunction& f,
                               const char* what) {
    if (!f.belongs_to(g))
        throw std::invalid_argument(std::string(what) + ": function belongs to graph " +
                                    std::to_string(f.graph_id()) + ", expected " +
                                    std::to_string(g.id()));
}

namespace detail {

inline void laplacian_into(const WeightedGraph& g, std::span<const double> u,
                           std::span<double> out) {
    parallel_for(g.size(), [&](std::size_t i) {
        const auto x = static_cast<VertexId>(i);
        double acc = 0.0;
        for (const auto& [y, w] : g.neighbors(x))
            acc += w * (u[static_cast<std::size_t>(y)] - u[i]);
        out[i] = acc / g.mu(x);
    });
}

inline void gradient_form_into(const WeightedGraph& g, std::span<const double> u,
                               std::span<const double> v, std::span<double> out) {
    parallel_for(g.size(), [&](std::size_t i) {
        const auto x = static_cast<VertexId>(i);
        double acc = 0.0;
        for (const auto& [y, w] : g.neighbors(x)) {
            const auto yi = static_cast<std::size_t>(y);
            acc += w * (u[yi] - u[i]) * (v[yi] - v[i]);
        }
        out[i] = acc / (2.0 * g.mu(x));
    });
}

inline double integrate_span(const WeightedGraph& g, std::span<const double> f) {
    std::vector<double> terms(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) terms[i] = g.mu()[i] * f[i];
    return pairwise_sum(terms);
}

// Edge-sum form of the Dirichlet energy, each undirected edge once.
inline double dirichlet_energy_span(const WeightedGraph& g, std::span<const double> u) {
    std::vector<double> terms(g.edges().size());
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const Edge& e = g.edges()[k];
        const double d = u[static_cast<std::size_t>(e.y)] - u[static_cast<std::size_t>(e.x)];
        terms[k] = e.w * d * d;
    }
    return pairwise_sum(terms);
}

}  // namespace detail

inline double integrate(const WeightedGraph& g, const VertexFunction& f) {
    require_same_graph(g, f, "integrate");
    return detail::integrate_span(g, f.values());
}

inline VertexFunction laplacian(const WeightedGraph& g, const VertexFunction& u) {
    require_same_graph(g, u, "laplacian");
    std::vector<double> out(g.size());
    detail::laplacian_into(g, u.values(), out);
    return VertexFunction(g, std::move(out));
}

inline VertexFunction gradient_form(const WeightedGraph& g, const VertexFunction& u,
                                    const VertexFunction& v) {
    require_same_graph(g, u, "gradient_form");
    require_same_graph(g, v, "gradient_form");
    std::vector<double> out(g.size());
    detail::gradient_form_into(g, u.values(), v.values(), out);
    return VertexFunction(g, std::move(out));
}

inline double dirichlet_energy(const WeightedGraph& g, const VertexFunction& u) {
    require_same_graph(g, u, "dirichlet_energy");
    return detail::dirichlet_energy_span(g, u.values());
}

// Hop distances from center; unreachable vertices get -1.
inline std::vector<int> bfs_depth(const WeightedGraph& g, VertexId center) {
    if (center < 0 || static_cast<std::size_t>(center) >= g.size())
        throw std::invalid_argument("center vertex " + std::to_string(center) +
                                    " does not exist");
    std::vector<int> depth(g.size(), -1);
    std::queue<VertexId> q;
    depth[static_cast<std::size_t>(center)] = 0;
    q.push(center);
    while (!q.empty()) {
        const VertexId x = q.front();
        q.pop();
        for (const auto& [y, w] : g.neighbors(x)) {
            (void)w;
            const auto yi = static_cast<std::size_t>(y);
            if (depth[yi] >= 0) continue;
            depth[yi] = depth[static_cast<std::size_t>(x)] + 1;
            q.push(y);
        }
    }
    return depth;
}

inline WeightedGraph ball_truncate(const WeightedGraph& g, VertexId center, int radius) {
    if (radius < 1) throw std::invalid_argument("truncation radius must be >= 1");
    const std::vector<int> depth = bfs_depth(g, center);

    std::vector<VertexId> keep;
    std::vector<VertexId> new_id(g.size(), -1);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (depth[i] >= 0 && depth[i] <= radius) {
            new_id[i] = static_cast<VertexId>(keep.size());
            keep.push_back(static_cast<VertexId>(i));
        }

    GraphBuilder b;
    std::vector<int> kept_depth;
    kept_depth.reserve(keep.size());
    for (VertexId old : keep) {
        const auto oi = static_cast<std::size_t>(old);
        bool flag = g.is_boundary(old);
        if (!flag && depth[oi] == radius) {
            for (const auto& [y, w] : g.neighbors(old)) {
                (void)w;
                if (new_id[static_cast<std::size_t>(y)] < 0) {
                    flag = true;
                    break;
                }
            }
        }
        b.add_vertex(g.mu(old), flag);
        kept_depth.push_back(depth[oi]);
    }
    for (const Edge& e : g.edges()) {
        const VertexId nx = new_id[static_cast<std::size_t>(e.x)];
        const VertexId ny = new_id[static_cast<std::size_t>(e.y)];
        if (nx >= 0 && ny >= 0) b.add_edge(nx, ny, e.w);
    }
    b.set_truncation_info(std::move(keep), std::move(kept_depth));
    return b.build();
}

}  // namespace graphlog
