#pragma once

// Potentials a: V -> R with a declared lower bound a0 > -1 (hypothesis (A1))
// and a class tag describing how a behaves at infinity:
//   A2:      every sublevel set D_M = {a <= M} has finite volume,
//   A2prime: additionally sum_{x not in D_M0} mu(x)/a(x) converges.
// On a finite truncation A2 is automatic; the A2prime generator certifies the
// reciprocal tail with a dyadic-block ratio test before accepting.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphlog/graph.hpp"
#include "graphlog/numeric.hpp"

namespace graphlog {

class potential_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class PotentialClass { A2, A2prime };

class Potential {
public:
    Potential() = default;
    Potential(const WeightedGraph& g, std::vector<double> values, double a0,
              PotentialClass cls = PotentialClass::A2,
              std::optional<double> m0 = std::nullopt)
        : graph_id_(g.id()), values_(std::move(values)), a0_(a0), class_(cls), m0_(m0) {
        if (values_.size() != g.size())
            throw std::invalid_argument("potential has " + std::to_string(values_.size()) +
                                        " values for a graph of size " +
                                        std::to_string(g.size()));
        if (!(a0_ > -1.0))
            throw potential_error("potential violates (A1): declared a0 = " +
                                  std::to_string(a0_) + " is not > -1");
        for (double v : values_) {
            if (!std::isfinite(v))
                throw std::invalid_argument("potential value is not finite");
            if (v < a0_ - 1e-12)
                throw potential_error("potential violates (A1): value " + std::to_string(v) +
                                      " lies below the declared bound a0 = " +
                                      std::to_string(a0_));
        }
    }

    std::uint64_t graph_id() const { return graph_id_; }
    bool belongs_to(const WeightedGraph& g) const { return graph_id_ == g.id(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](VertexId x) const { return values_[static_cast<std::size_t>(x)]; }
    double a0() const { return a0_; }
    PotentialClass potential_class() const { return class_; }
    std::optional<double> m0() const { return m0_; }

private:
    std::uint64_t graph_id_ = 0;
    std::vector<double> values_;
    double a0_ = 0.0;
    PotentialClass class_ = PotentialClass::A2;
    std::optional<double> m0_;
};

inline void require_same_graph(const WeightedGraph& g, const Potential& a,
                               const char* what) {
    if (!a.belongs_to(g))
        throw std::invalid_argument(std::string(what) + ": potential belongs to graph " +
                                    std::to_string(a.graph_id()) + ", expected " +
                                    std::to_string(g.id()));
}

// Volume of a sublevel set on the truncation, plus the reciprocal partial sum
// outside it. Reported alongside A2prime potentials.
struct SublevelReport {
    double vol = 0.0;           // Vol(D_M) = sum of mu over {a <= M}
    std::size_t count = 0;      // |D_M|
    double reciprocal_sum = 0.0;  // sum of mu/a over {a > M}
};

inline SublevelReport sublevel_report(const WeightedGraph& g, const Potential& a, double M) {
    require_same_graph(g, a, "sublevel_report");
    SublevelReport rep;
    std::vector<double> vol_terms, rec_terms;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (a.values()[i] <= M) {
            vol_terms.push_back(g.mu()[i]);
            ++rep.count;
        } else {
            rec_terms.push_back(g.mu()[i] / a.values()[i]);
        }
    }
    rep.vol = pairwise_sum(vol_terms);
    rep.reciprocal_sum = pairwise_sum(rec_terms);
    return rep;
}

enum class PotentialFamily {
    constant,
    coercive,
    sign_changing_coercive,
    reciprocal_summable,
};

struct PotentialFamilySpec {
    PotentialFamily family = PotentialFamily::constant;
    double value = 0.0;   // constant
    double alpha = 1.0;   // growth exponent (coercive variants)
    double shift = 0.0;   // additive shift (coercive); depth < 0 for sign_changing
    double beta = 3.0;    // reciprocal_summable growth exponent
    double m0 = 1.0;      // reciprocal_summable sublevel threshold
    VertexId center = 0;
    double scale = 1.0;   // distance is divided by this before the power
};

namespace detail {

inline double to_double(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": '" + s + "' is not a number");
    }
}

inline std::int64_t to_int(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": '" + s + "' is not an integer");
    }
}

// Tail certificate for sum mu(x)/a(x) over {a > M0}: group terms into dyadic
// distance blocks (2^k, 2^(k+1)]; if every observed block-to-block ratio is
// <= 0.75 the tail is dominated by a geometric series. Flat blocks (the
// integral-test boundary case, e.g. a = d^2 against mu = d) are rejected.
inline void certify_reciprocal_tail(const WeightedGraph& g, const std::vector<double>& a,
                                    const std::vector<int>& depth, double m0) {
    std::vector<double> block;
    int max_depth = 0;
    for (int d : depth) max_depth = std::max(max_depth, d);
    block.assign(64, 0.0);
    int top_k = -1;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (a[i] <= m0 || depth[i] <= 0) continue;
        int k = 0;
        while ((std::int64_t{1} << (k + 1)) < depth[i]) ++k;
        block[static_cast<std::size_t>(k)] += g.mu()[i] / a[i];
        top_k = std::max(top_k, k);
    }
    if (top_k < 3)
        throw potential_error(
            "reciprocal_summable: truncation too small to certify the tail of "
            "sum mu/a (need vertices past distance 8 from the center)");
    // The last block may be cut off by the truncation edge; skip it.
    for (int k = 1; k < top_k; ++k) {
        if (block[static_cast<std::size_t>(k - 1)] <= 0.0) continue;
        const double ratio =
            block[static_cast<std::size_t>(k)] / block[static_cast<std::size_t>(k - 1)];
        if (ratio > 0.75) {
            std::ostringstream msg;
            msg << "reciprocal_summable: tail test failed, dyadic block ratio " << ratio
                << " at distance ~2^" << k << " exceeds 0.75; sum mu/a does not "
                << "visibly converge (raise beta)";
            throw potential_error(msg.str());
        }
    }
}

}  // namespace detail

inline Potential generate_potential(const PotentialFamilySpec& spec, const WeightedGraph& g) {
    const std::size_t n = g.size();
    std::vector<double> v(n);
    if (!(spec.scale > 0.0))
        throw std::invalid_argument("potential family scale must be > 0");

    switch (spec.family) {
        case PotentialFamily::constant: {
            std::fill(v.begin(), v.end(), spec.value);
            return Potential(g, std::move(v), spec.value, PotentialClass::A2);
        }
        case PotentialFamily::coercive:
        case PotentialFamily::sign_changing_coercive: {
            if (spec.family == PotentialFamily::sign_changing_coercive && !(spec.shift < 0.0))
                throw std::invalid_argument(
                    "sign_changing_coercive needs a negative shift so a changes sign");
            if (!(spec.alpha > 0.0))
                throw std::invalid_argument("coercive potential needs alpha > 0");
            const std::vector<int> depth = bfs_depth(g, spec.center);
            for (std::size_t i = 0; i < n; ++i) {
                if (depth[i] < 0)
                    throw std::invalid_argument("potential center does not reach vertex " +
                                                std::to_string(i));
                v[i] = std::pow(depth[i] / spec.scale, spec.alpha) + spec.shift;
            }
            return Potential(g, std::move(v), spec.shift, PotentialClass::A2);
        }
        case PotentialFamily::reciprocal_summable: {
            if (!(spec.beta > 0.0))
                throw std::invalid_argument("reciprocal_summable needs beta > 0");
            if (!(spec.m0 > 0.0))
                throw std::invalid_argument("reciprocal_summable needs M0 > 0");
            const std::vector<int> depth = bfs_depth(g, spec.center);
            for (std::size_t i = 0; i < n; ++i) {
                if (depth[i] < 0)
                    throw std::invalid_argument("potential center does not reach vertex " +
                                                std::to_string(i));
                v[i] = std::pow(depth[i] / spec.scale, spec.beta);
            }
            detail::certify_reciprocal_tail(g, v, depth, spec.m0);
            return Potential(g, std::move(v), 0.0, PotentialClass::A2prime, spec.m0);
        }
    }
    throw std::logic_error("unreachable potential family");
}

// Spec strings: "constant:-0.5", "coercive:ALPHA:SHIFT[:center=0][:scale=1]",
// "sign_changing_coercive:ALPHA:SHIFT[:...]", and
// "reciprocal_summable:BETA[:m0=1][:center=0][:scale=1]".
inline PotentialFamilySpec parse_potential_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("empty potential spec");

    PotentialFamilySpec spec;
    const std::string& name = parts[0];
    const std::string ctx = "potential spec '" + text + "'";
    std::size_t positional = 0;
    if (name == "constant") {
        spec.family = PotentialFamily::constant;
        if (parts.size() < 2) throw std::invalid_argument(ctx + " needs a value field");
        spec.value = detail::to_double(parts[1], ctx);
        positional = 2;
    } else if (name == "coercive" || name == "sign_changing_coercive") {
        spec.family = name == "coercive" ? PotentialFamily::coercive
                                         : PotentialFamily::sign_changing_coercive;
        if (parts.size() < 3) throw std::invalid_argument(ctx + " needs alpha and shift");
        spec.alpha = detail::to_double(parts[1], ctx);
        spec.shift = detail::to_double(parts[2], ctx);
        positional = 3;
    } else if (name == "reciprocal_summable") {
        spec.family = PotentialFamily::reciprocal_summable;
        if (parts.size() < 2) throw std::invalid_argument(ctx + " needs a beta field");
        spec.beta = detail::to_double(parts[1], ctx);
        positional = 2;
    } else {
        throw std::invalid_argument("unknown potential family '" + name + "'");
    }

    for (std::size_t i = positional; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("potential spec option '" + parts[i] +
                                        "' must look like key=value");
        const std::string key = parts[i].substr(0, eq);
        const std::string val = parts[i].substr(eq + 1);
        if (key == "center") spec.center = detail::to_int(val, ctx);
        else if (key == "scale") spec.scale = detail::to_double(val, ctx);
        else if (key == "m0") spec.m0 = detail::to_double(val, ctx);
        else
            throw std::invalid_argument("potential spec option key '" + key +
                                        "' is not recognized");
    }
    return spec;
}

inline Potential generate_potential(const std::string& text, const WeightedGraph& g) {
    return generate_potential(parse_potential_spec(text), g);
}

}  // namespace graphlog
