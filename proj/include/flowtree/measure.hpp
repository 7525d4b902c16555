#ifndef FLOWTREE_MEASURE_HPP
#define FLOWTREE_MEASURE_HPP

#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "function.hpp"
#include "rational.hpp"
#include "tree.hpp"

namespace flowtree {

/// Strictly positive vertex masses satisfying the flow (Kirchhoff) condition:
/// the mass of every non-leaf vertex equals the sum of its sons' masses.
class FlowMeasure {
public:
    /// Builds a flow by upward summation from bottom-level leaf masses; the
    /// flow condition then holds by construction.
    static FlowMeasure from_leaf_masses(const TreeWindow& w, const std::map<VertexId, Rat>& leaf_mass) {
        FlowMeasure m(w);
        for (VertexId v = 0; v < w.size(); ++v) {
            if (!w.is_leaf(v)) continue;
            auto it = leaf_mass.find(v);
            if (it == leaf_mass.end()) throw MissingLeaf("no mass for leaf " + std::to_string(v));
            if (it->second <= 0) throw NonPositiveMass("leaf " + std::to_string(v));
            m.mass_[v] = it->second;
        }
        m.sum_upward();
        return m;
    }

    /// Deserialization path; validate_flow() decides whether it is a flow.
    static FlowMeasure from_vertex_masses(const TreeWindow& w, std::vector<Rat> mass) {
        FlowMeasure m(w);
        if (mass.size() != w.size()) throw InvalidParams("mass vector size mismatch");
        m.mass_ = std::move(mass);
        return m;
    }

    const TreeWindow& window() const { return *window_; }
    const Rat& mass(VertexId v) const { return mass_[v]; }

    template <typename Range>
    Rat set_mass(const Range& vs) const {
        Rat s = 0;
        for (VertexId v : vs) s += mass_[v];
        return s;
    }

    Rat total_mass() const { return mass_[window_->apex()]; }

    /// ∫_A f dm over the whole window.
    Rat integral(const VertexFunction& f) const {
        Rat s = 0;
        for (VertexId v = 0; v < window_->size(); ++v) s += f[v] * mass_[v];
        return s;
    }
    template <typename Range>
    Rat integral_over(const VertexFunction& f, const Range& vs) const {
        Rat s = 0;
        for (VertexId v : vs) s += f[v] * mass_[v];
        return s;
    }
    Rat l1_norm(const VertexFunction& f) const {
        Rat s = 0;
        for (VertexId v = 0; v < window_->size(); ++v) s += rat_abs(f[v]) * mass_[v];
        return s;
    }
    Rat lp_norm_pow(const VertexFunction& f, unsigned p) const {
        Rat s = 0;
        for (VertexId v = 0; v < window_->size(); ++v) s += rat_pow(rat_abs(f[v]), p) * mass_[v];
        return s;
    }

private:
    explicit FlowMeasure(const TreeWindow& w) : window_(&w), mass_(w.size(), Rat(0)) {}

    void sum_upward() {
        // vertices ordered by level: children before parents
        std::vector<VertexId> order(window_->size());
        for (VertexId v = 0; v < window_->size(); ++v) order[v] = v;
        std::sort(order.begin(), order.end(),
                  [&](VertexId a, VertexId b) { return window_->level(a) < window_->level(b); });
        for (VertexId v : order) {
            if (window_->is_leaf(v)) continue;
            Rat s = 0;
            for (VertexId c : window_->children(v)) s += mass_[c];
            mass_[v] = s;
        }
    }

    const TreeWindow* window_;
    std::vector<Rat> mass_;
};

/// True iff all masses are positive and the flow condition holds exactly.
inline bool validate_flow(const FlowMeasure& m) {
    const TreeWindow& w = m.window();
    for (VertexId v = 0; v < w.size(); ++v) {
        if (m.mass(v) <= 0) return false;
        if (w.is_leaf(v)) continue;
        Rat s = 0;
        for (VertexId c : w.children(v)) s += m.mass(c);
        if (s != m.mass(v)) return false;
    }
    return true;
}

/// Closed form m(S_r) = m(x_{r-1}) + m(x_r) for r >= 1, m(x_0) for r = 0.
inline Rat sphere_mass(const FlowMeasure& m, VertexId x0, int r) {
    detail::require_ball_fits(m.window(), x0, r);
    auto chain = predecessor_chain(m.window(), x0, r);
    if (r == 0) return m.mass(x0);
    return m.mass(chain[r - 1]) + m.mass(chain[r]);
}

/// Closed form m(B_r) = 2*sum_{j<r} m(x_j) + m(x_r).
inline Rat ball_mass(const FlowMeasure& m, VertexId x0, int r) {
    detail::require_ball_fits(m.window(), x0, r);
    auto chain = predecessor_chain(m.window(), x0, r);
    Rat s = 0;
    for (int j = 0; j < r; ++j) s += m.mass(chain[j]);
    return 2 * s + m.mass(chain[r]);
}

/// (lower bound, exact ratio, upper bound) for m(B_2r)/m(B_r).
inline std::tuple<Rat, Rat, Rat> ball_ratio_bounds(const FlowMeasure& m, VertexId x0, int r) {
    detail::require_ball_fits(m.window(), x0, 2 * r);
    auto chain = predecessor_chain(m.window(), x0, 2 * r);
    Rat ratio = ball_mass(m, x0, 2 * r) / ball_mass(m, x0, r);
    Rat lower = m.mass(chain[2 * r]) / ((2 * r + 1) * m.mass(chain[r]));
    Rat upper = (4 * r + 1) * m.mass(chain[2 * r]) / m.mass(chain[r]);
    return {lower, ratio, upper};
}

struct DoublingReport {
    Rat c_upper;                 // least c with m(x) <= c m(y) over all edges
    bool lower_ok = false;       // m(x) >= (c/(c-1)) m(y) at branching vertices
    std::size_t max_degree = 0;  // max number of sons
    std::size_t branch_count_max = 0; // max branching count over leaf-pair / apex paths
    double growth_alpha = 0.0;   // fitted exponent of m(x_r) along the spine
    std::optional<Rat> k_gain;   // c/(c-1); unset on branch-free (chain) windows
};

namespace detail {
inline std::size_t branching_on_path(const TreeWindow& w, VertexId a, VertexId b) {
    VertexId z = confluent(w, a, b);
    std::size_t n = 0;
    for (VertexId v : {a, b}) {
        while (v != z) {
            if (w.degree(v) >= 2) ++n;
            v = w.parent(v);
        }
    }
    if (w.degree(z) >= 2) ++n;
    return n;
}
} // namespace detail

inline DoublingReport doubling_report(const FlowMeasure& m) {
    const TreeWindow& w = m.window();
    DoublingReport rep;
    rep.c_upper = 0;
    for (VertexId v = 0; v < w.size(); ++v) {
        if (v == w.apex()) continue;
        rep.c_upper = std::max(rep.c_upper, Rat(m.mass(w.parent(v)) / m.mass(v)));
    }
    if (rep.c_upper == 0) rep.c_upper = 1; // single-vertex degenerate, unreachable
    rep.max_degree = w.max_degree();
    rep.lower_ok = true;
    if (rep.c_upper > 1) {
        rep.k_gain = rep.c_upper / (rep.c_upper - 1);
        for (VertexId v = 0; v < w.size() && rep.lower_ok; ++v) {
            if (w.degree(v) < 2) continue;
            for (VertexId c : w.children(v))
                if (m.mass(v) * (rep.c_upper - 1) < rep.c_upper * m.mass(c)) {
                    rep.lower_ok = false;
                    break;
                }
        }
    }
    // branching count: leaves pairwise and apex-to-leaf chains
    std::vector<VertexId> leaves;
    for (VertexId v = 0; v < w.size(); ++v)
        if (w.is_leaf(v)) leaves.push_back(v);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        rep.branch_count_max =
            std::max(rep.branch_count_max, detail::branching_on_path(w, leaves[i], w.apex()));
        for (std::size_t j = i + 1; j < leaves.size(); ++j)
            rep.branch_count_max =
                std::max(rep.branch_count_max, detail::branching_on_path(w, leaves[i], leaves[j]));
    }
    // log-linear fit of m(x_r) along the spine, bottom to apex
    const auto& spine = w.spine();
    std::size_t n = spine.size();
    if (n >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t r = 0; r < n; ++r) {
            double x = static_cast<double>(r);
            double y = std::log(rat_to_double(m.mass(spine[n - 1 - r])));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double denom = n * sxx - sx * sx;
        rep.growth_alpha = denom == 0 ? 0.0 : (n * sxy - sx * sy) / denom;
    }
    return rep;
}

/// m(∂B⁻)/m(B⁻) with ∂ computed against the infinite-tree adjacency implied by
/// the leaf convention (every leaf has phantom sons); equals 2/(r+1) for r >= 1.
inline Rat isoperimetric_ratio(const FlowMeasure& m, VertexId x0, int r) {
    const TreeWindow& w = m.window();
    if (w.level(x0) - r < w.bottom_level())
        throw OutOfWindow("lower ball clipped by the window");
    auto lower = ball_lower(w, x0, r);
    Rat interior_mass = m.set_mass(lower);
    // boundary: x0 (phantom predecessor outside) plus the depth-r slice
    // (actual or phantom sons outside)
    Rat boundary = m.mass(x0);
    if (r >= 1) {
        auto slice = detail::descendant_slice(w, x0, r, r);
        boundary += m.set_mass(slice);
    }
    return boundary / interior_mass;
}

} // namespace flowtree

#endif
