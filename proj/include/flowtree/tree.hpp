#ifndef FLOWTREE_TREE_HPP
#define FLOWTREE_TREE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace flowtree {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

/// Finite truncation of a tree rooted at infinity: the tent of a single apex
/// vertex clipped at a uniform bottom level. Parents sit one level above
/// children; every vertex strictly above the bottom level has at least one
/// child and every bottom-level vertex is a leaf (it stands for its cut
/// infinite subtree). Immutable after construction.
class TreeWindow {
public:
    /// vertices are given as (parent, level) pairs; parent == kNoVertex marks
    /// the apex. Children keep input order.
    TreeWindow(std::vector<VertexId> parent, std::vector<int> level)
        : parent_(std::move(parent)), level_(std::move(level)) {
        const std::size_t n = parent_.size();
        if (n == 0 || level_.size() != n) throw InvalidParams("empty or inconsistent window");
        children_.resize(n);
        apex_ = kNoVertex;
        for (VertexId v = 0; v < n; ++v) {
            if (parent_[v] == kNoVertex) {
                if (apex_ != kNoVertex) throw InvalidParams("multiple apexes");
                apex_ = v;
            } else {
                if (parent_[v] >= n) throw InvalidParams("parent out of range");
                children_[parent_[v]].push_back(v);
            }
        }
        if (apex_ == kNoVertex) throw InvalidParams("no apex");
        top_ = level_[apex_];
        bottom_ = top_;
        for (VertexId v = 0; v < n; ++v) bottom_ = std::min(bottom_, level_[v]);
        if (bottom_ >= top_) throw InvalidParams("window must span at least two levels");
        for (VertexId v = 0; v < n; ++v) {
            if (v != apex_ && level_[parent_[v]] != level_[v] + 1)
                throw InvalidParams("parent must sit one level above child");
            if (level_[v] > bottom_ && children_[v].empty())
                throw InvalidParams("non-bottom vertex without children");
            if (level_[v] == bottom_ && !children_[v].empty())
                throw InvalidParams("bottom vertex with children");
        }
        // spine: leftmost descending chain from the apex.
        spine_.push_back(apex_);
        while (!children_[spine_.back()].empty()) spine_.push_back(children_[spine_.back()].front());
    }

    /// Overrides the default (leftmost) spine; must be a descending chain from
    /// the apex to the bottom level.
    void set_spine(std::vector<VertexId> spine) {
        if (spine.empty() || spine.front() != apex_) throw InvalidParams("spine must start at apex");
        for (std::size_t k = 1; k < spine.size(); ++k)
            if (parent_[spine[k]] != spine[k - 1]) throw InvalidParams("spine must be a parent-child chain");
        if (level_[spine.back()] != bottom_) throw InvalidParams("spine must reach the bottom level");
        spine_ = std::move(spine);
    }

    std::size_t size() const { return parent_.size(); }
    VertexId apex() const { return apex_; }
    int top_level() const { return top_; }
    int bottom_level() const { return bottom_; }
    int height() const { return top_ - bottom_; }
    int level(VertexId v) const { return level_[v]; }
    VertexId parent(VertexId v) const { return parent_[v]; }
    const std::vector<VertexId>& children(VertexId v) const { return children_[v]; }
    const std::vector<VertexId>& spine() const { return spine_; }
    bool is_leaf(VertexId v) const { return children_[v].empty(); }
    std::size_t degree(VertexId v) const { return children_[v].size(); }
    bool on_spine(VertexId v) const {
        std::size_t k = static_cast<std::size_t>(top_ - level_[v]);
        return k < spine_.size() && spine_[k] == v;
    }

    /// True iff a is an ancestor of v or equal to it.
    bool below_or_equal(VertexId v, VertexId a) const {
        while (level_[v] < level_[a]) v = parent_[v];
        return v == a;
    }

    std::size_t max_degree() const {
        std::size_t q = 0;
        for (const auto& c : children_) q = std::max(q, c.size());
        return q;
    }

private:
    std::vector<VertexId> parent_;
    std::vector<int> level_;
    std::vector<std::vector<VertexId>> children_;
    VertexId apex_;
    int top_, bottom_;
    std::vector<VertexId> spine_;
};

/// [x0=x, x1, ..., xk] with x_{j+1} = parent(x_j).
inline std::vector<VertexId> predecessor_chain(const TreeWindow& w, VertexId x, int k) {
    std::vector<VertexId> chain{x};
    for (int j = 0; j < k; ++j) {
        if (chain.back() == w.apex())
            throw OutOfWindow("predecessor chain exits the window");
        chain.push_back(w.parent(chain.back()));
    }
    return chain;
}

/// Lowest common ancestor under the window's parent map.
inline VertexId confluent(const TreeWindow& w, VertexId x, VertexId y) {
    while (w.level(x) < w.level(y)) x = w.parent(x);
    while (w.level(y) < w.level(x)) y = w.parent(y);
    while (x != y) {
        x = w.parent(x);
        y = w.parent(y);
    }
    return x;
}

inline int distance(const TreeWindow& w, VertexId x, VertexId y) {
    int lz = w.level(confluent(w, x, y));
    return (lz - w.level(x)) + (lz - w.level(y));
}

/// {y : y <= x} within the window, including x.
inline std::vector<VertexId> tent(const TreeWindow& w, VertexId x) {
    std::vector<VertexId> out, stack{x};
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (VertexId c : w.children(v)) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {
inline void require_ball_fits(const TreeWindow& w, VertexId x0, int r) {
    if (w.level(x0) + r > w.top_level() || w.level(x0) - r < w.bottom_level())
        throw OutOfWindow("metric ball clipped by the window");
}
/// Descendants of `root` whose depth below root lies in [dmin, dmax].
inline std::vector<VertexId> descendant_slice(const TreeWindow& w, VertexId root, int dmin, int dmax) {
    std::vector<VertexId> out;
    std::vector<std::pair<VertexId, int>> stack{{root, 0}};
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        if (d >= dmin) out.push_back(v);
        if (d < dmax)
            for (VertexId c : w.children(v)) stack.emplace_back(c, d + 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}
} // namespace detail

/// B_r(x0) ∩ {x : x <= x0}: descendants of x0 within depth r.
inline std::vector<VertexId> ball_lower(const TreeWindow& w, VertexId x0, int r) {
    if (w.level(x0) - r < w.bottom_level())
        throw OutOfWindow("lower ball clipped by the window");
    return detail::descendant_slice(w, x0, 0, r);
}

inline std::vector<VertexId> sphere(const TreeWindow& w, VertexId x0, int r) {
    detail::require_ball_fits(w, x0, r);
    if (r == 0) return {x0};
    // S_r(x0) = union over k=0..r of the level slices under the k-th
    // predecessor not already under the (k-1)-th.
    std::vector<VertexId> out;
    auto chain = predecessor_chain(w, x0, r);
    auto s0 = detail::descendant_slice(w, x0, r, r);
    out.insert(out.end(), s0.begin(), s0.end());
    for (int k = 1; k <= r; ++k) {
        int depth = r - k; // d(x, x0) = k up + depth down
        if (depth == 0) {
            out.push_back(chain[k]);
            continue;
        }
        // exclude the branch through x_{k-1}
        for (VertexId c : w.children(chain[k])) {
            if (c == chain[k - 1]) continue;
            auto part = detail::descendant_slice(w, c, depth - 1, depth - 1);
            out.insert(out.end(), part.begin(), part.end());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<VertexId> ball(const TreeWindow& w, VertexId x0, int r) {
    detail::require_ball_fits(w, x0, r);
    std::vector<VertexId> out;
    for (int j = 0; j <= r; ++j) {
        auto s = sphere(w, x0, j);
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace flowtree

#endif
