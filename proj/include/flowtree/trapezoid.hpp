#ifndef FLOWTREE_TRAPEZOID_HPP
#define FLOWTREE_TRAPEZOID_HPP

#include <algorithm>
#include <compare>
#include <string>
#include <tuple>
#include <vector>

#include "measure.hpp"
#include "rational.hpp"
#include "tree.hpp"

namespace flowtree {

struct TrapezoidFamilyConfig {
    int beta = 12;
    TrapezoidFamilyConfig() = default;
    explicit TrapezoidFamilyConfig(int b) : beta(b) {
        if (b < 12) throw InvalidParams("beta must be >= 12");
    }
};

/// Either a singleton {x0} or the band {x <= x0 : l(x0)-h'' < l(x) <= l(x0)-h'}.
/// Value type; vertex sets are materialized on demand.
struct Trapezoid {
    VertexId root;
    bool singleton;
    int h1 = 0, h2 = 0; // h', h'' when band

    static Trapezoid make_singleton(VertexId x0) { return {x0, true, 0, 0}; }
    static Trapezoid band(VertexId x0, int h1, int h2) {
        // h' = 0 bands include the root; they arise only as envelopes of
        // singletons (a singleton is the degenerate h' = 0, h'' = 1 band)
        if (!(h2 > h1 && h1 >= 0)) throw InvalidTrapezoid("band needs h'' > h' >= 0");
        return {x0, false, h1, h2};
    }

    int height() const { return singleton ? 1 : h2 - h1; }

    friend bool operator==(const Trapezoid&, const Trapezoid&) = default;
    friend auto operator<=>(const Trapezoid& a, const Trapezoid& b) {
        return std::tie(a.root, a.singleton, a.h1, a.h2) <=>
               std::tie(b.root, b.singleton, b.h1, b.h2);
    }

    std::string str() const {
        if (singleton) return "{" + std::to_string(root) + "}";
        return "R_" + std::to_string(h1) + "^" + std::to_string(h2) + "(" + std::to_string(root) + ")";
    }
};

inline bool admissible(const Trapezoid& R, const TrapezoidFamilyConfig& cfg) {
    if (R.singleton) return true;
    return 2 * R.h1 <= R.h2 && R.h2 <= cfg.beta * R.h1;
}

/// True iff the full band lies inside the window.
inline bool fits(const TreeWindow& w, const Trapezoid& R) {
    if (R.singleton) return true;
    return w.level(R.root) - (R.h2 - 1) >= w.bottom_level();
}

inline std::vector<VertexId> members(const TreeWindow& w, const Trapezoid& R) {
    if (R.singleton) return {R.root};
    if (!fits(w, R)) throw OutOfWindow("trapezoid " + R.str() + " clipped by the window");
    return detail::descendant_slice(w, R.root, R.h1, R.h2 - 1);
}

/// Members of the band intersected with the window (no error on clipping).
inline std::vector<VertexId> members_clipped(const TreeWindow& w, const Trapezoid& R) {
    if (R.singleton) return {R.root};
    int dmax = std::min(R.h2 - 1, w.level(R.root) - w.bottom_level());
    if (dmax < R.h1) return {};
    return detail::descendant_slice(w, R.root, R.h1, dmax);
}

inline bool contains_vertex(const TreeWindow& w, const Trapezoid& R, VertexId x) {
    if (R.singleton) return x == R.root;
    int d = w.level(R.root) - w.level(x);
    return d >= R.h1 && d <= R.h2 - 1 && w.below_or_equal(x, R.root);
}

/// Closed form m(R) = m(x0)(h''-h') for bands under a flow measure.
inline Rat trapezoid_mass(const FlowMeasure& m, const Trapezoid& R) {
    if (R.singleton) return m.mass(R.root);
    if (!fits(m.window(), R)) throw OutOfWindow("trapezoid " + R.str() + " clipped by the window");
    return m.mass(R.root) * (R.h2 - R.h1);
}

inline bool intersects(const TreeWindow& w, const Trapezoid& A, const Trapezoid& B) {
    // cheap root-relation prefilter, then exact level-range test
    const Trapezoid *up = &A, *dn = &B;
    if (w.level(up->root) < w.level(dn->root)) std::swap(up, dn);
    if (!w.below_or_equal(dn->root, up->root)) return false;
    int off = w.level(up->root) - w.level(dn->root);
    auto lo = [](const Trapezoid& R) { return R.singleton ? 0 : R.h1; };
    auto hi = [](const Trapezoid& R) { return R.singleton ? 0 : R.h2 - 1; };
    // depth ranges below up->root: [lo(up), hi(up)] and [off+lo(dn), off+hi(dn)]
    int a = std::max(lo(*up), off + lo(*dn));
    int b = std::min(hi(*up), off + hi(*dn));
    if (a > b) return false;
    if (up == dn || off == 0) return true;
    // ranges overlap in levels; since dn->root <= up->root every member of dn
    // at those levels also lies below up->root, so the intersection is nonempty
    // provided dn actually has members at depth >= a below up->root, which the
    // range test already guarantees (dn's slice below its own root is nonempty
    // at every admissible in-window depth).
    return true;
}

/// One round of the dyadic decomposition. Output partitions members(R) into
/// at most c admissible pieces.
inline std::vector<Trapezoid> decompose(const TreeWindow& w, const Trapezoid& R,
                                        const TrapezoidFamilyConfig&) {
    if (R.singleton) return {R};
    if (!fits(w, R)) throw OutOfWindow("decompose: " + R.str() + " clipped by the window");
    if (R.h1 == 1 && R.h2 == 2) {
        std::vector<Trapezoid> out;
        for (VertexId y : w.children(R.root)) out.push_back(Trapezoid::make_singleton(y));
        return out;
    }
    if ((R.h1 == 1 && R.h2 == 3) || R.h2 >= 4 * R.h1) {
        return {Trapezoid::band(R.root, R.h1, 2 * R.h1), Trapezoid::band(R.root, 2 * R.h1, R.h2)};
    }
    std::vector<Trapezoid> out;
    for (VertexId y : w.children(R.root)) out.push_back(Trapezoid::band(y, R.h1 - 1, R.h2 - 1));
    return out;
}

/// F(R,k): k rounds of decompose applied elementwise.
inline std::vector<Trapezoid> decompose_depth(const TreeWindow& w, const Trapezoid& R,
                                              const TrapezoidFamilyConfig& cfg, int k) {
    std::vector<Trapezoid> cur{R};
    for (int i = 0; i < k; ++i) {
        std::vector<Trapezoid> next;
        for (const auto& Q : cur) {
            auto parts = decompose(w, Q, cfg);
            next.insert(next.end(), parts.begin(), parts.end());
        }
        cur = std::move(next);
    }
    return cur;
}

enum class ExpandPolicy { Up, Down };

/// The dyadic father of R. Admissible and containing R.
inline Trapezoid expand(const TreeWindow& w, const Trapezoid& R, const TrapezoidFamilyConfig&,
                        ExpandPolicy policy) {
    auto parent_of = [&](VertexId v) {
        if (v == w.apex()) throw OutOfWindow("expansion needs the parent of the apex");
        return w.parent(v);
    };
    Trapezoid out{};
    if (R.singleton) {
        out = Trapezoid::band(parent_of(R.root), 1, 2);
    } else if (R.h1 == 1 && R.h2 == 2) {
        out = Trapezoid::band(parent_of(R.root), 1, 3);
    } else if (R.h2 >= 3 * R.h1) {
        out = Trapezoid::band(parent_of(R.root), R.h1 + 1, R.h2 + 1);
    } else if (policy == ExpandPolicy::Down) {
        out = Trapezoid::band(R.root, R.h1, 2 * R.h2);
    } else {
        out = Trapezoid::band(R.root, R.h1 / 2, R.h2);
    }
    if (!fits(w, out)) throw OutOfWindow("expansion " + out.str() + " clipped by the window");
    return out;
}

/// Envelope: the beta-dilated band absorbing any intersecting trapezoid with
/// lighter root. A singleton behaves as the degenerate band with h' = 0 and
/// h'' = 1, so its envelope is Band(0, beta) at the same root; in particular
/// every trapezoid is contained in its own envelope.
inline Trapezoid envelope(const Trapezoid& R, const TrapezoidFamilyConfig& cfg) {
    if (R.singleton) return Trapezoid::band(R.root, 0, cfg.beta);
    int h1 = (R.h1 + cfg.beta - 1) / cfg.beta; // ceil(h'/beta)
    return Trapezoid::band(R.root, h1, cfg.beta * R.h2);
}

/// Whether members(R2) lie inside the envelope of R1 (envelope membership is
/// tested by predicate, so window clipping of the envelope cannot fail it).
inline bool envelope_containment(const TreeWindow& w, const Trapezoid& R1, const Trapezoid& R2,
                                 const TrapezoidFamilyConfig& cfg) {
    Trapezoid E = envelope(R1, cfg);
    for (VertexId x : members(w, R2))
        if (!contains_vertex(w, E, x)) return false;
    return true;
}

/// All admissible in-window trapezoids containing x, deterministic order:
/// the singleton first, then bands by (ancestor offset, h', h'').
inline std::vector<Trapezoid> enumerate_containing(const TreeWindow& w, VertexId x,
                                                   const TrapezoidFamilyConfig& cfg) {
    std::vector<Trapezoid> out{Trapezoid::make_singleton(x)};
    VertexId a = x;
    for (int t = 1;; ++t) {
        if (a == w.apex()) break;
        a = w.parent(a);
        // need h' <= t <= h''-1, 2h' <= h'' <= beta h', band fits window
        int hmax_fit = w.level(a) - w.bottom_level() + 1; // h'' <= this
        for (int h1 = 1; h1 <= t; ++h1) {
            int lo = std::max(2 * h1, t + 1);
            int hi = std::min(cfg.beta * h1, hmax_fit);
            for (int h2 = lo; h2 <= hi; ++h2) out.push_back(Trapezoid::band(a, h1, h2));
        }
    }
    return out;
}

/// R* = {x : d(x,R) < h'} for a band R; mass (h''+h'-1) m(x0) <= 3 m(R).
inline std::vector<VertexId> star_set(const TreeWindow& w, const Trapezoid& R) {
    if (R.singleton) throw InvalidTrapezoid("star set undefined for singletons");
    int dmax = R.h2 + R.h1 - 2;
    if (w.level(R.root) - dmax < w.bottom_level())
        throw OutOfWindow("star set of " + R.str() + " clipped by the window");
    return detail::descendant_slice(w, R.root, 0, dmax);
}

inline bool star_fits(const TreeWindow& w, const Trapezoid& R) {
    return !R.singleton && w.level(R.root) - (R.h2 + R.h1 - 2) >= w.bottom_level();
}

/// Local doubling constant of the flow: the least c with
/// m(parent) <= c * m(child) over all edges. Always >= the max degree.
inline Rat doubling_constant(const FlowMeasure& m) {
    const TreeWindow& w = m.window();
    Rat c = 1;
    for (VertexId v = 0; v < w.size(); ++v)
        if (v != w.apex()) c = std::max(c, Rat(m.mass(w.parent(v)) / m.mass(v)));
    return c;
}

/// Structural constant max{2c, beta-1, 3} controlling dyadic parent/child
/// mass ratios, with c the local doubling constant of the flow.
inline Rat c_tilde(const FlowMeasure& m, const TrapezoidFamilyConfig& cfg) {
    return std::max(2 * doubling_constant(m), Rat(std::max(cfg.beta - 1, 3)));
}

/// All admissible in-window trapezoids, deterministic (root, h', h'') order.
inline std::vector<Trapezoid> enumerate_all(const TreeWindow& w, const TrapezoidFamilyConfig& cfg) {
    std::vector<Trapezoid> out;
    for (VertexId v = 0; v < w.size(); ++v) {
        out.push_back(Trapezoid::make_singleton(v));
        int depth = w.level(v) - w.bottom_level(); // h'' - 1 <= depth
        for (int h1 = 1; 2 * h1 <= depth + 1; ++h1)
            for (int h2 = 2 * h1; h2 <= std::min(cfg.beta * h1, depth + 1); ++h2)
                out.push_back(Trapezoid::band(v, h1, h2));
    }
    return out;
}

} // namespace flowtree

#endif
