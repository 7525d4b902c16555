#ifndef FLOWTREE_MAXIMAL_HPP
#define FLOWTREE_MAXIMAL_HPP

#include <algorithm>
#include <vector>

#include "function.hpp"
#include "measure.hpp"
#include "trapezoid.hpp"

namespace flowtree {

/// Pointwise maximal values together with a trapezoid attaining each.
struct MaximalReport {
    std::vector<Rat> values;
    std::vector<Trapezoid> witness;

    Rat max_value() const {
        Rat m = 0;
        for (const auto& v : values) m = std::max(m, v);
        return m;
    }
};

/// Mf(x) = max over admissible in-window R containing x of avg_R |f|.
inline MaximalReport hl_maximal(const FlowMeasure& m, const VertexFunction& f,
                                const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    MaximalReport rep;
    rep.values.assign(w.size(), Rat(-1));
    rep.witness.assign(w.size(), Trapezoid{});
    VertexFunction af = f.abs();
    for (const Trapezoid& R : enumerate_all(w, cfg)) {
        auto mem = members(w, R);
        Rat avg = m.integral_over(af, mem) / trapezoid_mass(m, R);
        for (VertexId x : mem)
            if (avg > rep.values[x]) {
                rep.values[x] = avg;
                rep.witness[x] = R;
            }
    }
    return rep;
}

/// M#f(x) = max over R containing x of avg_R |f - f_R|.
inline MaximalReport sharp_maximal(const FlowMeasure& m, const VertexFunction& f,
                                   const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    MaximalReport rep;
    rep.values.assign(w.size(), Rat(-1));
    rep.witness.assign(w.size(), Trapezoid{});
    for (const Trapezoid& R : enumerate_all(w, cfg)) {
        auto mem = members(w, R);
        Rat mass = trapezoid_mass(m, R);
        Rat avg = m.integral_over(f, mem) / mass;
        Rat osc = 0;
        for (VertexId x : mem) osc += rat_abs(f[x] - avg) * m.mass(x);
        osc /= mass;
        for (VertexId x : mem)
            if (osc > rep.values[x]) {
                rep.values[x] = osc;
                rep.witness[x] = R;
            }
    }
    return rep;
}

/// Maximal operator restricted to an explicit trapezoid family (all elements
/// must fit the window; vertices covered by no element get value 0).
inline MaximalReport family_maximal(const FlowMeasure& m, const VertexFunction& f,
                                    const std::vector<Trapezoid>& family) {
    const TreeWindow& w = m.window();
    MaximalReport rep;
    rep.values.assign(w.size(), Rat(-1));
    rep.witness.assign(w.size(), Trapezoid{});
    VertexFunction af = f.abs();
    for (const Trapezoid& R : family) {
        auto mem = members(w, R);
        Rat avg = m.integral_over(af, mem) / trapezoid_mass(m, R);
        for (VertexId x : mem)
            if (avg > rep.values[x]) {
                rep.values[x] = avg;
                rep.witness[x] = R;
            }
    }
    // vertices covered by no element (or only by zero-average ones that never
    // beat the sentinel) get value 0 with their own singleton as witness
    for (VertexId x = 0; x < w.size(); ++x)
        if (rep.values[x] < 0) {
            rep.values[x] = 0;
            rep.witness[x] = Trapezoid::make_singleton(x);
        }
    return rep;
}

/// Greedy disjoint selection: from the trapezoids whose average of |f|
/// exceeds lambda, repeatedly keep the one with heaviest root (ties by higher
/// root level, then enumeration order) and discard everything it meets.
inline std::vector<Trapezoid> vitali_select(const FlowMeasure& m, const VertexFunction& f,
                                            const Rat& lambda, const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    if (lambda <= 0) throw InvalidParams("vitali_select: lambda must be positive");
    VertexFunction af = f.abs();
    std::vector<Trapezoid> pool;
    for (const Trapezoid& R : enumerate_all(w, cfg)) {
        Rat avg = m.integral_over(af, members(w, R)) / trapezoid_mass(m, R);
        if (avg > lambda) pool.push_back(R);
    }
    // stable: sort by descending root mass, then by descending root level so a
    // kept element always absorbs what it discards even when masses tie along
    // a non-branching stretch; enumeration order breaks the remaining ties
    std::stable_sort(pool.begin(), pool.end(), [&](const Trapezoid& a, const Trapezoid& b) {
        const Rat ma = m.mass(a.root), mb = m.mass(b.root);
        if (ma != mb) return ma > mb;
        return w.level(a.root) > w.level(b.root);
    });
    std::vector<Trapezoid> selected;
    std::vector<bool> alive(pool.size(), true);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!alive[i]) continue;
        selected.push_back(pool[i]);
        for (std::size_t j = i + 1; j < pool.size(); ++j)
            if (alive[j] && intersects(w, pool[i], pool[j])) alive[j] = false;
    }
    return selected;
}

struct Weak11Result {
    Rat lhs, rhs;
    bool ok;
};

/// m({Mf > lambda}) <= (2 beta / lambda) ||f||_1, both sides exact.
inline Weak11Result weak11_check(const FlowMeasure& m, const VertexFunction& f, const Rat& lambda,
                                 const TrapezoidFamilyConfig& cfg) {
    if (lambda <= 0) throw InvalidParams("weak11_check: lambda must be positive");
    MaximalReport rep = hl_maximal(m, f, cfg);
    Rat lhs = 0;
    for (VertexId x = 0; x < m.window().size(); ++x)
        if (rep.values[x] > lambda) lhs += m.mass(x);
    Rat rhs = Rat(2 * cfg.beta) / lambda * m.l1_norm(f);
    return {lhs, rhs, lhs <= rhs};
}

} // namespace flowtree

#endif
