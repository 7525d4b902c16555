#ifndef FLOWTREE_CZD_HPP
#define FLOWTREE_CZD_HPP

#include <set>
#include <utility>
#include <vector>

#include "function.hpp"
#include "measure.hpp"
#include "trapezoid.hpp"

namespace flowtree {

struct StoppingFamily {
    Trapezoid base{};
    Rat alpha;
    std::vector<Trapezoid> sets;
    bool complement_ok = false; // |f| < alpha off the union of the sets
};

/// Recursive stopping-time construction: descend the dyadic decomposition of
/// `base`, declaring a piece a stopping set the first time the average of |f|
/// reaches alpha.
inline StoppingFamily stopping_sets(const FlowMeasure& m, const VertexFunction& f,
                                    const Trapezoid& base, const Rat& alpha,
                                    const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    VertexFunction af = f.abs();
    auto avg = [&](const Trapezoid& R) {
        return m.integral_over(af, members(w, R)) / trapezoid_mass(m, R);
    };
    if (alpha <= 0) throw InvalidParams("stopping_sets: alpha must be positive");
    if (avg(base) >= alpha)
        throw PreconditionViolated("stopping_sets: base average already reaches alpha");
    StoppingFamily out;
    out.base = base;
    out.alpha = alpha;
    std::vector<Trapezoid> work{base};
    while (!work.empty()) {
        Trapezoid R = work.back();
        work.pop_back();
        for (const Trapezoid& Q : decompose(w, R, cfg)) {
            if (avg(Q) >= alpha)
                out.sets.push_back(Q);
            else if (!Q.singleton)
                work.push_back(Q);
            // a singleton with average < alpha terminates its branch
        }
    }
    std::sort(out.sets.begin(), out.sets.end());
    out.complement_ok = true;
    std::vector<bool> covered(w.size(), false);
    for (const auto& E : out.sets)
        for (VertexId x : members(w, E)) covered[x] = true;
    for (VertexId x : members(w, base))
        if (!covered[x] && rat_abs(f[x]) >= alpha) out.complement_ok = false;
    return out;
}

/// Disjoint admissible trapezoids of mass > sigma covering `support`, built
/// from apex-rooted bands (plus the apex singleton when needed). Throws
/// WindowTooSmall with a certificate vertex when some support vertex lies in
/// no in-window admissible trapezoid of mass > sigma.
inline std::vector<Trapezoid> sigma_partition(const FlowMeasure& m,
                                              const std::vector<VertexId>& support,
                                              const Rat& sigma,
                                              const TrapezoidFamilyConfig& cfg) {
    const TreeWindow& w = m.window();
    const int H = w.height();
    const int beta = cfg.beta;
    std::vector<Trapezoid> out;
    std::set<int> offsets;
    bool apex_needed = false;
    for (VertexId v : support) {
        if (v == w.apex())
            apex_needed = true;
        else
            offsets.insert(w.level(w.apex()) - w.level(v));
    }
    if (apex_needed) {
        if (m.mass(w.apex()) <= sigma)
            throw WindowTooSmall("only the singleton contains the apex and its mass is too small",
                                 w.apex());
        out.push_back(Trapezoid::make_singleton(w.apex()));
    }
    auto certificate = [&](int off) -> VertexId {
        for (VertexId v : support)
            if (v != w.apex() && w.level(w.apex()) - w.level(v) == off) return v;
        return w.apex();
    };
    const Rat apex_mass = m.mass(w.apex());
    int cur = 1; // first depth offset not occupied by an emitted band
    for (int a : offsets) {
        if (a < cur) continue; // already covered by an earlier band
        // band [h1, h2) rooted at the apex with h1 <= a < h2,
        // h2 = min(beta*h1, H+1), admissible, of maximal height
        int lo = std::max(cur, (a + 1 + beta - 1) / beta);
        int hi = std::min(a, (H + 1) / 2);
        int best = (H + 1 + beta - 1) / beta; // unimodal peak of the height
        int h1 = std::clamp(best, lo, hi);
        bool feasible = lo <= hi;
        int h2 = feasible ? std::min(beta * h1, H + 1) : 0;
        if (!feasible || apex_mass * (h2 - h1) <= sigma)
            throw WindowTooSmall("no admissible trapezoid of mass > sigma covers this vertex",
                                 certificate(a));
        out.push_back(Trapezoid::band(w.apex(), h1, h2));
        cur = h2;
    }
    return out;
}

struct CZDecomposition {
    Rat alpha;
    VertexFunction good;
    std::vector<std::pair<Trapezoid, VertexFunction>> bad;
    Rat c_tilde_value;
};

/// f = good + sum of bad parts; bad parts live on disjoint stopping sets E_i,
/// have zero mean, and satisfy the classical size bounds.
inline CZDecomposition cz_decompose(const FlowMeasure& m, const VertexFunction& f,
                                    const Rat& alpha, const TrapezoidFamilyConfig& cfg) {
    if (alpha <= 0) throw InvalidParams("cz_decompose: alpha must be positive");
    const TreeWindow& w = m.window();
    CZDecomposition cz{alpha, f, {}, c_tilde(m, cfg)};
    if (f.is_zero()) return cz;
    Rat sigma = m.l1_norm(f) / alpha;
    auto pieces = sigma_partition(m, f.support(), sigma, cfg);
    for (const auto& R : pieces) {
        // each piece has mass > ||f||_1/alpha, so its |f|-average is < alpha
        auto fam = stopping_sets(m, f, R, alpha, cfg);
        for (const auto& E : fam.sets) {
            auto mem = members(w, E);
            Rat avg = m.integral_over(f, mem) / trapezoid_mass(m, E);
            VertexFunction b(w);
            for (VertexId x : mem) {
                b[x] = f[x] - avg;
                cz.good[x] = avg;
            }
            cz.bad.emplace_back(E, std::move(b));
        }
    }
    return cz;
}

struct InterpolationSplit {
    VertexFunction good;
    std::vector<std::pair<Trapezoid, VertexFunction>> bad;
    Rat h1_bound; // lambda * sum of the stopping-set masses
};

/// Splits f at level lambda via the CZ decomposition of |f|^p at lambda^p:
/// good = f off the stopping sets and the f-average on each of them.
inline InterpolationSplit interpolation_split(const FlowMeasure& m, const VertexFunction& f,
                                              const Rat& lambda, int p,
                                              const TrapezoidFamilyConfig& cfg) {
    if (p < 2) throw NonIntegerExponent("interpolation_split: integer p >= 2 required");
    if (lambda <= 0) throw InvalidParams("interpolation_split: lambda must be positive");
    const TreeWindow& w = m.window();
    VertexFunction fp = f.pow(static_cast<unsigned>(p));
    CZDecomposition cz = cz_decompose(m, fp, rat_pow(lambda, static_cast<unsigned>(p)), cfg);
    InterpolationSplit out{f, {}, 0};
    Rat total_mass = 0;
    for (const auto& [R, unused] : cz.bad) {
        auto mem = members(w, R);
        Rat avg = m.integral_over(f, mem) / trapezoid_mass(m, R);
        VertexFunction b(w);
        for (VertexId x : mem) {
            b[x] = f[x] - avg;
            out.good[x] = avg;
        }
        out.bad.emplace_back(R, std::move(b));
        total_mass += trapezoid_mass(m, R);
    }
    out.h1_bound = lambda * total_mass;
    return out;
}

} // namespace flowtree

#endif
