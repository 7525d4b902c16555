#ifndef FLOWTREE_DYADIC_HPP
#define FLOWTREE_DYADIC_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "maximal.hpp"
#include "measure.hpp"
#include "trapezoid.hpp"

namespace flowtree {

struct ExhaustionStep {
    Trapezoid element;                  // R_j
    std::optional<Trapezoid> increment; // strip gained over R_{j-1}, if any
};

/// Increasing chain R_0 = {start} c R_1 c ... built with the expansion
/// algorithm; vertical expansions alternate starting Down. Stops when the
/// next expansion would leave the window. Each step records the band of
/// levels the strip of R_j gained, when it gained any.
inline std::vector<ExhaustionStep> exhaustion_steps(const TreeWindow& w,
                                                    const TrapezoidFamilyConfig& cfg,
                                                    VertexId start) {
    std::vector<ExhaustionStep> out{{Trapezoid::make_singleton(start), std::nullopt}};
    ExpandPolicy next_vertical = ExpandPolicy::Down;
    while (true) {
        const Trapezoid& R = out.back().element;
        bool vertical = !R.singleton && !(R.h1 == 1 && R.h2 == 2) && R.h2 < 3 * R.h1;
        ExpandPolicy policy = next_vertical;
        Trapezoid next{};
        try {
            next = expand(w, R, cfg, policy);
        } catch (const OutOfWindow&) {
            break;
        }
        std::optional<Trapezoid> gain;
        if (R.singleton) {
            gain = std::nullopt; // strip level unchanged
        } else if (R.h1 == 1 && R.h2 == 2) {
            gain = Trapezoid::band(next.root, 1, 2); // strip gains one level on top
        } else if (!vertical) {
            gain = std::nullopt; // horizontal: root and offsets shift together
        } else if (policy == ExpandPolicy::Down) {
            gain = Trapezoid::band(R.root, R.h2, 2 * R.h2);
            next_vertical = ExpandPolicy::Up;
        } else {
            gain = Trapezoid::band(R.root, R.h1 / 2, R.h1);
            next_vertical = ExpandPolicy::Down;
        }
        out.push_back({next, gain});
    }
    return out;
}

inline std::vector<Trapezoid> exhaustion(const TreeWindow& w, const TrapezoidFamilyConfig& cfg,
                                         VertexId start) {
    std::vector<Trapezoid> chain;
    for (const auto& s : exhaustion_steps(w, cfg, start)) chain.push_back(s.element);
    return chain;
}

/// Partitions D_j of the window, indexed j_min..j_max (j_max = last
/// exhaustion step, j_min = scale at which everything is a singleton).
struct DyadicFamily {
    int j_min = 0, j_max = 0;
    std::vector<std::vector<Trapezoid>> scales; // scales[j - j_min] = D_j
    std::vector<Trapezoid> chain;

    const std::vector<Trapezoid>& scale(int j) const { return scales.at(j - j_min); }

    /// Deduplicated union over all scales.
    std::vector<Trapezoid> all_elements() const {
        std::set<Trapezoid> s;
        for (const auto& sc : scales) s.insert(sc.begin(), sc.end());
        return {s.begin(), s.end()};
    }

    /// Elements that are admissible trapezoids; the dyadic maximal operator
    /// runs over these so that it stays dominated by the full maximal operator.
    std::vector<Trapezoid> admissible_elements(const TrapezoidFamilyConfig& cfg) const {
        std::vector<Trapezoid> out;
        for (const auto& R : all_elements())
            if (admissible(R, cfg)) out.push_back(R);
        return out;
    }
};

namespace detail {
/// All trapezoids with R's parameters rooted at every vertex of the same level.
inline void append_brothers(const TreeWindow& w, const Trapezoid& R, std::vector<Trapezoid>& out) {
    int L = w.level(R.root);
    for (VertexId v = 0; v < w.size(); ++v) {
        if (w.level(v) != L) continue;
        out.push_back(R.singleton ? Trapezoid::make_singleton(v) : Trapezoid::band(v, R.h1, R.h2));
    }
}
inline void strip_levels(const TreeWindow& w, const Trapezoid& R, std::set<int>& levels) {
    if (R.singleton) {
        levels.insert(w.level(R.root));
    } else {
        for (int d = R.h1; d <= R.h2 - 1; ++d) levels.insert(w.level(R.root) - d);
    }
}
} // namespace detail

/// Builds the dyadic partition family from the exhaustion at `start`.
/// Scales j >= 0 use the strip partitions (brothers of R_j and of all later
/// strip increments); window levels never reached by the exhaustion's strips
/// are padded with singletons at every scale. Scales j < 0 apply one
/// decomposition round per step until everything is a singleton.
inline DyadicFamily build_dyadic(const TreeWindow& w, const TrapezoidFamilyConfig& cfg,
                                 VertexId start) {
    auto steps = exhaustion_steps(w, cfg, start);
    DyadicFamily fam;
    fam.j_max = static_cast<int>(steps.size()) - 1;
    for (const auto& s : steps) fam.chain.push_back(s.element);
    // levels the strips ever cover (they only grow along the chain)
    std::set<int> covered;
    detail::strip_levels(w, steps.back().element, covered);
    for (const auto& s : steps)
        if (s.increment) detail::strip_levels(w, *s.increment, covered);
    std::vector<Trapezoid> padding;
    for (VertexId v = 0; v < w.size(); ++v)
        if (!covered.count(w.level(v))) padding.push_back(Trapezoid::make_singleton(v));

    std::vector<std::vector<Trapezoid>> upper(steps.size());
    for (int j = fam.j_max; j >= 0; --j) {
        std::vector<Trapezoid>& D = upper[j];
        detail::append_brothers(w, steps[j].element, D);
        for (int l = j + 1; l <= fam.j_max; ++l)
            if (steps[l].increment) detail::append_brothers(w, *steps[l].increment, D);
        D.insert(D.end(), padding.begin(), padding.end());
        std::sort(D.begin(), D.end());
    }
    // negative scales: decompose elementwise until everything is a singleton
    std::vector<std::vector<Trapezoid>> lower;
    std::vector<Trapezoid> cur = upper[0];
    while (std::any_of(cur.begin(), cur.end(), [](const Trapezoid& R) { return !R.singleton; })) {
        std::vector<Trapezoid> next;
        for (const auto& R : cur) {
            auto parts = decompose(w, R, cfg);
            next.insert(next.end(), parts.begin(), parts.end());
        }
        std::sort(next.begin(), next.end());
        lower.push_back(next);
        cur = std::move(next);
    }
    fam.j_min = -static_cast<int>(lower.size());
    for (auto it = lower.rbegin(); it != lower.rend(); ++it) fam.scales.push_back(std::move(*it));
    for (auto& D : upper) fam.scales.push_back(std::move(D));
    return fam;
}

/// M_D f over the admissible dyadic elements.
inline MaximalReport dyadic_maximal(const FlowMeasure& m, const VertexFunction& f,
                                    const DyadicFamily& fam, const TrapezoidFamilyConfig& cfg) {
    return family_maximal(m, f, fam.admissible_elements(cfg));
}

struct GoodLambdaResult {
    Rat lhs, rhs;
    bool ok;
};

/// m({M_D f > 2 lambda, M# f < gamma lambda}) <= 2 beta Ctilde gamma m({M_D f > lambda}).
inline GoodLambdaResult good_lambda_check(const FlowMeasure& m, const VertexFunction& f,
                                          const DyadicFamily& fam, const Rat& lambda,
                                          const Rat& gamma, const TrapezoidFamilyConfig& cfg) {
    if (lambda <= 0 || gamma <= 0) throw InvalidParams("good_lambda_check: positive parameters required");
    const TreeWindow& w = m.window();
    MaximalReport md = dyadic_maximal(m, f, fam, cfg);
    MaximalReport sharp = sharp_maximal(m, f, cfg);
    Rat lhs = 0, super = 0;
    for (VertexId x = 0; x < w.size(); ++x) {
        if (md.values[x] > lambda) super += m.mass(x);
        if (md.values[x] > 2 * lambda && sharp.values[x] < gamma * lambda) lhs += m.mass(x);
    }
    Rat rhs = 2 * cfg.beta * c_tilde(m, cfg) * gamma * super;
    return {lhs, rhs, lhs <= rhs};
}

/// ||M_D f||_p^p / ||M# f||_p^p, exact.
inline Rat fefferman_stein_ratio(const FlowMeasure& m, const VertexFunction& f,
                                 const DyadicFamily& fam, int p,
                                 const TrapezoidFamilyConfig& cfg) {
    if (p < 1) throw InvalidParams("fefferman_stein_ratio: integer p >= 1 required");
    MaximalReport md = dyadic_maximal(m, f, fam, cfg);
    MaximalReport sharp = sharp_maximal(m, f, cfg);
    Rat num = 0, den = 0;
    for (VertexId x = 0; x < m.window().size(); ++x) {
        num += rat_pow(md.values[x], static_cast<unsigned>(p)) * m.mass(x);
        den += rat_pow(sharp.values[x], static_cast<unsigned>(p)) * m.mass(x);
    }
    if (den == 0) throw SharpVanishes("fefferman_stein_ratio: sharp maximal vanishes");
    return num / den;
}

} // namespace flowtree

#endif
