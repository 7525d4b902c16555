#ifndef FLOWTREE_BMO_HPP
#define FLOWTREE_BMO_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "czd.hpp"
#include "function.hpp"
#include "measure.hpp"
#include "trapezoid.hpp"

namespace flowtree {

inline constexpr int kInfiniteExponent = -1;

/// Trapezoid-supported, mean-zero, size-normalized building block.
struct Atom {
    Trapezoid support{};
    VertexFunction values;
    int p = kInfiniteExponent; // kInfiniteExponent or an integer > 1
};

struct AtomicDecomposition {
    std::vector<Rat> coefficients;
    std::vector<Atom> atoms;
    VertexFunction residual;
    Rat residual_l1;
    std::vector<Rat> residual_l1_history; // after each round, index 0 = input
    Rat coefficient_sum;
};

struct BMOReport {
    int q;
    Rat norm_pow;       // q-th power of the norm, exact
    double norm_double; // binary64 root, informational
    Trapezoid witness{};
};

/// sup over admissible trapezoids of the q-th-power mean oscillation.
inline BMOReport bmo_norm(const FlowMeasure& m, const VertexFunction& f, int q,
                          const TrapezoidFamilyConfig& cfg) {
    if (q < 1) throw InvalidParams("bmo_norm: integer q >= 1 required");
    const TreeWindow& w = m.window();
    BMOReport rep{q, 0, 0.0, Trapezoid::make_singleton(w.apex())};
    for (const Trapezoid& R : enumerate_all(w, cfg)) {
        auto mem = members(w, R);
        Rat mass = trapezoid_mass(m, R);
        Rat avg = m.integral_over(f, mem) / mass;
        Rat osc = 0;
        for (VertexId x : mem) osc += rat_pow(rat_abs(f[x] - avg), static_cast<unsigned>(q)) * m.mass(x);
        osc /= mass;
        if (osc > rep.norm_pow) {
            rep.norm_pow = osc;
            rep.witness = R;
        }
    }
    rep.norm_double = std::pow(rat_to_double(rep.norm_pow), 1.0 / q);
    return rep;
}

/// Exact distribution ratios m({x in R : |f - f_R| > t * ||f||_BMO1}) / m(R).
inline std::vector<std::pair<Rat, Rat>> jn_distribution(const FlowMeasure& m,
                                                        const VertexFunction& f,
                                                        const Trapezoid& R,
                                                        const std::vector<Rat>& t_grid,
                                                        const TrapezoidFamilyConfig& cfg) {
    if (f.is_constant()) throw ConstantFunction("jn_distribution: f is constant");
    const TreeWindow& w = m.window();
    Rat bmo1 = bmo_norm(m, f, 1, cfg).norm_pow;
    auto mem = members(w, R);
    Rat mass = trapezoid_mass(m, R);
    Rat avg = m.integral_over(f, mem) / mass;
    std::vector<std::pair<Rat, Rat>> out;
    for (const Rat& t : t_grid) {
        Rat super = 0;
        for (VertexId x : mem)
            if (rat_abs(f[x] - avg) > t * bmo1) super += m.mass(x);
        out.emplace_back(t, super / mass);
    }
    return out;
}

struct JNFit {
    double eta = 0.0;
    double A = 1.0;
    bool degenerate = false;
    std::size_t points = 0;
};

/// Empirical exponential-decay fit: every sampled (t, ratio) point satisfies
/// ratio <= A * exp(-eta * t) for the returned pair (A inflated as needed).
inline JNFit jn_fit(const FlowMeasure& m, const std::vector<VertexFunction>& corpus,
                    const std::vector<Rat>& t_grid, const TrapezoidFamilyConfig& cfg) {
    if (corpus.empty()) throw EmptyCorpus("jn_fit: empty corpus");
    const TreeWindow& w = m.window();
    auto all = enumerate_all(w, cfg);
    std::vector<std::pair<double, double>> pts; // (t, log ratio)
    for (const auto& f : corpus) {
        if (f.is_constant()) continue;
        Rat bmo1 = bmo_norm(m, f, 1, cfg).norm_pow;
        for (const Trapezoid& R : all) {
            auto mem = members(w, R);
            Rat mass = trapezoid_mass(m, R);
            Rat avg = m.integral_over(f, mem) / mass;
            for (const Rat& t : t_grid) {
                Rat super = 0;
                for (VertexId x : mem)
                    if (rat_abs(f[x] - avg) > t * bmo1) super += m.mass(x);
                if (super > 0)
                    pts.emplace_back(rat_to_double(t), std::log(rat_to_double(super / mass)));
            }
        }
    }
    JNFit fit;
    fit.points = pts.size();
    if (pts.empty()) {
        fit.degenerate = true;
        return fit;
    }
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    double slope = denom == 0 ? 0.0 : (n * sxy - sx * sy) / denom;
    fit.eta = -slope;
    if (fit.eta <= 0) {
        fit.eta = 0;
        fit.degenerate = true;
    }
    double logA = -1e300;
    for (auto [x, y] : pts) logA = std::max(logA, y + fit.eta * x);
    fit.A = std::max(1.0, std::exp(logA) * (1 + 1e-9));
    return fit;
}

/// Checks support, vanishing integral, and the size normalization exactly.
inline bool validate_atom(const FlowMeasure& m, const Atom& a) {
    const TreeWindow& w = m.window();
    auto mem = members(w, a.support);
    std::vector<bool> in(w.size(), false);
    for (VertexId x : mem) in[x] = true;
    for (VertexId x = 0; x < w.size(); ++x)
        if (!in[x] && a.values[x] != 0) return false;
    if (m.integral(a.values) != 0) return false;
    Rat mass = trapezoid_mass(m, a.support);
    if (a.p == kInfiniteExponent) return a.values.max_abs() * mass <= 1;
    if (a.p < 2) throw NonIntegerExponent("validate_atom: integer p >= 2 or infinity required");
    // ||a||_p <= m(R)^{1/p - 1}, tested as (sum |a|^p m) * m(R)^{p-1} <= 1
    Rat lp = m.lp_norm_pow(a.values, static_cast<unsigned>(a.p));
    return lp * rat_pow(mass, static_cast<unsigned>(a.p - 1)) <= 1;
}

/// Rewrites a (1,p)-atom as a combination of (1,infinity)-atoms by iterating
/// the stopping-set construction on |f|^p at geometrically growing thresholds.
inline AtomicDecomposition atom_upgrade(const FlowMeasure& m, const Atom& a, const Rat& alpha,
                                        int n_max, const TrapezoidFamilyConfig& cfg) {
    if (a.p == kInfiniteExponent || a.p < 2)
        throw NonIntegerExponent("atom_upgrade: finite integer p >= 2 required");
    const unsigned p = static_cast<unsigned>(a.p);
    const Rat C = c_tilde(m, cfg);
    // alpha > 2^{p/(p-1)} and alpha > 2 C^{1/p}, certified in power form
    if (!(rat_pow(alpha, p - 1) > rat_pow(Rat(2), p) && rat_pow(alpha, p) > rat_pow(Rat(2), p) * C))
        throw AlphaTooSmall("atom_upgrade: alpha fails the power-form lower bounds");
    const TreeWindow& w = m.window();
    AtomicDecomposition out{{}, {}, VertexFunction(w), 0, {}, 0};
    // b = m(Q) a  (so the final certificate is ||a||-normalized by m(Q))
    VertexFunction b = a.values;
    b *= trapezoid_mass(m, a.support);
    std::vector<std::pair<Trapezoid, VertexFunction>> level{{a.support, b}};
    out.residual_l1_history.push_back(m.l1_norm(b));
    for (int round = 0; round < n_max && !level.empty(); ++round) {
        Rat threshold = rat_pow(alpha, p * static_cast<unsigned>(round + 1));
        std::vector<std::pair<Trapezoid, VertexFunction>> next;
        for (auto& [R, fj] : level) {
            if (fj.is_zero()) continue;
            auto fam = stopping_sets(m, fj.pow(p), R, threshold, cfg);
            VertexFunction g = fj;
            for (const auto& E : fam.sets) {
                auto mem = members(w, E);
                Rat avg = m.integral_over(fj, mem) / trapezoid_mass(m, E);
                VertexFunction piece(w);
                for (VertexId x : mem) {
                    piece[x] = fj[x] - avg;
                    g[x] = avg;
                }
                next.emplace_back(E, std::move(piece));
            }
            Rat sup = g.max_abs();
            if (sup == 0) continue;
            Rat lambda = sup * trapezoid_mass(m, R);
            VertexFunction av = g;
            av *= Rat(1) / lambda;
            out.coefficients.push_back(lambda);
            out.coefficient_sum += lambda;
            out.atoms.push_back(Atom{R, std::move(av), kInfiniteExponent});
        }
        level = std::move(next);
        Rat rl1 = 0;
        for (const auto& [R, fj] : level) rl1 += m.l1_norm(fj);
        out.residual_l1_history.push_back(rl1);
    }
    for (const auto& [R, fj] : level) out.residual += fj;
    out.residual_l1 = m.l1_norm(out.residual);
    return out;
}

/// Splits a (1,infinity)-atom admissible for beta' but not for beta into two
/// beta-admissible pieces: phi_i = a chi_{R_i} - (1/m(T)) (integral of
/// a chi_{R_i}) chi_T, each phi_i/2 again an atom.
inline std::vector<std::pair<Rat, Atom>> atom_rebase(const FlowMeasure& m, const Atom& a,
                                                     const TrapezoidFamilyConfig& cfg,
                                                     int beta_prime) {
    if (a.support.singleton) throw NotRebaseNeeded("singleton support is always admissible");
    if (admissible(a.support, cfg)) throw NotRebaseNeeded("support already admissible");
    const int beta = cfg.beta;
    if (!(beta < beta_prime && beta_prime <= 2 * beta))
        throw InvalidParams("atom_rebase: need beta < beta' <= 2 beta");
    const int h1 = a.support.h1, h2 = a.support.h2;
    if (!(2 * h1 <= h2 && h2 <= beta_prime * h1))
        throw InvalidParams("atom_rebase: support not admissible for beta'");
    const TreeWindow& w = m.window();
    const VertexId x0 = a.support.root;
    Trapezoid R1 = Trapezoid::band(x0, h1, 2 * h1);
    Trapezoid R2 = Trapezoid::band(x0, 2 * h1, h2);
    Trapezoid T = Trapezoid::band(x0, 2 * h1, 4 * h1);
    Trapezoid T1 = Trapezoid::band(x0, h1, 4 * h1);
    Rat mT = trapezoid_mass(m, T);
    auto memT = members(w, T);
    std::vector<std::pair<Rat, Atom>> out;
    for (int i = 0; i < 2; ++i) {
        const Trapezoid& Ri = i == 0 ? R1 : R2;
        const Trapezoid& Ti = i == 0 ? T1 : R2;
        VertexFunction phi(w);
        Rat integ = 0;
        for (VertexId x : members(w, Ri)) {
            phi[x] = a.values[x];
            integ += a.values[x] * m.mass(x);
        }
        for (VertexId x : memT) phi[x] -= integ / mT;
        phi *= Rat(1, 2);
        out.emplace_back(Rat(2), Atom{Ti, std::move(phi), kInfiniteExponent});
    }
    return out;
}

/// Exact pairing integral of f against an atom; bounded by ||f||_BMO1.
inline Rat duality_pairing(const FlowMeasure& m, const VertexFunction& f, const Atom& a) {
    Rat s = 0;
    for (VertexId x = 0; x < m.window().size(); ++x) s += f[x] * a.values[x] * m.mass(x);
    return s;
}

} // namespace flowtree

#endif
