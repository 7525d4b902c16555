#ifndef FLOWTREE_TESTS_HELPERS_HPP
#define FLOWTREE_TESTS_HELPERS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include <flowtree/flowtree.hpp>

namespace fttest {

using flowtree::FlowMeasure;
using flowtree::Rat;
using flowtree::Trapezoid;
using flowtree::TrapezoidFamilyConfig;
using flowtree::TreeWindow;
using flowtree::VertexFunction;
using flowtree::VertexId;

/// Owning window + measure pair (the measure references the window).
struct Fixture {
    std::unique_ptr<TreeWindow> w;
    std::unique_ptr<FlowMeasure> m;
};

inline Fixture fixture_from(const flowtree::GeneratedTree& g) {
    Fixture f;
    f.w = std::make_unique<TreeWindow>(g.window());
    f.m = std::make_unique<FlowMeasure>(FlowMeasure::from_leaf_masses(*f.w, g.leaf_mass));
    return f;
}

inline Fixture homogeneous_fixture(unsigned q, int top, int bottom) {
    return fixture_from(flowtree::gen_homogeneous(q, top, bottom));
}
inline Fixture chain_fixture(int top, int bottom, Rat leaf = 1) {
    return fixture_from(flowtree::gen_chain(top, bottom, std::move(leaf)));
}
inline Fixture random_fixture(unsigned max_degree, std::uint64_t seed, int top, int bottom) {
    return fixture_from(flowtree::gen_random(max_degree, seed, top, bottom));
}

/// Breadth-first search distance on the undirected edge set; independent of
/// the confluent-based formula.
inline int bfs_distance(const TreeWindow& w, VertexId a, VertexId b) {
    if (a == b) return 0;
    std::vector<std::vector<VertexId>> adj(w.size());
    for (VertexId v = 0; v < w.size(); ++v)
        if (v != w.apex()) {
            adj[v].push_back(w.parent(v));
            adj[w.parent(v)].push_back(v);
        }
    std::vector<int> dist(w.size(), -1);
    std::queue<VertexId> q;
    dist[a] = 0;
    q.push(a);
    while (!q.empty()) {
        VertexId v = q.front();
        q.pop();
        if (v == b) return dist[v];
        for (VertexId u : adj[v])
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                q.push(u);
            }
    }
    return -1;
}

/// Trapezoid members computed by a per-vertex ancestor walk (independent of
/// the descendant-slice implementation).
inline std::vector<VertexId> members_oracle(const TreeWindow& w, const Trapezoid& R) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < w.size(); ++v) {
        if (R.singleton) {
            if (v == R.root) out.push_back(v);
            continue;
        }
        int d = w.level(R.root) - w.level(v);
        if (d < R.h1 || d > R.h2 - 1) continue;
        VertexId u = v;
        for (int k = 0; k < d; ++k) u = w.parent(u);
        if (u == R.root) out.push_back(v);
    }
    return out;
}

inline Rat set_sum(const FlowMeasure& m, const std::vector<VertexId>& vs) {
    Rat s = 0;
    for (VertexId v : vs) s += m.mass(v);
    return s;
}

inline Rat avg_abs(const FlowMeasure& m, const VertexFunction& f, const Trapezoid& R) {
    auto mem = flowtree::members(m.window(), R);
    Rat s = 0;
    for (VertexId x : mem) s += flowtree::rat_abs(f[x]) * m.mass(x);
    return s / flowtree::trapezoid_mass(m, R);
}

/// Seeded random function with small rational values; roughly `density_pct`
/// percent of the vertices get a nonzero value.
inline VertexFunction random_function(const TreeWindow& w, std::mt19937_64& rng,
                                      int density_pct = 60) {
    std::uniform_int_distribution<int> pct(0, 99), num(-9, 9), den(1, 6);
    VertexFunction f(w);
    for (VertexId v = 0; v < w.size(); ++v)
        if (pct(rng) < density_pct) f[v] = Rat(num(rng), den(rng));
    return f;
}

inline Rat random_positive_rat(std::mt19937_64& rng, int max_num = 8, int max_den = 8) {
    std::uniform_int_distribution<int> num(1, max_num), den(1, max_den);
    return Rat(num(rng), den(rng));
}

/// True iff `parts` are pairwise disjoint and their union equals `expected`.
inline bool is_partition(const TreeWindow& w, const std::vector<Trapezoid>& parts,
                         std::vector<VertexId> expected) {
    std::sort(expected.begin(), expected.end());
    std::vector<VertexId> got;
    for (const auto& P : parts) {
        auto mem = flowtree::members(w, P);
        got.insert(got.end(), mem.begin(), mem.end());
    }
    std::sort(got.begin(), got.end());
    // `expected` is duplicate-free, so equality implies disjointness + coverage
    return got == expected;
}

/// Mean-zero function on the members of R scaled to sup norm exactly
/// 1/m(R): a valid unbounded-exponent atom. Returns a zero atom when the
/// random values come out constant on R.
inline flowtree::Atom random_atom(const FlowMeasure& m, const Trapezoid& R,
                                  std::mt19937_64& rng) {
    const TreeWindow& w = m.window();
    auto mem = flowtree::members(w, R);
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    VertexFunction a(w);
    for (VertexId x : mem) a[x] = Rat(num(rng), den(rng));
    Rat mass = flowtree::trapezoid_mass(m, R);
    Rat avg = m.integral_over(a, mem) / mass;
    for (VertexId x : mem) a[x] -= avg;
    Rat sup = a.max_abs();
    if (sup != 0) a *= Rat(1) / (sup * mass);
    return flowtree::Atom{R, std::move(a), flowtree::kInfiniteExponent};
}

} // namespace fttest

#endif
