#ifndef FLOWTREE_GENERATORS_HPP
#define FLOWTREE_GENERATORS_HPP

#include <map>
#include <random>
#include <utility>
#include <vector>

#include "measure.hpp"
#include "tree.hpp"

namespace flowtree {

struct GeneratedTree {
    std::vector<VertexId> parent;
    std::vector<int> level;
    std::map<VertexId, Rat> leaf_mass;

    TreeWindow window() const { return TreeWindow(parent, level); }
};

/// q-ary homogeneous window with unit leaf masses, so m(x) = q^{l(x) - L_bot}.
inline GeneratedTree gen_homogeneous(unsigned q, int top, int bottom) {
    if (q < 1 || top <= bottom) throw InvalidParams("homogeneous: need q >= 1, top > bottom");
    GeneratedTree g;
    g.parent.push_back(kNoVertex);
    g.level.push_back(top);
    std::vector<VertexId> frontier{0};
    for (int lev = top - 1; lev >= bottom; --lev) {
        std::vector<VertexId> next;
        for (VertexId p : frontier)
            for (unsigned i = 0; i < q; ++i) {
                VertexId v = static_cast<VertexId>(g.parent.size());
                g.parent.push_back(p);
                g.level.push_back(lev);
                next.push_back(v);
            }
        frontier = std::move(next);
    }
    for (VertexId v : frontier) g.leaf_mass[v] = 1;
    return g;
}

/// One vertex per level; constant flow.
inline GeneratedTree gen_chain(int top, int bottom, Rat leaf = 1) {
    if (top <= bottom) throw InvalidParams("chain: need top > bottom");
    GeneratedTree g;
    for (int lev = top; lev >= bottom; --lev) {
        g.parent.push_back(lev == top ? kNoVertex : static_cast<VertexId>(g.parent.size() - 1));
        g.level.push_back(lev);
    }
    g.leaf_mass[static_cast<VertexId>(g.parent.size() - 1)] = leaf;
    return g;
}

/// Random window: degrees uniform in 1..max_degree, leaf masses small random
/// positive rationals. Deterministic for a fixed seed.
inline GeneratedTree gen_random(unsigned max_degree, std::uint64_t seed, int top, int bottom) {
    if (max_degree < 1 || top <= bottom) throw InvalidParams("random: bad parameters");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> deg(1, max_degree);
    std::uniform_int_distribution<int> num(1, 12), den(1, 8);
    GeneratedTree g;
    g.parent.push_back(kNoVertex);
    g.level.push_back(top);
    std::vector<VertexId> frontier{0};
    for (int lev = top - 1; lev >= bottom; --lev) {
        std::vector<VertexId> next;
        for (VertexId p : frontier) {
            unsigned d = deg(rng);
            for (unsigned i = 0; i < d; ++i) {
                VertexId v = static_cast<VertexId>(g.parent.size());
                g.parent.push_back(p);
                g.level.push_back(lev);
                next.push_back(v);
            }
        }
        frontier = std::move(next);
    }
    for (VertexId v : frontier) g.leaf_mass[v] = Rat(num(rng), den(rng));
    return g;
}

} // namespace flowtree

#endif
