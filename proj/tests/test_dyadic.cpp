#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace flowtree;
using namespace fttest;

namespace {
const TrapezoidFamilyConfig kCfg{};

std::vector<VertexId> all_vertices(const TreeWindow& w) {
    std::vector<VertexId> out(w.size());
    for (VertexId v = 0; v < w.size(); ++v) out[v] = v;
    return out;
}

bool subset(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool disjoint(const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
    std::vector<VertexId> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    return inter.empty();
}
} // namespace

TEST_CASE("exhaustion chain from a leaf", "[dyadic]") {
    auto f = homogeneous_fixture(2, 4, 0);
    const TreeWindow& w = *f.w;
    VertexId leaf = 0;
    while (!w.is_leaf(leaf)) ++leaf;
    auto chain = exhaustion(w, kCfg, leaf);
    REQUIRE(chain.size() >= 3);
    CHECK(chain[0] == Trapezoid::make_singleton(leaf));
    CHECK(chain[1] == Trapezoid::band(w.parent(leaf), 1, 2));
    CHECK(chain[2] == Trapezoid::band(w.parent(w.parent(leaf)), 1, 3));

    // strictly nested member sets
    for (std::size_t j = 1; j < chain.size(); ++j) {
        auto prev = members(w, chain[j - 1]);
        auto cur = members(w, chain[j]);
        std::sort(prev.begin(), prev.end());
        std::sort(cur.begin(), cur.end());
        REQUIRE(subset(prev, cur));
        REQUIRE(cur.size() > prev.size());
    }

    // the recorded increments are exactly the new strip levels
    auto steps = exhaustion_steps(w, kCfg, leaf);
    std::set<int> seen{w.level(leaf)};
    for (std::size_t j = 1; j < steps.size(); ++j) {
        const Trapezoid& R = steps[j].element;
        std::set<int> now;
        for (int d = R.h1; d < R.h2; ++d) now.insert(w.level(R.root) - d);
        std::set<int> fresh;
        for (int L : now)
            if (!seen.count(L)) fresh.insert(L);
        if (steps[j].increment) {
            const Trapezoid& G = *steps[j].increment;
            std::set<int> gained;
            for (int d = G.h1; d < G.h2; ++d) gained.insert(w.level(G.root) - d);
            REQUIRE(gained == fresh);
        } else {
            REQUIRE(fresh.empty());
        }
        seen.insert(now.begin(), now.end());
    }
}

TEST_CASE("dyadic family structure", "[dyadic]") {
    std::vector<Fixture> fixtures;
    fixtures.push_back(homogeneous_fixture(2, 4, 0));
    fixtures.push_back(random_fixture(3, 31, 5, 0));
    for (const auto& fx : fixtures) {
        const TreeWindow& w = *fx.w;
        REQUIRE(w.size() <= 200);
        VertexId leaf = 0;
        while (!w.is_leaf(leaf)) ++leaf;
        auto fam = build_dyadic(w, kCfg, leaf);
        Rat C = c_tilde(*fx.m, kCfg);
        auto rep = doubling_report(*fx.m);
        auto everyone = all_vertices(w);

        // the finest scale is all singletons
        for (const auto& R : fam.scale(fam.j_min)) REQUIRE(R.singleton);

        // every scale partitions the window
        std::vector<std::vector<std::vector<VertexId>>> mem(fam.scales.size());
        for (int j = fam.j_min; j <= fam.j_max; ++j) {
            REQUIRE(is_partition(w, fam.scale(j), everyone));
            for (const auto& R : fam.scale(j)) {
                auto ms = members(w, R);
                std::sort(ms.begin(), ms.end());
                mem[j - fam.j_min].push_back(std::move(ms));
            }
        }

        for (int j = fam.j_min; j < fam.j_max; ++j) {
            const auto& fine = mem[j - fam.j_min];
            const auto& coarse = mem[j + 1 - fam.j_min];
            const auto& fineR = fam.scale(j);
            const auto& coarseR = fam.scale(j + 1);
            std::vector<std::size_t> child_count(coarse.size(), 0);
            for (std::size_t i = 0; i < fine.size(); ++i) {
                std::size_t parents = 0;
                for (std::size_t k = 0; k < coarse.size(); ++k) {
                    if (subset(fine[i], coarse[k])) {
                        ++parents;
                        ++child_count[k];
                        // the dyadic parent is at most a bounded factor heavier
                        REQUIRE(trapezoid_mass(*fx.m, coarseR[k]) <=
                                C * trapezoid_mass(*fx.m, fineR[i]));
                    } else {
                        REQUIRE(disjoint(fine[i], coarse[k])); // nested or disjoint
                    }
                }
                REQUIRE(parents == 1); // unique dyadic parent
            }
            // children per parent: at most c, with c + 1 allowed exactly for
            // parents shaped like a two-level sons band
            for (std::size_t k = 0; k < coarse.size(); ++k) {
                const Trapezoid& P = coarseR[k];
                bool sons_band13 = !P.singleton && P.h1 == 1 && P.h2 == 3;
                Rat bound = std::max(rep.c_upper, Rat(2)) + (sons_band13 ? 1 : 0);
                REQUIRE(Rat(static_cast<long>(child_count[k])) <= bound);
            }
        }

        // singleton persistence across all scales
        for (int j = fam.j_min + 1; j <= fam.j_max; ++j)
            for (const auto& R : fam.scale(j))
                if (R.singleton) {
                    const auto& below = fam.scale(j - 1);
                    REQUIRE(std::binary_search(below.begin(), below.end(), R));
                }
    }
}

TEST_CASE("dyadic maximal operator", "[dyadic]") {
    auto f = homogeneous_fixture(2, 4, 0);
    const TreeWindow& w = *f.w;
    VertexId leaf = 0;
    while (!w.is_leaf(leaf)) ++leaf;
    auto fam = build_dyadic(w, kCfg, leaf);

    VertexFunction cst(w);
    for (VertexId v = 0; v < w.size(); ++v) cst[v] = Rat(5, 4);
    auto crep = dyadic_maximal(*f.m, cst, fam, kCfg);
    for (VertexId v = 0; v < w.size(); ++v) CHECK(crep.values[v] == Rat(5, 4));

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        VertexFunction g = random_function(w, rng);
        auto dr = dyadic_maximal(*f.m, g, fam, kCfg);
        auto hr = hl_maximal(*f.m, g, kCfg);
        for (VertexId v = 0; v < w.size(); ++v) REQUIRE(dr.values[v] <= hr.values[v]);
        // witnesses come from the family and attain the value
        for (VertexId v = 0; v < w.size(); ++v) {
            REQUIRE(contains_vertex(w, dr.witness[v], v));
            REQUIRE(avg_abs(*f.m, g, dr.witness[v]) == dr.values[v]);
        }
    }
}

TEST_CASE("good lambda inequality", "[dyadic]") {
    auto f = homogeneous_fixture(2, 4, 0);
    const TreeWindow& w = *f.w;
    VertexId leaf = 0;
    while (!w.is_leaf(leaf)) ++leaf;
    auto fam = build_dyadic(w, kCfg, leaf);

    // the structural constant of the inequality on the binary window
    REQUIRE(2 * kCfg.beta * c_tilde(*f.m, kCfg) == 264);

    VertexFunction zero(w);
    auto z = good_lambda_check(*f.m, zero, fam, 1, Rat(1, 264), kCfg);
    CHECK(z.lhs == 0);
    CHECK(z.rhs == 0);
    CHECK(z.ok);

    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        VertexFunction g = random_function(w, rng);
        Rat lambda = random_positive_rat(rng);
        Rat gamma = Rat(1, 264) * random_positive_rat(rng, 4, 2);
        auto res = good_lambda_check(*f.m, g, fam, lambda, gamma, kCfg);
        REQUIRE(res.ok);
        REQUIRE(res.lhs <= res.rhs);
    }
    CHECK_THROWS_AS(good_lambda_check(*f.m, zero, fam, 0, Rat(1, 264), kCfg), InvalidParams);
}

TEST_CASE("norm-comparison ratio", "[dyadic]") {
    auto f = homogeneous_fixture(2, 4, 0);
    const TreeWindow& w = *f.w;
    VertexId leaf = 0;
    while (!w.is_leaf(leaf)) ++leaf;
    auto fam = build_dyadic(w, kCfg, leaf);

    VertexFunction cst(w);
    for (VertexId v = 0; v < w.size(); ++v) cst[v] = 3;
    CHECK_THROWS_AS(fefferman_stein_ratio(*f.m, cst, fam, 2, kCfg), SharpVanishes);

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        VertexFunction g = random_function(w, rng);
        if (g.is_constant()) continue;
        for (int p : {1, 2, 3}) {
            Rat r = fefferman_stein_ratio(*f.m, g, fam, p, kCfg);
            REQUIRE(r >= 0);
        }
    }
    CHECK_THROWS_AS(fefferman_stein_ratio(*f.m, cst, fam, 0, kCfg), InvalidParams);
}
