#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace flowtree;
using namespace fttest;

namespace {
const TrapezoidFamilyConfig kCfg{};

VertexId first_leaf(const TreeWindow& w) {
    VertexId v = 0;
    while (!w.is_leaf(v)) ++v;
    return v;
}

/// Picks a threshold for which the apex-band covering succeeds: any value
/// above ||f||_1 / m(apex) works on windows of height <= beta - 1.
Rat safe_alpha(const FlowMeasure& m, const VertexFunction& f, const Rat& slack) {
    Rat q = m.l1_norm(f) / m.total_mass();
    Rat a = slack;
    while (a <= q) a *= 2;
    return a;
}
} // namespace

TEST_CASE("stopping sets", "[czd]") {
    auto f = homogeneous_fixture(2, 4, 0);
    const TreeWindow& w = *f.w;
    VertexId leaf = first_leaf(w);
    VertexId parent = w.parent(leaf);

    VertexFunction zero(w);
    auto empty = stopping_sets(*f.m, zero, Trapezoid::band(w.apex(), 1, 3), 1, kCfg);
    CHECK(empty.sets.empty());
    CHECK(empty.complement_ok);

    // indicator of a unit-mass leaf over the sons-band of its parent
    VertexFunction ind(w);
    ind[leaf] = 1;
    Trapezoid base = Trapezoid::band(parent, 1, 2);
    REQUIRE(trapezoid_mass(*f.m, base) == 2);
    auto fam = stopping_sets(*f.m, ind, base, Rat(3, 4), kCfg);
    REQUIRE(fam.sets.size() == 1);
    CHECK(fam.sets[0] == Trapezoid::make_singleton(leaf));
    CHECK(fam.complement_ok);

    CHECK_THROWS_AS(stopping_sets(*f.m, ind, base, Rat(1, 4), kCfg), PreconditionViolated);
}

TEST_CASE("stopping sets satisfy the three bounds", "[czd]") {
    auto r = random_fixture(3, 61, 5, 0);
    const TreeWindow& w = *r.w;
    Rat C = c_tilde(*r.m, kCfg);
    std::mt19937_64 rng(11);
    int done = 0;
    for (int trial = 0; trial < 60 && done < 30; ++trial) {
        VertexFunction g = random_function(w, rng);
        Trapezoid base = Trapezoid::band(w.apex(), 1, 1 + w.height());
        Rat alpha = random_positive_rat(rng, 6, 2);
        if (avg_abs(*r.m, g, base) >= alpha) continue;
        ++done;
        auto fam = stopping_sets(*r.m, g, base, alpha, kCfg);
        std::vector<VertexId> covered;
        for (const auto& E : fam.sets) {
            Rat a = avg_abs(*r.m, g, E);
            REQUIRE(a >= alpha);        // (declared late enough)
            REQUIRE(a < C * alpha);     // (parent average was below alpha)
            auto mem = members(w, E);
            covered.insert(covered.end(), mem.begin(), mem.end());
            // nested inside the base
            for (VertexId x : mem) REQUIRE(contains_vertex(w, base, x));
        }
        // pairwise disjoint
        std::sort(covered.begin(), covered.end());
        REQUIRE(std::adjacent_find(covered.begin(), covered.end()) == covered.end());
        REQUIRE(fam.complement_ok); // |f| < alpha off the union
    }
    REQUIRE(done >= 20);
}

TEST_CASE("sigma partition", "[czd]") {
    auto f = homogeneous_fixture(2, 5, 0);
    const TreeWindow& w = *f.w;
    Rat total = f.m->total_mass();

    // single deep leaf with a small threshold
    VertexId leaf = first_leaf(w);
    auto one = sigma_partition(*f.m, {leaf}, Rat(1, 2), kCfg);
    REQUIRE_FALSE(one.empty());
    for (const auto& R : one) REQUIRE(trapezoid_mass(*f.m, R) > Rat(1, 2));

    // all vertices at least two levels below the apex, sigma = m(apex)/2
    std::vector<VertexId> deep;
    for (VertexId v = 0; v < w.size(); ++v)
        if (w.level(v) <= w.top_level() - 2) deep.push_back(v);
    auto parts = sigma_partition(*f.m, deep, total / 2, kCfg);
    std::vector<bool> hit(w.size(), false);
    for (const auto& R : parts) {
        REQUIRE(admissible(R, kCfg));
        REQUIRE(trapezoid_mass(*f.m, R) > total / 2);
        for (VertexId x : members(w, R)) {
            REQUIRE_FALSE(hit[x]); // disjoint
            hit[x] = true;
        }
    }
    for (VertexId v : deep) REQUIRE(hit[v]);

    // impossible threshold
    CHECK_THROWS_AS(sigma_partition(*f.m, {leaf}, total * w.height(), kCfg), WindowTooSmall);

    // the certificate names a support vertex no fat-enough trapezoid contains
    try {
        sigma_partition(*f.m, {leaf}, total * w.height(), kCfg);
        FAIL("expected WindowTooSmall");
    } catch (const WindowTooSmall& e) {
        VertexId cert = e.certificate;
        for (const Trapezoid& R : enumerate_containing(w, cert, kCfg))
            REQUIRE(trapezoid_mass(*f.m, R) <= total * w.height());
    }
}

TEST_CASE("calderon-zygmund decomposition", "[czd]") {
    auto f = homogeneous_fixture(2, 6, 0);
    const TreeWindow& w = *f.w;

    VertexFunction zero(w);
    auto cz0 = cz_decompose(*f.m, zero, 1, kCfg);
    CHECK(cz0.good.is_zero());
    CHECK(cz0.bad.empty());

    // indicator of a unit-mass leaf: ||f||_1 = 1, alpha = 1/4
    VertexId leaf = first_leaf(w);
    VertexFunction ind(w);
    ind[leaf] = 1;
    auto cz = cz_decompose(*f.m, ind, Rat(1, 4), kCfg);
    Rat C = cz.c_tilde_value;
    REQUIRE(C == c_tilde(*f.m, kCfg));
    // reconstruction and the four bounds
    VertexFunction rec = cz.good;
    Rat bad_mass = 0;
    for (const auto& [E, b] : cz.bad) {
        rec += b;
        auto mem = members(w, E);
        std::vector<bool> in(w.size(), false);
        for (VertexId x : mem) in[x] = true;
        for (VertexId x = 0; x < w.size(); ++x)
            if (!in[x]) REQUIRE(b[x] == 0);
        REQUIRE(f.m->integral_over(b, mem) == 0);
        REQUIRE(f.m->l1_norm(b) <= 2 * C * Rat(1, 4) * trapezoid_mass(*f.m, E));
        bad_mass += trapezoid_mass(*f.m, E);
    }
    REQUIRE(rec == ind);
    for (VertexId x = 0; x < w.size(); ++x) REQUIRE(rat_abs(cz.good[x]) <= C * Rat(1, 4));
    REQUIRE(bad_mass <= f.m->l1_norm(ind) / Rat(1, 4));

    // a large threshold leaves f untouched
    auto czbig = cz_decompose(*f.m, ind, 4, kCfg);
    CHECK(czbig.bad.empty());
    CHECK(czbig.good == ind);
}

TEST_CASE("calderon-zygmund randomized suite", "[czd]") {
    std::mt19937_64 rng(12);
    for (std::uint64_t seed : {71, 72, 73}) {
        auto r = random_fixture(3, seed, 5, 0);
        const TreeWindow& w = *r.w;
        Rat C = c_tilde(*r.m, kCfg);
        for (int trial = 0; trial < 10; ++trial) {
            VertexFunction g = random_function(w, rng);
            Rat alpha = safe_alpha(*r.m, g, random_positive_rat(rng));
            auto cz = cz_decompose(*r.m, g, alpha, kCfg);
            VertexFunction rec = cz.good;
            Rat bad_mass = 0;
            for (const auto& [E, b] : cz.bad) {
                rec += b;
                REQUIRE(r.m->integral_over(b, members(w, E)) == 0);
                REQUIRE(r.m->l1_norm(b) <= 2 * C * alpha * trapezoid_mass(*r.m, E));
                bad_mass += trapezoid_mass(*r.m, E);
            }
            REQUIRE(rec == g);
            for (VertexId x = 0; x < w.size(); ++x) REQUIRE(rat_abs(cz.good[x]) <= C * alpha);
            REQUIRE(bad_mass * alpha <= r.m->l1_norm(g));
        }
    }
}

TEST_CASE("interpolation split", "[czd]") {
    auto f = homogeneous_fixture(2, 6, 0);
    const TreeWindow& w = *f.w;
    Rat C = c_tilde(*f.m, kCfg);

    VertexFunction zero(w);
    auto s0 = interpolation_split(*f.m, zero, 1, 2, kCfg);
    CHECK(s0.bad.empty());
    CHECK(s0.h1_bound == 0);

    VertexId leaf = first_leaf(w);
    VertexFunction ind(w);
    ind[leaf] = 1;

    // large lambda: nothing to split
    auto sbig = interpolation_split(*f.m, ind, 8, 2, kCfg);
    CHECK(sbig.bad.empty());
    CHECK(sbig.good == ind);

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        VertexFunction g = random_function(w, rng, 40);
        const int p = 2;
        Rat q = f.m->lp_norm_pow(g, p) / f.m->total_mass();
        Rat lambda = Rat(1, 4);
        while (rat_pow(lambda, p) <= q) lambda *= 2;
        auto sp = interpolation_split(*f.m, g, lambda, p, kCfg);
        VertexFunction rec = sp.good;
        Rat piece_mass = 0;
        for (const auto& [R, b] : sp.bad) {
            rec += b;
            piece_mass += trapezoid_mass(*f.m, R);
        }
        REQUIRE(rec == g);
        REQUIRE(rat_pow(sp.good.max_abs(), p) <= C * rat_pow(lambda, p));
        REQUIRE(piece_mass * rat_pow(lambda, p) <= f.m->lp_norm_pow(g, p));
        REQUIRE(sp.h1_bound == lambda * piece_mass);
    }

    CHECK_THROWS_AS(interpolation_split(*f.m, ind, 1, 1, kCfg), NonIntegerExponent);
}
