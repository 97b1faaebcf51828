#include <map>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "rdsphere/errors.hpp"
#include "rdsphere/rds.hpp"

using namespace rdsphere;
using testing_helpers::random_map;

namespace {

BaseSystem z2_z3(std::uint64_t seed) {
    return BaseSystem::iid({{RationalMap::power(2), Potential::constant(0), 0.5, "z2"},
                            {RationalMap::power(3), Potential::constant(0), 0.5, "z3"}},
                           seed);
}

}  // namespace

TEST_CASE("potential kinds") {
    CHECK(Potential::constant(0.3)(SpherePoint(2.0)) == 0.3);
    CHECK(Potential::constant(0.3)(SpherePoint::infinity()) == 0.3);
    auto lin = Potential::linear(0.5, Vec3{0, 0, 1});
    // The north pole (infinity) has height 1, zero has height -1.
    CHECK(lin(SpherePoint::infinity()) == doctest::Approx(0.5));
    CHECK(lin(SpherePoint(0.0)) == doctest::Approx(-0.5));
    CHECK(lin(SpherePoint(1.0)) == doctest::Approx(0.0));

    auto T = RationalMap::power(2);
    auto lr = Potential::log_ratio(0.7, T);
    for (double r : {0.3, 1.0, 2.5}) {
        cplx z = std::polar(r, 0.4);
        double direct = 0.7 * std::log((1 + std::norm(z)) / (1 + std::norm(z * z)));
        CHECK(lr(SpherePoint(z)) == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK_THROWS_AS(lr(SpherePoint::infinity()), NumericalError);

    auto g = Grid::lattice(500);
    auto tab = Potential::tabulated(GridFunction::sample(g, lin));
    for (std::size_t i = 0; i < g->size(); i += 37) CHECK(tab(g->point(i)) == lin(g->point(i)));

    auto back = Potential::parse(lin.describe(), T);
    CHECK(back.kind() == Potential::Kind::Linear);
    CHECK(back(SpherePoint(0.3, 0.2)) == lin(SpherePoint(0.3, 0.2)));
    CHECK(Potential::parse("constant -1.5", T).constant_value() == -1.5);
    CHECK_THROWS_AS(Potential::parse("wavy 1", T), PreconditionError);
}

TEST_CASE("Holder seminorm bound of the linear form holds on random pairs") {
    std::mt19937_64 rng(3);
    for (double alpha : {0.25, 0.5, 1.0}) {
        auto lin = Potential::linear(0.8, Vec3{0.3, -0.5, 0.2});
        double bound = lin.holder_seminorm(alpha);
        for (int t = 0; t < 2000; ++t) {
            cplx a = oracle::uniform_sphere(rng), b = oracle::uniform_sphere(rng);
            double d = oracle::dist(a, b);
            if (d == 0) continue;
            CHECK(std::abs(lin(SpherePoint(a)) - lin(SpherePoint(b))) <= bound * std::pow(d, alpha) * (1 + 1e-12));
        }
    }
    CHECK(Potential::constant(4).holder_seminorm(0.5) == 0);
}

TEST_CASE("sample_sequence examples") {
    auto sys = BaseSystem::constant(RationalMap::power(2));
    auto seq = sample_sequence(sys, 0, 5);
    CHECK(seq.size() == 6);
    for (long long j = 0; j <= 5; ++j) CHECK(seq.map(j).degree() == 2);
    CHECK_THROWS_AS(seq.map(6), PreconditionError);
    CHECK_THROWS_AS(sample_sequence(sys, 3, 2), PreconditionError);
    CHECK_THROWS_AS(BaseSystem::iid({}, 1), PreconditionError);
    CHECK_THROWS_AS(BaseSystem::explicit_sequence({}), PreconditionError);
    CHECK_THROWS_AS(BaseSystem::iid({{RationalMap::power(2), Potential::constant(0), 0.7, "a"}}, 1),
                    PreconditionError);

    auto r = z2_z3(42);
    auto s = sample_sequence(r, 0, 9999);
    int twos = 0;
    for (long long j = 0; j < 10000; ++j) twos += s.map(j).degree() == 2;
    CHECK(std::abs(twos / 1e4 - 0.5) < 0.02);

    auto s2 = sample_sequence(z2_z3(42), 0, 9999);
    auto s3 = sample_sequence(z2_z3(43), 0, 9999);
    int same = 0, diff = 0;
    for (long long j = 0; j < 10000; ++j) {
        same += s.map(j).degree() == s2.map(j).degree();
        diff += s.map(j).degree() != s3.map(j).degree();
    }
    CHECK(same == 10000);
    CHECK(diff > 4000);

    // Two-sided and addressable: an overlapping window reproduces the same entries.
    auto w = sample_sequence(r, -50, 20);
    for (long long j = 0; j <= 20; ++j) CHECK(w.map(j).degree() == s.map(j).degree());
}

TEST_CASE("explicit sequences cycle") {
    auto sys = BaseSystem::explicit_sequence({{RationalMap::power(2), Potential::constant(0), 1, "a"},
                                              {RationalMap::power(3), Potential::constant(0), 1, "b"},
                                              {RationalMap::power(4), Potential::constant(0), 1, "c"}});
    auto seq = sample_sequence(sys, -4, 4);
    for (long long j = -4; j <= 4; ++j) CHECK(seq.map(j).degree() == 2 + int(((j % 3) + 3) % 3));
}

TEST_CASE("window statistics are identical across offsets") {
    // Chi-square homogeneity test over 20 windows of 500 draws for three weighted maps;
    // 38 degrees of freedom, upper 1% point 61.16.
    auto sys = BaseSystem::iid({{RationalMap::power(2), Potential::constant(0), 0.5, "a"},
                                {RationalMap::power(3), Potential::constant(0), 0.3, "b"},
                                {RationalMap::power(4), Potential::constant(0), 0.2, "c"}},
                               7);
    const int W = 20, K = 500;
    std::vector<std::array<double, 3>> counts(W, {0, 0, 0});
    std::array<double, 3> total{0, 0, 0};
    for (int w = 0; w < W; ++w) {
        long long m = (w - 10) * 100003LL;
        for (long long j = m; j < m + K; ++j) {
            auto i = sys.index_at(j);
            counts[w][i] += 1;
            total[i] += 1;
        }
    }
    double chi2 = 0;
    for (int w = 0; w < W; ++w)
        for (int i = 0; i < 3; ++i) {
            double e = total[i] / W;
            chi2 += (counts[w][i] - e) * (counts[w][i] - e) / e;
        }
    CHECK(chi2 < 61.16);
}

TEST_CASE("pseudo_iterate examples") {
    auto seq = sample_sequence(BaseSystem::constant(RationalMap::power(2)), 0, 10);
    auto t = pseudo_iterate(seq, 3, SpherePoint(2.0));
    REQUIRE(t.points.size() == 4);
    CHECK(t.points.back().value() == cplx(256.0));
    auto t0 = pseudo_iterate(seq, 0, SpherePoint(0.3));
    CHECK(t0.points.size() == 1);
    CHECK(t0.derivatives[0] == 1.0);
    auto tc = pseudo_iterate(seq, 8, SpherePoint(std::polar(1.0, 0.7)));
    for (int n = 0; n <= 8; ++n) CHECK(tc.derivatives[n] == doctest::Approx(std::pow(2.0, n)).epsilon(1e-12));
}

TEST_CASE("pseudo_iterate agrees with the composed map") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<RationalMap> maps;
        std::vector<Potential> pots;
        int n = 1 + int(rng() % 5);
        for (int j = 0; j < n; ++j) {
            // Degree 2 keeps the composite at most 32.
            maps.push_back(random_map(rng, 2, 2));
            pots.push_back(Potential::constant(0));
        }
        StepSequence seq(0, maps, pots);
        RationalMap comp = maps[0];
        for (int j = 1; j < n; ++j) comp = compose(comp, maps[j]);
        SpherePoint x(oracle::uniform_sphere(rng));
        auto t = pseudo_iterate(seq, n, x);
        CHECK(dist_s(t.points.back(), comp.eval(x)) < 1e-6);
        // The conformal scale factor by a difference quotient along the chain of maps
        // (the degree-32 composite's own coefficients lose a few digits).
        auto chain = [&](SpherePoint p) {
            for (int j = 0; j < n; ++j) p = maps[j].eval(p);
            return p;
        };
        const double h = 1e-7;
        double quotient = dist_s(chain(x), chain(geodesic_point(x, h, 0.3))) / h;
        CHECK(t.derivatives.back() == doctest::Approx(quotient).epsilon(1e-5));
    }
}

TEST_CASE("birkhoff sums") {
    auto seq = sample_sequence(BaseSystem::constant(RationalMap::power(2), Potential::constant(0.25)), 0, 20);
    CHECK(birkhoff_sum(seq, 0, 8, SpherePoint(0.4)) == doctest::Approx(8 * 0.25));
    auto zero = sample_sequence(BaseSystem::constant(RationalMap::power(3)), 0, 20);
    CHECK(birkhoff_sum(zero, 0, 8, SpherePoint(0.4)) == 0.0);
    CHECK(birkhoff_sum(zero, 3, 3, SpherePoint(0.4)) == 0.0);

    // Additive cocycle on random data, the right side evaluated independently.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RationalMap> maps;
        std::vector<Potential> pots;
        for (int j = 0; j < 8; ++j) {
            maps.push_back(random_map(rng, 3));
            pots.push_back(Potential::linear(u(rng), Vec3{u(rng), u(rng), u(rng)}));
        }
        StepSequence seq(0, maps, pots);
        int m = int(rng() % 4), n = int(rng() % 4);
        SpherePoint x(oracle::uniform_sphere(rng));
        double lhs = birkhoff_sum(seq, 0, m + n, x);
        SpherePoint y = x;
        double direct = 0;
        for (int j = 0; j < m; ++j) {
            direct += pots[j](y);
            y = maps[j].eval(y);
        }
        double rhs = direct + birkhoff_sum(seq, m, m + n, y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("julia_flag examples") {
    auto z2 = sample_sequence(BaseSystem::constant(RationalMap::power(2)), 0, 40);
    CHECK(julia_flag(z2, SpherePoint(std::polar(1.0, 1.234)), 0.01, 1e3, 30));
    CHECK_FALSE(julia_flag(z2, SpherePoint(0.0), 0.01, 1e3, 30));
    CHECK_FALSE(julia_flag(z2, SpherePoint::infinity(), 0.01, 1e3, 30));

    auto rot = sample_sequence(BaseSystem::constant(RationalMap::mobius(cplx(0, 1), 0, 0, 1)), 0, 40);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) CHECK_FALSE(julia_flag(rot, SpherePoint(oracle::uniform_sphere(rng)), 0.05, 2.0, 30));

    CHECK_THROWS_AS(julia_flag(z2, SpherePoint(1.0), 0.0, 10, 5), PreconditionError);
    CHECK_THROWS_AS(julia_flag(z2, SpherePoint(1.0), 0.1, 1.0, 5), PreconditionError);
}

TEST_CASE("julia_flag is monotone in the horizon and the threshold") {
    auto sys = BaseSystem::iid({{RationalMap::quadratic(cplx(-0.12, 0.75)), Potential::constant(0), 0.5, "a"},
                                {RationalMap::quadratic(cplx(0.25, 0.0)), Potential::constant(0), 0.5, "b"}},
                               19);
    auto seq = sample_sequence(sys, 0, 40);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 60; ++t) {
        SpherePoint x(oracle::uniform_sphere(rng));
        bool prev = false;
        for (int n = 1; n <= 25; n += 3) {
            bool f = julia_flag(seq, x, 0.02, 50.0, n);
            CHECK((!prev || f));
            prev = f;
        }
        if (julia_flag(seq, x, 0.02, 500.0, 20)) CHECK(julia_flag(seq, x, 0.02, 50.0, 20));
    }
}

TEST_CASE("exceptional_estimate examples") {
    for (int d : {2, 3, 5}) {
        auto seq = sample_sequence(BaseSystem::constant(RationalMap::power(d)), 0, 6);
        for (int n : {1, 3, 6}) {
            auto s = exceptional_estimate(seq, n);
            REQUIRE(s.size() == 2);
            CHECK(dist_s(s[0], SpherePoint(0.0)) < 1e-9);
            CHECK(s[1].is_inf());
        }
    }
    auto qc = sample_sequence(BaseSystem::constant(RationalMap::qc(0.3)), 0, 6);
    auto sq = exceptional_estimate(qc, 4);
    REQUIRE(sq.size() == 1);
    CHECK(sq[0].is_inf());

    // A quartic whose totally ramified points (if any) avoid {0, infinity}.
    std::mt19937_64 rng(1);
    RationalMap quartic = random_map(rng, 4, 4);
    REQUIRE(totally_ramified(quartic).empty());
    StepSequence mixed(0, {RationalMap::power(2), quartic}, {Potential::constant(0), Potential::constant(0)});
    CHECK(exceptional_estimate(mixed, 1).size() == 2);
    CHECK(exceptional_estimate(mixed, 2).empty());
}

TEST_CASE("exceptional_estimate is antitone in n") {
    std::mt19937_64 rng(4);
    // Mix power maps with conjugates sharing or not sharing their special points.
    auto M = RationalMap::mobius(1, 0.5, 0, 1);
    auto Minv = RationalMap::mobius(1, -0.5, 0, 1);
    auto shifted = compose(compose(Minv, RationalMap::power(3)), M);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<RationalMap> maps;
        std::vector<Potential> pots;
        for (int j = 0; j < 6; ++j) {
            int pick = int(rng() % 3);
            maps.push_back(pick == 0 ? RationalMap::power(2) : pick == 1 ? RationalMap::power(3) : shifted);
            pots.push_back(Potential::constant(0));
        }
        StepSequence seq(0, maps, pots);
        std::size_t prev = 3;
        for (int n = 1; n <= 6; ++n) {
            auto s = exceptional_estimate(seq, n);
            CHECK(s.size() <= prev);
            CHECK(s.size() <= 2);
            prev = s.size();
        }
    }
}

TEST_CASE("sudden sampler") {
    SuddenSampler zero(GrowthFamily{[](long long, double) { return 0.0; }, true}, 16);
    for (auto k : zero.levels()) CHECK(k == 0);
    double total = 0;
    for (int l = 0; l <= zero.l_max(); ++l) {
        total += zero.level_weight(l);
        if (l < zero.l_max()) CHECK(zero.level_weight(l) == std::ldexp(1.0, -(l + 1)));
    }
    CHECK(total == 1.0);

    // Level frequencies follow the geometric law.
    SuddenSampler ident(GrowthFamily{[](long long n, double k) { return n == 0 ? 0.0 : k + 1; }, true}, 12);
    for (std::size_t l = 0; l < ident.levels().size(); ++l) CHECK(ident.levels()[l] == l);
    Rng rng(99);
    std::map<std::uint64_t, int> freq;
    for (int t = 0; t < 20000; ++t) ++freq[ident.sample(rng)];
    CHECK(std::abs(freq[0] / 2e4 - 0.5) < 0.015);
    CHECK(std::abs(freq[1] / 2e4 - 0.25) < 0.015);
    CHECK(std::abs(freq[2] / 2e4 - 0.125) < 0.015);

    // Reproducible given the seed.
    Rng a(5), b(5);
    for (int t = 0; t < 100; ++t) CHECK(ident.sample(a) == ident.sample(b));
}

TEST_CASE("k_l is nondecreasing and matches brute force over tuples") {
    // f_n(k_0..k_{n-1}) = n + sum k_j, monotone in every argument.
    auto full = [](const std::vector<double>& ks) {
        double s = double(ks.size());
        for (double k : ks) s += k;
        return s;
    };
    GrowthFamily diag{[](long long n, double k) { return double(n) + double(n) * k; }, false};
    SuddenSampler s(diag, 5);
    for (std::size_t l = 1; l < s.levels().size(); ++l) CHECK(s.levels()[l] >= s.levels()[l - 1]);
    // Brute force for l <= 2: every n <= 3^l and every tuple of earlier levels.
    std::vector<double> k = {full({})};
    for (int l = 1; l <= 2; ++l) {
        double best = full({});
        int top = int(std::pow(3, l));
        for (int n = 1; n <= top; ++n) {
            std::vector<int> idx(n, 0);
            while (true) {
                std::vector<double> ks(n);
                for (int j = 0; j < n; ++j) ks[j] = k[idx[j]];
                best = std::max(best, full(ks));
                int p = 0;
                while (p < n && ++idx[p] == l) idx[p++] = 0;
                if (p == n) break;
            }
        }
        k.push_back(best);
    }
    for (int l = 0; l <= 2; ++l) CHECK(double(s.levels()[l]) == k[l]);
}

TEST_CASE("sudden jumps occur with positive frequency") {
    // f_n = 1 + max of the earlier draws; count windows of length 50 with a record jump.
    GrowthFamily grow{[](long long n, double k) { return n == 0 ? 0.0 : k + 1; }, true};
    SuddenSampler s(grow, 16);
    Rng rng(2024);
    int hits = 0, events = 0;
    for (int draw = 0; draw < 10000 / 50; ++draw) {
        std::uint64_t mx = 0;
        for (int n = 0; n < 50; ++n) {
            auto k = s.sample(rng);
            if (n > 0 && k >= mx + 1) ++events;
            mx = std::max(mx, k);
            ++hits;
        }
    }
    CHECK(hits == 10000);
    CHECK(events > 0);

    GrowthFamily huge{[](long long n, double k) { return n == 0 ? 1.0 : std::pow(2.0, k) * double(n); }, true};
    CHECK_THROWS_AS(SuddenSampler(huge, 16), CapacityError);
}
