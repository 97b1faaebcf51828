#include <chrono>
#include <sstream>

#include "doctest.h"
#include "families.hpp"
#include "rdsphere/thermo.hpp"

using namespace rdsphere;

namespace {

std::vector<SpherePoint> circle_points(std::size_t m) {
    std::vector<SpherePoint> out;
    for (std::size_t k = 0; k < m; ++k) out.push_back(SpherePoint(std::polar(1.0, 2 * kPi * double(k) / double(m))));
    return out;
}

// Quadratic greedy with explicit orbits and dist_s.
std::vector<std::size_t> brute_separated(const StepSequence& seq, int n, double eps, const std::vector<SpherePoint>& cand) {
    std::vector<std::vector<SpherePoint>> orb;
    for (const auto& c : cand) {
        std::vector<SpherePoint> o{c};
        for (int j = 1; j < n; ++j) o.push_back(seq.map(j - 1).eval(o.back()));
        orb.push_back(o);
    }
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < cand.size(); ++c) {
        bool ok = true;
        for (std::size_t k : kept) {
            bool sep = false;
            for (int j = 0; j < n && !sep; ++j) sep = dist_s(orb[c][std::size_t(j)], orb[k][std::size_t(j)]) > eps;
            if (!sep) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(c);
    }
    return kept;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("separated_set examples") {
    auto z2 = sample_sequence(BaseSystem::constant(RationalMap::power(2)), 0, 10);
    CHECK(separated_set(z2, 1, 2.0, spiral_lattice(500)).size() == 1);

    const auto cand = circle_points(2048);
    auto E6 = separated_set(z2, 6, 0.1, cand);
    auto E1 = separated_set(z2, 1, 0.1, cand);
    auto oracle6 = brute_separated(z2, 6, 0.1, cand);
    CHECK(E6.candidate_index == oracle6);
    CHECK(E1.candidate_index == brute_separated(z2, 1, 0.1, cand));
    CHECK(E6.verify());
    // Circle doubling: one factor of 2 per extra step.
    const double ratio = double(E6.size()) / double(E1.size());
    CHECK(ratio >= 32.0 / 2);
    CHECK(ratio <= 32.0 * 2);
    // Every rejected candidate stays within eps of its witness for all j < n.
    for (auto [c, k] : E6.rejections) {
        SpherePoint a = cand[c], b = E6.points[k];
        for (int j = 0; j < 6; ++j) {
            CHECK(dist_s(a, b) <= 0.1);
            a = z2.map(j).eval(a);
            b = z2.map(j).eval(b);
        }
    }
    CHECK(E6.rejections.size() + E6.size() == cand.size());
    auto again = separated_set(z2, 6, 0.1, cand);
    CHECK(again.candidate_index == E6.candidate_index);
}

TEST_CASE("Julia candidates") {
    auto z2 = sample_sequence(BaseSystem::constant(RationalMap::power(2)), 0, 30);
    auto c = julia_candidates(z2, 8, 0.02);
    CHECK(c.circle);
    CHECK(c.radius == doctest::Approx(1.0).epsilon(0.02));
    CHECK(c.points.size() >= std::size_t(kPi / (0.02 / 128)));

    // z^2 + c: the Julia set is not a circle; backward orbits land near it.
    auto pert = sample_sequence(families::z2_perturbation(4), 0, 30);
    auto p = julia_candidates(pert, 8, 0.05);
    CHECK_FALSE(p.circle);
    REQUIRE(p.points.size() > 1000);
    for (std::size_t k = 0; k < p.points.size(); k += 97) CHECK(std::abs(std::abs(p.points[k].value()) - 1) < 0.1);
}

TEST_CASE("pressure of z^2 is ln 2") {
    auto t0 = std::chrono::steady_clock::now();
    auto est = pressure_estimate(BaseSystem::constant(RationalMap::power(2)), 8, 0.02, 1);
    CHECK(seconds_since(t0) < 60);
    CHECK(est.samples == 1);
    CHECK(std::abs(est.estimate - std::log(2.0)) < 0.05);
    CHECK(est.half_width == 0.0);
}

TEST_CASE("pressure of the iid z^2, z^3 system") {
    auto sys = BaseSystem::iid({{RationalMap::power(2), Potential::constant(0), 0.5, "z2"},
                                {RationalMap::power(3), Potential::constant(0), 0.5, "z3"}},
                               77);
    auto t0 = std::chrono::steady_clock::now();
    auto est = pressure_estimate(sys, 6, 0.1, 100);
    CHECK(seconds_since(t0) < 300);
    CHECK(est.samples == 100);
    CHECK(std::abs(est.estimate - 0.5 * (std::log(2.0) + std::log(3.0))) < 0.1);
    CHECK(est.half_width < 0.05);
}

TEST_CASE("constant potentials shift the pressure exactly") {
    auto base = pressure_estimate(BaseSystem::constant(RationalMap::power(2)), 6, 0.05, 1);
    auto shifted = pressure_estimate(BaseSystem::constant(RationalMap::power(2), Potential::constant(0.37)), 6, 0.05, 1);
    CHECK(shifted.estimate - base.estimate == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(shifted.raw - base.raw == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("sup-sum decreases along the eps ladder") {
    auto sys = BaseSystem::constant(RationalMap::power(2), Potential::linear(0.2, families::tilt()));
    double prev = INFINITY;
    for (double eps : {0.02, 0.05, 0.1, 0.2}) {
        auto est = pressure_estimate(sys, 6, eps, 1);
        CHECK(est.raw <= prev);
        prev = est.raw;
    }
}

TEST_CASE("pressure reports are reproducible") {
    auto sys = BaseSystem::iid({{RationalMap::power(2), Potential::constant(0), 0.5, "a"},
                                {RationalMap::power(3), Potential::constant(0.1), 0.5, "b"}},
                               3);
    auto run = [&] {
        std::ostringstream os;
        write_pressure_csv(os, {PressureLambdaReport{pressure_estimate(sys, 5, 0.1, 5), 0, 0, 0}});
        return os.str();
    };
    CHECK(run() == run());
}

TEST_CASE("pressure against the eigenvalue cocycle") {
    auto flat = pressure_vs_lambda(BaseSystem::constant(RationalMap::power(2)), 8, 0.02, 1);
    CHECK(flat.lambda_mean == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(flat.gap < 0.05);
    auto up = pressure_vs_lambda(BaseSystem::constant(RationalMap::power(2), Potential::constant(0.25)), 8, 0.02, 1);
    CHECK(up.lambda_mean - flat.lambda_mean == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(up.pressure.estimate - flat.pressure.estimate == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(std::abs(up.gap - flat.gap) < 1e-9);
    auto small = pressure_vs_lambda(families::z2_small_phi(), 8, 0.02, 1);
    CHECK(small.gap < 0.1);
}
