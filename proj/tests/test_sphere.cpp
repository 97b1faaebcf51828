#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"
#include "rdsphere/sphere.hpp"

using namespace rdsphere;

TEST_CASE("distance examples") {
    CHECK(dist_s(SpherePoint(0.0), SpherePoint::infinity()) == doctest::Approx(kHalfPi).epsilon(1e-15));
    CHECK(dist_s(SpherePoint(0.3, 0.2), SpherePoint(0.3, 0.2)) == 0.0);
    CHECK(dist_s(SpherePoint(0.0), SpherePoint(1.0)) == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(dist_s(SpherePoint::infinity(), SpherePoint::infinity()) == 0.0);
}

TEST_CASE("distance matches the central-angle oracle and the sine formula") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 2000; ++t) {
        cplx a = oracle::uniform_sphere(rng), b = oracle::uniform_sphere(rng);
        double d = dist_s(a, b);
        CHECK(d == doctest::Approx(oracle::dist(a, b)).epsilon(1e-7));
        double s = std::abs(a - b) / std::sqrt((1 + std::norm(a)) * (1 + std::norm(b)));
        CHECK(std::sin(d) == doctest::Approx(s).epsilon(1e-12));
        CHECK(d <= kHalfPi);
        CHECK(dist_s(b, a) == d);
        CHECK(dist_s(SpherePoint(a), SpherePoint::infinity()) == doctest::Approx(oracle::dist_inf(a)).epsilon(1e-7));
    }
}

TEST_CASE("triangle inequality and chart-flip invariance") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 2000; ++t) {
        SpherePoint a(oracle::uniform_sphere(rng)), b(oracle::uniform_sphere(rng)), c(oracle::uniform_sphere(rng));
        CHECK(dist_s(a, c) <= dist_s(a, b) + dist_s(b, c) + 1e-12);
        double d = dist_s(a, b);
        double df = dist_s(a.flipped(), b.flipped());
        CHECK(std::abs(d - df) <= 1e-12 * std::max(1.0, d));
        SpherePoint back = a.flipped().flipped();
        CHECK(std::abs(back.value() - a.value()) <= 4e-16 * std::abs(a.value()) + 1e-300);
    }
}

TEST_CASE("unit vector round trip and chord relation") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 1000; ++t) {
        SpherePoint a(oracle::uniform_sphere(rng)), b(oracle::uniform_sphere(rng));
        SpherePoint r = from_unit(to_unit(a));
        CHECK(dist_s(a, r) < 1e-14);
        double c2 = chord2(to_unit(a), to_unit(b));
        CHECK(dist_from_chord2(c2) == doctest::Approx(dist_s(a, b)).epsilon(1e-7));
    }
    CHECK(from_unit({0, 0, 1}).is_inf());
}

TEST_CASE("ball area") {
    CHECK(ball_area(kHalfPi) == 1.0);
    CHECK(ball_area(0.0) == 0.0);
    CHECK(ball_area(kPi / 6) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(ball_area(-0.1), PreconditionError);
    CHECK_THROWS_AS(ball_area(2.0), PreconditionError);
    for (double d = 0; d <= kHalfPi; d += 0.01) {
        CHECK(std::abs(ball_area(d) + ball_area(kHalfPi - d) - 1.0) <= 1e-15);
        if (d > 0) CHECK(ball_area(d) >= ball_area(d - 0.01));
    }
}

TEST_CASE("ball area against Monte-Carlo integration of the area form") {
    // Uniform points on the unit sphere sample the normalized area measure.
    std::mt19937_64 rng(4);
    const int n = 400000;
    int inside = 0;
    SpherePoint c(0.4, -0.7);
    for (int i = 0; i < n; ++i)
        if (dist_s(SpherePoint(oracle::uniform_sphere(rng)), c) < kPi / 6) ++inside;
    double est = double(inside) / n;
    CHECK(std::abs(est - 0.25) < 4 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("geodesic polar coordinates") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 500; ++t) {
        SpherePoint c(oracle::uniform_sphere(rng));
        if (t % 10 == 0) c = SpherePoint::infinity();
        double rho = u(rng) * 1.5, th = (u(rng) - 0.5) * 6;
        SpherePoint p = geodesic_point(c, rho, th);
        CHECK(dist_s(c, p) == doctest::Approx(rho).epsilon(1e-9));
        double r2, t2;
        polar_coords(c, p, r2, t2);
        CHECK(r2 == doctest::Approx(rho).epsilon(1e-9));
        CHECK(std::abs(std::polar(1.0, t2) - std::polar(1.0, th)) < 1e-8);
    }
}

TEST_CASE("diam_m examples") {
    std::vector<SpherePoint> two{SpherePoint(0.0), SpherePoint::infinity()};
    CHECK(diam_m(two, 2) == doctest::Approx(kHalfPi));
    CHECK(diam_m(two, 3) == 0.0);
    std::vector<SpherePoint> three{SpherePoint(0.0), SpherePoint(1.0), SpherePoint::infinity()};
    CHECK(diam_m(three, 3) == doctest::Approx(kPi / 4));
    CHECK_THROWS_AS(diam_m(three, 1), PreconditionError);
}

namespace {

// Exhaustive oracle over m-subsets.
double brute_diam(const std::vector<SpherePoint>& p, int m) {
    const int n = int(p.size());
    if (n < m) return 0;
    double best = 0;
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    while (true) {
        double mn = 1e9;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) mn = std::min(mn, dist_s(p[idx[a]], p[idx[b]]));
        best = std::max(best, mn);
        int k = m - 1;
        while (k >= 0 && idx[k] == n - m + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("diam_m equals the exhaustive oracle, is antitone in m and monotone under inclusion") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 200; ++t) {
        int n = 3 + int(rng() % 8);
        std::vector<SpherePoint> pts;
        for (int i = 0; i < n; ++i) pts.push_back(SpherePoint(oracle::uniform_sphere(rng)));
        std::vector<SpherePoint> sub(pts.begin(), pts.end() - 1);
        double prev = kHalfPi + 1;
        for (int m = 2; m <= 5; ++m) {
            double d = diam_m(pts, m);
            CHECK(d == doctest::Approx(brute_diam(pts, m)).epsilon(1e-14));
            CHECK(d <= prev);
            CHECK(diam_m(sub, m) <= d);
            prev = d;
        }
    }
}

TEST_CASE("greedy net") {
    auto cand = spiral_lattice(5000);
    auto single = greedy_net(kPi, cand);
    CHECK(single.size() == 1);
    CHECK(single.points[0] == cand[0]);
    auto net = greedy_net(0.2, cand);
    // Separation and maximality by brute force.
    for (std::size_t i = 0; i < net.size(); ++i)
        for (std::size_t j = i + 1; j < net.size(); ++j) CHECK(dist_s(net.points[i], net.points[j]) >= 0.2);
    for (const auto& c : cand) {
        double best = 10;
        for (const auto& p : net.points) best = std::min(best, dist_s(c, p));
        CHECK(best < 0.2);
    }
    CHECK_THROWS_AS(greedy_net(0.0, cand), PreconditionError);
    CHECK_THROWS_AS(greedy_net(0.1, {}), PreconditionError);
}

TEST_CASE("lattice net covering radius holds on random probes") {
    auto net = lattice_net(2000);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 2000; ++t) {
        SpherePoint p(oracle::uniform_sphere(rng));
        CHECK(dist_s(p, net.points[nearest_index(net, p)]) <= net.covering_radius);
    }
    for (std::size_t i = 0; i < 200; ++i)
        for (std::size_t j = i + 1; j < net.size(); ++j) CHECK(dist_s(net.points[i], net.points[j]) >= net.separation * (1 - 1e-12));
}

TEST_CASE("partition cells are disjoint, cover, and have small diameter") {
    std::mt19937_64 rng(8);
    for (int k = 0; k <= 5; ++k) {
        auto part = partition_Ak(k);
        std::vector<std::vector<SpherePoint>> members(part.centers.size());
        for (int t = 0; t < 10000; ++t) {
            SpherePoint p(oracle::uniform_sphere(rng));
            int c = part.cell_of(p);
            REQUIRE(c >= 0);
            // First-center rule: no earlier center within the radius.
            for (int j = 0; j < c; j += std::max(1, c / 50)) CHECK(dist_s(p, part.centers[j]) > part.radius);
            CHECK(dist_s(p, part.centers[c]) <= part.radius);
            if (members[c].size() < 20) members[c].push_back(p);
        }
        for (const auto& m : members)
            for (std::size_t a = 0; a < m.size(); ++a)
                for (std::size_t b = a + 1; b < m.size(); ++b) CHECK(dist_s(m[a], m[b]) <= std::ldexp(1.0, -k));
    }
}

TEST_CASE("partition local count bound") {
    auto part = partition_Ak(3);
    PartitionProbe probe(part);
    CHECK(probe.uncovered() == 0);
    // A ball well inside a cell meets exactly that cell.
    auto one = probe.count(part.centers[0], 0.1 * part.radius);
    CHECK(one.sampled == 1);
    // The whole sphere meets every occupied cell; unoccupied ones are slivers or empty.
    CHECK(probe.count(part.centers[0], kHalfPi).sampled == probe.occupied());
    CHECK(probe.occupied() >= part.centers.size() * 9 / 10);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 1000; ++t) {
        SpherePoint x(oracle::uniform_sphere(rng));
        const double delta = std::exp(std::log(1e-3) + (std::log(kHalfPi) - std::log(1e-3)) * u(rng));
        const auto c = probe.count(x, delta);
        CHECK(c.sampled >= 1);
        CHECK(c.sampled <= c.center_bound);
        CHECK(std::log(double(c.sampled)) <= 6 * std::log(2.0) + 2 * std::max(0.0, std::log(delta / std::ldexp(1.0, -2))));
    }
}

TEST_CASE("net CSV export round trip fields") {
    auto net = lattice_net(50);
    const std::string path = "test_sphere_net.csv";
    {
        CsvWriter w(path, {"index", "re", "im", "is_infinity", "cell_index"});
        for (std::size_t i = 0; i < net.size(); ++i) {
            w << i;
            put_point(w, net.points[i]);
            w << i;
            w.end_row();
        }
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,re,im,is_infinity,cell_index");
    int rows = 0;
    while (std::getline(in, line)) {
        auto f = split(line, ',');
        REQUIRE(f.size() == 5);
        SpherePoint p(parse_double(f[1]), parse_double(f[2]));
        CHECK(dist_s(p, net.points[rows]) == 0.0);
        ++rows;
    }
    CHECK(rows == 50);
}
