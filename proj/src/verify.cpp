#include "rdsphere/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"
#include "rdsphere/kernels.hpp"
#include "rdsphere/rds.hpp"

namespace rdsphere {

namespace {

constexpr std::uint64_t kKoebeStream = 0x6b6f6562;
constexpr std::uint64_t kC10Stream = 0xc10;
constexpr std::uint64_t kC7C8Stream = 0xc7c8;
constexpr std::uint64_t kUVWStream = 0x757677;
constexpr std::uint64_t kEpsStream = 0xe95;
constexpr std::uint64_t kSpillStream = 0x5b111;

// Absolute floor for image distances: map evaluation error near critical points.
constexpr double kRoundoff = 1e-14;

cplx normal_cplx(Rng& rng) { return cplx(rng.normal(), rng.normal()); }

RationalMap random_map(Rng& rng, int dmin, int dmax) {
    while (true) {
        const int df = int(rng.below(std::size_t(dmax + 1))), dg = int(rng.below(std::size_t(dmax + 1)));
        if (std::max(df, dg) < dmin) continue;
        std::vector<cplx> f(std::size_t(df + 1)), g(std::size_t(dg + 1));
        for (auto& v : f) v = normal_cplx(rng);
        for (auto& v : g) v = normal_cplx(rng);
        try {
            return RationalMap(Poly(f), Poly(g));
        } catch (const PreconditionError&) {
        }
    }
}

// Uniform point of the unit disk, half of them pushed toward the boundary.
cplx disk_point(Rng& rng) {
    const double r = rng.uniform() < 0.5 ? std::sqrt(rng.uniform()) : 1 - std::pow(10.0, -rng.uniform(0.5, 3.0));
    return std::polar(r, rng.uniform(0, 2 * kPi));
}

// A second point: random, or a small hyperbolic step from x.
cplx partner(Rng& rng, cplx x) {
    if (rng.uniform() < 0.5) return disk_point(rng);
    const double step = std::pow(10.0, -rng.uniform(1, 6)) * (1 - std::abs(x));
    return x + std::polar(step, rng.uniform(0, 2 * kPi));
}

// Relative margin of value <= bound.
double rel_margin(double bound, double value) { return (bound - value) / std::max(std::abs(bound), 1e-300); }

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(std::size_t(n), 0);
    w.assign(std::size_t(n), 0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[std::size_t(i)] = 0.5 * (1 - t);
        w[std::size_t(i)] = 1 / ((1 - t * t) * dp * dp);
    }
}

// Normalized spherical area of zeta(unit disk), zeta injective there.
double disk_image_area(const RationalMap& zeta, int nr = 48, int nt = 256) {
    std::vector<double> x, w;
    gauss_legendre(nr, x, w);
    double s = 0;
    for (int i = 0; i < nr; ++i)
        for (int k = 0; k < nt; ++k) {
            const cplx z = std::polar(x[std::size_t(i)], 2 * kPi * k / nt);
            const double q = zeta.sph_deriv(SpherePoint(z)) / (1 + std::norm(z));
            s += w[std::size_t(i)] * x[std::size_t(i)] * q * q;
        }
    return s * (2 * kPi / nt) / kPi;
}

Vec3 cross3(const Vec3& a, const Vec3& b) {
    return Vec3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double ramification_distance(const std::vector<SpherePoint>& rp, const SpherePoint& x) {
    double d = kHalfPi;
    for (const auto& p : rp) d = std::min(d, dist_s(x, p));
    return d;
}

std::vector<SpherePoint> ramification_points(const RationalMap& T) {
    std::vector<SpherePoint> out;
    for (const auto& e : ramification_divisor(T).entries) out.push_back(e.point);
    return out;
}

// Runs f(i, report) for each instance in parallel and merges in index order.
template <class F>
CheckReport per_instance(std::size_t count, const CheckReport& proto, F&& f) {
    std::vector<CheckReport> parts(count, proto);
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernel_threads())
    for (std::size_t i = 0; i < count; ++i) f(i, parts[i]);
    CheckReport out = proto;
    for (const auto& p : parts) out.merge(p);
    return out;
}

std::string params(std::initializer_list<std::pair<const char*, std::string>> kv) {
    std::string s;
    for (const auto& [k, v] : kv) s += (s.empty() ? "" : ";") + std::string(k) + "=" + v;
    return s;
}

}  // namespace

void CheckReport::record(double margin, double tol) {
    ++trials;
    worst_margin = std::min(worst_margin, margin);
    if (margin < -tol) ++violations;
}

void CheckReport::merge(const CheckReport& o) {
    trials += o.trials;
    violations += o.violations;
    skipped += o.skipped;
    worst_margin = std::min(worst_margin, o.worst_margin);
    notes.insert(notes.end(), o.notes.begin(), o.notes.end());
}

double hyperbolic_distance(cplx x, cplx y) {
    require(std::abs(x) < 1 && std::abs(y) < 1, "points must lie in the unit disk");
    return std::atanh(std::min(1.0, std::abs((x - y) / (1.0 - std::conj(x) * y))));
}

double hs_norm(const RationalMap& T, cplx x) {
    require(std::abs(x) < 1, "point must lie in the unit disk");
    return T.sph_deriv(SpherePoint(x)) * (1 - std::norm(x)) / (1 + std::norm(x));
}

double koebe_bound(double area) {
    require(area >= 0 && area <= 1, "area must lie in [0, 1]");
    return area >= 1 ? INFINITY : std::sqrt(area / (1 - area));
}

double mobius_disk_area(const RationalMap& T) {
    require(T.degree() == 1, "Mobius map expected");
    const Vec3 u1 = to_unit(T.eval(SpherePoint(1.0))), u2 = to_unit(T.eval(SpherePoint(0.0, 1.0))),
               u3 = to_unit(T.eval(SpherePoint(-1.0)));
    Vec3 n = cross3(Vec3{u2.x - u1.x, u2.y - u1.y, u2.z - u1.z}, Vec3{u3.x - u1.x, u3.y - u1.y, u3.z - u1.z});
    const double len = std::sqrt(dot(n, n));
    n = Vec3{n.x / len, n.y / len, n.z / len};
    double h = dot(n, u1);
    if (dot(n, to_unit(T.eval(SpherePoint(0.0)))) < h) h = -h;
    return (1 - h) / 2;
}

KoebeSharpness koebe_sharpness(double c) {
    require(c > 0, "c must be positive");
    const auto zeta = RationalMap::power(1, c);
    KoebeSharpness s;
    s.c = c;
    s.derivative = hs_norm(zeta, 0.0);
    s.area = disk_image_area(zeta);
    s.bound = koebe_bound(s.area);
    return s;
}

CheckReport check_koebe(std::size_t maps, std::size_t pairs, std::uint64_t seed) {
    constexpr double tol = 1e-6;
    CheckReport proto;
    proto.lemma = "koebe";
    proto.tolerance = tol;
    auto test_pairs = [&](const RationalMap& zeta, double L, Rng& rng, CheckReport& r) {
        for (std::size_t k = 0; k < pairs; ++k) {
            const cplx x = disk_point(rng), y = partner(rng, x);
            r.record(rel_margin(L, hs_norm(zeta, x)), tol);
            const double dh = hyperbolic_distance(x, y);
            if (dh > 0) r.record(rel_margin(L * dh, dist_s(zeta.eval(SpherePoint(x)), zeta.eval(SpherePoint(y)))), tol);
        }
    };
    // Mobius maps: the image is a cap.
    auto out = per_instance(maps, proto, [&](std::size_t i, CheckReport& r) {
        Rng rng(mix64(seed, kKoebeStream, i));
        cplx a, b, c, d;
        do {
            a = normal_cplx(rng), b = normal_cplx(rng), c = normal_cplx(rng), d = normal_cplx(rng);
        } while (std::abs(a * d - b * c) < 0.1 * (std::abs(a) + std::abs(b)) * (std::abs(c) + std::abs(d)));
        const auto zeta = RationalMap::mobius(a, b, c, d);
        test_pairs(zeta, koebe_bound(mobius_disk_area(zeta)), rng, r);
    });
    // Restrictions z -> T(a + r z) to disks away from the critical points.
    const std::size_t branches = std::max<std::size_t>(1, maps / 4);
    out.merge(per_instance(branches, proto, [&](std::size_t i, CheckReport& r) {
        Rng rng(mix64(seed, kKoebeStream + 1, i));
        const auto T = random_map(rng, 2, 3);
        const cplx a = normal_cplx(rng);
        double gap = INFINITY;
        for (const auto& p : ramification_points(T))
            if (!p.is_inf()) gap = std::min(gap, std::abs(p.value() - a));
        const double rad = std::min(0.5 * gap, 2.0);
        const auto zeta = compose(RationalMap::mobius(rad, a, 0, 1), T);
        for (int k = 0; k < 64; ++k) {
            const cplx z = std::polar(std::sqrt((k + 0.5) / 64), 2.39996 * k);
            int inside = 0;
            for (const auto& q : preimages(zeta, zeta.eval(SpherePoint(z))).expanded())
                if (!q.is_inf() && std::abs(q.value()) < 1) ++inside;
            if (inside != 1) {
                ++r.skipped;
                r.notes.push_back("branch " + std::to_string(i) + " not injective on the disk, skipped");
                return;
            }
        }
        test_pairs(zeta, koebe_bound(disk_image_area(zeta)), rng, r);
    }));
    // Sharpness for c z.
    for (double c : {0.5, 1.0, 2.0}) {
        const auto s = koebe_sharpness(c);
        out.record(-std::abs(s.derivative - s.bound), tol);
        out.record(-std::abs(s.area - c * c / (1 + c * c)), tol);
    }
    out.parameters = params({{"maps", std::to_string(maps)}, {"branches", std::to_string(branches)},
                             {"pairs", std::to_string(pairs)}, {"seed", std::to_string(seed)}});
    return out;
}

double c10_constant(const RationalMap& T) {
    const double H = sup_sph_deriv(T).value;
    return 32 / (kPi * kPi) * H * H;
}

CheckReport check_C10(const RationalMap& T, std::size_t samples, std::uint64_t seed) {
    constexpr double tol = 1e-7, step = 1e-5;
    CheckReport r;
    r.lemma = "C10";
    r.tolerance = tol;
    const double Ht = c10_constant(T);
    Rng rng(seed, kC10Stream);
    for (std::size_t k = 0; k < samples; ++k) {
        const SpherePoint x = rng.sphere_point();
        const SpherePoint y = k % 2 ? geodesic_point(x, std::pow(10.0, -rng.uniform(0, 6)), rng.uniform(0, 2 * kPi))
                                    : rng.sphere_point();
        double tx, ty;
        const SpherePoint Tx = T.eval_deriv(x, tx), Ty = T.eval_deriv(y, ty);
        const double d = dist_s(x, y);
        // Gradient of T_* by central differences in two orthogonal directions.
        const double theta = rng.uniform(0, 2 * kPi);
        double g2 = 0;
        for (double t : {theta, theta + kHalfPi}) {
            const double fp = T.sph_deriv(geodesic_point(x, step, t)), fm = T.sph_deriv(geodesic_point(x, step, t + kPi));
            g2 += std::pow((fp - fm) / (2 * step), 2);
        }
        r.record(rel_margin(Ht, std::sqrt(g2)), tol);
        if (d == 0) continue;
        r.record(rel_margin(Ht * d + kRoundoff, std::abs(tx - ty)), tol);
        r.record(rel_margin(d * (tx + Ht / 2 * d) + kRoundoff, dist_s(Tx, Ty)), tol);
    }
    r.parameters = params({{"map", T.to_text()}, {"Ht", fmt(Ht)}, {"samples", std::to_string(samples)}});
    return r;
}

double c8_constant(int D) {
    require(D >= 1, "degree cap must be positive");
    return 3 * std::sqrt(2.0) * std::pow(4.0, D) * std::pow(kPi, 4.0 * D);
}

C7C8Terms c7c8_terms(const RationalMap& T, const SpherePoint& x, int D, double H) {
    require(T.degree() <= D, "degree above the cap");
    C7C8Terms t;
    t.h0 = T.sph_deriv(x);
    t.delta = ramification_distance(ramification_points(T), x);
    t.H = H;
    t.rhs = std::exp(2 * D * std::log(t.delta) - std::log(c8_constant(D)) - 4 * D * std::log(H));
    return t;
}

CheckReport check_C7C8(int D, std::size_t samples, std::uint64_t seed) {
    constexpr double tol = 1e-9;
    constexpr std::size_t per_map = 10;
    CheckReport proto;
    proto.lemma = "C7C8";
    proto.tolerance = tol;
    const std::size_t maps = std::max<std::size_t>(1, (samples + per_map - 1) / per_map);
    const double lnC8 = std::log(c8_constant(D));
    auto r = per_instance(maps, proto, [&](std::size_t i, CheckReport& rep) {
        Rng rng(mix64(seed, kC7C8Stream, i));
        const auto T = random_map(rng, 1, D);
        const double H = sup_sph_deriv(T).value;
        const auto rp = ramification_points(T);
        for (std::size_t k = 0; k < per_map; ++k) {
            const SpherePoint x = rng.sphere_point();
            const double h0 = T.sph_deriv(x), delta = ramification_distance(rp, x);
            // Log form: ln h0 >= 2D ln delta - ln C8 - 4D ln H.
            rep.record(std::log(h0) - (2 * D * std::log(delta) - lnC8 - 4 * D * std::log(H)), tol);
        }
    });
    r.parameters = params({{"D", std::to_string(D)}, {"C8", fmt(c8_constant(D))}, {"maps", std::to_string(maps)},
                           {"seed", std::to_string(seed)}, {"margin", "log"}});
    return r;
}

CheckReport check_UVW(const RationalMap& T, const SpherePoint& a, double delta, std::size_t samples,
                      std::uint64_t seed) {
    constexpr double tol = 1e-9;
    require(delta > 0 && delta <= kPi / 4, "delta must lie in (0, pi/4]");
    const double H = sup_sph_deriv(T).value, Ht = 32 / (kPi * kPi) * H * H;
    // Lower bound for T_* on the ball: sampled minimum minus Ht times the sample spacing.
    auto sampled_min = [&](int rings) {
        const double s = delta / rings;
        double lo = T.sph_deriv(a);
        for (int j = 1; j <= rings; ++j) {
            const double rho = s * j;
            const int m = std::max(6, int(std::ceil(kPi * std::sin(2 * rho) / s)));
            for (int k = 0; k < m; ++k) lo = std::min(lo, T.sph_deriv(geodesic_point(a, rho, 2 * kPi * k / m)));
        }
        return lo;
    };
    const double coarse = sampled_min(100);
    if (coarse <= 0) throw PreconditionError("T_* vanishes on B(a, delta)");
    // Spacing s with Ht s at most half the sampled minimum.
    const double rings = std::max(100.0, std::ceil(2 * Ht * delta / coarse));
    if (rings > 400) throw PreconditionError("cannot bound T_* below on B(a, delta)");
    const double h = sampled_min(int(rings)) - Ht * delta / rings;
    if (h <= 0) throw PreconditionError("cannot bound T_* below on B(a, delta)");
    const double w = h * delta / H;
    CheckReport r;
    r.lemma = "UVW";
    r.tolerance = tol;
    Rng rng(seed, kUVWStream);
    auto in_W = [&] {
        const double s = std::sin(w) * std::sqrt(rng.uniform());
        return geodesic_point(a, std::asin(s), rng.uniform(0, 2 * kPi));
    };
    // Injectivity: T(x) has exactly one preimage in W.
    const std::size_t probes = std::max<std::size_t>(1, samples / 10);
    for (std::size_t k = 0; k < probes; ++k) {
        const SpherePoint x = in_W();
        int inside = 0;
        for (const auto& q : preimages(T, T.eval(x)).expanded())
            if (dist_s(q, a) < w) ++inside;
        r.record(inside == 1 ? 0.0 : -1.0, tol);
    }
    for (std::size_t k = 0; k < samples; ++k) {
        const SpherePoint x = in_W();
        SpherePoint y = in_W();
        if (k % 2) {
            y = geodesic_point(x, std::pow(10.0, -rng.uniform(0, 4)) * w, rng.uniform(0, 2 * kPi));
            if (dist_s(y, a) >= w) continue;
        }
        double tx;
        const SpherePoint Tx = T.eval_deriv(x, tx);
        const double d = dist_s(x, y);
        const double bound = d * (tx - Ht / 2 * d);
        r.record((dist_s(Tx, T.eval(y)) - bound + kRoundoff) / std::max(d * tx, 1e-300), tol);
    }
    r.parameters = params({{"map", T.to_text()}, {"h", fmt(h)}, {"H", fmt(H)}, {"W_radius", fmt(w)},
                           {"delta", fmt(delta)}});
    return r;
}

CheckReport check_UVW_random(std::size_t instances, std::size_t pairs, std::uint64_t seed) {
    CheckReport proto;
    proto.lemma = "UVW";
    proto.tolerance = 1e-9;
    auto r = per_instance(instances, proto, [&](std::size_t i, CheckReport& rep) {
        Rng rng(mix64(seed, kUVWStream + 1, i));
        const auto T = random_map(rng, 2, 3);
        const SpherePoint a = rng.sphere_point();
        const double delta = std::min(kPi / 4, 0.5 * ramification_distance(ramification_points(T), a));
        try {
            rep.merge(check_UVW(T, a, delta, pairs, mix64(seed, kUVWStream + 2, i)));
        } catch (const PreconditionError& e) {
            ++rep.skipped;
            rep.notes.push_back("instance " + std::to_string(i) + ": " + e.what());
        }
    });
    r.parameters = params({{"instances", std::to_string(instances)}, {"pairs", std::to_string(pairs)},
                           {"seed", std::to_string(seed)}});
    return r;
}

std::pair<double, double> epsilon_lemma_sides(const std::vector<double>& a, const std::vector<double>& b,
                                              const std::vector<double>& c, const std::vector<double>& d) {
    const std::size_t n = a.size();
    require(n > 0 && b.size() == n && c.size() == n && d.size() == n, "sequences must share one index set");
    double K = 0, lhs = 0, supc = -INFINITY, infd = INFINITY, supcd = -INFINITY;
    for (std::size_t s = 0; s < n; ++s) {
        require(a[s] > 0 && b[s] > 0, "probability vectors must be positive");
        K = std::max(K, std::abs(std::log(a[s]) - std::log(b[s])));
        lhs += a[s] * c[s] - b[s] * d[s];
        supc = std::max(supc, c[s]);
        infd = std::min(infd, d[s]);
        supcd = std::max(supcd, c[s] - d[s]);
    }
    const double eps = 2 / (1 + std::exp(K));
    return {lhs, (1 - eps) * (supc - infd) + eps * supcd};
}

CheckReport check_epsilon_grid(double step) {
    constexpr double tol = 1e-12;
    require(step > 0 && step < 0.5, "grid step must lie in (0, 0.5)");
    CheckReport r;
    r.lemma = "epsilon";
    r.tolerance = tol;
    const int m = int(std::lround(1 / step));
    std::vector<double> vals;
    for (int k = 0; k <= m; ++k) vals.push_back(k * step);
    for (int i = 1; i < m; ++i)
        for (int j = 1; j < m; ++j) {
            const std::vector<double> a{vals[std::size_t(i)], 1 - vals[std::size_t(i)]},
                b{vals[std::size_t(j)], 1 - vals[std::size_t(j)]};
            const double K = std::max(std::abs(std::log(a[0] / b[0])), std::abs(std::log(a[1] / b[1])));
            const double eps = 2 / (1 + std::exp(K));
            for (double c0 : vals)
                for (double c1 : vals)
                    for (double d0 : vals)
                        for (double d1 : vals) {
                            const double lhs = a[0] * c0 + a[1] * c1 - b[0] * d0 - b[1] * d1;
                            const double rhs = (1 - eps) * (std::max(c0, c1) - std::min(d0, d1)) +
                                               eps * std::max(c0 - d0, c1 - d1);
                            r.record(rhs - lhs, tol);
                        }
        }
    r.parameters = params({{"S", "2"}, {"step", fmt(step)}});
    return r;
}

CheckReport check_epsilon_lemma(std::size_t trials, std::uint64_t seed) {
    constexpr double tol = 1e-12;
    CheckReport r;
    r.lemma = "epsilon";
    r.tolerance = tol;
    Rng rng(seed, kEpsStream);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = 1 + rng.below(20);
        const double spread = rng.uniform(0, 3);
        std::vector<double> a(n), b(n), c(n), d(n);
        double sa = 0, sb = 0;
        for (std::size_t s = 0; s < n; ++s) {
            a[s] = std::exp(spread * rng.normal());
            b[s] = t % 3 == 0 ? a[s] : std::exp(spread * rng.normal());
            sa += a[s];
            sb += b[s];
            c[s] = rng.uniform(-1, 1);
            // Nearly equal c and d make the eps term bite.
            d[s] = t % 2 ? c[s] + 0.05 * rng.normal() : rng.uniform(-1, 1);
        }
        for (std::size_t s = 0; s < n; ++s) {
            a[s] /= sa;
            b[s] /= sb;
        }
        const auto [lhs, rhs] = epsilon_lemma_sides(a, b, c, d);
        r.record(rhs - lhs, tol);
    }
    r.parameters = params({{"trials", std::to_string(trials)}, {"max_S", "20"}, {"seed", std::to_string(seed)}});
    return r;
}

bool CapUnion::covers(const SpherePoint& p) const {
    return std::any_of(caps.begin(), caps.end(), [&](const auto& c) { return dist_s(p, c.first) <= c.second; });
}

std::vector<SpherePoint> CapUnion::sample(double h) const {
    require(h > 0, "sample spacing must be positive");
    std::vector<SpherePoint> out;
    for (const auto& [c, rad] : caps) {
        out.push_back(c);
        const int rings = int(std::ceil(rad / h));
        for (int j = 1; j <= rings; ++j) {
            const double rho = std::min(rad, j * h);
            const int m = std::max(3, int(std::ceil(kPi * std::sin(2 * rho) / h)));
            for (int k = 0; k < m; ++k) out.push_back(geodesic_point(c, rho, 2 * kPi * (k + 0.5 * (j % 2)) / m));
        }
    }
    return out;
}

double diam3_upper(const CapUnion& u) {
    double top = 0;
    for (const auto& c : u.caps) top = std::max(top, c.second);
    if (top == 0) return diam_m([&] {
        std::vector<SpherePoint> v;
        for (const auto& c : u.caps) v.push_back(c.first);
        return v;
    }(), 3);
    const double h = top / 3;
    return diam_m(u.sample(h), 3) + 2 * h;
}

std::vector<SpherePoint> spillover_probes(const RationalMap& T, double delta, std::size_t lattice) {
    std::vector<SpherePoint> out;
    for (const auto& p : spiral_lattice(lattice))
        if (diam_m(preimages(T, p).expanded(), 3) >= delta) out.push_back(p);
    return out;
}

CheckReport check_spillover(const RationalMap& T, double delta, const std::vector<CapUnion>& family,
                            const std::vector<SpherePoint>& probes) {
    CheckReport r;
    r.lemma = "spillover";
    r.tolerance = 0;
    std::vector<std::vector<SpherePoint>> pre;
    for (const auto& p : probes) {
        pre.push_back(preimages(T, p).expanded());
        require(diam_m(pre.back(), 3) >= delta, "probe outside the hypothesis");
    }
    std::size_t contrapositive = 0;
    for (const auto& U : family) {
        const bool small = diam3_upper(U) < delta;
        if (!small) ++r.skipped;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const bool hit = std::any_of(pre[i].begin(), pre[i].end(), [&](const SpherePoint& q) { return !U.covers(q); });
            if (small) {
                r.record(hit ? 0.0 : -1.0, 0);
            } else if (!hit) {
                // Every preimage lies in the complement, whose diam_3 is then at least delta.
                ++contrapositive;
                r.record(diam_m(pre[i], 3) - delta, 0);
            }
        }
    }
    r.parameters = params({{"map", T.to_text()}, {"delta", fmt(delta)}, {"sets", std::to_string(family.size())},
                           {"probes", std::to_string(probes.size())},
                           {"contrapositive", std::to_string(contrapositive)}});
    return r;
}

std::vector<CapUnion> random_cap_unions(const RationalMap& T, const std::vector<SpherePoint>& probes,
                                        std::size_t count, std::uint64_t seed) {
    Rng rng(seed, kSpillStream);
    std::vector<CapUnion> out;
    for (std::size_t i = 0; i < count; ++i) {
        CapUnion u;
        if (i % 4 == 3 && !probes.empty()) {
            // Cover every preimage of one probe: U is expected to lie in G_delta.
            for (const auto& q : preimages(T, probes[rng.below(probes.size())]).expanded())
                u.caps.emplace_back(q, rng.uniform(0.005, 0.05));
        } else {
            const std::size_t k = 1 + rng.below(4);
            for (std::size_t j = 0; j < k; ++j) {
                SpherePoint c = rng.sphere_point();
                if (rng.uniform() < 0.5 && !probes.empty()) {
                    const auto q = preimages(T, probes[rng.below(probes.size())]).expanded();
                    c = geodesic_point(q[rng.below(q.size())], rng.uniform(0, 0.01), rng.uniform(0, 2 * kPi));
                }
                u.caps.emplace_back(c, rng.uniform(0.005, 0.2));
            }
        }
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<CheckReport> run_battery(const BatteryOptions& opt) {
    auto n = [&](double base) { return std::max<std::size_t>(1, std::size_t(std::lround(base * opt.scale))); };
    const std::uint64_t s = opt.seed;
    std::vector<CheckReport> out;
    out.push_back(check_koebe(n(200), 1000, s));

    CheckReport c10 = check_C10(RationalMap::power(2), n(1e4), s);
    c10.merge(check_C10(RationalMap::power(1, 2.0), n(1e4), s + 1));
    c10.merge(check_C10(RationalMap::qc(0.3), n(1e4), s + 2));
    c10.parameters = "maps=z^2,2z,Q_0.3;samples=" + std::to_string(n(1e4));
    out.push_back(c10);

    out.push_back(check_C7C8(3, n(1e3), s));

    CheckReport uvw = check_UVW(RationalMap::power(2), SpherePoint(1.0), 0.2, n(1e4), s);
    uvw.merge(check_UVW_random(n(50), 200, s));
    uvw.parameters = "z^2,a=1,delta=0.2;" + std::to_string(n(50)) + " random instances";
    out.push_back(uvw);

    CheckReport eps = check_epsilon_grid(0.05);
    eps.merge(check_epsilon_lemma(n(1e4), s));
    eps.parameters = "grid S=2 step=0.05;random trials=" + std::to_string(n(1e4));
    out.push_back(eps);

    const auto z3 = RationalMap::power(3);
    const auto probes3 = spillover_probes(z3, 0.3, 400);
    CheckReport spill = check_spillover(z3, 0.3, random_cap_unions(z3, probes3, n(200), s), probes3);
    Rng rng(s, kSpillStream + 1);
    const auto T = random_map(rng, 3, 4);
    const auto probesT = spillover_probes(T, 0.2, 400);
    spill.merge(check_spillover(T, 0.2, random_cap_unions(T, probesT, n(200), s + 1), probesT));
    spill.parameters = "z^3 delta=0.3;random degree 3-4 delta=0.2;sets=" + std::to_string(n(200));
    out.push_back(spill);
    return out;
}

void write_reports_csv(std::ostream& os, const std::vector<CheckReport>& reports) {
    os << "lemma,trials,violations,skipped,worst_margin,tolerance,parameters\n";
    for (const auto& r : reports) {
        std::string p = r.parameters;
        std::replace(p.begin(), p.end(), ',', ' ');
        os << r.lemma << ',' << r.trials << ',' << r.violations << ',' << r.skipped << ',' << fmt(r.worst_margin) << ','
           << fmt(r.tolerance) << ',' << p << '\n';
    }
}

}  // namespace rdsphere
