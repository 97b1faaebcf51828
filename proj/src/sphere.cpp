#include "rdsphere/sphere.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>

#include "rdsphere/errors.hpp"
#include "rdsphere/spatial.hpp"

namespace rdsphere {

cplx SpherePoint::value() const {
    if (inf_) throw PreconditionError("value() of the point at infinity");
    return z_;
}

double SpherePoint::modulus() const {
    return inf_ ? std::numeric_limits<double>::infinity() : std::abs(z_);
}

SpherePoint SpherePoint::flipped() const {
    if (inf_) return SpherePoint(0.0);
    if (z_ == cplx(0.0)) return infinity();
    return SpherePoint(1.0 / z_);
}

Vec3 to_unit(const SpherePoint& p) {
    if (p.is_inf()) return {0, 0, 1};
    cplx z = p.value();
    double r2 = std::norm(z);
    if (r2 <= 1.0) {
        double s = 1.0 + r2;
        return {2 * z.real() / s, 2 * z.imag() / s, (r2 - 1.0) / s};
    }
    cplx w = 1.0 / z;
    double q2 = std::norm(w);
    double s = 1.0 + q2;
    return {2 * w.real() / s, -2 * w.imag() / s, (1.0 - q2) / s};
}

SpherePoint from_unit(const Vec3& v) {
    double n = std::sqrt(dot(v, v));
    if (n == 0) throw PreconditionError("zero vector has no sphere point");
    Vec3 u{v.x / n, v.y / n, v.z / n};
    if (u.z <= 0) return SpherePoint(cplx(u.x, u.y) / (1.0 - u.z));
    cplx den(u.x, -u.y);
    if (den == cplx(0.0)) return SpherePoint::infinity();
    return SpherePoint((1.0 + u.z) / den);
}

double dist_s(const SpherePoint& x, const SpherePoint& y) {
    if (x.is_inf() && y.is_inf()) return 0.0;
    if (x.is_inf()) return std::atan2(1.0, y.modulus());
    if (y.is_inf()) return std::atan2(1.0, x.modulus());
    cplx a = x.value(), b = y.value();
    if (std::abs(a) > 1.0 && std::abs(b) > 1.0) {
        a = 1.0 / a;
        b = 1.0 / b;
    }
    return std::atan2(std::abs(a - b), std::abs(1.0 + a * std::conj(b)));
}

double dist_from_chord2(double c2) {
    double s = std::sqrt(std::max(c2, 0.0)) / 2.0;
    return std::asin(std::min(s, 1.0));
}

double chord2_from_dist(double d) {
    double s = std::sin(std::min(std::max(d, 0.0), kHalfPi));
    return 4.0 * s * s;
}

double ball_area(double delta, double exponent) {
    if (!(delta >= 0.0 && delta <= kHalfPi)) throw PreconditionError("ball radius outside [0, pi/2]");
    if (delta == kHalfPi) return 1.0;
    return std::pow(std::sin(delta), exponent);
}

namespace {

// (w + c) / (1 - conj(c) w) for |c| <= 1.
SpherePoint mobius_small(cplx c, const SpherePoint& w) {
    if (w.is_inf()) {
        if (c == cplx(0.0)) return SpherePoint::infinity();
        return SpherePoint(-1.0 / std::conj(c));
    }
    cplx z = w.value();
    cplx den = 1.0 - std::conj(c) * z;
    if (den == cplx(0.0)) return SpherePoint::infinity();
    return SpherePoint((z + c) / den);
}

SpherePoint mobius_small_inv(cplx c, const SpherePoint& p) {
    return mobius_small(-c, p);
}

}  // namespace

SpherePoint isometry_to(const SpherePoint& c, const SpherePoint& w) {
    if (c.modulus() <= 1.0) return mobius_small(c.value(), w);
    // flip o M_{1/c}: sends 0 to c with a well-conditioned inner map.
    return mobius_small(c.flipped().value(), w).flipped();
}

SpherePoint isometry_from(const SpherePoint& c, const SpherePoint& p) {
    if (c.modulus() <= 1.0) return mobius_small_inv(c.value(), p);
    return mobius_small_inv(c.flipped().value(), p.flipped());
}

SpherePoint geodesic_point(const SpherePoint& c, double rho, double theta) {
    SpherePoint w = rho >= kHalfPi ? SpherePoint::infinity()
                                   : SpherePoint(std::tan(rho) * std::polar(1.0, theta));
    return isometry_to(c, w);
}

void polar_coords(const SpherePoint& c, const SpherePoint& p, double& rho, double& theta) {
    SpherePoint w = isometry_from(c, p);
    if (w.is_inf()) {
        rho = kHalfPi;
        theta = 0;
        return;
    }
    rho = std::atan(std::abs(w.value()));
    theta = std::arg(w.value());
}

namespace {

using Bits = std::vector<std::uint64_t>;

bool clique_search(const std::vector<Bits>& adj, const Bits& cand, int need) {
    if (need == 0) return true;
    int avail = 0;
    for (auto w : cand) avail += std::popcount(w);
    if (avail < need) return false;
    for (std::size_t wi = 0; wi < cand.size(); ++wi) {
        std::uint64_t word = cand[wi];
        while (word) {
            int b = std::countr_zero(word);
            word &= word - 1;
            std::size_t v = wi * 64 + b;
            Bits next(cand.size(), 0);
            int cnt = 0;
            for (std::size_t k = 0; k < cand.size(); ++k) {
                std::uint64_t mask = cand[k] & adj[v][k];
                if (k < wi) mask = 0;
                else if (k == wi) mask &= (b == 63) ? 0 : (~std::uint64_t(0) << (b + 1));
                next[k] = mask;
                cnt += std::popcount(mask);
            }
            if (cnt >= need - 1 && clique_search(adj, next, need - 1)) return true;
        }
    }
    return false;
}

}  // namespace

double diam_m(const std::vector<SpherePoint>& points, int m) {
    if (m < 2) throw PreconditionError("diam_m requires m >= 2");
    std::vector<SpherePoint> pts;
    for (const auto& p : points) {
        bool dup = false;
        for (const auto& q : pts)
            if (dist_s(p, q) == 0.0) {
                dup = true;
                break;
            }
        if (!dup) pts.push_back(p);
    }
    const std::size_t n = pts.size();
    if (n < static_cast<std::size_t>(m)) return 0.0;
    std::vector<double> d(n * n, 0.0);
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i * n + j] = d[j * n + i] = dist_s(pts[i], pts[j]);
            vals.push_back(d[i * n + j]);
        }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (m == 2) return vals.back();

    const std::size_t words = (n + 63) / 64;
    auto feasible = [&](double t) {
        std::vector<Bits> adj(n, Bits(words, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && d[i * n + j] >= t) adj[i][j / 64] |= std::uint64_t(1) << (j % 64);
        Bits all(words, 0);
        for (std::size_t i = 0; i < n; ++i) all[i / 64] |= std::uint64_t(1) << (i % 64);
        return clique_search(adj, all, m);
    };
    // Largest pairwise distance value t admitting m points pairwise >= t.
    std::size_t lo = 0, hi = vals.size() - 1;
    if (!feasible(vals[lo])) return 0.0;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (feasible(vals[mid])) lo = mid;
        else hi = mid - 1;
    }
    return vals[lo];
}

namespace {

Vec3 spiral_unit(std::size_t i, std::size_t n) {
    static const double golden = kPi * (3.0 - std::sqrt(5.0));
    double z = 1.0 - (2.0 * double(i) + 1.0) / double(n);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * double(i);
    return {r * std::cos(phi), r * std::sin(phi), z};
}

std::vector<std::size_t> bit_reversed_order(std::size_t n) {
    unsigned bits = 0;
    while ((std::size_t(1) << bits) < n) ++bits;
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t i = 0; i < (std::size_t(1) << bits); ++i) {
        std::size_t r = 0;
        for (unsigned b = 0; b < bits; ++b)
            if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (bits - 1 - b);
        if (r < n) order.push_back(r);
    }
    return order;
}

double cell_for_chord(double chord) { return std::clamp(chord, 1e-4, 2.0); }

}  // namespace

std::vector<SpherePoint> spiral_lattice(std::size_t n) {
    require(n > 0, "lattice size must be positive");
    std::vector<SpherePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(from_unit(spiral_unit(i, n)));
    return out;
}

std::vector<SpherePoint> spiral_lattice_scrambled(std::size_t n) {
    require(n > 0, "lattice size must be positive");
    std::vector<SpherePoint> out;
    out.reserve(n);
    for (auto i : bit_reversed_order(n)) out.push_back(from_unit(spiral_unit(i, n)));
    return out;
}

double spiral_covering_radius(std::size_t n) {
    require(n > 0, "lattice size must be positive");
    std::vector<Vec3> units(n);
    for (std::size_t i = 0; i < n; ++i) units[i] = spiral_unit(i, n);
    double typical = 1.2 / std::sqrt(double(n));
    SpatialIndex index(cell_for_chord(2.0 * typical));
    for (std::size_t i = 0; i < n; ++i) index.insert(std::uint32_t(i), units[i]);
    // Probe with an unrelated lattice; the empirical maximum is inflated by a safety factor.
    const std::size_t probes = std::max<std::size_t>(20000, std::min<std::size_t>(4 * n, 400000));
    double worst = 0;
    for (std::size_t i = 0; i < probes; ++i) {
        Vec3 u = spiral_unit(i, probes);
        double ang = 0.5 * double(i);
        Vec3 v{u.x * std::cos(ang) - u.y * std::sin(ang), u.x * std::sin(ang) + u.y * std::cos(ang), u.z};
        auto id = index.nearest(v, units);
        worst = std::max(worst, chord2(v, units[id]));
    }
    return 1.5 * dist_from_chord2(worst);
}

namespace {

void attach_units(SphereNet& net) {
    net.units.clear();
    net.units.reserve(net.points.size());
    for (const auto& p : net.points) net.units.push_back(to_unit(p));
}

}  // namespace

SphereNet greedy_net(double delta, const std::vector<SpherePoint>& candidates) {
    require(delta > 0, "net separation must be positive");
    require(!candidates.empty(), "candidate list is empty");
    SphereNet net;
    net.separation = delta;
    const double c2 = delta > kHalfPi ? std::numeric_limits<double>::infinity() : chord2_from_dist(delta);
    SpatialIndex index(cell_for_chord(std::sqrt(std::min(c2, 4.0))));
    std::vector<Vec3> cand_units;
    cand_units.reserve(candidates.size());
    for (const auto& p : candidates) cand_units.push_back(to_unit(p));
    const double reach = std::sqrt(std::min(c2, 4.0));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Vec3& u = cand_units[i];
        bool ok = true;
        if (c2 == std::numeric_limits<double>::infinity()) {
            ok = net.points.empty();
        } else {
            index.for_each_near(u, reach, [&](std::uint32_t id) {
                if (ok && chord2(u, net.units[id]) < c2) ok = false;
            });
        }
        if (!ok) continue;
        index.insert(std::uint32_t(net.points.size()), u);
        net.points.push_back(candidates[i]);
        net.units.push_back(u);
    }
    double worst = 0;
    for (const auto& u : cand_units) worst = std::max(worst, chord2(u, net.units[index.nearest(u, net.units)]));
    net.covering_radius = dist_from_chord2(worst);
    return net;
}

SphereNet lattice_net(std::size_t n) {
    SphereNet net;
    net.points = spiral_lattice(n);
    attach_units(net);
    double typical = 1.2 / std::sqrt(double(n));
    SpatialIndex index(cell_for_chord(2.0 * typical));
    for (std::size_t i = 0; i < n; ++i) index.insert(std::uint32_t(i), net.units[i]);
    double best = 4.0;
    for (std::size_t i = 0; i < n; ++i)
        index.for_each_near(net.units[i], 2.0 * typical, [&](std::uint32_t id) {
            if (id != i) best = std::min(best, chord2(net.units[i], net.units[id]));
        });
    net.separation = n > 1 ? dist_from_chord2(best) : kHalfPi;
    net.covering_radius = spiral_covering_radius(n);
    return net;
}

std::size_t nearest_index(const SphereNet& net, const SpherePoint& p) {
    require(!net.units.empty(), "empty net");
    Vec3 u = to_unit(p);
    std::size_t best = 0;
    double bd = chord2(u, net.units[0]);
    for (std::size_t i = 1; i < net.units.size(); ++i) {
        double c = chord2(u, net.units[i]);
        if (c < bd) {
            bd = c;
            best = i;
        }
    }
    return best;
}

int SpherePartition::cell_of(const SpherePoint& p) const { return cell_of(to_unit(p)); }

int SpherePartition::cell_of(const Vec3& u) const {
    const double c2 = chord2_from_dist(radius);
    if (!index) {
        for (std::size_t i = 0; i < units.size(); ++i)
            if (chord2(u, units[i]) <= c2) return int(i);
        return -1;
    }
    long best = -1;
    index->for_each_near(u, std::sqrt(c2), [&](std::uint32_t id) {
        if ((best < 0 || long(id) < best) && chord2(u, units[id]) <= c2) best = long(id);
    });
    return int(best);
}

SpherePartition partition_Ak(int k, std::size_t candidates) {
    require(k >= 0, "partition level must be nonnegative");
    require(k <= 12, "partition level above the supported range");
    const double R = std::ldexp(1.0, -(k + 1));
    std::size_t n = candidates;
    if (n == 0) {
        double target = R / 16.0;
        n = std::max<std::size_t>(20000, std::size_t(std::ceil(std::pow(1.1 / target, 2))));
    }
    const double rc = spiral_covering_radius(n);
    if (rc > R / 4.0)
        throw PreconditionError("candidate resolution insufficient for partition level " + std::to_string(k));
    // Separation R - rc ensures closed R-balls around the net cover the whole sphere.
    const double sep = R - rc;
    const double c2 = chord2_from_dist(sep);
    SpherePartition part;
    part.level = k;
    part.radius = R;
    SpatialIndex index(cell_for_chord(std::sqrt(c2)));
    const double reach = std::sqrt(c2);
    for (auto i : bit_reversed_order(n)) {
        Vec3 u = spiral_unit(i, n);
        bool ok = true;
        index.for_each_near(u, reach, [&](std::uint32_t id) {
            if (ok && chord2(u, part.units[id]) < c2) ok = false;
        });
        if (!ok) continue;
        index.insert(std::uint32_t(part.units.size()), u);
        part.units.push_back(u);
    }
    part.centers.reserve(part.units.size());
    for (const auto& u : part.units) part.centers.push_back(from_unit(u));
    auto cells = std::make_shared<SpatialIndex>(cell_for_chord(std::sqrt(chord2_from_dist(R))));
    for (std::size_t i = 0; i < part.units.size(); ++i) cells->insert(std::uint32_t(i), part.units[i]);
    part.index = cells;
    return part;
}

PartitionProbe::PartitionProbe(const SpherePartition& part, std::size_t samples) : part_(part) {
    std::size_t n = samples;
    if (n == 0) n = std::max<std::size_t>(50000, std::size_t(std::ceil(std::pow(1.1 * 16.0 / part.radius, 2))));
    units_.resize(n);
    members_.assign(part.units.size(), {});
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 u = spiral_unit(i, n);
        // Rotate away from the lattice used to build the net.
        const double a = 0.7;
        units_[i] = {u.x, u.y * std::cos(a) - u.z * std::sin(a), u.y * std::sin(a) + u.z * std::cos(a)};
        int c = part.cell_of(units_[i]);
        if (c < 0) ++uncovered_;
        else members_[c].push_back(std::uint32_t(i));
    }
}

std::size_t PartitionProbe::occupied() const {
    return std::size_t(std::count_if(members_.begin(), members_.end(), [](const auto& m) { return !m.empty(); }));
}

PartitionProbe::Count PartitionProbe::count(const SpherePoint& x, double delta) const {
    Count out;
    const Vec3 u = to_unit(x);
    const double R = part_.radius;
    const double reach = std::min(delta + R, kHalfPi);
    const double c2_reach = chord2_from_dist(reach);
    const bool whole = delta + R >= kHalfPi;
    const double c2_delta = delta >= kHalfPi ? 4.0 + 1.0 : chord2_from_dist(delta);
    std::vector<char> seen(part_.units.size(), 0);
    for (std::size_t i = 0; i < part_.units.size(); ++i) {
        double c2 = chord2(u, part_.units[i]);
        if (!whole && c2 >= c2_reach) continue;
        ++out.center_bound;
        if (members_[i].empty()) continue;
        double dc = dist_from_chord2(c2);
        bool hit = false;
        if (dc + R < delta) {
            hit = true;
        } else {
            for (auto s : members_[i])
                if (chord2(u, units_[s]) < c2_delta) {
                    hit = true;
                    break;
                }
        }
        if (hit) {
            ++out.sampled;
            seen[i] = 1;
        }
    }
    // Small balls can miss the global sample: add a polar sample of the ball itself.
    if (delta < 4 * R) {
        const int rings = 8;
        auto mark = [&](const SpherePoint& y) {
            int c = part_.cell_of(y);
            if (c >= 0 && !seen[std::size_t(c)]) {
                seen[std::size_t(c)] = 1;
                ++out.sampled;
            }
        };
        mark(x);
        for (int j = 1; j <= rings; ++j) {
            const double r = delta * (double(j) - 0.5) / rings;
            const int dirs = 8 * j;
            for (int a = 0; a < dirs; ++a) mark(geodesic_point(x, r, 2 * kPi * a / dirs));
        }
    }
    return out;
}

}  // namespace rdsphere
