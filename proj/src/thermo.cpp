#include "rdsphere/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"
#include "rdsphere/spatial.hpp"
#include "rdsphere/transfer.hpp"

namespace rdsphere {

namespace {

std::vector<Vec3> orbit(const StepSequence& seq, int n, const SpherePoint& x) {
    std::vector<Vec3> o;
    o.reserve(std::size_t(n));
    SpherePoint p = x;
    for (int j = 0; j < n; ++j) {
        o.push_back(to_unit(p));
        if (j + 1 < n) p = seq.map(seq.first() + j).eval(p);
    }
    return o;
}

// Radius of T(|z| = r) if that image is a centered circle (64 samples agree), else NaN.
double image_radius(const RationalMap& T, double r) {
    double lo = INFINITY, hi = 0;
    for (int k = 0; k < 64; ++k) {
        const SpherePoint q = T.eval(SpherePoint(std::polar(r, 2 * kPi * (k + 0.5) / 64)));
        if (q.is_inf()) return NAN;
        const double a = std::abs(q.value());
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    return hi - lo <= 1e-9 * (1 + hi) ? 0.5 * (lo + hi) : NAN;
}

double log_sum_exp(const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    double s = 0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s);
}

void mean_half_width(const std::vector<double>& v, double& mean, double& hw) {
    mean = 0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    hw = 0;
    if (v.size() < 2) return;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    hw = 1.96 * std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

}  // namespace

int SeparatedSet::witness(std::size_t a, std::size_t b) const {
    const double e2 = chord2_from_dist(eps);
    for (int j = 0; j < n; ++j)
        if (chord2(orbits[a][std::size_t(j)], orbits[b][std::size_t(j)]) > e2) return j;
    return -1;
}

bool SeparatedSet::verify() const {
    for (std::size_t a = 0; a < size(); ++a)
        for (std::size_t b = a + 1; b < size(); ++b)
            if (witness(a, b) < 0) return false;
    return true;
}

SeparatedSet separated_set(const StepSequence& seq, int n, double eps, const std::vector<SpherePoint>& candidates) {
    require(n >= 1, "horizon must be at least 1");
    require(eps > 0, "eps must be positive");
    require(seq.contains(seq.first() + n - 1) || n == 1, "sequence shorter than the horizon");
    SeparatedSet out;
    out.n = n;
    out.eps = eps;
    const double e2 = chord2_from_dist(eps);
    const double chord = std::sqrt(e2);
    SpatialIndex index(std::max(chord, 1e-4));
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        auto o = orbit(seq, n, candidates[c]);
        std::size_t by = 0;
        const bool close = index.any_near(o[0], chord, [&](std::uint32_t id) {
            const auto& p = out.orbits[id];
            for (int j = 0; j < n; ++j)
                if (chord2(o[std::size_t(j)], p[std::size_t(j)]) > e2) return false;
            by = id;
            return true;
        });
        if (close) {
            out.rejections.emplace_back(c, by);
            continue;
        }
        index.insert(std::uint32_t(out.points.size()), o[0]);
        out.points.push_back(candidates[c]);
        out.candidate_index.push_back(c);
        out.orbits.push_back(std::move(o));
    }
    return out;
}

CandidateSet julia_candidates(const StepSequence& seq, int n, double eps, const CandidateOptions& opt) {
    const int horizon = std::min<int>(opt.horizon, int(seq.size()));
    CandidateSet out;
    std::vector<SpherePoint> flagged;
    for (const auto& p : spiral_lattice(opt.net))
        if (julia_flag(seq, p, opt.delta, opt.growth, horizon)) flagged.push_back(p);
    out.flagged = flagged.size();
    if (flagged.empty()) throw NumericalError("no net point passes the derivative criterion");

    // Circle test: all flagged points near one centered circle that every step maps onto itself.
    bool circle = std::none_of(flagged.begin(), flagged.end(), [](const SpherePoint& p) { return p.is_inf() || p.value() == cplx(0.0); });
    double rho = 0;
    if (circle) {
        std::vector<double> radii;
        for (const auto& p : flagged) radii.push_back(std::abs(p.value()));
        std::nth_element(radii.begin(), radii.begin() + radii.size() / 2, radii.end());
        const double median = radii[radii.size() / 2];
        const auto& T0 = seq.map(seq.first());
        // Invariant radius of the first step near the median, by bisection on R(r) - r.
        double lo = 0.8 * median, hi = 1.25 * median;
        const double flo = image_radius(T0, lo) - lo, fhi = image_radius(T0, hi) - hi;
        circle = std::isfinite(flo) && std::isfinite(fhi) && flo * fhi < 0;
        for (int it = 0; it < 200 && circle && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi), fm = image_radius(T0, mid) - mid;
            if (!std::isfinite(fm)) circle = false;
            else if ((fm < 0) == (flo < 0)) lo = mid;
            else hi = mid;
        }
        rho = 0.5 * (lo + hi);
        const double band = 2 * (opt.delta + spiral_covering_radius(opt.net));
        for (const auto& p : flagged) circle = circle && dist_s(p, SpherePoint(rho * p.value() / std::abs(p.value()))) <= band;
        for (int j = 0; j < n && circle; ++j) {
            const double r = image_radius(seq.map(seq.first() + j), rho);
            circle = std::isfinite(r) && std::abs(r - rho) <= 1e-9 * (1 + rho);
        }
    }
    if (circle) {
        double expansion = 1;
        for (int j = 0; j + 1 < n; ++j) {
            const auto& T = seq.map(seq.first() + j);
            double top = 0;
            for (int k = 0; k < 64; ++k) top = std::max(top, T.sph_deriv(SpherePoint(std::polar(rho, 2 * kPi * k / 64))));
            expansion *= std::max(top, 1.0);
        }
        const double length = kPi * 2 * rho / (1 + rho * rho);
        const double h = eps / (opt.refine * expansion);
        const double count = std::ceil(length / h);
        if (count > double(opt.max_candidates)) throw CapacityError("circle overlay exceeds max_candidates");
        const std::size_t m = std::max<std::size_t>(std::size_t(count), 16);
        out.points.reserve(m);
        for (std::size_t k = 0; k < m; ++k) out.points.push_back(SpherePoint(std::polar(rho, 2 * kPi * double(k) / double(m))));
        out.circle = true;
        out.radius = rho;
        return out;
    }
    // Backward orbits accumulate on the Julia set of the sequence.
    const std::size_t target = std::min<std::size_t>(opt.max_candidates, 100000);
    PreimageTree tree;
    for (int k = 1; k < int(seq.size()); ++k) {
        tree = preimage_tree(seq, seq.first(), k, flagged.front());
        if (tree.leaves.size() >= target) break;
    }
    out.points = std::move(tree.leaves);
    return out;
}

BaseSystem omega_system(const BaseSystem& sys, std::uint64_t seed, int s) {
    return sys.deterministic() ? sys : sys.reseeded(mix64(seed, 0xa11ce, std::uint64_t(s)));
}

StepSequence omega_sample(const BaseSystem& sys, std::uint64_t seed, int s, long long first, long long last) {
    return sample_sequence(omega_system(sys, seed, s), first, last);
}

PressureEstimate pressure_estimate(const BaseSystem& sys, int n, double eps, int samples, const PressureOptions& opt) {
    require(n >= 2, "pressure needs n >= 2");
    require(samples >= 1, "at least one omega sample");
    require(eps > 0, "eps must be positive");
    PressureEstimate out;
    out.n = n;
    out.eps = eps;
    out.samples = sys.deterministic() ? 1 : samples;
    std::vector<double> raw;
    for (int s = 0; s < out.samples; ++s) {
        const auto seq = omega_sample(sys, opt.seed, s, 0, std::max<long long>(n, opt.candidates.horizon));
        const auto cand = julia_candidates(seq, n, eps, opt.candidates);
        const auto En = separated_set(seq, n, eps, cand.points);
        const auto E1 = separated_set(seq, 1, eps, cand.points);
        std::vector<double> wn, w1;
        for (const auto& x : En.points) wn.push_back(birkhoff_sum(seq, 0, n, x));
        for (const auto& x : E1.points) w1.push_back(seq.potential(0)(x));
        const double ln_n = log_sum_exp(wn), ln_1 = log_sum_exp(w1);
        out.per_sample.push_back((ln_n - ln_1) / (n - 1));
        raw.push_back(ln_n / n);
        out.set_sizes.push_back(En.size());
    }
    mean_half_width(out.per_sample, out.estimate, out.half_width);
    mean_half_width(raw, out.raw, out.raw_half_width);
    return out;
}

PressureLambdaReport pressure_vs_lambda(const BaseSystem& sys, int n, double eps, int samples,
                                        const PressureOptions& popt, const LambdaOptions& lopt) {
    PressureLambdaReport out;
    out.pressure = pressure_estimate(sys, n, eps, samples, popt);
    auto grid = Grid::lattice(lopt.grid);
    std::vector<double> lam;
    for (int s = 0; s < out.pressure.samples; ++s) {
        SequenceOperators ops(omega_sample(sys, popt.seed, s, -lopt.depth, n + 40), grid);
        const auto eig = eigen_solution(ops, 0, n, lopt.depth);
        lam.push_back(std::log(eig.lambda_total) / n);
    }
    mean_half_width(lam, out.lambda_mean, out.lambda_half_width);
    out.gap = std::abs(out.pressure.estimate - out.lambda_mean);
    return out;
}

void write_pressure_csv(std::ostream& os, const std::vector<PressureLambdaReport>& rows) {
    os << "n,eps,estimate,half_width,lambda_mean,gap,raw\n";
    for (const auto& r : rows)
        os << r.pressure.n << ',' << fmt(r.pressure.eps) << ',' << fmt(r.pressure.estimate) << ','
           << fmt(r.pressure.half_width) << ',' << fmt(r.lambda_mean) << ',' << fmt(r.gap) << ',' << fmt(r.pressure.raw)
           << '\n';
}

}  // namespace rdsphere
