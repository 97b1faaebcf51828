#include "rdsphere/rds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdsphere/errors.hpp"

namespace rdsphere {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return splitmix(splitmix(splitmix(seed) ^ stream) ^ index);
}

double Rng::normal() {
    double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log1p(-u)) * std::cos(2 * kPi * v);
}

SpherePoint Rng::sphere_point() {
    double h = uniform(-1.0, 1.0);
    double t = uniform(0.0, 2 * kPi);
    double r = std::sqrt(std::max(0.0, 1 - h * h));
    return from_unit(Vec3{r * std::cos(t), r * std::sin(t), h});
}

BaseSystem BaseSystem::iid(std::vector<SystemEntry> support, std::uint64_t seed) {
    require(!support.empty(), "empty support");
    BaseSystem s;
    s.mode_ = Mode::Iid;
    s.seed_ = seed;
    double total = 0;
    for (const auto& e : support) {
        require(e.weight > 0, "support weights must be positive");
        total += e.weight;
    }
    require(std::abs(total - 1.0) <= 1e-12, "support weights must sum to 1");
    s.support_ = std::move(support);
    double acc = 0;
    for (const auto& e : s.support_) s.cumulative_.push_back(acc += e.weight);
    return s;
}

BaseSystem BaseSystem::explicit_sequence(std::vector<SystemEntry> entries) {
    require(!entries.empty(), "empty support");
    BaseSystem s;
    s.mode_ = Mode::Explicit;
    s.support_ = std::move(entries);
    return s;
}

BaseSystem BaseSystem::constant(const RationalMap& T, const Potential& phi) {
    return explicit_sequence({SystemEntry{T, phi, 1.0, "T"}});
}

std::size_t BaseSystem::index_at(long long j) const {
    const long long n = static_cast<long long>(support_.size());
    if (mode_ == Mode::Explicit) return std::size_t(((j % n) + n) % n);
    double u = unit_interval(mix64(seed_, 0x5eed, std::uint64_t(j))) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(std::size_t(it - cumulative_.begin()), support_.size() - 1);
}

BaseSystem BaseSystem::reseeded(std::uint64_t seed) const {
    BaseSystem s = *this;
    s.seed_ = seed;
    return s;
}

BaseSystem BaseSystem::shifted(double c) const {
    BaseSystem s = *this;
    for (auto& e : s.support_) {
        require(e.potential.is_constant(), "only constant potentials can be shifted");
        e.potential = Potential::constant(e.potential.constant_value() + c);
    }
    return s;
}

bool BaseSystem::deterministic() const { return mode_ == Mode::Explicit || support_.size() == 1; }

int BaseSystem::max_degree() const {
    int d = 0;
    for (const auto& e : support_) d = std::max(d, e.map.degree());
    return d;
}

StepSequence::StepSequence(long long first, std::vector<RationalMap> maps, std::vector<Potential> potentials)
    : first_(first), maps_(std::move(maps)), potentials_(std::move(potentials)) {
    require(maps_.size() == potentials_.size(), "one potential per map");
}

const RationalMap& StepSequence::map(long long j) const {
    require(contains(j), "step index outside the sampled window");
    return maps_[std::size_t(j - first_)];
}

const Potential& StepSequence::potential(long long j) const {
    require(contains(j), "step index outside the sampled window");
    return potentials_[std::size_t(j - first_)];
}

StepSequence StepSequence::window(long long a, long long b) const {
    require(a <= b && contains(a) && contains(b), "window outside the sampled range");
    std::vector<RationalMap> maps(maps_.begin() + (a - first_), maps_.begin() + (b - first_) + 1);
    std::vector<Potential> pots(potentials_.begin() + (a - first_), potentials_.begin() + (b - first_) + 1);
    return StepSequence(a, std::move(maps), std::move(pots));
}

StepSequence sample_sequence(const BaseSystem& sys, long long m, long long n) {
    require(m <= n, "sequence range must satisfy m <= n");
    std::vector<RationalMap> maps;
    std::vector<Potential> pots;
    maps.reserve(std::size_t(n - m + 1));
    for (long long j = m; j <= n; ++j) {
        const auto& e = sys.at(j);
        maps.push_back(e.map);
        pots.push_back(e.potential);
    }
    return StepSequence(m, std::move(maps), std::move(pots));
}

Trajectory pseudo_iterate(const StepSequence& seq, long long m, int n, const SpherePoint& x) {
    require(n >= 0, "iteration count must be nonnegative");
    Trajectory t;
    t.start = x;
    t.points.reserve(std::size_t(n) + 1);
    t.derivatives.reserve(std::size_t(n) + 1);
    t.points.push_back(x);
    t.derivatives.push_back(1.0);
    SpherePoint p = x;
    double prod = 1.0;
    for (int k = 0; k < n; ++k) {
        double d = 0;
        p = seq.map(m + k).eval_deriv(p, d);
        prod *= d;
        t.points.push_back(p);
        t.derivatives.push_back(prod);
    }
    return t;
}

double birkhoff_sum(const StepSequence& seq, long long m, long long n, const SpherePoint& x) {
    require(n >= m, "Birkhoff sum needs n >= m");
    double s = 0;
    SpherePoint p = x;
    for (long long j = m; j < n; ++j) {
        s += seq.potential(j)(p);
        if (j + 1 < n) p = seq.map(j).eval(p);
    }
    return s;
}

JuliaResult julia_test(const StepSequence& seq, const SpherePoint& x, double delta, double H, int n_max,
                       const JuliaOptions& opt) {
    require(delta > 0, "ball radius must be positive");
    require(H > 1, "growth threshold must exceed 1");
    require(n_max >= 1, "horizon must be at least 1");
    std::vector<SpherePoint> pts{x};
    for (int r = 1; r <= opt.rings; ++r)
        for (int k = 0; k < opt.directions; ++k)
            pts.push_back(geodesic_point(x, delta * r / opt.rings, 2 * kPi * k / opt.directions));
    std::vector<double> logd(pts.size(), 0.0);
    const double target = std::log(H);
    JuliaResult res;
    res.max_log_deriv = -INFINITY;
    const long long m = seq.first();
    for (int n = 1; n <= n_max; ++n) {
        double best = -INFINITY;
        for (std::size_t s = 0; s < pts.size(); ++s) {
            double d = 0;
            pts[s] = seq.map(m + n - 1).eval_deriv(pts[s], d);
            logd[s] += std::log(d);
            best = std::max(best, logd[s]);
        }
        res.max_log_deriv = std::max(res.max_log_deriv, best);
        if (!res.flagged && best >= target) {
            res.flagged = true;
            res.first_n = n;
            if (opt.stop_when_flagged) break;
        }
    }
    return res;
}

bool julia_flag(const StepSequence& seq, const SpherePoint& x, double delta, double H, int n_max,
                const JuliaOptions& opt) {
    return julia_test(seq, x, delta, H, n_max, opt).flagged;
}

std::vector<SpherePoint> exceptional_estimate(const StepSequence& seq, int n, double tol) {
    require(n >= 1, "horizon must be at least 1");
    const long long m = seq.first();
    // Candidates come from the first step of degree above one, pulled back through
    // the preceding degree-one steps; degree-one steps ramify nowhere and constrain nothing.
    long long j0 = m;
    while (j0 < m + n && seq.map(j0).degree() == 1) ++j0;
    require(j0 < m + n, "every step in the window has degree one");
    std::vector<SpherePoint> cand;
    for (const auto& p : totally_ramified(seq.map(j0))) {
        SpherePoint q = p;
        for (long long j = j0 - 1; j >= m; --j) q = preimages(seq.map(j), q).entries.front().point;
        cand.push_back(q);
    }
    std::vector<SpherePoint> out;
    for (const auto& x : cand) {
        SpherePoint p = x;
        bool ok = true;
        for (long long j = m; j < m + n && ok; ++j) {
            const auto& T = seq.map(j);
            if (T.degree() > 1) {
                auto tr = totally_ramified(T);
                ok = std::any_of(tr.begin(), tr.end(), [&](const SpherePoint& q) { return dist_s(p, q) <= tol; });
            }
            p = T.eval(p);
        }
        if (ok) out.push_back(x);
    }
    return out;
}

SuddenSampler::SuddenSampler(const GrowthFamily& f, int l_max) {
    require(l_max >= 0, "l_max must be nonnegative");
    require(static_cast<bool>(f.diagonal), "growth family needs an evaluator");
    const double cap = 0x1.0p63;
    auto checked = [&](double v) {
        if (!(v >= 0) || v >= cap) throw CapacityError("k_l exceeds the representable range; lower l_max");
        return std::floor(v);
    };
    double prev_max = 0;
    for (int l = 0; l <= l_max; ++l) {
        double k = checked(f.diagonal(0, 0));
        if (l > 0) {
            const long long top = static_cast<long long>(std::llround(std::pow(3.0, l)));
            if (f.monotone_in_n) {
                k = std::max(k, checked(f.diagonal(top, prev_max)));
            } else {
                for (long long n = 1; n <= top; ++n) k = std::max(k, checked(f.diagonal(n, prev_max)));
            }
        }
        k_.push_back(std::uint64_t(k));
        prev_max = std::max(prev_max, k);
    }
}

double SuddenSampler::level_weight(int l) const {
    require(l >= 0 && l <= l_max(), "level out of range");
    return l < l_max() ? std::ldexp(1.0, -(l + 1)) : std::ldexp(1.0, -l_max());
}

std::uint64_t SuddenSampler::sample(Rng& rng) const {
    // Geometric law: level l with probability 2^-(l+1), the tail folded into l_max.
    double u = rng.uniform();
    int l = 0;
    double acc = 0.5;
    while (l < l_max() && u >= acc) {
        ++l;
        acc += std::ldexp(1.0, -(l + 1));
    }
    return k_[std::size_t(l)];
}

}  // namespace rdsphere
