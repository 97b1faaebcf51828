#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rdsphere/potential.hpp"
#include "rdsphere/ratmap.hpp"

namespace rdsphere {

// Counter-based randomness: a well-mixed 64-bit value for (seed, stream, index).
std::uint64_t mix64(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
// Uniform in [0, 1) from the top 53 bits.
inline double unit_interval(std::uint64_t u) { return double(u >> 11) * 0x1.0p-53; }

// Sequential generator built on mix64, for Monte-Carlo loops.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}
    std::uint64_t next() { return mix64(seed_, stream_, counter_++); }
    double uniform() { return unit_interval(next()); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::size_t below(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }
    double normal();
    // Uniform point of the sphere for the normalized area measure.
    SpherePoint sphere_point();

private:
    std::uint64_t seed_, stream_, counter_ = 0;
};

struct SystemEntry {
    RationalMap map;
    Potential potential;
    double weight = 1;
    std::string label;
};

// The base of a random system: index j in Z selects an entry, either iid by
// weight (counter-based, so any j is addressable) or by cycling an explicit list.
class BaseSystem {
public:
    enum class Mode { Iid, Explicit };

    static BaseSystem iid(std::vector<SystemEntry> support, std::uint64_t seed);
    static BaseSystem explicit_sequence(std::vector<SystemEntry> entries);
    static BaseSystem constant(const RationalMap& T, const Potential& phi = Potential::constant(0));

    Mode mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<SystemEntry>& support() const { return support_; }
    std::size_t index_at(long long j) const;
    const SystemEntry& at(long long j) const { return support_[index_at(j)]; }
    // Same support, independent randomness (used for separate omega samples).
    BaseSystem reseeded(std::uint64_t seed) const;
    // Same entries with every potential shifted by c.
    BaseSystem shifted(double c) const;
    bool deterministic() const;
    int max_degree() const;

private:
    Mode mode_ = Mode::Explicit;
    std::uint64_t seed_ = 0;
    std::vector<SystemEntry> support_;
    std::vector<double> cumulative_;
};

// A finite window [first, last] of a realized sequence.
class StepSequence {
public:
    StepSequence() = default;
    StepSequence(long long first, std::vector<RationalMap> maps, std::vector<Potential> potentials);

    long long first() const { return first_; }
    long long last() const { return first_ + static_cast<long long>(maps_.size()) - 1; }
    std::size_t size() const { return maps_.size(); }
    bool contains(long long j) const { return j >= first_ && j <= last(); }
    const RationalMap& map(long long j) const;
    const Potential& potential(long long j) const;
    // Sub-window [a, b].
    StepSequence window(long long a, long long b) const;

private:
    long long first_ = 0;
    std::vector<RationalMap> maps_;
    std::vector<Potential> potentials_;
};

// Entries at indices m..n inclusive.
StepSequence sample_sequence(const BaseSystem& sys, long long m, long long n);

struct Trajectory {
    SpherePoint start;
    std::vector<SpherePoint> points;   // points[k] = T_m^{m+k}(start)
    std::vector<double> derivatives;   // derivatives[k] = (T_m^{m+k})_*(start)
};

// Orbit under T_m, ..., T_{m+n-1}.
Trajectory pseudo_iterate(const StepSequence& seq, long long m, int n, const SpherePoint& x);
inline Trajectory pseudo_iterate(const StepSequence& seq, int n, const SpherePoint& x) {
    return pseudo_iterate(seq, seq.first(), n, x);
}

// phi_m^n(x) = sum_{j=m}^{n-1} phi_j(T_m^j x).
double birkhoff_sum(const StepSequence& seq, long long m, long long n, const SpherePoint& x);

struct JuliaOptions {
    int rings = 2;        // sample circles inside the ball, plus its center
    int directions = 12;  // samples per circle
    bool stop_when_flagged = false;  // skip horizons after the first flag
};
struct JuliaResult {
    bool flagged = false;
    int first_n = 0;           // first horizon whose sampled sup reaches H (0 if none)
    double max_log_deriv = 0;  // largest log (T_0^n)_* seen over samples and n <= n_max
};
// Derivative-growth test over the closed ball B(x, delta) for horizons up to n_max, from seq.first().
JuliaResult julia_test(const StepSequence& seq, const SpherePoint& x, double delta, double H, int n_max,
                       const JuliaOptions& opt = {});
bool julia_flag(const StepSequence& seq, const SpherePoint& x, double delta, double H, int n_max,
                const JuliaOptions& opt = {});

// Points whose iterates are totally ramified for T_first, ..., T_{first+n-1}.
std::vector<SpherePoint> exceptional_estimate(const StepSequence& seq, int n, double tol = 1e-6);

// f_n(k, ..., k) for the monotone growth family; n = 0 is the constant f_0().
struct GrowthFamily {
    std::function<double(long long n, double k)> diagonal;
    bool monotone_in_n = false;  // then only n = 3^l is evaluated
};

// k_l = max over n <= 3^l and tuples with entries k_{l'} (l' < l) of f_n, for l <= l_max.
// With f monotone in each argument the inner maximum is at the largest earlier k.
class SuddenSampler {
public:
    SuddenSampler(const GrowthFamily& f, int l_max = 16);

    const std::vector<std::uint64_t>& levels() const { return k_; }
    int l_max() const { return int(k_.size()) - 1; }
    // P(l) = 2^-(l+1) for l < l_max and the remaining tail mass at l_max.
    double level_weight(int l) const;
    std::uint64_t sample(Rng& rng) const;

private:
    std::vector<std::uint64_t> k_;
};

}  // namespace rdsphere
