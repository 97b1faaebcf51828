#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "rdsphere/rds.hpp"

namespace rdsphere {

// Greedy (n, eps)-separated subset of a candidate list for T_first, T_first+1, ...
struct SeparatedSet {
    std::vector<SpherePoint> points;
    std::vector<std::size_t> candidate_index;
    int n = 0;
    double eps = 0;
    // orbits[k][j] = unit vector of T_first^{first+j}(points[k]), j < n
    std::vector<std::vector<Vec3>> orbits;
    // (rejected candidate, accepted point within eps at every time j < n)
    std::vector<std::pair<std::size_t, std::size_t>> rejections;

    std::size_t size() const { return points.size(); }
    // First j < n with d_s(T^j x_a, T^j x_b) > eps, or -1 if none.
    int witness(std::size_t a, std::size_t b) const;
    // Exhaustive pair scan.
    bool verify() const;
};

SeparatedSet separated_set(const StepSequence& seq, int n, double eps, const std::vector<SpherePoint>& candidates);

struct CandidateOptions {
    std::size_t net = 4096;        // lattice tested with the derivative criterion
    double delta = 0.02;           // ball radius of the criterion
    double growth = 1e3;           // derivative threshold H
    int horizon = 24;              // criterion horizon
    double refine = 4;             // overlay spacing = eps / (refine * expansion)
    std::size_t max_candidates = 2000000;
};

struct CandidateSet {
    std::vector<SpherePoint> points;
    bool circle = false;  // overlay on an invariant circle |z| = radius
    double radius = 0;
    std::size_t flagged = 0;
};

// Points near the Julia set of seq: an overlay on an invariant circle |z| = rho if the
// flagged net points all lie near one, otherwise backward orbits of a flagged point.
CandidateSet julia_candidates(const StepSequence& seq, int n, double eps, const CandidateOptions& opt = {});

struct PressureOptions {
    CandidateOptions candidates;
    std::uint64_t seed = 1;  // stream of the omega samples
};

struct PressureEstimate {
    int n = 0;
    double eps = 0;
    int samples = 0;
    // (1/(n-1)) ln(S_n / S_1), S_k = sum over the (k, eps)-separated set of e^{phi_0^k}.
    double estimate = 0;
    double half_width = 0;  // 1.96 standard errors over the omega samples
    // (1/n) ln S_n.
    double raw = 0;
    double raw_half_width = 0;
    std::vector<double> per_sample;
    std::vector<std::size_t> set_sizes;
};

// omega sample s is the window [0, n] of sys.reseeded(mix64(seed, 0xa11ce, s)); a
// deterministic system uses a single sample.
BaseSystem omega_system(const BaseSystem& sys, std::uint64_t seed, int s);
StepSequence omega_sample(const BaseSystem& sys, std::uint64_t seed, int s, long long first, long long last);

PressureEstimate pressure_estimate(const BaseSystem& sys, int n, double eps, int samples, const PressureOptions& opt = {});

struct LambdaOptions {
    std::size_t grid = 6000;
    int depth = 20;
};

struct PressureLambdaReport {
    PressureEstimate pressure;
    double lambda_mean = 0;  // mean over omega of (1/n) ln lambda_0^n
    double lambda_half_width = 0;
    double gap = 0;          // |estimate - lambda_mean|
};
PressureLambdaReport pressure_vs_lambda(const BaseSystem& sys, int n, double eps, int samples,
                                        const PressureOptions& popt = {}, const LambdaOptions& lopt = {});

// CSV rows n, eps, estimate, half_width, raw, lambda_mean, gap over a ladder.
void write_pressure_csv(std::ostream& os, const std::vector<PressureLambdaReport>& rows);

}  // namespace rdsphere
