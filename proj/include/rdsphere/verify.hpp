#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rdsphere/ratmap.hpp"

namespace rdsphere {

// Outcome of one randomized lemma check. A trial is a violation only beyond the
// declared tolerance; margins are (bound side - tested side), so negative is bad.
struct CheckReport {
    std::string lemma;
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t skipped = 0;  // instances outside the hypothesis
    double worst_margin = INFINITY;
    double tolerance = 0;
    std::string parameters;
    std::vector<std::string> notes;

    bool passed() const { return violations == 0 && trials > 0; }
    void record(double margin, double tol);
    void merge(const CheckReport& other);
};

// Unit disk geometry with tanh(d_h(0, x)) = |x|.
double hyperbolic_distance(cplx x, cplx y);
// Hyperbolic-to-spherical norm of the differential of T at x in the unit disk.
double hs_norm(const RationalMap& T, cplx x);
// Lipschitz constant sqrt(a / (1 - a)) for an image of normalized area a.
double koebe_bound(double area);
// Normalized area of T(unit disk) for a Mobius map T (a spherical cap).
double mobius_disk_area(const RationalMap& T);

struct KoebeSharpness {
    double c = 0, derivative = 0, area = 0, bound = 0;
};
// zeta(z) = c z: derivative at 0 and the bound computed independently.
KoebeSharpness koebe_sharpness(double c);

// Random Mobius maps and injective restrictions z -> T(a + r z), pairs per map.
CheckReport check_koebe(std::size_t maps, std::size_t pairs, std::uint64_t seed);

// H~ = 32/pi^2 sup(T_*)^2 together with the three derivative inequalities.
double c10_constant(const RationalMap& T);
CheckReport check_C10(const RationalMap& T, std::size_t samples, std::uint64_t seed);

// C_8 read off from 1/2 <= 9 (16 pi^8)^D h_0^2 H^{8D} / delta^{4D}.
double c8_constant(int D);
struct C7C8Terms {
    double h0 = 0, delta = 0, H = 0, rhs = 0;
};
// delta is the distance to the ramification points (pi/2 if there are none).
C7C8Terms c7c8_terms(const RationalMap& T, const SpherePoint& x, int D, double H);
CheckReport check_C7C8(int D, std::size_t samples, std::uint64_t seed);

// Throws PreconditionError if delta is outside (0, pi/4] or T_* is not bounded
// below by a positive h on B(a, delta).
CheckReport check_UVW(const RationalMap& T, const SpherePoint& a, double delta, std::size_t samples,
                      std::uint64_t seed);
// Random maps, centers away from the ramification points.
CheckReport check_UVW_random(std::size_t instances, std::size_t pairs, std::uint64_t seed);

// Both sides of the two-probability-vector inequality.
std::pair<double, double> epsilon_lemma_sides(const std::vector<double>& a, const std::vector<double>& b,
                                              const std::vector<double>& c, const std::vector<double>& d);
// |S| = 2 with every entry on a grid of the given step.
CheckReport check_epsilon_grid(double step);
CheckReport check_epsilon_lemma(std::size_t trials, std::uint64_t seed);

// U is the sphere minus a finite union of closed caps.
struct CapUnion {
    std::vector<std::pair<SpherePoint, double>> caps;  // (center, radius)
    bool covers(const SpherePoint& p) const;
    // Points of the complement of U with covering radius at most h.
    std::vector<SpherePoint> sample(double h) const;
};
// Upper bound for diam_3 of the union: sampled value plus twice the sample spacing.
double diam3_upper(const CapUnion& u);
// Probes p from the lattice with diam_3(T^-1(p)) >= delta.
std::vector<SpherePoint> spillover_probes(const RationalMap& T, double delta, std::size_t lattice);
CheckReport check_spillover(const RationalMap& T, double delta, const std::vector<CapUnion>& family,
                            const std::vector<SpherePoint>& probes);
// Random cap families, biased toward the preimages of probes.
std::vector<CapUnion> random_cap_unions(const RationalMap& T, const std::vector<SpherePoint>& probes,
                                        std::size_t count, std::uint64_t seed);

struct BatteryOptions {
    std::uint64_t seed = 20240601;
    double scale = 1;  // multiplies every trial count
};
std::vector<CheckReport> run_battery(const BatteryOptions& opt = {});

// CSV: lemma, trials, violations, skipped, worst_margin, tolerance, parameters.
void write_reports_csv(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace rdsphere
