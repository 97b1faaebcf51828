#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rdsphere/grid.hpp"
#include "rdsphere/kernels.hpp"
#include "rdsphere/rds.hpp"

namespace rdsphere {

using SphereFn = std::function<double(const SpherePoint&)>;

struct PointMassMeasure {
    std::vector<SpherePoint> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double total() const;
    // Scales the weights so that they sum to 1.
    void normalize();
    double integrate(const SphereFn& f) const;
    cplx moment(int k) const;  // sum of w z^k over finite atoms
};

// Per-step eigenvalues lambda_j > 0.
struct Cocycle {
    long long first = 0;
    std::vector<double> values;
    double log_sum() const;
};

// One step L[f](p) = sum over T^-1(p) of e^phi f on a grid.
class TransferOperator {
public:
    TransferOperator(const RationalMap& T, const Potential& phi, GridPtr grid, bool parallel = true);
    GridFunction apply(const GridFunction& f) const;
    const TransferTable& table() const { return table_; }

private:
    TransferTable table_;
    bool parallel_;
};

GridFunction apply_L(const RationalMap& T, const Potential& phi, const GridFunction& f);

struct AnchorOptions {
    int horizon = 12;     // derivative statistic horizon
    double kappa = 0.05;  // keep-out radius around the exceptional estimate
};

// Step operators for a sequence window, shared between equal (map, potential) pairs,
// and the deterministic anchor points p_j. Built lazily; not for concurrent use.
class SequenceOperators {
public:
    SequenceOperators(StepSequence seq, GridPtr grid, AnchorOptions anchors = {}, bool parallel = true);

    const StepSequence& sequence() const { return seq_; }
    const GridPtr& grid() const { return grid_; }
    const TransferOperator& at(long long j) const;
    // Grid index of p_j: the point of largest derivative statistic for T_j, T_{j+1}, ...
    // outside the kappa-neighbourhood of the exceptional estimate.
    std::size_t anchor(long long j) const;

private:
    StepSequence seq_;
    GridPtr grid_;
    AnchorOptions anchor_opt_;
    bool parallel_;
    mutable std::map<std::string, std::shared_ptr<const TransferOperator>> cache_;
    mutable std::map<long long, std::shared_ptr<const TransferOperator>> by_index_;
    mutable std::map<long long, std::size_t> anchors_;
};

// L_m^{m+n}[f].
GridFunction apply_L_iter(const SequenceOperators& ops, long long m, int n, const GridFunction& f);

// Depth-n preimage tree of T_m^{m+n} over p; weights are multiplicity * e^{phi_m^{m+n}}.
// Levels larger than cap are resampled to cap/10 atoms, weight-proportionally.
struct PreimageTree {
    std::vector<SpherePoint> leaves;
    std::vector<double> weights;
    bool resampled = false;
};
inline constexpr std::size_t kTreeCap = 1000000;
PreimageTree preimage_tree(const StepSequence& seq, long long m, int n, const SpherePoint& p,
                           std::size_t cap = kTreeCap, std::uint64_t seed = 0);
// L_m^{m+n}[f](p) evaluated on the tree with exact preimages.
double tree_apply(const StepSequence& seq, long long m, int n, const SphereFn& f, const SpherePoint& p);

struct Density {
    GridFunction g;
    std::size_t anchor = 0;
    // cauchy[k-1] = sup |log g^(k) - log g^(k-1)|, g^(k) the depth-k normalized iterate.
    std::vector<double> cauchy;
};
// g_j ~ L_{j-depth}^j[1] normalized to 1 at the anchor p_j.
Density backward_density(const SequenceOperators& ops, long long j, int depth, bool report_cauchy = false);

// lambda_j = L_j[g_j](p_{j+1}) / g_{j+1}(p_{j+1}) for g = (g_m, ..., g_{m+n}).
Cocycle lambda_cocycle(const SequenceOperators& ops, long long m, const std::vector<GridFunction>& g);

struct EigenSolution {
    long long first = 0;
    int n = 0;
    std::vector<GridFunction> g;  // g_m .. g_{m+n}
    Cocycle lambda;               // per step
    double lambda_total = 0;      // L_m^{m+n}[g_m](p_{m+n}) / g_{m+n}(p_{m+n})
    double residual = 0;          // ||L_m^{m+n}[g_m] - lambda g_{m+n}||_inf / lambda
    double cocycle_gap = 0;       // |log lambda_total - sum log lambda_j|
};
EigenSolution eigen_solution(const SequenceOperators& ops, long long m, int n, int depth);

// nu_m ~ pulled-back unit mass at p_{m+n}: weights e^{phi_m^{m+n}}/lambda, rescaled to nu[g_m] = 1.
struct ConformalResult {
    PointMassMeasure nu;
    double raw_pairing = 0;  // nu[g_m] before the rescale
    bool resampled = false;
};
ConformalResult conformal_measure(const SequenceOperators& ops, const GridFunction& g_m, double lambda_total,
                                  long long m, int n);

// mu = g nu, normalized to total 1.
PointMassMeasure equilibrium_measure(const GridFunction& g, const PointMassMeasure& nu);

// Bounded-Lipschitz test battery: functions with sup + Lipschitz constant <= 1.
std::vector<SphereFn> bl_battery();
// max over the battery of |int f dmu - int f dsigma|.
double bl_distance(const PointMassMeasure& mu, const PointMassMeasure& sigma);

// Transported measure (T_m^{m+n})_* mu.
PointMassMeasure pushforward(const StepSequence& seq, long long m, int n, const PointMassMeasure& mu);

struct PushforwardReport {
    double discrepancy = 0;
    PointMassMeasure transported, target;
};
// Builds mu_m and mu_{m+n} independently (trees of the given depth) and compares
// (T_m^{m+n})_* mu_m with mu_{m+n}.
PushforwardReport pushforward_check(const SequenceOperators& ops, long long m, int n, int depth, int density_depth);

// Lhat_m^{m+n}[f] = L_m^{m+n}[f g_m] / (lambda g_{m+n}).
GridFunction normalized_operator(const SequenceOperators& ops, const EigenSolution& eig, const GridFunction& f);

struct PsiWeights {
    std::vector<SpherePoint> points;
    std::vector<double> weights;  // e^{psi} times multiplicity
    double sum = 0;
};
// Normalized branch weights over the depth-n preimages of grid point i.
PsiWeights psi_weights(const SequenceOperators& ops, const EigenSolution& eig, std::size_t i);

struct OscillationReport {
    double sup_lhs = 0, sup_rhs = 0, inf_lhs = 0, inf_rhs = 0;
    double osc_lhs() const { return sup_lhs - inf_lhs; }
    double osc_rhs() const { return sup_rhs - inf_rhs; }
    // Violations of sup, inf and osc at relative tolerance tol.
    int violations(double tol) const;
};
// sup/inf of L[f]/L[g] over K against sup/inf of f/g over T^-1(K), with exact preimages.
OscillationReport oscillation_check(const RationalMap& T, const Potential& phi, const SphereFn& f, const SphereFn& g,
                                    const std::vector<SpherePoint>& K);

// osc over K of L_m^{m+k}[f] / L_m^{m+k}[g] for k = 0..n (tree evaluation).
std::vector<double> ratio_oscillation(const StepSequence& seq, long long m, int n, const SphereFn& f, const SphereFn& g,
                                      const std::vector<SpherePoint>& K);

}  // namespace rdsphere
