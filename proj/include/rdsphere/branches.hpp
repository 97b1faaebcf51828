#pragma once

#include <iosfwd>
#include <vector>

#include "rdsphere/rds.hpp"
#include "rdsphere/transfer.hpp"

namespace rdsphere {

// Round disk B_s(center, radius) with zeta = id; excluded lists the branch points
// checked to lie outside.
struct DiskDomain {
    SpherePoint center;
    double radius = 0;
    Divisor excluded;
};
DiskDomain make_disk(const SpherePoint& center, double radius);

struct LiftOptions {
    int rays = 64;
    int steps = 32;        // radial steps per ray, even
    int max_halvings = 10;
    double margin = 1e-9;  // branch points within radius + margin are rejected
};

// eta: U -> sphere with T_k o ... o T_1 o eta = id, sampled on a polar grid around the
// center: node 0 is the center, node 1 + r * steps + (s - 1) is step s of ray r.
class InverseBranch {
public:
    const DiskDomain& domain() const { return domain_; }
    const LiftOptions& options() const { return opt_; }
    const SpherePoint& base_value() const { return values_[0]; }
    int depth() const { return int(maps_.size()); }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t node_index(int ray, int step) const;
    const SpherePoint& node(std::size_t i) const { return nodes_[i]; }
    const SpherePoint& value(std::size_t i) const { return values_[i]; }
    // Spherical derivative of eta at node i.
    double derivative(std::size_t i) const { return deriv_[i]; }

    // The chain T_1 ... T_k applied to z, back to the domain.
    SpherePoint forward(const SpherePoint& z) const;
    // eta(x) by continuation along the geodesic from the center.
    SpherePoint at(const SpherePoint& x) const;
    // Whether p = eta(x) for some x in the closed disk of radius + margin.
    bool image_contains(const SpherePoint& p) const;

    static InverseBranch identity(const DiskDomain& U, const LiftOptions& opt = {});
    friend InverseBranch lift_branch(const RationalMap& T, const InverseBranch& eta, const SpherePoint& x0);

private:
    DiskDomain domain_;
    LiftOptions opt_;
    std::vector<RationalMap> maps_;   // in lifting order
    std::vector<SpherePoint> bases_;  // center value after each lift
    std::vector<SpherePoint> nodes_, values_;
    std::vector<double> deriv_;
};

// The branch xi with T o xi = eta and xi(center) = x0. Rejects eta(U) meeting a branch
// point of T; throws NumericalError when a continuation step cannot be resolved.
InverseBranch lift_branch(const RationalMap& T, const InverseBranch& eta, const SpherePoint& x0);
// Lift of the identity on U through x0, T(x0) = center.
InverseBranch lift_disk(const RationalMap& T, const DiskDomain& U, const SpherePoint& x0, const LiftOptions& opt = {});
// One branch per preimage of eta(center), ordered like the preimage divisor.
std::vector<InverseBranch> all_lifts(const RationalMap& T, const InverseBranch& eta);

struct AreaEstimate {
    double area = 0;
    double error = 0;  // difference from the half-resolution rule
    std::size_t nodes = 0;
};
// Normalized area of eta(U): Simpson in radius, trapezoid in angle, weight eta_*^2.
AreaEstimate image_area(const InverseBranch& eta);
// c-good with borderline areas (within tol of c) counted as bad.
inline bool c_good(const AreaEstimate& a, double c, double tol = 1e-3) { return a.area + tol <= c; }

// Largest number of disks with a common interior point.
int disk_multiplicity(const std::vector<DiskDomain>& disks);

struct Census {
    int good = 0;
    int bad = 0;         // category A (counted with multiplicity) plus category B
    int category_a = 0;  // preimages over disks containing a branch point
    int category_b = 0;  // branches with image area above c
    int r = 0;
    double bound = 0;              // 2 r deg^2 + r / c
    int lifted_multiplicity = 0;   // sampled overlap count of all lifted images
    bool bound_holds = false;
    bool multiplicity_holds = false;
};
Census good_branch_census(const RationalMap& T, const std::vector<DiskDomain>& disks, double c,
                          const LiftOptions& opt = {}, double tol = 1e-3);

struct ABOptions {
    LiftOptions lift;
    double area_tol = 1e-3;
    int eval_rays = 8;   // evaluation nodes: center plus eval_rays x eval_rings grid nodes
    int eval_rings = 4;
    std::size_t max_branches = 100000;
};

struct BranchNode {
    InverseBranch branch;
    int level = 0;    // j: a lift of the identity through T_j, ..., T_{n-1}
    int disk = 0;
    int parent = -1;  // index of the level j+1 node, -1 at level n
};

struct ABResult {
    int n = 0;
    int r = 0;
    std::vector<BranchNode> tree;          // Z_j for all j and disks
    std::vector<SpherePoint> eval_points;
    std::vector<int> eval_disk;
    std::vector<double> A;                 // A_0^n[f]
    std::vector<double> L;                 // L_0^n[f] o zeta
    std::vector<std::vector<double>> B;    // B[j][e] = B_j^n[L_0^j f] at eval point e
    double telescoping_residual = 0;       // max |A - L + sum_j B_j|
    std::vector<double> b_lhs, b_rhs;      // per j: sum_i sup B_j^n[f] and its bound
    bool b_bound_holds = false;
};

// Good-branch trees with thresholds c^{2(n-j)} / (1 + c^{2(n-j)}) over the steps
// seq.first() .. seq.first() + n - 1, and the A/B telescoping check.
ABResult AB_decomposition(const StepSequence& seq, int n, const std::vector<DiskDomain>& disks, double c,
                          const SphereFn& f, const ABOptions& opt = {});

// CSV edges: depth, parent, re, im, is_infinity, weight (e^{phi_j^n} at the center).
void write_branch_csv(std::ostream& os, const StepSequence& seq, const ABResult& ab);

}  // namespace rdsphere
