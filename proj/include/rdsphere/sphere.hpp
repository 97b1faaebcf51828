#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace rdsphere {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;

// A point of the Riemann sphere: a finite complex value or infinity.
class SpherePoint {
public:
    SpherePoint() = default;
    SpherePoint(cplx z) : z_(z) {}
    SpherePoint(double re, double im = 0.0) : z_(re, im) {}
    static SpherePoint infinity() {
        SpherePoint p;
        p.inf_ = true;
        return p;
    }

    bool is_inf() const { return inf_; }
    // Finite value; throws for infinity.
    cplx value() const;
    // Modulus, +inf for infinity.
    double modulus() const;
    // Image under w = 1/z (0 and infinity exchange).
    SpherePoint flipped() const;

    friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.z_ == b.z_);
    }

private:
    cplx z_{};
    bool inf_ = false;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double chord2(const Vec3& a, const Vec3& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

// Stereographic correspondence with the unit sphere; infinity is (0,0,1).
Vec3 to_unit(const SpherePoint& p);
SpherePoint from_unit(const Vec3& u);

// Spherical distance, normalized so that the diameter is pi/2.
double dist_s(const SpherePoint& x, const SpherePoint& y);
// Distance from a chord length between unit vectors (chord = 2 sin d).
double dist_from_chord2(double c2);
double chord2_from_dist(double d);

// Normalized area of a ball of radius delta: sin(delta)^exponent.
double ball_area(double delta, double exponent = 2.0);

// Isometry of the sphere sending 0 to c.
SpherePoint isometry_to(const SpherePoint& c, const SpherePoint& w);
// Inverse of isometry_to.
SpherePoint isometry_from(const SpherePoint& c, const SpherePoint& p);
// Point at geodesic distance rho from c in direction theta.
SpherePoint geodesic_point(const SpherePoint& c, double rho, double theta);
// Polar coordinates (rho, theta) of p around c, inverse of geodesic_point.
void polar_coords(const SpherePoint& c, const SpherePoint& p, double& rho, double& theta);

// Supremum over m-tuples of the minimum pairwise distance.
double diam_m(const std::vector<SpherePoint>& points, int m);

// Deterministic quasi-uniform lattice (golden-angle spiral).
std::vector<SpherePoint> spiral_lattice(std::size_t n);
// The same lattice listed in bit-reversed index order.
std::vector<SpherePoint> spiral_lattice_scrambled(std::size_t n);
// Empirical covering radius of the spiral lattice with n points.
double spiral_covering_radius(std::size_t n);

struct SphereNet {
    std::vector<SpherePoint> points;
    std::vector<Vec3> units;
    double separation = 0;
    double covering_radius = 0;
    std::size_t size() const { return points.size(); }
};

// Greedy delta-separated subset of the candidates, maximal within them.
SphereNet greedy_net(double delta, const std::vector<SpherePoint>& candidates);
// Net made of the spiral lattice itself, with measured separation and covering radius.
SphereNet lattice_net(std::size_t n);
// Index of the nearest net point (ties by lower index).
std::size_t nearest_index(const SphereNet& net, const SpherePoint& p);

class SpatialIndex;

struct SpherePartition {
    int level = 0;
    double radius = 0;  // cell c_i = B(x_i, radius) minus earlier balls
    std::vector<SpherePoint> centers;
    std::vector<Vec3> units;
    std::shared_ptr<const SpatialIndex> index;
    // First center within the closed radius; -1 if none.
    int cell_of(const SpherePoint& p) const;
    int cell_of(const Vec3& u) const;
};

// Partition A_k built from a maximal 2^-(k+1)-separated net.
// candidates = 0 picks a lattice size adequate for k.
SpherePartition partition_Ak(int k, std::size_t candidates = 0);

// Counts the cells of a partition meeting a ball, using a dense sample whose cells are known.
class PartitionProbe {
public:
    explicit PartitionProbe(const SpherePartition& part, std::size_t samples = 0);

    struct Count {
        std::size_t sampled = 0;       // cells with a sample point inside the open ball (dense sample, plus a polar sample of small balls)
        std::size_t center_bound = 0;  // centers closer than delta + radius
    };
    Count count(const SpherePoint& x, double delta) const;
    std::size_t uncovered() const { return uncovered_; }
    // Cells holding at least one point of the dense sample.
    std::size_t occupied() const;
    std::size_t samples() const { return units_.size(); }

private:
    const SpherePartition& part_;
    std::vector<Vec3> units_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::size_t uncovered_ = 0;
};

}  // namespace rdsphere
