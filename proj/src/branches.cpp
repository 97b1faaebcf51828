#include "rdsphere/branches.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"

namespace rdsphere {

namespace {

// Agreement needed between a Newton root and the matching entry of the preimage divisor.
constexpr double kRootMatch = 1e-7;

SpherePoint midpoint(const SpherePoint& a, const SpherePoint& b) {
    double rho = 0, theta = 0;
    polar_coords(a, b, rho, theta);
    return geodesic_point(a, 0.5 * rho, theta);
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return Vec3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// One continuation step: the root of T = q continuing prev, accepted only if it is the
// simple preimage nearest prev and prev is within half the gap to the other preimages.
std::optional<SpherePoint> lift_step(const RationalMap& T, const SpherePoint& q, const SpherePoint& prev) {
    auto z = T.newton_preimage(q, prev);
    if (!z) return std::nullopt;
    const auto pre = preimages(T, q);
    std::size_t best = 0;
    double dbest = INFINITY;
    for (std::size_t k = 0; k < pre.size(); ++k) {
        double d = dist_s(prev, pre.entries[k].point);
        if (d < dbest) {
            dbest = d;
            best = k;
        }
    }
    if (pre.entries[best].multiplicity > 1) return std::nullopt;
    double gap = INFINITY;
    for (std::size_t k = 0; k < pre.size(); ++k)
        if (k != best) gap = std::min(gap, dist_s(pre.entries[k].point, pre.entries[best].point));
    if (dist_s(*z, pre.entries[best].point) > kRootMatch || dbest >= 0.5 * gap) return std::nullopt;
    return z;
}

SpherePoint step_to(const RationalMap& T, const SpherePoint& q0, const SpherePoint& q1, const SpherePoint& z0,
                    int budget) {
    if (auto z = lift_step(T, q1, z0)) return *z;
    if (budget == 0) throw NumericalError("branch continuation: step size exhausted");
    const SpherePoint mid = midpoint(q0, q1);
    const SpherePoint zm = step_to(T, q0, mid, z0, budget - 1);
    return step_to(T, mid, q1, zm, budget - 1);
}

// Lifts the target path under T starting from start, T(start) = targets[0].
std::vector<SpherePoint> continue_path(const RationalMap& T, const std::vector<SpherePoint>& targets,
                                       const SpherePoint& start, int max_halvings) {
    std::vector<SpherePoint> out{start};
    out.reserve(targets.size());
    for (std::size_t s = 1; s < targets.size(); ++s)
        out.push_back(step_to(T, targets[s - 1], targets[s], out.back(), max_halvings));
    return out;
}

}  // namespace

DiskDomain make_disk(const SpherePoint& center, double radius) {
    require(radius > 0 && radius < kPi / 2, "disk radius must lie in (0, pi/2)");
    return DiskDomain{center, radius, {}};
}

std::size_t InverseBranch::node_index(int ray, int step) const {
    require(ray >= 0 && ray < opt_.rays && step >= 0 && step <= opt_.steps, "node outside the polar grid");
    return step == 0 ? 0 : 1 + std::size_t(ray) * std::size_t(opt_.steps) + std::size_t(step - 1);
}

InverseBranch InverseBranch::identity(const DiskDomain& U, const LiftOptions& opt) {
    require(U.radius > 0, "disk radius must be positive");
    require(opt.rays >= 4 && opt.steps >= 2 && opt.steps % 2 == 0, "polar grid needs >= 4 rays and an even step count");
    InverseBranch b;
    b.domain_ = U;
    b.opt_ = opt;
    b.nodes_.push_back(U.center);
    for (int r = 0; r < opt.rays; ++r)
        for (int s = 1; s <= opt.steps; ++s)
            b.nodes_.push_back(geodesic_point(U.center, U.radius * s / opt.steps, 2 * kPi * r / opt.rays));
    b.values_ = b.nodes_;
    b.deriv_.assign(b.nodes_.size(), 1.0);
    return b;
}

SpherePoint InverseBranch::forward(const SpherePoint& z) const {
    SpherePoint p = z;
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) p = it->eval(p);
    return p;
}

SpherePoint InverseBranch::at(const SpherePoint& x) const {
    if (maps_.empty()) return x;
    double rho = 0, theta = 0;
    polar_coords(domain_.center, x, rho, theta);
    const int k = std::max(4, int(std::ceil(opt_.steps * rho / domain_.radius)));
    std::vector<SpherePoint> path;
    for (int s = 0; s <= k; ++s) path.push_back(geodesic_point(domain_.center, rho * s / k, theta));
    for (std::size_t l = 0; l < maps_.size(); ++l) path = continue_path(maps_[l], path, bases_[l], opt_.max_halvings);
    return path.back();
}

bool InverseBranch::image_contains(const SpherePoint& p) const {
    const SpherePoint x = forward(p);
    if (dist_s(x, domain_.center) > domain_.radius + opt_.margin) return false;
    return dist_s(at(x), p) <= 1e-6;
}

InverseBranch lift_branch(const RationalMap& T, const InverseBranch& eta, const SpherePoint& x0) {
    require(dist_s(T.eval(x0), eta.base_value()) <= 1e-8, "lift start must map to the branch center value");
    for (const auto& b : branch_divisor(T).entries)
        require(!eta.image_contains(b.point), "disk image contains a branch point of the map");
    InverseBranch xi = eta;
    xi.maps_.push_back(T);
    xi.bases_.push_back(x0);
    const auto& opt = eta.opt_;
    xi.values_[0] = x0;
    xi.deriv_[0] = eta.deriv_[0] / T.sph_deriv(x0);
    std::vector<SpherePoint> ray(std::size_t(opt.steps) + 1);
    for (int r = 0; r < opt.rays; ++r) {
        ray[0] = eta.values_[0];
        for (int s = 1; s <= opt.steps; ++s) ray[std::size_t(s)] = eta.values_[eta.node_index(r, s)];
        auto lifted = continue_path(T, ray, x0, opt.max_halvings);
        for (int s = 1; s <= opt.steps; ++s) {
            const std::size_t i = eta.node_index(r, s);
            xi.values_[i] = lifted[std::size_t(s)];
            xi.deriv_[i] = eta.deriv_[i] / T.sph_deriv(lifted[std::size_t(s)]);
        }
    }
    return xi;
}

InverseBranch lift_disk(const RationalMap& T, const DiskDomain& U, const SpherePoint& x0, const LiftOptions& opt) {
    DiskDomain D = U;
    D.excluded = branch_divisor(T);
    return lift_branch(T, InverseBranch::identity(D, opt), x0);
}

std::vector<InverseBranch> all_lifts(const RationalMap& T, const InverseBranch& eta) {
    std::vector<InverseBranch> out;
    for (const auto& e : preimages(T, eta.base_value()).entries) out.push_back(lift_branch(T, eta, e.point));
    return out;
}

AreaEstimate image_area(const InverseBranch& eta) {
    const auto& opt = eta.options();
    const double delta = eta.domain().radius;
    // Normalized area form in geodesic polar coordinates: sin(2 rho) / (2 pi) d rho d theta.
    auto rule = [&](int ray_stride, int step_stride) {
        const int steps = opt.steps / step_stride;
        const double h = delta / steps;
        double total = 0;
        for (int r = 0; r < opt.rays; r += ray_stride) {
            double acc = 0;
            for (int s = 1; s <= steps; ++s) {
                const int step = s * step_stride;
                const double w = (s == steps) ? 1.0 : (s % 2 ? 4.0 : 2.0);
                const double d = eta.derivative(eta.node_index(r, step));
                acc += w * d * d * std::sin(2 * delta * step / opt.steps);
            }
            total += acc * h / 3 / (2 * kPi) * (2 * kPi * ray_stride / opt.rays);
        }
        return total;
    };
    AreaEstimate a;
    a.area = rule(1, 1);
    const int half_steps = opt.steps / 2;
    a.error = half_steps % 2 == 0 ? std::abs(a.area - rule(2, 2)) : std::abs(a.area - rule(2, 1));
    a.nodes = eta.node_count();
    return a;
}

int disk_multiplicity(const std::vector<DiskDomain>& disks) {
    auto depth = [&](const SpherePoint& p) {
        int c = 0;
        for (const auto& d : disks) c += dist_s(p, d.center) < d.radius;
        return c;
    };
    int best = 0;
    for (const auto& d : disks) best = std::max(best, depth(d.center));
    // Deepest cells of a disk arrangement touch a vertex; probe just around each one.
    for (std::size_t a = 0; a < disks.size(); ++a) {
        for (std::size_t b = a + 1; b < disks.size(); ++b) {
            const Vec3 u = to_unit(disks[a].center), v = to_unit(disks[b].center);
            // Circle k is {x : <x, u_k> = cos(2 r_k)} on the unit sphere (d_s is half the angle).
            const double ca = std::cos(2 * disks[a].radius), cb = std::cos(2 * disks[b].radius);
            const double uv = dot(u, v);
            const double den = 1 - uv * uv;
            if (den < 1e-14) continue;
            const double alpha = (ca - cb * uv) / den, beta = (cb - ca * uv) / den;
            const Vec3 base{alpha * u.x + beta * v.x, alpha * u.y + beta * v.y, alpha * u.z + beta * v.z};
            const double nb = dot(base, base);
            if (nb > 1) continue;
            const Vec3 nrm = cross(u, v);
            const double t = std::sqrt((1 - nb) / dot(nrm, nrm));
            for (double sgn : {-1.0, 1.0}) {
                const Vec3 x{base.x + sgn * t * nrm.x, base.y + sgn * t * nrm.y, base.z + sgn * t * nrm.z};
                const SpherePoint vertex = from_unit(x);
                for (int k = 0; k < 8; ++k) best = std::max(best, depth(geodesic_point(vertex, 1e-7, 2 * kPi * k / 8)));
            }
        }
    }
    return best;
}

Census good_branch_census(const RationalMap& T, const std::vector<DiskDomain>& disks, double c,
                          const LiftOptions& opt, double tol) {
    require(c > 0 && c <= 1, "c must lie in (0, 1]");
    Census out;
    out.r = disk_multiplicity(disks);
    const auto bp = branch_divisor(T);
    std::vector<std::vector<InverseBranch>> lifts(disks.size());
    for (std::size_t i = 0; i < disks.size(); ++i) {
        auto id = InverseBranch::identity(disks[i], opt);
        bool hit = false;
        for (const auto& b : bp.entries) hit = hit || id.image_contains(b.point);
        if (hit) {
            out.category_a += T.degree();
            continue;
        }
        lifts[i] = all_lifts(T, id);
        for (const auto& eta : lifts[i]) {
            if (c_good(image_area(eta), c, tol))
                ++out.good;
            else
                ++out.category_b;
        }
    }
    out.bad = out.category_a + out.category_b;
    const double d = T.degree();
    out.bound = 2.0 * out.r * d * d + out.r / c;
    out.bound_holds = out.bad <= out.bound;
    // Overlap of lifted images, sampled at the center and a ring of nodes of every branch:
    // z = eta(x) is covered by (i', eta') whenever T(z) lies in U_i' and eta'(T(z)) = z.
    for (std::size_t i = 0; i < disks.size(); ++i) {
        for (const auto& eta : lifts[i]) {
            std::vector<std::size_t> probe{0};
            for (int r = 0; r < opt.rays; r += std::max(1, opt.rays / 4)) probe.push_back(eta.node_index(r, opt.steps / 2));
            for (std::size_t pi : probe) {
                const SpherePoint z = eta.value(pi), x = T.eval(z);
                int count = 0;
                for (std::size_t k = 0; k < disks.size(); ++k) {
                    if (lifts[k].empty() || dist_s(x, disks[k].center) >= disks[k].radius) continue;
                    for (const auto& other : lifts[k]) count += dist_s(other.at(x), z) <= 1e-6;
                }
                out.lifted_multiplicity = std::max(out.lifted_multiplicity, count);
            }
        }
    }
    out.multiplicity_holds = out.lifted_multiplicity <= out.r;
    return out;
}

ABResult AB_decomposition(const StepSequence& seq, int n, const std::vector<DiskDomain>& disks, double c,
                          const SphereFn& f, const ABOptions& opt) {
    require(n >= 1, "decomposition depth must be at least 1");
    require(c > 0 && c < 1, "c must lie in (0, 1)");
    require(!disks.empty(), "no disks");
    const long long m = seq.first();
    require(seq.contains(m + n - 1), "sequence too short for the requested depth");
    ABResult out;
    out.n = n;
    out.r = disk_multiplicity(disks);

    // Backward recursion: level n is the identity on each disk.
    std::vector<std::vector<int>> level(std::size_t(n) + 1);
    std::vector<std::vector<int>> children;
    for (std::size_t i = 0; i < disks.size(); ++i) {
        out.tree.push_back({InverseBranch::identity(disks[i], opt.lift), n, int(i), -1});
        level[std::size_t(n)].push_back(int(out.tree.size()) - 1);
    }
    children.resize(out.tree.size());
    for (int j = n - 1; j >= 0; --j) {
        const auto& T = seq.map(m + j);
        const double cj = std::pow(c, 2.0 * (n - j));
        const double thresh = cj / (1 + cj);
        const auto bp = branch_divisor(T);
        for (int p : level[std::size_t(j) + 1]) {
            bool hit = false;
            for (const auto& b : bp.entries) hit = hit || out.tree[std::size_t(p)].branch.image_contains(b.point);
            // Over a branch point nothing lifts; all preimages land in B.
            if (hit) continue;
            for (auto& xi : all_lifts(T, out.tree[std::size_t(p)].branch)) {
                if (!c_good(image_area(xi), thresh, opt.area_tol)) continue;
                if (out.tree.size() >= opt.max_branches) throw CapacityError("branch tree exceeds max_branches");
                out.tree.push_back({std::move(xi), j, out.tree[std::size_t(p)].disk, p});
                children.emplace_back();
                children[std::size_t(p)].push_back(int(out.tree.size()) - 1);
                level[std::size_t(j)].push_back(int(out.tree.size()) - 1);
            }
        }
    }

    // Evaluation nodes: the center and a coarse polar subgrid of each disk.
    std::vector<std::size_t> node_ids{0};
    const auto& lo = opt.lift;
    for (int r = 0; r < lo.rays; r += std::max(1, lo.rays / opt.eval_rays))
        for (int k = 1; k <= opt.eval_rings; ++k)
            node_ids.push_back(out.tree[0].branch.node_index(r, std::max(1, lo.steps * k / opt.eval_rings)));

    auto weight = [&](int j, const SpherePoint& z) { return std::exp(birkhoff_sum(seq, m + j, m + n, z)); };
    // Bad part of T_j^{-1}(eta(x)) for node p of level j + 1: the preimages not on a good lift.
    auto bad_points = [&](int j, int p, std::size_t node) {
        const auto& eta = out.tree[std::size_t(p)].branch;
        auto pts = preimages(seq.map(m + j), eta.value(node)).expanded();
        for (int ch : children[std::size_t(p)]) {
            const SpherePoint& v = out.tree[std::size_t(ch)].branch.value(node);
            auto it = std::min_element(pts.begin(), pts.end(), [&](const SpherePoint& a, const SpherePoint& b) {
                return dist_s(a, v) < dist_s(b, v);
            });
            if (it != pts.end() && dist_s(*it, v) <= 1e-6) pts.erase(it);
        }
        return pts;
    };

    out.B.assign(std::size_t(n), {});
    out.b_lhs.assign(std::size_t(n), 0.0);
    out.b_rhs.assign(std::size_t(n), 0.0);
    const auto lattice = spiral_lattice(2048);
    double sup_f = -INFINITY;
    for (const auto& q : lattice) sup_f = std::max(sup_f, f(q));
    std::vector<double> sup_w(std::size_t(n), 0.0);
    for (int j = 0; j < n; ++j)
        for (const auto& q : lattice) sup_w[std::size_t(j)] = std::max(sup_w[std::size_t(j)], weight(j, q));

    for (std::size_t i = 0; i < disks.size(); ++i) {
        std::vector<double> disk_sup(std::size_t(n), -INFINITY);
        for (std::size_t node : node_ids) {
            const SpherePoint x = out.tree[i].branch.node(node);
            out.eval_points.push_back(x);
            out.eval_disk.push_back(int(i));
            double a = 0;
            for (int idx : level[0])
                if (out.tree[std::size_t(idx)].disk == int(i)) {
                    const SpherePoint z = out.tree[std::size_t(idx)].branch.value(node);
                    a += weight(0, z) * f(z);
                }
            out.A.push_back(a);
            out.L.push_back(tree_apply(seq, m, n, f, x));
            for (int j = 0; j < n; ++j) {
                double bj = 0, bf = 0;
                for (int p : level[std::size_t(j) + 1]) {
                    if (out.tree[std::size_t(p)].disk != int(i)) continue;
                    for (const auto& z : bad_points(j, p, node)) {
                        const double w = weight(j, z);
                        bj += w * (j == 0 ? f(z) : tree_apply(seq, m, j, f, z));
                        bf += w * f(z);
                        sup_w[std::size_t(j)] = std::max(sup_w[std::size_t(j)], w);
                        sup_f = std::max(sup_f, f(z));
                    }
                }
                out.B[std::size_t(j)].push_back(bj);
                disk_sup[std::size_t(j)] = std::max(disk_sup[std::size_t(j)], bf);
            }
        }
        for (int j = 0; j < n; ++j) out.b_lhs[std::size_t(j)] += disk_sup[std::size_t(j)];
    }
    for (std::size_t e = 0; e < out.A.size(); ++e) {
        double rhs = out.L[e];
        for (int j = 0; j < n; ++j) rhs -= out.B[std::size_t(j)][e];
        out.telescoping_residual = std::max(out.telescoping_residual, std::abs(out.A[e] - rhs));
    }
    out.b_bound_holds = true;
    for (int j = 0; j < n; ++j) {
        const double d = seq.map(m + j).degree();
        out.b_rhs[std::size_t(j)] =
            out.r * (2 * d * d + 1 + std::pow(c, -2.0 * (n - j))) * sup_w[std::size_t(j)] * sup_f;
        out.b_bound_holds = out.b_bound_holds && out.b_lhs[std::size_t(j)] <= out.b_rhs[std::size_t(j)] * (1 + 1e-12);
    }
    return out;
}

void write_branch_csv(std::ostream& os, const StepSequence& seq, const ABResult& ab) {
    os << "depth,parent,re,im,is_infinity,weight\n";
    for (const auto& node : ab.tree) {
        const SpherePoint& z = node.branch.base_value();
        const double w = std::exp(birkhoff_sum(seq, seq.first() + node.level, seq.first() + ab.n, z));
        os << (ab.n - node.level) << ',' << node.parent << ',' << (z.is_inf() ? "0" : fmt(z.value().real())) << ','
           << (z.is_inf() ? "0" : fmt(z.value().imag())) << ',' << (z.is_inf() ? 1 : 0) << ',' << fmt(w) << '\n';
    }
}

}  // namespace rdsphere
