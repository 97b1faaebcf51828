#include "rdsphere/roots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rdsphere/errors.hpp"

namespace rdsphere {

int Divisor::degree() const {
    int d = 0;
    for (const auto& e : entries) d += e.multiplicity;
    return d;
}

int Divisor::multiplicity_near(const SpherePoint& p, double tol) const {
    int m = 0;
    for (const auto& e : entries)
        if (dist_s(e.point, p) <= tol) m += e.multiplicity;
    return m;
}

std::vector<SpherePoint> Divisor::expanded() const {
    std::vector<SpherePoint> out;
    for (const auto& e : entries)
        for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.point);
    return out;
}

namespace {

double relative_residual(const Poly& p, cplx z) {
    double scale = 0, r = std::abs(z), rk = 1;
    for (const auto& c : p.coeffs()) {
        scale += std::abs(c) * rk;
        rk *= r;
    }
    if (scale == 0) return 0;
    return std::abs(p(z)) / scale;
}

cplx polish(const Poly& p, cplx z) {
    for (int it = 0; it < 3; ++it) {
        cplx v, dv;
        p.eval2(z, v, dv);
        if (v == cplx(0.0) || dv == cplx(0.0)) break;
        cplx next = z - v / dv;
        if (!(std::abs(p(next)) < std::abs(v))) break;
        z = next;
    }
    return z;
}

bool sphere_less(const SpherePoint& a, const SpherePoint& b) {
    if (a.is_inf() != b.is_inf()) return !a.is_inf();
    if (a.is_inf()) return false;
    cplx x = a.value(), y = b.value();
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

SpherePoint unit_mean(const std::vector<SpherePoint>& pts) {
    Vec3 s;
    for (const auto& p : pts) {
        Vec3 u = to_unit(p);
        s.x += u.x;
        s.y += u.y;
        s.z += u.z;
    }
    return from_unit(s);
}

// True when P and its first k-1 derivatives are negligible at the chart point z.
bool looks_multiple(const Poly& P, cplx z, int k, double tol) {
    Poly d = P;
    for (int j = 0; j < k; ++j) {
        double bound = 0, r = std::abs(z), rk = 1;
        for (const auto& c : d.coeffs()) {
            bound += std::abs(c) * rk;
            rk *= r;
        }
        if (bound > 0 && std::abs(d(z)) > tol * bound) return false;
        d = d.derivative();
    }
    return true;
}

}  // namespace

std::vector<cplx> poly_roots(const Poly& p, const RootOptions& opt) {
    const int n = p.degree();
    std::vector<cplx> roots;
    if (n <= 0) return roots;
    const auto& c = p.coeffs();
    int z0 = 0;
    while (z0 < n && c[z0] == cplx(0.0)) ++z0;
    for (int i = 0; i < z0; ++i) roots.push_back(0.0);
    std::vector<cplx> q(c.begin() + z0, c.end());
    const int e = n - z0;
    Poly Q = Poly::raw(q);
    if (e == 1) {
        roots.push_back(-q[0] / q[1]);
    } else if (e == 2) {
        cplx a = q[2], b = q[1], cc = q[0];
        cplx disc = std::sqrt(b * b - 4.0 * a * cc);
        cplx s = (std::real(std::conj(b) * disc) >= 0) ? -(b + disc) / 2.0 : -(b - disc) / 2.0;
        if (s == cplx(0.0)) {
            roots.push_back(0.0);
            roots.push_back(0.0);
        } else {
            roots.push_back(s / a);
            roots.push_back(cc / s);
        }
    } else if (e > 2) {
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(e, e);
        for (int i = 1; i < e; ++i) C(i, i - 1) = 1.0;
        for (int i = 0; i < e; ++i) C(i, e - 1) = -q[i] / q[e];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(C, false);
        if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver failed");
        for (int i = 0; i < e; ++i) roots.push_back(solver.eigenvalues()(i));
    }
    for (std::size_t i = z0; i < roots.size(); ++i) roots[i] = polish(Q, roots[i]);
    (void)opt;
    return roots;
}

std::vector<HomogeneousZero> homogeneous_zeros(const Poly& P, int D, const RootOptions& opt) {
    require(D >= 0, "negative formal degree");
    require(P.degree() <= D, "polynomial degree exceeds formal degree");
    require(!P.is_zero(), "zeros of the zero form are undefined");
    std::vector<HomogeneousZero> out;
    // Chart z: keep roots in the closed unit disk.
    auto r1 = poly_roots(P, opt);
    int z_exact = 0;
    while (z_exact < P.degree() && P.coeff(z_exact) == cplx(0.0)) ++z_exact;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        if (std::abs(r1[i]) > 1.0) continue;
        if (relative_residual(P, r1[i]) > opt.residual_limit)
            throw NumericalError("root residual " + std::to_string(relative_residual(P, r1[i])) + " too large");
        out.push_back({SpherePoint(r1[i]), int(i) < z_exact});
    }
    const std::size_t need = std::size_t(D) - out.size();
    if (need > 0) {
        // Chart w = 1/z: the remaining roots are the ones of smallest modulus there.
        Poly R = P.reversed(D);
        auto r2 = poly_roots(R, opt);
        int w_exact = 0;
        while (w_exact < R.degree() && R.coeff(w_exact) == cplx(0.0)) ++w_exact;
        std::vector<std::size_t> idx(r2.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            bool ea = int(a) < w_exact, eb = int(b) < w_exact;
            if (ea != eb) return ea;
            return std::abs(r2[a]) < std::abs(r2[b]);
        });
        if (idx.size() < need) throw NumericalError("chart mismatch while solving a binary form");
        for (std::size_t k = 0; k < need; ++k) {
            cplx w = r2[idx[k]];
            bool exact = int(idx[k]) < w_exact;
            if (!exact && relative_residual(R, w) > opt.residual_limit)
                throw NumericalError("root residual " + std::to_string(relative_residual(R, w)) + " too large");
            out.push_back({exact || w == cplx(0.0) ? SpherePoint::infinity() : SpherePoint(1.0 / w), exact});
        }
    }
    return out;
}

Divisor zero_divisor(const Poly& P, int D, const RootOptions& opt) {
    auto zeros = homogeneous_zeros(P, D, opt);
    const int n = int(zeros.size());
    UnionFind base(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist_s(zeros[i].point, zeros[j].point) < opt.cluster_radius) base.join(i, j);
    // Coarser components are merged only if P looks like it has a multiple root there.
    UnionFind coarse(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist_s(zeros[i].point, zeros[j].point) < opt.merge_radius) coarse.join(i, j);
    const Poly R = P.reversed(D);
    for (int root = 0; root < n; ++root) {
        if (coarse.find(root) != root) continue;
        std::vector<int> members;
        for (int i = 0; i < n; ++i)
            if (coarse.find(i) == root) members.push_back(i);
        bool split = false;
        for (int i : members)
            if (base.find(i) != base.find(members[0])) split = true;
        if (!split) continue;
        std::vector<SpherePoint> pts;
        for (int i : members) pts.push_back(zeros[i].point);
        SpherePoint m = unit_mean(pts);
        int k = int(members.size());
        bool multiple = m.modulus() <= 1.0 ? looks_multiple(P, m.value(), k, opt.merge_tolerance)
                                           : looks_multiple(R, m.flipped().value(), k, opt.merge_tolerance);
        if (multiple)
            for (int i : members) base.join(members[0], i);
    }
    std::vector<DivisorEntry> entries;
    for (int root = 0; root < n; ++root) {
        if (base.find(root) != root) continue;
        std::vector<SpherePoint> pts;
        const SpherePoint* exact = nullptr;
        for (int i = 0; i < n; ++i)
            if (base.find(i) == root) {
                pts.push_back(zeros[i].point);
                if (zeros[i].exact) exact = &zeros[i].point;
            }
        SpherePoint rep = exact ? *exact : (pts.size() == 1 ? pts[0] : unit_mean(pts));
        entries.push_back({rep, int(pts.size())});
    }
    std::sort(entries.begin(), entries.end(),
              [](const DivisorEntry& a, const DivisorEntry& b) { return sphere_less(a.point, b.point); });
    return Divisor{std::move(entries)};
}

Divisor normalize_divisor(std::vector<DivisorEntry> entries, double tol) {
    const int n = int(entries.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist_s(entries[i].point, entries[j].point) < tol) uf.join(i, j);
    std::vector<DivisorEntry> out;
    for (int root = 0; root < n; ++root) {
        if (uf.find(root) != root) continue;
        int mult = 0;
        for (int i = 0; i < n; ++i)
            if (uf.find(i) == root) mult += entries[i].multiplicity;
        out.push_back({entries[root].point, mult});
    }
    std::sort(out.begin(), out.end(),
              [](const DivisorEntry& a, const DivisorEntry& b) { return sphere_less(a.point, b.point); });
    return Divisor{std::move(out)};
}

}  // namespace rdsphere
