#include "rdsphere/ratmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"

namespace rdsphere {

RationalMap::RationalMap(Poly f, Poly g) : f_(std::move(f)), g_(std::move(g)) {
    require(!g_.is_zero(), "denominator is zero");
    d_ = std::max(f_.degree(), g_.degree());
    require(d_ >= 1, "rational map must be non-constant");
    require(d_ <= kDegreeCap, "degree above cap");
    // The norm-relative resultant decays geometrically with degree, so beyond
    // small degrees coprimality is judged by the separation of the zero sets.
    if (d_ <= 8) {
        require(relative_resultant(f_, g_, d_, d_) > kCoprimeThreshold, "numerator and denominator share a root");
    } else if (d_ <= 256) {
        auto zf = homogeneous_zeros(f_, d_), zg = homogeneous_zeros(g_, d_);
        for (const auto& a : zf)
            for (const auto& b : zg)
                require(dist_s(a.point, b.point) > kCoprimeSeparation, "numerator and denominator share a root");
    }
    cache();
}

RationalMap RationalMap::trusted(Poly f, Poly g) {
    RationalMap t;
    t.f_ = std::move(f);
    t.g_ = std::move(g);
    t.d_ = std::max(t.f_.degree(), t.g_.degree());
    if (t.d_ < 1 || t.g_.is_zero()) throw NumericalError("degenerate composite map");
    t.cache();
    return t;
}

void RationalMap::cache() {
    rf_ = f_.reversed(d_);
    rg_ = g_.reversed(d_);
    df_ = f_.derivative();
    dg_ = g_.derivative();
    drf_ = rf_.derivative();
    drg_ = rg_.derivative();
}

RationalMap RationalMap::identity() { return RationalMap(Poly({0.0, 1.0}), Poly({1.0})); }

RationalMap RationalMap::power(int d, cplx scale) {
    require(d >= 1, "power map degree must be positive");
    return RationalMap(Poly::monomial(d, scale), Poly({1.0}));
}

RationalMap RationalMap::mobius(cplx a, cplx b, cplx c, cplx d) {
    return RationalMap(Poly({b, a}), Poly({d, c}));
}

RationalMap RationalMap::qc(double c) {
    return RationalMap(Poly({0.0, 0.0, 3.0 + c, -2.0 - 2.0 * c, c}), Poly({1.0}));
}

RationalMap RationalMap::quadratic(cplx c) { return RationalMap(Poly({c, 0.0, 1.0}), Poly({1.0})); }

namespace {

SpherePoint ratio(cplx F, cplx G) {
    if (G == cplx(0.0)) return SpherePoint::infinity();
    return SpherePoint(F / G);
}

}  // namespace

SpherePoint RationalMap::eval(const SpherePoint& p) const {
    if (!p.is_inf() && std::abs(p.value()) <= 1.0) {
        cplx z = p.value();
        return ratio(f_(z), g_(z));
    }
    cplx w = p.is_inf() ? cplx(0.0) : 1.0 / p.value();
    return ratio(rf_(w), rg_(w));
}

SpherePoint RationalMap::eval_deriv(const SpherePoint& p, double& deriv) const {
    cplx z, F, dF, G, dG;
    if (!p.is_inf() && std::abs(p.value()) <= 1.0) {
        z = p.value();
        f_.eval2(z, F, dF);
        g_.eval2(z, G, dG);
    } else {
        z = p.is_inf() ? cplx(0.0) : 1.0 / p.value();
        rf_.eval2(z, F, dF);
        rg_.eval2(z, G, dG);
    }
    double s = std::norm(F) + std::norm(G);
    deriv = std::abs(dF * G - F * dG) * (1.0 + std::norm(z)) / s;
    return ratio(F, G);
}

double RationalMap::sph_deriv(const SpherePoint& p) const {
    double d;
    eval_deriv(p, d);
    return d;
}

Poly RationalMap::preimage_form(const SpherePoint& p) const {
    if (p.is_inf()) return cplx(-1.0) * g_;
    cplx v = p.value();
    if (std::abs(v) <= 1.0) return f_ - v * g_;
    return (1.0 / v) * f_ - g_;
}

std::optional<SpherePoint> RationalMap::newton_preimage(const SpherePoint& p, const SpherePoint& start,
                                                        int max_iter) const {
    cplx a = 1.0, b = 0.0;
    if (p.is_inf()) {
        a = 0.0;
        b = 1.0;
    } else if (std::abs(p.value()) <= 1.0) {
        b = p.value();
    } else {
        a = 1.0 / p.value();
        b = 1.0;
    }
    const bool flip = start.is_inf() || std::abs(start.value()) > 1.0;
    const Poly& F = flip ? rf_ : f_;
    const Poly& G = flip ? rg_ : g_;
    cplx z = flip ? (start.is_inf() ? cplx(0.0) : 1.0 / start.value()) : start.value();
    for (int it = 0; it < max_iter; ++it) {
        cplx fv, fd, gv, gd;
        F.eval2(z, fv, fd);
        G.eval2(z, gv, gd);
        cplx h = a * fv - b * gv, dh = a * fd - b * gd;
        if (h == cplx(0.0)) break;
        if (dh == cplx(0.0)) return std::nullopt;
        cplx step = h / dh;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 4.0) return std::nullopt;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
        if (it == max_iter - 1) return std::nullopt;
    }
    if (!flip) return SpherePoint(z);
    return z == cplx(0.0) ? SpherePoint::infinity() : SpherePoint(1.0 / z);
}

std::string RationalMap::to_text() const {
    std::ostringstream os;
    auto line = [&](const Poly& p) {
        if (p.is_zero()) {
            os << "0,0";
        } else {
            for (int i = 0; i <= p.degree(); ++i) os << (i ? " " : "") << fmt_complex(p.coeff(i));
        }
        os << '\n';
    };
    line(f_);
    line(g_);
    return os.str();
}

RationalMap RationalMap::from_text(const std::string& text) {
    std::vector<Poly> polys;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        std::vector<cplx> c;
        for (const auto& t : toks) c.push_back(parse_complex(t));
        polys.emplace_back(c);
    }
    if (polys.size() != 2) throw PreconditionError("map text needs exactly two polynomial lines");
    return RationalMap(polys[0], polys[1]);
}

RationalMap compose(const RationalMap& t1, const RationalMap& t2) {
    const long long deg = 1LL * t1.degree() * t2.degree();
    if (deg > kDegreeCap) throw CapacityError("composite degree " + std::to_string(deg) + " above cap");
    const int d2 = t2.degree();
    std::vector<Poly> pf(d2 + 1), pg(d2 + 1);
    pf[0] = Poly::constant(1.0);
    pg[0] = Poly::constant(1.0);
    for (int k = 1; k <= d2; ++k) {
        pf[k] = pf[k - 1] * t1.num();
        pg[k] = pg[k - 1] * t1.den();
    }
    Poly num, den;
    for (int k = 0; k <= d2; ++k) {
        Poly term = pf[k] * pg[d2 - k];
        num = num + t2.num().coeff(k) * term;
        den = den + t2.den().coeff(k) * term;
    }
    return RationalMap::trusted(Poly(num.coeffs()), Poly(den.coeffs()));
}

SupEstimate sup_sph_deriv(const RationalMap& T, std::size_t grid_points) {
    SupEstimate est;
    est.grid_points = grid_points;
    auto grid = spiral_lattice(grid_points);
    std::vector<std::pair<double, std::size_t>> vals;
    vals.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals.push_back({T.sph_deriv(grid[i]), i});
    std::sort(vals.begin(), vals.end(), [](auto& a, auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    est.grid_max = vals.front().first;
    est.value = est.grid_max;
    auto climb = [&](SpherePoint start, double h) {
        bool flip = start.modulus() > 1.0;
        cplx z = flip ? start.flipped().value() : start.value();
        auto at = [&](cplx c) { return T.sph_deriv(flip ? SpherePoint(c).flipped() : SpherePoint(c)); };
        double best = at(z);
        while (h > 1e-13) {
            // Stay in the chart where |z| <= 1, else a climb toward a chart pole never ends.
            if (std::abs(z) > 1.0) {
                z = 1.0 / z;
                flip = !flip;
            }
            bool moved = false;
            for (int k = 0; k < 8; ++k) {
                cplx cand = z + h * std::polar(1.0, kPi * k / 4.0);
                double v = at(cand);
                if (v > best) {
                    best = v;
                    z = cand;
                    moved = true;
                }
            }
            if (!moved) h /= 2;
        }
        est.value = std::max(est.value, best);
    };
    const std::size_t seeds = std::min<std::size_t>(8, vals.size());
    for (std::size_t s = 0; s < seeds; ++s) climb(grid[vals[s].second], 2.0 / std::sqrt(double(grid_points)));
    // Narrow spikes (a tiny disk covering most of the sphere) can fall between grid
    // points; every such disk contains preimages of typical targets, so also climb
    // from the preimages of a small target net.
    if (T.degree() <= 64) {
        for (const auto& target : spiral_lattice(24)) {
            std::vector<HomogeneousZero> zs;
            try {
                zs = homogeneous_zeros(T.preimage_form(target), T.degree());
            } catch (const NumericalError&) {
                continue;
            }
            for (const auto& z : zs)
                if (!z.point.is_inf()) climb(z.point, 1e-3);
        }
    }
    return est;
}

Divisor preimages(const RationalMap& T, const SpherePoint& p, const RootOptions& opt) {
    return zero_divisor(T.preimage_form(p), T.degree(), opt);
}

Poly wronskian(const RationalMap& T) {
    Poly w = T.num().derivative() * T.den() - T.num() * T.den().derivative();
    std::vector<cplx> c = w.coeffs();
    const int formal = 2 * T.degree() - 2;
    if (int(c.size()) > formal + 1) c.resize(formal + 1);
    return Poly(c);
}

Divisor ramification_divisor(const RationalMap& T, const RootOptions& opt) {
    if (T.degree() == 1) return {};
    return zero_divisor(wronskian(T), 2 * T.degree() - 2, opt);
}

Divisor branch_divisor(const RationalMap& T, const RootOptions& opt) {
    auto rp = ramification_divisor(T, opt);
    std::vector<DivisorEntry> out;
    for (const auto& e : rp.entries) out.push_back({T.eval(e.point), e.multiplicity});
    return normalize_divisor(std::move(out), opt.cluster_radius);
}

namespace {

Poly fixed_form(const RationalMap& T) { return T.num() - Poly({0.0, 1.0}) * T.den(); }

}  // namespace

Divisor fixed_divisor(const RationalMap& T, const RootOptions& opt) {
    Poly F = fixed_form(T);
    if (F.is_zero()) throw PreconditionError("identity map has no finite fixed divisor");
    return zero_divisor(F, T.degree() + 1, opt);
}

std::vector<SpherePoint> totally_ramified(const RationalMap& T, const RootOptions& opt) {
    require(T.degree() >= 2, "total ramification needs degree >= 2");
    const int d = T.degree();
    std::vector<SpherePoint> out;
    for (const auto& e : ramification_divisor(T, opt).entries) {
        if (e.multiplicity < d - 1) continue;
        auto pre = preimages(T, T.eval(e.point), opt);
        if (pre.multiplicity_near(e.point, 1e-4) == d) out.push_back(e.point);
    }
    if (out.size() > 2) throw NumericalError("more than two totally ramified points found");
    return out;
}

double fixed_ramification_resultant(const RationalMap& T) {
    require(T.degree() >= 2, "fixed ramification test needs degree >= 2");
    const int d = T.degree();
    return relative_resultant(wronskian(T), fixed_form(T), 2 * d - 2, d + 1);
}

bool has_fixed_ramification(const RationalMap& T) { return fixed_ramification_resultant(T) < kCoprimeThreshold; }

}  // namespace rdsphere
