#include "rdsphere/potential.hpp"

#include <cmath>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"

namespace rdsphere {

namespace {

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

}  // namespace

Potential Potential::constant(double c) {
    Potential p;
    p.kind_ = Kind::Constant;
    p.c_ = c;
    p.text_ = "constant " + fmt(c);
    return p;
}

Potential Potential::log_ratio(double c, const RationalMap& T) {
    Potential p;
    p.kind_ = Kind::LogRatio;
    p.c_ = c;
    p.map_ = std::make_shared<const RationalMap>(T);
    p.text_ = "logratio " + fmt(c);
    return p;
}

Potential Potential::linear(double a, Vec3 v) {
    Potential p;
    p.kind_ = Kind::Linear;
    p.c_ = a;
    p.v_ = v;
    p.text_ = "linear " + fmt(a) + " " + fmt(v.x) + " " + fmt(v.y) + " " + fmt(v.z);
    return p;
}

Potential Potential::tabulated(GridFunction f) {
    require(f.grid && f.size() == f.grid->size(), "tabulated potential needs a full grid function");
    Potential p;
    p.kind_ = Kind::Tabulated;
    p.table_ = std::make_shared<const GridFunction>(std::move(f));
    p.text_ = "tabulated";
    return p;
}

double Potential::operator()(const SpherePoint& x) const {
    switch (kind_) {
        case Kind::Constant:
            return c_;
        case Kind::Linear:
            return c_ * dot(to_unit(x), v_);
        case Kind::Tabulated:
            return (*table_)(x);
        case Kind::LogRatio: {
            // 1 + |z|^2 = 4 / chord2(z, infinity), so the ratio is a ratio of chords.
            SpherePoint y = map_->eval(x);
            double a = chord2(to_unit(x), Vec3{0, 0, 1});
            double b = chord2(to_unit(y), Vec3{0, 0, 1});
            if (a == 0 || b == 0) throw NumericalError("log-ratio potential is infinite at this point");
            return c_ * std::log(b / a);
        }
    }
    return 0;
}

double Potential::holder_seminorm(double alpha) const {
    require(alpha > 0 && alpha <= 1, "Holder exponent must lie in (0, 1]");
    switch (kind_) {
        case Kind::Constant:
            return 0;
        case Kind::Linear:
            // |a <u-u', v>| <= |a||v| chord = |a||v| 2 sin d <= 2|a||v| d, and d <= pi/2.
            return 2 * std::abs(c_) * norm(v_) * std::pow(kHalfPi, 1 - alpha);
        case Kind::Tabulated:
        case Kind::LogRatio: {
            // Largest quotient over neighbouring pairs of a lattice.
            GridPtr g = kind_ == Kind::Tabulated ? table_->grid : Grid::lattice(4096);
            std::vector<double> v(g->size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = (*this)(g->point(i));
            double best = 0;
            const double reach = 3 * g->covering_radius();
            for (std::size_t i = 0; i < g->size(); ++i)
                for (std::size_t j = i + 1; j < g->size(); ++j) {
                    double d = dist_from_chord2(chord2(g->unit(i), g->unit(j)));
                    if (d > reach || d == 0) continue;
                    best = std::max(best, std::abs(v[i] - v[j]) / std::pow(d, alpha));
                }
            return best;
        }
    }
    return 0;
}

double Potential::sup_abs() const {
    switch (kind_) {
        case Kind::Constant:
            return std::abs(c_);
        case Kind::Linear:
            return std::abs(c_) * norm(v_);
        case Kind::Tabulated:
            return std::max(std::abs(table_->min()), std::abs(table_->max()));
        case Kind::LogRatio: {
            double s = 0;
            for (const auto& p : spiral_lattice(4096)) s = std::max(s, std::abs((*this)(p)));
            return s;
        }
    }
    return 0;
}

std::string Potential::key() const {
    if (kind_ == Kind::Tabulated)
        return text_ + "@" + hex64(std::uint64_t(reinterpret_cast<std::uintptr_t>(table_.get())));
    return text_;
}

Potential Potential::parse(const std::string& text, const RationalMap& T) {
    auto w = split_ws(text);
    require(!w.empty(), "empty potential descriptor");
    auto num = [&](std::size_t i) {
        require(i < w.size(), "potential descriptor '" + text + "' is missing a value");
        return parse_double(w[i]);
    };
    const std::string& kind = w[0];
    if (kind == "constant") return constant(w.size() > 1 ? num(1) : 0.0);
    if (kind == "logratio") return log_ratio(num(1), T);
    if (kind == "linear") return linear(num(1), Vec3{num(2), num(3), num(4)});
    if (kind == "tabulated-linear") {
        long long n = parse_int(w.at(1));
        require(n > 0, "tabulated potential needs a positive lattice size");
        Potential lin = linear(num(2), Vec3{num(3), num(4), num(5)});
        Potential p = tabulated(GridFunction::sample(Grid::lattice(std::size_t(n)), lin));
        p.text_ = text;
        return p;
    }
    throw PreconditionError("unknown potential kind '" + kind + "'");
}

}  // namespace rdsphere
