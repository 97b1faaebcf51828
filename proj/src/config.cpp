#include "rdsphere/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rdsphere/errors.hpp"
#include "rdsphere/io.hpp"

namespace rdsphere {

namespace {

using boost::property_tree::ptree;

const char* kTilt = "0.48 0.6 0.64";

SystemEntry entry(const std::string& map, const std::string& potential, double weight, const std::string& label);

RationalMap parse_map_spec(const std::string& spec) {
    const auto w = split_ws(spec);
    require(!w.empty(), "empty map descriptor");
    auto arg = [&](std::size_t i) {
        require(i < w.size(), "map descriptor '" + spec + "' is missing a value");
        return w[i];
    };
    const std::string& kind = w[0];
    if (kind == "identity") return RationalMap::identity();
    if (kind == "power") return RationalMap::power(int(parse_int(arg(1))), w.size() > 2 ? parse_complex(w[2]) : cplx(1.0));
    if (kind == "qc") return RationalMap::qc(parse_double(arg(1)));
    if (kind == "quadratic") return RationalMap::quadratic(parse_complex(arg(1)));
    if (kind == "mobius")
        return RationalMap::mobius(parse_complex(arg(1)), parse_complex(arg(2)), parse_complex(arg(3)),
                                   parse_complex(arg(4)));
    throw PreconditionError("unknown map kind '" + kind + "'");
}

SystemEntry entry(const std::string& map, const std::string& potential, double weight, const std::string& label) {
    const auto T = parse_map_spec(map);
    return SystemEntry{T, Potential::parse(potential, T), weight, label};
}

std::string one_line(const RationalMap& T) {
    auto lines = split(trim(T.to_text()), '\n');
    return lines.at(0) + " / " + lines.at(1);
}

std::string describe_system(const BaseSystem& sys) {
    std::ostringstream os;
    os << "mode = " << (sys.mode() == BaseSystem::Mode::Iid ? "iid" : "explicit") << '\n';
    os << "system_seed = " << sys.seed() << '\n';
    for (const auto& e : sys.support())
        os << "entry = " << e.label << " | " << one_line(e.map) << " | " << e.potential.describe() << " | "
           << fmt(e.weight) << '\n';
    return os.str();
}

ptree read_ini(const std::string& text) {
    ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw PreconditionError(std::string("config: ") + e.what());
    }
    return pt;
}

std::string get(const ptree& sec, const std::string& key, const std::string& fallback) {
    const auto it = sec.find(key);
    return it == sec.not_found() ? fallback : trim(it->second.data());
}

const ptree* section(const ptree& pt, const std::string& name) {
    const auto it = pt.find(name);
    return it == pt.not_found() ? nullptr : &it->second;
}

BaseSystem system_from_tree(const ptree& pt, std::string* source) {
    const ptree* sys = section(pt, "system");
    require(sys != nullptr, "config has no [system] section");
    const std::string preset = get(*sys, "preset", "");
    const auto seed_text = get(*sys, "seed", "");
    if (!preset.empty()) {
        BaseSystem b = preset_system(preset);
        if (!seed_text.empty() && !b.deterministic()) b = b.reseeded(std::uint64_t(parse_int(seed_text)));
        if (source) *source = "preset " + preset;
        return b;
    }
    std::vector<SystemEntry> entries;
    for (const auto& [name, sec] : pt) {
        if (name.rfind("map.", 0) != 0) continue;
        const std::string label = name.substr(4);
        RationalMap T = RationalMap::identity();
        const std::string spec = get(sec, "map", "");
        if (!spec.empty()) {
            T = parse_map_spec(spec);
        } else {
            const std::string num = get(sec, "num", ""), den = get(sec, "den", "");
            require(!num.empty() && !den.empty(), "[" + name + "] needs map = ... or num/den lines");
            T = RationalMap::from_text(num + "\n" + den + "\n");
        }
        const double weight = parse_double(get(sec, "weight", "1"));
        require(weight > 0, "[" + name + "] weight must be positive");
        entries.push_back(SystemEntry{T, Potential::parse(get(sec, "potential", "constant 0"), T), weight, label});
    }
    require(!entries.empty(), "[system] without preset needs at least one [map.<label>] section");
    const std::string mode = get(*sys, "mode", entries.size() > 1 ? "iid" : "explicit");
    if (source) *source = "inline";
    if (mode == "iid") return BaseSystem::iid(std::move(entries), std::uint64_t(seed_text.empty() ? 1 : parse_int(seed_text)));
    if (mode == "explicit") return BaseSystem::explicit_sequence(std::move(entries));
    throw PreconditionError("[system] mode must be iid or explicit");
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    for (const auto& w : split_ws(t)) out.push_back(parse_double(w));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ",") + fmt(x);
    return s;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"z2", "z3", "qc0.3", "mobius2z", "z2z3", "z2_small_phi", "z2_perturbation", "qc_iid"};
}

BaseSystem preset_system(const std::string& name) {
    const std::string lin = std::string("linear 0.1 ") + kTilt;
    if (name == "z2") return BaseSystem::constant(RationalMap::power(2));
    if (name == "z3") return BaseSystem::constant(RationalMap::power(3));
    if (name == "qc0.3") return BaseSystem::constant(RationalMap::qc(0.3));
    if (name == "mobius2z") return BaseSystem::constant(RationalMap::power(1, 2.0));
    if (name == "z2z3")
        return BaseSystem::iid({entry("power 2", "constant 0", 0.5, "z2"), entry("power 3", "constant 0", 0.5, "z3")}, 77);
    if (name == "z2_small_phi")
        return BaseSystem::explicit_sequence({entry("power 2", std::string("tabulated-linear 8192 0.1 ") + kTilt, 1, "z2")});
    if (name == "z2_perturbation")
        return BaseSystem::iid({entry("quadratic 0.03,0", lin, 1.0 / 3, "a"), entry("quadratic 0,-0.02", lin, 1.0 / 3, "b"),
                                entry("quadratic 0.02,0.01", lin, 1.0 / 3, "c")},
                               21);
    if (name == "qc_iid")
        return BaseSystem::iid({entry("qc 0.3", "constant 0", 1.0 / 3, "q0.3"), entry("qc 0.5", "constant 0", 1.0 / 3, "q0.5"),
                                entry("qc 1", "constant 0", 1.0 / 3, "q1")},
                               5);
    throw PreconditionError("unknown preset '" + name + "'");
}

BaseSystem parse_system(const std::string& text, std::string* source) { return system_from_tree(read_ini(text), source); }

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    const ptree pt = read_ini(text);
    RunConfig c;
    const ptree empty;
    auto sec = [&](const char* name) -> const ptree& {
        const ptree* s = section(pt, name);
        return s ? *s : empty;
    };
    auto num = [&](const ptree& s, const char* key, double fallback) {
        const auto v = get(s, key, "");
        return v.empty() ? fallback : parse_double(v);
    };
    auto integer = [&](const ptree& s, const char* key, long long fallback) {
        const auto v = get(s, key, "");
        return v.empty() ? fallback : parse_int(v);
    };
    const ptree& run = sec("run");
    const std::string path = get(run, "system", "");
    if (!path.empty()) {
        require(section(pt, "system") == nullptr, "give either [run] system = <path> or a [system] section");
        std::filesystem::path p(path);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        require(bool(in), "system file '" + p.string() + "' does not exist");
        std::stringstream ss;
        ss << in.rdbuf();
        c.system = parse_system(ss.str(), &c.system_source);
        c.system_source = "file " + path;
    } else if (section(pt, "system")) {
        c.system = system_from_tree(pt, &c.system_source);
    }
    c.seed = std::uint64_t(integer(run, "seed", (long long)c.seed));
    c.net = std::size_t(integer(run, "net", (long long)c.net));
    c.horizon = int(integer(run, "horizon", c.horizon));
    c.delta = num(run, "delta", c.delta);
    c.growth = num(run, "growth", c.growth);
    c.out = get(run, "out", c.out);

    const ptree& pr = sec("pressure");
    if (const auto v = get(pr, "eps", ""); !v.empty()) c.eps_ladder = parse_doubles(v);
    if (const auto v = get(pr, "n", ""); !v.empty()) {
        c.n_ladder.clear();
        for (double x : parse_doubles(v)) c.n_ladder.push_back(int(x));
    }
    c.samples = int(integer(pr, "samples", c.samples));

    const ptree& me = sec("measure");
    c.grid = std::size_t(integer(me, "grid", (long long)c.grid));
    c.depth = int(integer(me, "depth", c.depth));
    c.measure_n = int(integer(me, "n", c.measure_n));
    c.kappa = num(me, "kappa", c.kappa);

    const ptree& ju = sec("julia");
    c.image_size = int(integer(ju, "size", c.image_size));
    c.chart_radius = num(ju, "radius", c.chart_radius);
    c.image_delta = num(ju, "delta", c.image_delta);

    const ptree& si = sec("simulate");
    if (const auto v = get(si, "start", ""); !v.empty()) c.start = parse_complex(v);
    c.steps = int(integer(si, "steps", c.steps));

    c.verify_scale = num(sec("verify"), "scale", c.verify_scale);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), "config file '" + path + "' does not exist");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

void validate(const RunConfig& c) {
    require(!c.eps_ladder.empty() && !c.n_ladder.empty(), "ladders must not be empty");
    for (std::size_t i = 0; i < c.eps_ladder.size(); ++i) {
        require(c.eps_ladder[i] > 0, "eps ladder values must be positive");
        require(i == 0 || c.eps_ladder[i] < c.eps_ladder[i - 1], "eps ladder must be strictly decreasing");
    }
    for (std::size_t i = 0; i < c.n_ladder.size(); ++i) {
        require(c.n_ladder[i] >= 2, "n ladder values must be at least 2");
        require(i == 0 || c.n_ladder[i] > c.n_ladder[i - 1], "n ladder must be strictly increasing");
    }
    require(c.net > 0 && c.grid > 0 && c.horizon > 0 && c.samples > 0, "sizes must be positive");
    require(c.depth >= 1 && c.measure_n >= 1 && c.steps >= 0, "depths must be positive");
    require(c.delta > 0 && c.growth > 1 && c.kappa >= 0, "criterion parameters out of range");
    require(c.image_size > 0 && c.chart_radius > 0 && c.image_delta >= 0, "image parameters out of range");
    require(c.verify_scale > 0, "verify scale must be positive");
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os << "[system]\nsource = " << system_source << '\n' << describe_system(system);
    os << "[run]\nseed = " << seed << "\nnet = " << net << "\nhorizon = " << horizon << "\ndelta = " << fmt(delta)
       << "\ngrowth = " << fmt(growth) << '\n';
    std::vector<double> ns(n_ladder.begin(), n_ladder.end());
    os << "[pressure]\neps = " << join(eps_ladder) << "\nn = " << join(ns) << "\nsamples = " << samples << '\n';
    os << "[measure]\ngrid = " << grid << "\ndepth = " << depth << "\nn = " << measure_n << "\nkappa = " << fmt(kappa)
       << '\n';
    os << "[julia]\nsize = " << image_size << "\nradius = " << fmt(chart_radius) << "\ndelta = " << fmt(image_delta)
       << '\n';
    os << "[simulate]\nstart = " << fmt_complex(start) << "\nsteps = " << steps << '\n';
    os << "[verify]\nscale = " << fmt(verify_scale) << '\n';
    return os.str();
}

}  // namespace rdsphere
