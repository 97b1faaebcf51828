#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdsphere/rds.hpp"

namespace rdsphere {

inline constexpr const char* kVersion = "1.0.0";

// Everything a CLI run depends on. canonical() is the hashed identity of a run.
struct RunConfig {
    // System: a preset name, or the entries of a [system] section and its [map.*] sections.
    std::string system_text = "[system]\npreset = z2\n";
    BaseSystem system = BaseSystem::constant(RationalMap::power(2));
    std::string system_source = "preset z2";

    std::uint64_t seed = 1;
    std::size_t net = 4096;   // derivative-criterion net, also the separated-set net
    int horizon = 24;         // derivative-criterion horizon
    double delta = 0.02;      // derivative-criterion ball radius
    double growth = 1e3;      // derivative-criterion threshold

    std::vector<double> eps_ladder{0.2, 0.1, 0.05, 0.02};  // decreasing
    std::vector<int> n_ladder{8};                          // increasing
    int samples = 20;         // omega samples for random systems

    std::size_t grid = 6000;  // transfer-operator lattice
    int depth = 20;           // backward depth of the eigenfunction
    int measure_n = 12;       // conformal-measure depth
    double kappa = 0.05;      // anchor keep-out radius

    int image_size = 512;     // per chart panel
    double chart_radius = 2;  // |z| <= R and |1/z| <= R panels
    double image_delta = 0;   // 0: a quarter pixel at the chart origin

    cplx start{0.3, 0.2};     // simulate start point
    int steps = 20;

    double verify_scale = 1;
    std::string out = ".";

    // Stable key = value dump of every field above, in a fixed order.
    std::string canonical() const;
};

// Built-in systems; names listed by preset_names().
BaseSystem preset_system(const std::string& name);
std::vector<std::string> preset_names();

// INI text with [system], [map.<label>] and [run]-style sections ([run], [pressure],
// [measure], [julia], [simulate], [verify]). Relative system paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// System from INI text containing a [system] section.
BaseSystem parse_system(const std::string& text, std::string* source = nullptr);

// Validation of the invariants: positive sorted ladders, positive sizes.
void validate(const RunConfig& cfg);

}  // namespace rdsphere
