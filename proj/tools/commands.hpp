#pragma once

#include <string>
#include <vector>

#include "rdsphere/config.hpp"

namespace rdsphere::cli {

// Output file could not be created.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> files;  // written paths, manifest last
};

// Output name stem <command>-<16 hex digits of the config hash>.
std::string output_stem(const std::string& command, const RunConfig& cfg);

CommandResult cmd_julia_render(const RunConfig& cfg);
CommandResult cmd_pressure(const RunConfig& cfg);
CommandResult cmd_measure(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_simulate(const RunConfig& cfg);

// Julia image as PPM P6: the z chart |Re|, |Im| <= R on the left, the 1/z chart on the right.
std::string render_julia_ppm(const RunConfig& cfg, std::size_t* flagged = nullptr);

}  // namespace rdsphere::cli
