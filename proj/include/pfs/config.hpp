#pragma once

// Flat `section.key = value` scenario files and built-in presets.
//
//   pipe.samples = "0 0 1; 100 0 1"      # x b R triples, or
//   pipe.file = profile.txt
//   mesh.cells = 200
//   time.cfl = 0.9
//   time.end = 10
//   time.output_interval = 0.01          # 0 = every step
//   fluid.rho0 / fluid.beta0 / fluid.g / fluid.ks (inf = frictionless)
//   bc.left.kind = reservoir             # wall | reservoir | discharge | valve
//   bc.left.level | bc.left.ratio | bc.left.discharge | bc.left.close_time
//   ic.<name>.from / ic.<name>.to        # X range, default the whole pipe
//   ic.<name>.level | .elevation | .ratio | .head
//   ic.<name>.velocity | ic.<name>.discharge
//   output.probes = "199, 100"

#include <string>
#include <vector>

#include "pfs/simulation.hpp"

namespace pfs {

/// Parse error: the message starts with the key path (or `line N`).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strict parse: unknown keys, duplicates, missing required keys and range
/// violations are errors. Boundary levels are checked against the pipe ends.
/// A relative pipe.file is resolved against `base_dir`.
SimConfig parse_config(const std::string& text, const std::string& base_dir = {});
SimConfig load_config(const std::string& path);

/// Inverse of parse_config; numbers are written with 17 significant digits.
std::string serialize_config(const SimConfig& config);

const std::vector<std::string>& preset_names();
SimConfig preset(const std::string& name);

}  // namespace pfs
