// cli.hpp
//
// Experiment configuration and the batch driver behind the `speclab` tool.
// A configuration names one operation plus its parameters; it loads from and
// saves to JSON (unknown fields are rejected) and runs to CSV and JSON outputs.
#pragma once

#include "speclab/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace speclab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitUsage = 2;

const std::vector<std::string>& commands();

struct ExperimentConfig {
    std::string command;
    std::string spec;                 // canonical manifold expression
    std::string convention = "shifted";
    std::optional<std::string> lambda_max;  // rational literal
    std::optional<std::string> lambda;      // rational literal
    std::optional<std::string> grid;        // lo:hi:n | dyadic:lo:hi[:per_octave] | roots:m_lo:m_hi
    std::string schedule = "unit";          // pow:d | log:d | unit, comma-separated for annulus-verify
    std::optional<std::string> q;           // "10", "7/2", "inf"
    std::optional<std::string> delta;       // rational literal
    std::string family = "zonal";
    std::optional<std::string> out;
    std::optional<std::string> cache;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    std::uint64_t samples = 50;
    std::optional<double> tolerance;

    bool operator==(const ExperimentConfig&) const = default;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Strict JSON loading: unknown keys, wrong types and bad values throw ConfigError.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& c);

// Checks the command name, canonicalizes `spec`, and validates literals.
void validate(ExperimentConfig& c);

// Grid expansion. Numeric grids give lambda values; "roots:a:b" gives m = a..b (lambda = sqrt m).
struct Grid {
    std::vector<double> values;
    std::vector<std::uint64_t> roots;
    bool is_roots() const { return !roots.empty(); }
};
Grid parse_grid(const std::string& text);

// Runs the configured operation. CSV goes to `out` (or `csv` when no path is
// set), the JSON report to out + ".json" (or `report`). Returns the exit code.
int run(const ExperimentConfig& c, std::ostream& csv, std::ostream& report);

// Full command-line entry point.
int main(int argc, char** argv);

}  // namespace speclab::cli
