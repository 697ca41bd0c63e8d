#pragma once

#include <string>
#include <vector>

#include "lognls/solvers.hpp"

namespace lognls {

struct GridConfig {
    double R = 16.0;
    int M = 2048;
};

struct OutputConfig {
    std::string directory = ".";
    bool csv = true;
    bool structured_text = true;
};

struct RunConfig {
    ProblemParams problem;
    GridConfig grid;
    SolveOptions solver;
    OutputConfig output;
    std::uint64_t seed = 0;
};

// key = value lines with # comments, sections [problem]/[grid]/[solver]/[output];
// a bare top-level `seed` is accepted.  Unknown keys, malformed values and
// physical-gate violations are config_errors carrying the line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Lossless round trip: parse_config(serialize_config(cfg)) reproduces cfg.
std::string serialize_config(const RunConfig& cfg);

// Stable-order key = value report with the full resolved config appended.
void write_report(const std::string& path, const std::string& kind,
                  const std::vector<std::pair<std::string, std::string>>& entries,
                  const RunConfig& cfg);

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace);

std::string format_double(double x); // %.17g

} // namespace lognls
