#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rb::cli {

// Exit codes: validation failures are distinct from fit and IO problems.
inline constexpr int kOk = 0;
inline constexpr int kSchemaError = 2;
inline constexpr int kFitError = 3;
inline constexpr int kIoError = 4;

struct RunConfig {
    std::string subcommand;  // srb, irb, leakage, flicker-ramsey,
                             // flicker-rb, distances, sweep
    std::string plan_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
    std::string format = "csv";  // series format: csv or json
};

// Parse, default and validate a plan document; unknown keys are rejected and
// errors name the offending field. Returns the normalized plan as a JSON
// string.
std::string validate_plan(const std::string& subcommand,
                          const std::string& plan_text);

// FNV-1a hash of the normalized plan; names the run directory.
std::string plan_hash(const std::string& normalized_plan);

// Execute a run end to end: read the plan, validate, dispatch, write the
// artifact files and a manifest under out_dir/<plan-hash>/. Returns an exit
// code; diagnostics go to stderr.
int run(const RunConfig& config);

}  // namespace rb::cli
