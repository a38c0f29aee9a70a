#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amspec/common.hpp"
#include "amspec/mixednorm.hpp"

namespace amspec::cli {

// Flat key=value run configuration. Text form: one "key = value" per line, '#' starts a comment, p is a comma
// list. to_text() prints every key with round-trip precision, so parse(to_text()) reproduces the config.
struct RunConfig {
    int dim = 1;
    double alpha = 0.5;
    double s = 0.0;
    RVec p{2.0};
    double q = 2.0;
    int kmax = 4;
    int grid_n = 1024;
    double grid_T = 8.0;
    double c1 = 0.0;  // 0 selects the smallest certified c1
    double delta = 1.0;
    std::uint64_t seed = 1;

    static RunConfig parse(const std::string& text);  // ParseError on unknown keys or malformed values
    static RunConfig load(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string to_text() const;
    // module preconditions: PreconditionFailed / DimensionMismatch before any work starts
    void validate() const;
    PVec pvec() const;
    Grid grid() const { return Grid{dim, grid_T, grid_n}; }
    bool operator==(const RunConfig& o) const;
};

// FNV-1a 64-bit of the text form, as 16 hex digits
std::string config_hash(const RunConfig& c);

// Runs the command line; returns the exit code (0 ok, 1 usage or parse, 2 numerical precondition,
// 3 non-convergence). Diagnostics go to stderr, reports to the output directory and stdout.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace amspec::cli
