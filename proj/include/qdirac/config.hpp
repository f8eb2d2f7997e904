#pragma once

// Run configuration: flat key = value file, command-line overrides on top.
// The shipped defaults describe the zero-potential Case 1ii problem
// (q = 0.5, a = 1, depth = 64), so `verify` is meaningful out of the box.

#include <string>

#include "qdirac/solver.hpp"

namespace qdirac {

struct RunConfig {
    double q = 0.5;
    double a = 1.0;
    int depth = 64;
    BoundarySpec boundary{0.0, 1.0, 1.0, 0.0};  // k11, k12, k21, k22
    std::string potential_p = "zero";  // zero | constant:<c> | linear:<c> | csv:<path>
    std::string potential_r = "zero";
    int count = 8;
    int precision_bits = 53;
    int extended_bits = 256;
    double refine_tol = 1e-12;
    double solver_tol = 1e-10;
    bool both_signs = true;
    int scan_points_per_octave = 96;
    std::string output;              // empty = stdout
    std::string format = "csv";      // csv | json
};

// Parses `key = value` lines ('#' comments); unknown keys are rejected.
RunConfig load_config_file(const std::string& path, RunConfig base = {});
void apply_config_line(RunConfig& cfg, const std::string& key,
                       const std::string& value);
void validate_config(const RunConfig& cfg);

// Materializes a potential descriptor on the lattice.
LatticeFn make_potential(const std::string& descriptor, QLatticePtr lattice);

Problem make_problem(const RunConfig& cfg);
QTrigContext make_context(const RunConfig& cfg);

}  // namespace qdirac
