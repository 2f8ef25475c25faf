#pragma once

#include "homogbl/solver.hpp"

#include <string>
#include <vector>

namespace homogbl {

// One experiment description, parsed from a sectioned key = value file.
// Sections: [coefficient] family/p0/p1; [grid] cell_n/points_per_cell;
// [sweep] eps (fractions like 1/8 or decimals, space- or comma-separated);
// [solver] rel_tol/eigen_tol; [studies] cell/sweep/oscillating/spectral/
// unfolding-checks = on|off (listing the section turns the unlisted ones
// off); [output] directory/cache.
struct RunConfig {
    std::string family = "trig-isotropic";
    double p0 = 2.0;
    double p1 = 1.0;

    int cell_n = 64;
    int points_per_cell = 16;

    std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125};

    SolverConfig solver{};
    double eigen_tol = 1e-8; // spectral eigensolves tolerate a looser target

    bool study_cell = true;
    bool study_sweep = true;
    bool study_oscillating = true;
    bool study_spectral = true;
    bool study_unfolding = true;

    std::string output_dir = "out";
    bool cache = true;
};

// Parse + validate; errors carry file:line context under "config-error".
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Invariants shared by the file parser and the CLI flags: known family,
// eps reciprocal integers in (0,1], points-per-cell even and >= 8 and
// dividing cell_n, solver tolerance in (0, 1e-4].
void validate_config(const RunConfig& cfg);

// "1/8" or "0.125" -> 0.125; rejects malformed or non-reciprocal values.
double parse_eps_token(const std::string& token);

} // namespace homogbl
