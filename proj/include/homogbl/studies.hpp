#pragma once

#include "homogbl/cell.hpp"
#include "homogbl/corrector.hpp"

#include <string>
#include <vector>

namespace homogbl {

// One measured identity or bound at one eps.
struct CheckRow {
    std::string check;
    double eps = 0.0;
    double value = 0.0;
    std::string threshold; // "-" for informational measurements
    bool pass = true;
};

struct UnfoldingReport {
    std::vector<CheckRow> rows;
    std::vector<RateRow> ratios; // boundedness verdicts across the sweep
    bool all_pass = true;
    std::vector<std::string> failures;
};

// Unfolding-operator verification sweep: per eps the integration identity,
// the product rule, and the gradient rule hold to 1e-12; across the sweep
// the averaging ratios ||v - M^eps v||/eps, ||v - Q_eps v||/eps,
// ||Q_eps v - M^eps v||/eps and the local-average ratio (with Phi = chi_1)
// each vary by at most a factor 4.
UnfoldingReport unfolding_checks(const CellSolutions& cells,
                                 const std::vector<double>& eps_list,
                                 int points_per_cell);

} // namespace homogbl
