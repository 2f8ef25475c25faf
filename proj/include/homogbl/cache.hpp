#pragma once

#include "homogbl/cell.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace homogbl {

// Content key for a cell solve: coefficient identity (canonical name with
// all parameters), grid resolution, and solver tolerance.  Any change in a
// parameter changes the key, so stale entries can never collide.
std::uint64_t cell_cache_key(const Coefficient& coeff, int n, double rel_tol);

// Binary snapshot of the chi fields and tensor under dir/cell-<key>.bin.
// Doubles are stored raw, so a round trip is bit-exact.
void save_cell_cache(const std::string& dir, const CellSolutions& cells,
                     double rel_tol);

// Loads a matching snapshot; the periodic stiffness is reassembled (it is a
// deterministic function of coefficient and grid).  A missing file returns
// nullopt silently; a corrupt or mismatched file returns nullopt and, when
// `warning` is given, a one-line reason, so callers recompute.
std::optional<CellSolutions> load_cell_cache(const std::string& dir,
                                             const CoefficientPtr& coeff, int n,
                                             double rel_tol,
                                             std::string* warning = nullptr);

} // namespace homogbl
