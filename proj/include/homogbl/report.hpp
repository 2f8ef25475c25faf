#pragma once

#include "homogbl/corrector.hpp"
#include "homogbl/spectral.hpp"

#include <string>
#include <vector>

namespace homogbl {

// In-memory CSV: fixed header, stringified rows, written whole-file.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Scientific with 12 fractional digits: enough to round-trip measurements
// stably, and byte-stable across reruns.
std::string format_sci(double v);

std::string render_csv(const CsvTable& table);

// Whole-file atomic write (temp file + rename); creates parent directories.
void write_text_atomic(const std::string& path, const std::string& content);
void write_csv_atomic(const std::string& path, const CsvTable& table);

// Fixed schemas:
//   sweep.csv:    study, family, eps, kind, l2_error, h1_error, extra
//   rates.csv:    study, kind, slope, threshold, verdict
//   spectral.csv: eps, lambda_eps, lambda_hom, corrector_integral, residual
CsvTable sweep_table();
void append_sweep_rows(CsvTable& table, const std::string& study,
                       const std::string& family,
                       const std::vector<ErrorRecord>& records);

CsvTable rates_table();
void append_rate_rows(CsvTable& table, const std::string& study,
                      const std::vector<RateRow>& rates);

CsvTable spectral_table(const std::vector<SpectralRow>& rows);

} // namespace homogbl
