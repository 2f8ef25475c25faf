#include "homogbl/report.hpp"

#include "homogbl/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <system_error>

namespace homogbl {

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

std::string render_csv(const CsvTable& table) {
    std::string out;
    auto append_field = [&out](const std::string& field) {
        if (field.find_first_of(",\"\n") == std::string::npos) {
            out += field;
            return;
        }
        out += '"';
        for (char c : field) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    };
    auto append_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            append_field(row[i]);
        }
        out += '\n';
    };
    append_row(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            fail("inconsistency", "CSV row width does not match the header");
        append_row(row);
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec)
            fail("config-error", "cannot create directory '" +
                                     target.parent_path().string() + "': " + ec.message());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail("config-error", "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) fail("config-error", "short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, target, ec);
    if (ec)
        fail("config-error",
             "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

void write_csv_atomic(const std::string& path, const CsvTable& table) {
    write_text_atomic(path, render_csv(table));
}

CsvTable sweep_table() {
    CsvTable t;
    t.header = {"study", "family", "eps", "kind", "l2_error", "h1_error", "extra"};
    return t;
}

void append_sweep_rows(CsvTable& table, const std::string& study,
                       const std::string& family,
                       const std::vector<ErrorRecord>& records) {
    for (const auto& r : records)
        table.rows.push_back({study, family, format_sci(r.eps), r.kind,
                              format_sci(r.l2), format_sci(r.h1), format_sci(r.extra)});
}

CsvTable rates_table() {
    CsvTable t;
    t.header = {"study", "kind", "slope", "threshold", "verdict"};
    return t;
}

void append_rate_rows(CsvTable& table, const std::string& study,
                      const std::vector<RateRow>& rates) {
    for (const auto& r : rates)
        table.rows.push_back({study, r.kind, format_sci(r.value), r.threshold,
                              r.pass ? "pass" : "fail"});
}

CsvTable spectral_table(const std::vector<SpectralRow>& rows) {
    CsvTable t;
    t.header = {"eps", "lambda_eps", "lambda_hom", "corrector_integral", "residual"};
    for (const auto& r : rows)
        t.rows.push_back({format_sci(r.eps), format_sci(r.lambda_eps),
                          format_sci(r.lambda_hom), format_sci(r.corrector_integral),
                          format_sci(r.residual)});
    return t;
}

} // namespace homogbl
