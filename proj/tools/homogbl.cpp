// homogbl: periodic-homogenization workbench.
//
// Subcommands: run (config-driven pipeline), cell (effective tensor),
// sweep (corrector error rates), spectral (eigenvalue corrector study),
// check-unfolding (unfolding-operator identities).  Exit codes: 0 all
// checks passed, 2 a threshold failed, 1 execution error.

#include "CLI11.hpp"
#include "json.hpp"

#include "homogbl/cache.hpp"
#include "homogbl/cell.hpp"
#include "homogbl/config.hpp"
#include "homogbl/corrector.hpp"
#include "homogbl/errors.hpp"
#include "homogbl/report.hpp"
#include "homogbl/spectral.hpp"
#include "homogbl/studies.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using homogbl::RunConfig;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitThreshold = 2;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::vector<double> parse_eps_flag(const std::string& text) {
    std::string normalized = text;
    for (char& c : normalized)
        if (c == ',') c = ' ';
    std::istringstream in(normalized);
    std::vector<double> eps;
    std::string token;
    while (in >> token) eps.push_back(homogbl::parse_eps_token(token));
    if (eps.empty()) homogbl::fail("config-error", "eps list is empty");
    return eps;
}

// Options shared by the direct subcommands (run reads them from the file).
struct CommonFlags {
    RunConfig cfg;
    std::string eps_text;

    void attach(CLI::App* app) {
        app->add_option("--family", cfg.family,
                        "coefficient family: identity, trig-isotropic, layered, "
                        "checkerboard");
        app->add_option("--p0", cfg.p0, "first coefficient parameter");
        app->add_option("--p1", cfg.p1, "second coefficient parameter");
        app->add_option("--cell-n", cfg.cell_n, "cell-problem grid resolution");
        app->add_option("--k", cfg.points_per_cell, "fine-grid points per eps-cell");
        app->add_option("--eps", eps_text,
                        "eps list, e.g. \"1/4,1/8,1/16,1/32\"");
        app->add_option("--rel-tol", cfg.solver.rel_tol, "CG relative tolerance");
        app->add_option("--eigen-tol", cfg.eigen_tol, "eigensolver tolerance");
        app->add_option("--out", cfg.output_dir, "output directory");
        app->add_flag("--no-cache", "disable the cell-solution cache")
            ->each([this](const std::string&) { cfg.cache = false; });
    }

    RunConfig finalize() {
        if (!eps_text.empty()) cfg.eps_list = parse_eps_flag(eps_text);
        homogbl::validate_config(cfg);
        return cfg;
    }
};

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.output_dir) / name;
}

// Solve (or load) the cell problems the studies share.
homogbl::CellSolutions prepare_cells(const RunConfig& cfg, bool need_chi2,
                                     json& meta) {
    const auto coeff = homogbl::make_coefficient(cfg.family, cfg.p0, cfg.p1);
    const std::string cache_dir =
        (std::filesystem::path(cfg.output_dir) / "cache").string();
    homogbl::SolverConfig solver = cfg.solver;

    std::optional<homogbl::CellSolutions> cells;
    if (cfg.cache) {
        std::string warning;
        cells = homogbl::load_cell_cache(cache_dir, coeff, cfg.cell_n,
                                         solver.rel_tol, &warning);
        if (!warning.empty()) {
            std::cerr << "warning: " << warning << "\n";
            meta["cache_warnings"].push_back(warning);
        }
        meta["cache"] = cells.has_value() ? "hit" : "miss";
    }
    if (!cells) {
        homogbl::Grid grid =
            homogbl::build_cell_grid(cfg.cell_n, coeff->discontinuous());
        cells = homogbl::solve_first_cell(grid, coeff, solver);
    }
    if (need_chi2 && !cells->has_chi2) {
        homogbl::solve_second_cell(*cells, solver);
        if (cfg.cache) homogbl::save_cell_cache(cache_dir, *cells, solver.rel_tol);
    } else if (cfg.cache && meta.value("cache", "") != "hit") {
        homogbl::save_cell_cache(cache_dir, *cells, solver.rel_tol);
    }
    return std::move(*cells);
}

json config_json(const RunConfig& cfg) {
    json j;
    j["coefficient"] = {{"family", cfg.family}, {"p0", cfg.p0}, {"p1", cfg.p1}};
    j["grid"] = {{"cell_n", cfg.cell_n}, {"points_per_cell", cfg.points_per_cell}};
    j["sweep"] = {{"eps", cfg.eps_list}};
    j["solver"] = {{"rel_tol", cfg.solver.rel_tol}, {"eigen_tol", cfg.eigen_tol}};
    j["studies"] = {{"cell", cfg.study_cell},
                    {"sweep", cfg.study_sweep},
                    {"oscillating", cfg.study_oscillating},
                    {"spectral", cfg.study_spectral},
                    {"unfolding-checks", cfg.study_unfolding}};
    j["output"] = {{"directory", cfg.output_dir}, {"cache", cfg.cache}};
    return j;
}

json tensor_json(const homogbl::SymMat2& a) {
    return json{{"a11", a.a11}, {"a12", a.a12}, {"a22", a.a22}};
}

void print_rates(const std::string& study, const std::vector<homogbl::RateRow>& rates) {
    for (const auto& r : rates) {
        std::printf("  [%s] %s/%s = %.4f  (%s)%s%s\n", r.pass ? "pass" : "FAIL",
                    study.c_str(), r.kind.c_str(), r.value, r.threshold.c_str(),
                    r.note.empty() ? "" : "  -- ", r.note.c_str());
    }
}

// Elementary sanity verdict for the cell study: symmetric tensor within the
// coefficient's ellipticity bounds.
bool tensor_within_bounds(const homogbl::SymMat2& a, const homogbl::Coefficient& c) {
    const auto [lo, hi] = a.eigenvalues();
    const double tol = 1e-9 * std::max(1.0, c.upper_bound());
    return lo >= c.lower_bound() - tol && hi <= c.upper_bound() + tol;
}

homogbl::CsvTable cell_table(const RunConfig& cfg, const homogbl::SymMat2& a) {
    homogbl::CsvTable t;
    t.header = {"family", "n", "a11", "a12", "a21", "a22"};
    t.rows.push_back({cfg.family, std::to_string(cfg.cell_n),
                      homogbl::format_sci(a.a11), homogbl::format_sci(a.a12),
                      homogbl::format_sci(a.a12), homogbl::format_sci(a.a22)});
    return t;
}

homogbl::CsvTable unfolding_table(const homogbl::UnfoldingReport& report) {
    homogbl::CsvTable t;
    t.header = {"check", "eps", "value", "threshold", "verdict"};
    for (const auto& row : report.rows)
        t.rows.push_back({row.check, homogbl::format_sci(row.eps),
                          homogbl::format_sci(row.value), row.threshold,
                          row.pass ? "pass" : "fail"});
    return t;
}

int run_pipeline(const RunConfig& cfg) {
    json meta;
    meta["version"] = kVersion;
    meta["config"] = config_json(cfg);
    json timings;
    bool all_pass = true;
    bool exec_error = false;
    std::vector<std::string> failures;

    homogbl::CsvTable sweep_csv = homogbl::sweep_table();
    homogbl::CsvTable rates_csv = homogbl::rates_table();

    // The sweep and oscillating studies build their expansions from a cell
    // solve matched to the fine operator's per-cell resolution, so the
    // configured cell solve only ever feeds the tensor report.
    const bool need_chi2 = false;
    Stopwatch total;

    std::optional<homogbl::CellSolutions> cells;
    try {
        Stopwatch t;
        cells = prepare_cells(cfg, need_chi2, meta);
        timings["cell_solve"] = t.ms();
    } catch (const homogbl::error& e) {
        failures.push_back(std::string("cell solve: ") + e.what());
        exec_error = true;
    }

    if (cells && cfg.study_cell) {
        const bool ok = tensor_within_bounds(cells->a_hom, *cells->coeff);
        meta["studies"]["cell"] = {{"tensor", tensor_json(cells->a_hom)},
                                   {"within_bounds", ok}};
        homogbl::write_csv_atomic(out_path(cfg, "cell.csv").string(),
                                  cell_table(cfg, cells->a_hom));
        std::printf("cell: a_hom = [%.12g %.12g; %.12g %.12g]  [%s]\n",
                    cells->a_hom.a11, cells->a_hom.a12, cells->a_hom.a12,
                    cells->a_hom.a22, ok ? "pass" : "FAIL");
        all_pass = all_pass && ok;
    }

    if (cells && cfg.study_sweep) {
        try {
            Stopwatch t;
            homogbl::SweepConfig sc;
            sc.eps_list = cfg.eps_list;
            sc.points_per_cell = cfg.points_per_cell;
            sc.solver = cfg.solver;
            const homogbl::SweepResult res = homogbl::run_sweep(*cells, sc);
            timings["sweep"] = t.ms();
            homogbl::append_sweep_rows(sweep_csv, "sweep", cfg.family, res.records);
            homogbl::append_rate_rows(rates_csv, "sweep", res.rates);
            print_rates("sweep", res.rates);
            for (const auto& f : res.failures) failures.push_back("sweep: " + f);
            for (const auto& n : res.notes) meta["studies"]["sweep"]["notes"].push_back(n);
            meta["studies"]["sweep"]["expansion_tensor"] =
                tensor_json(res.expansion_tensor);
            all_pass = all_pass && res.all_pass;
        } catch (const homogbl::error& e) {
            failures.push_back(std::string("sweep: ") + e.what());
            exec_error = true;
        }
    }

    if (cells && cfg.study_oscillating) {
        try {
            Stopwatch t;
            homogbl::SweepConfig sc;
            sc.eps_list = cfg.eps_list;
            sc.points_per_cell = cfg.points_per_cell;
            sc.solver = cfg.solver;
            const homogbl::SweepResult res =
                homogbl::oscillating_dirichlet_study(*cells, sc);
            timings["oscillating"] = t.ms();
            homogbl::append_sweep_rows(sweep_csv, "oscillating", cfg.family,
                                       res.records);
            homogbl::append_rate_rows(rates_csv, "oscillating", res.rates);
            print_rates("oscillating", res.rates);
            for (const auto& f : res.failures) failures.push_back("oscillating: " + f);
            for (const auto& n : res.notes)
                meta["studies"]["oscillating"]["notes"].push_back(n);
            all_pass = all_pass && res.all_pass;
        } catch (const homogbl::error& e) {
            failures.push_back(std::string("oscillating: ") + e.what());
            exec_error = true;
        }
    }

    if (cells && cfg.study_spectral) {
        try {
            Stopwatch t;
            homogbl::SpectralConfig sc;
            sc.eps_list = cfg.eps_list;
            sc.points_per_cell = cfg.points_per_cell;
            sc.solver = cfg.solver;
            sc.solver.rel_tol = cfg.eigen_tol;
            const homogbl::SpectralReport res =
                homogbl::eigen_corrector_study(*cells, sc);
            timings["spectral"] = t.ms();
            homogbl::write_csv_atomic(out_path(cfg, "spectral.csv").string(),
                                      homogbl::spectral_table(res.rows));
            homogbl::append_rate_rows(rates_csv, "spectral", res.rates);
            print_rates("spectral", res.rates);
            meta["studies"]["spectral"] = {
                {"tensor", tensor_json(res.tensor)},
                {"non_uniqueness", res.non_uniqueness}};
            if (res.non_uniqueness)
                std::printf("  note: possible non-uniqueness of the eigenvalue "
                            "corrector limit (flagged, see report)\n");
            for (const auto& f : res.failures) failures.push_back("spectral: " + f);
            all_pass = all_pass && res.all_pass;
        } catch (const homogbl::error& e) {
            failures.push_back(std::string("spectral: ") + e.what());
            exec_error = true;
        }
    }

    if (cells && cfg.study_unfolding) {
        try {
            Stopwatch t;
            const homogbl::UnfoldingReport res = homogbl::unfolding_checks(
                *cells, cfg.eps_list, cfg.points_per_cell);
            timings["unfolding"] = t.ms();
            homogbl::write_csv_atomic(out_path(cfg, "unfolding.csv").string(),
                                      unfolding_table(res));
            homogbl::append_rate_rows(rates_csv, "unfolding", res.ratios);
            print_rates("unfolding", res.ratios);
            for (const auto& f : res.failures) failures.push_back("unfolding: " + f);
            all_pass = all_pass && res.all_pass;
        } catch (const homogbl::error& e) {
            failures.push_back(std::string("unfolding: ") + e.what());
            exec_error = true;
        }
    }

    if (cfg.study_sweep || cfg.study_oscillating)
        homogbl::write_csv_atomic(out_path(cfg, "sweep.csv").string(), sweep_csv);
    if (cfg.study_sweep || cfg.study_oscillating || cfg.study_spectral ||
        cfg.study_unfolding)
        homogbl::write_csv_atomic(out_path(cfg, "rates.csv").string(), rates_csv);

    timings["total"] = total.ms();
    meta["timings_ms"] = timings;
    meta["failures"] = failures;
    all_pass = all_pass && failures.empty();
    meta["verdict"] = exec_error ? "error" : (all_pass ? "pass" : "fail");
    homogbl::write_text_atomic(out_path(cfg, "report.json").string(), meta.dump(2) + "\n");

    for (const auto& f : failures) std::cerr << "failure: " << f << "\n";
    std::printf("verdict: %s\n", meta["verdict"].get<std::string>().c_str());
    if (exec_error) return kExitError;
    return all_pass ? kExitPass : kExitThreshold;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic homogenization workbench (cell problems, corrector "
                 "rate studies, unfolding checks, eigenvalue correctors)"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* cmd_run = app.add_subcommand("run", "run the studies from a config file");
    cmd_run->add_option("config", config_path, "path to a key = value config file")
        ->required();

    CommonFlags cell_flags;
    CLI::App* cmd_cell =
        app.add_subcommand("cell", "solve the cell problems, print the tensor");
    cell_flags.attach(cmd_cell);

    CommonFlags sweep_flags;
    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "corrector error sweep with rate fits");
    sweep_flags.attach(cmd_sweep);

    CommonFlags spectral_flags;
    CLI::App* cmd_spectral =
        app.add_subcommand("spectral", "eigenvalue corrector study");
    spectral_flags.attach(cmd_spectral);

    CommonFlags unfold_flags;
    CLI::App* cmd_unfold =
        app.add_subcommand("check-unfolding", "unfolding operator identities");
    unfold_flags.attach(cmd_unfold);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            return run_pipeline(homogbl::parse_config_file(config_path));
        }
        if (cmd_cell->parsed()) {
            RunConfig cfg = cell_flags.finalize();
            cfg.study_cell = true;
            cfg.study_sweep = cfg.study_oscillating = cfg.study_spectral =
                cfg.study_unfolding = false;
            return run_pipeline(cfg);
        }
        if (cmd_sweep->parsed()) {
            RunConfig cfg = sweep_flags.finalize();
            cfg.study_cell = false;
            cfg.study_sweep = true;
            cfg.study_oscillating = cfg.study_spectral = cfg.study_unfolding = false;
            return run_pipeline(cfg);
        }
        if (cmd_spectral->parsed()) {
            RunConfig cfg = spectral_flags.finalize();
            cfg.study_cell = cfg.study_sweep = cfg.study_oscillating =
                cfg.study_unfolding = false;
            cfg.study_spectral = true;
            return run_pipeline(cfg);
        }
        if (cmd_unfold->parsed()) {
            RunConfig cfg = unfold_flags.finalize();
            cfg.study_cell = cfg.study_sweep = cfg.study_oscillating =
                cfg.study_spectral = false;
            cfg.study_unfolding = true;
            return run_pipeline(cfg);
        }
    } catch (const homogbl::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
