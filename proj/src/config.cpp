#include "homogbl/config.hpp"

#include "homogbl/coefficient.hpp"
#include "homogbl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string_view>

namespace homogbl {

namespace {

std::string trim(std::string_view s) {
    const char* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

struct ParseCursor {
    const std::string& origin;
    int line = 0;

    [[noreturn]] void die(const std::string& msg) const {
        fail("config-error", origin + ":" + std::to_string(line) + ": " + msg);
    }
};

double parse_double(const std::string& value, const ParseCursor& at,
                    const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        at.die("value '" + value + "' for '" + key + "' is not a number");
    return v;
}

int parse_int(const std::string& value, const ParseCursor& at, const std::string& key) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        at.die("value '" + value + "' for '" + key + "' is not an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& value, const ParseCursor& at, const std::string& key) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
    if (v == "off" || v == "false" || v == "no" || v == "0") return false;
    at.die("value '" + value + "' for '" + key + "' is not on/off");
}

std::vector<double> parse_eps_list(const std::string& value, const ParseCursor& at) {
    std::string normalized = value;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream in(normalized);
    std::vector<double> eps;
    std::string token;
    while (in >> token) {
        try {
            eps.push_back(parse_eps_token(token));
        } catch (const error& e) {
            at.die(e.what());
        }
    }
    if (eps.empty()) at.die("eps list is empty");
    return eps;
}

} // namespace

double parse_eps_token(const std::string& token) {
    const auto slash = token.find('/');
    double v = 0.0;
    if (slash != std::string::npos) {
        const std::string num = trim(token.substr(0, slash));
        const std::string den = trim(token.substr(slash + 1));
        char *e1 = nullptr, *e2 = nullptr;
        const double a = std::strtod(num.c_str(), &e1);
        const double b = std::strtod(den.c_str(), &e2);
        if (num.empty() || den.empty() || *e1 != '\0' || *e2 != '\0' || b == 0.0)
            fail("config-error", "malformed eps fraction '" + token + "'");
        v = a / b;
    } else {
        char* end = nullptr;
        v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0')
            fail("config-error", "malformed eps value '" + token + "'");
    }
    if (!(v > 0.0) || v > 1.0)
        fail("config-error", "eps value '" + token + "' is outside (0, 1]");
    const double inv = 1.0 / v;
    if (std::abs(inv - std::llround(inv)) > 1e-12 * inv)
        fail("config-error", "eps value '" + token + "' is not a reciprocal integer");
    return v;
}

void validate_config(const RunConfig& cfg) {
    // Throws config-error for unknown families or out-of-range parameters.
    (void)make_coefficient(cfg.family, cfg.p0, cfg.p1);

    if (cfg.points_per_cell < 8 || cfg.points_per_cell % 2 != 0)
        fail("config-error", "points-per-cell must be even and at least 8, got " +
                                 std::to_string(cfg.points_per_cell));
    if (cfg.cell_n < 2)
        fail("config-error",
             "cell resolution must be at least 2, got " + std::to_string(cfg.cell_n));
    if (cfg.cell_n % cfg.points_per_cell != 0)
        fail("config-error", "cell resolution " + std::to_string(cfg.cell_n) +
                                 " must be a multiple of points-per-cell " +
                                 std::to_string(cfg.points_per_cell) +
                                 " (exact nodal transfer)");
    if (cfg.eps_list.empty()) fail("config-error", "eps list is empty");
    for (double eps : cfg.eps_list) {
        if (!(eps > 0.0) || eps > 1.0)
            fail("config-error", "eps must lie in (0, 1]");
        const double inv = 1.0 / eps;
        if (std::abs(inv - std::llround(inv)) > 1e-12 * inv)
            fail("config-error", "eps values must be reciprocal integers");
    }
    if (!(cfg.solver.rel_tol > 0.0) || cfg.solver.rel_tol > 1e-4)
        fail("config-error", "solver rel_tol must lie in (0, 1e-4]");
    if (!(cfg.eigen_tol > 0.0) || cfg.eigen_tol > 1e-4)
        fail("config-error", "solver eigen_tol must lie in (0, 1e-4]");
    if (cfg.output_dir.empty()) fail("config-error", "output directory is empty");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    ParseCursor at{origin, 0};
    std::istringstream in(text);
    std::string raw;
    std::string section;
    bool studies_section_seen = false;

    while (std::getline(in, raw)) {
        ++at.line;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') at.die("unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "coefficient" && section != "grid" && section != "sweep" &&
                section != "solver" && section != "studies" && section != "output")
                at.die("unknown section [" + section + "]");
            if (section == "studies" && !studies_section_seen) {
                // Explicit selection: everything not listed is off.
                studies_section_seen = true;
                cfg.study_cell = cfg.study_sweep = cfg.study_oscillating =
                    cfg.study_spectral = cfg.study_unfolding = false;
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) at.die("expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) at.die("empty key");
        if (section.empty()) at.die("key '" + key + "' appears before any section");

        if (section == "coefficient") {
            if (key == "family") cfg.family = value;
            else if (key == "p0") cfg.p0 = parse_double(value, at, key);
            else if (key == "p1") cfg.p1 = parse_double(value, at, key);
            else at.die("unknown key '" + key + "' in [coefficient]");
        } else if (section == "grid") {
            if (key == "cell_n") cfg.cell_n = parse_int(value, at, key);
            else if (key == "points_per_cell")
                cfg.points_per_cell = parse_int(value, at, key);
            else at.die("unknown key '" + key + "' in [grid]");
        } else if (section == "sweep") {
            if (key == "eps") cfg.eps_list = parse_eps_list(value, at);
            else at.die("unknown key '" + key + "' in [sweep]");
        } else if (section == "solver") {
            if (key == "rel_tol") cfg.solver.rel_tol = parse_double(value, at, key);
            else if (key == "eigen_tol") cfg.eigen_tol = parse_double(value, at, key);
            else at.die("unknown key '" + key + "' in [solver]");
        } else if (section == "studies") {
            const bool on = parse_bool(value, at, key);
            if (key == "cell") cfg.study_cell = on;
            else if (key == "sweep") cfg.study_sweep = on;
            else if (key == "oscillating") cfg.study_oscillating = on;
            else if (key == "spectral") cfg.study_spectral = on;
            else if (key == "unfolding-checks") cfg.study_unfolding = on;
            else at.die("unknown study '" + key + "'");
        } else if (section == "output") {
            if (key == "directory") cfg.output_dir = value;
            else if (key == "cache") cfg.cache = parse_bool(value, at, key);
            else at.die("unknown key '" + key + "' in [output]");
        }
    }

    // Field names in the validation messages provide the context here;
    // parse-stage errors above carry origin:line.
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("config-error", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace homogbl
