#include "homogbl/cache.hpp"

#include "homogbl/assembly.hpp"
#include "homogbl/errors.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <system_error>
#include <vector>

namespace homogbl {

namespace {

constexpr char kMagic[8] = {'H', 'B', 'L', 'C', 'E', 'L', 'L', '1'};

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

std::string cache_path(const std::string& dir, std::uint64_t key) {
    char name[32];
    std::snprintf(name, sizeof(name), "cell-%016llx.bin",
                  static_cast<unsigned long long>(key));
    return (std::filesystem::path(dir) / name).string();
}

struct Writer {
    std::string bytes;
    std::uint64_t sum = kFnvOffset;

    void put(const void* data, std::size_t size) {
        bytes.append(static_cast<const char*>(data), size);
        sum = fnv1a(data, size, sum);
    }
    void put_u64(std::uint64_t v) { put(&v, sizeof v); }
    void put_i32(std::int32_t v) { put(&v, sizeof v); }
    void put_doubles(const std::vector<double>& v) {
        put(v.data(), v.size() * sizeof(double));
    }
};

struct Reader {
    const std::string& bytes;
    std::size_t pos = 0;
    bool ok = true;

    bool take(void* out, std::size_t size) {
        if (!ok || pos + size > bytes.size()) {
            ok = false;
            return false;
        }
        std::memcpy(out, bytes.data() + pos, size);
        pos += size;
        return true;
    }
    std::uint64_t take_u64() {
        std::uint64_t v = 0;
        take(&v, sizeof v);
        return v;
    }
    std::int32_t take_i32() {
        std::int32_t v = 0;
        take(&v, sizeof v);
        return v;
    }
    bool take_doubles(std::vector<double>& v, std::size_t count) {
        v.assign(count, 0.0);
        return take(v.data(), count * sizeof(double));
    }
};

} // namespace

std::uint64_t cell_cache_key(const Coefficient& coeff, int n, double rel_tol) {
    std::uint64_t h = kFnvOffset;
    const std::string name = coeff.name();
    h = fnv1a(name.data(), name.size(), h);
    h = fnv1a(&n, sizeof n, h);
    h = fnv1a(&rel_tol, sizeof rel_tol, h);
    return h;
}

void save_cell_cache(const std::string& dir, const CellSolutions& cells,
                     double rel_tol) {
    const std::uint64_t key = cell_cache_key(*cells.coeff, cells.grid.n, rel_tol);

    Writer w;
    w.bytes.append(kMagic, sizeof kMagic);
    Writer payload;
    payload.put_u64(key);
    payload.put_i32(cells.grid.n);
    payload.put_i32(cells.has_chi2 ? 1 : 0);
    for (int j = 0; j < 2; ++j) payload.put_doubles(cells.chi_class[j]);
    for (int j = 0; j < 2; ++j) payload.put_doubles(cells.chi_nodal[j]);
    const double tensor[3] = {cells.a_hom.a11, cells.a_hom.a12, cells.a_hom.a22};
    payload.put(tensor, sizeof tensor);
    if (cells.has_chi2) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) payload.put_doubles(cells.chi2_class[i][j]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) payload.put_doubles(cells.chi2_nodal[i][j]);
    }
    w.bytes += payload.bytes;
    const std::uint64_t sum = payload.sum;
    w.bytes.append(reinterpret_cast<const char*>(&sum), sizeof sum);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail("config-error", "cannot create cache directory '" + dir + "'");
    const std::string path = cache_path(dir, key);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail("config-error", "cannot write cache file '" + tmp + "'");
        out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
        if (!out) fail("config-error", "short write to cache file '" + tmp + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec) fail("config-error", "cannot finalize cache file '" + path + "'");
}

std::optional<CellSolutions> load_cell_cache(const std::string& dir,
                                             const CoefficientPtr& coeff, int n,
                                             double rel_tol, std::string* warning) {
    const std::uint64_t key = cell_cache_key(*coeff, n, rel_tol);
    const std::string path = cache_path(dir, key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt; // plain miss

    auto corrupt = [&](const std::string& reason) -> std::optional<CellSolutions> {
        if (warning)
            *warning = "cache file '" + path + "' " + reason + "; recomputing";
        return std::nullopt;
    };

    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (bytes.size() < sizeof kMagic + sizeof(std::uint64_t))
        return corrupt("is truncated");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        return corrupt("has a wrong header");

    const std::size_t payload_end = bytes.size() - sizeof(std::uint64_t);
    std::uint64_t stored_sum = 0;
    std::memcpy(&stored_sum, bytes.data() + payload_end, sizeof stored_sum);
    const std::uint64_t sum =
        fnv1a(bytes.data() + sizeof kMagic, payload_end - sizeof kMagic, kFnvOffset);
    if (sum != stored_sum) return corrupt("fails its checksum");

    const std::string payload = bytes.substr(sizeof kMagic, payload_end - sizeof kMagic);
    Reader r{payload};
    const std::uint64_t stored_key = r.take_u64();
    const std::int32_t stored_n = r.take_i32();
    const std::int32_t stored_chi2 = r.take_i32();
    if (!r.ok || stored_key != key || stored_n != n)
        return corrupt("does not match its key");

    CellSolutions cells;
    cells.grid = build_cell_grid(n, coeff->discontinuous());
    cells.coeff = coeff;
    const auto classes = static_cast<std::size_t>(cells.grid.class_count());
    const auto nodes = static_cast<std::size_t>(cells.grid.node_count());
    for (int j = 0; j < 2; ++j)
        if (!r.take_doubles(cells.chi_class[j], classes)) return corrupt("is truncated");
    for (int j = 0; j < 2; ++j)
        if (!r.take_doubles(cells.chi_nodal[j], nodes)) return corrupt("is truncated");
    double tensor[3] = {0, 0, 0};
    if (!r.take(tensor, sizeof tensor)) return corrupt("is truncated");
    cells.a_hom = SymMat2{tensor[0], tensor[1], tensor[2]};
    cells.has_chi2 = stored_chi2 != 0;
    if (cells.has_chi2) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (!r.take_doubles(cells.chi2_class[i][j], classes))
                    return corrupt("is truncated");
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (!r.take_doubles(cells.chi2_nodal[i][j], nodes))
                    return corrupt("is truncated");
    }
    if (r.pos != payload.size()) return corrupt("carries trailing bytes");

    // Deterministic function of (coefficient, grid): cheaper to reassemble
    // than to store, and it keeps the snapshot format solution-only.
    cells.k_per = assemble_stiffness_periodic(cells.grid, *coeff);
    return cells;
}

} // namespace homogbl
