#ifndef CBLB_IO_HPP
#define CBLB_IO_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cblb/solver.hpp"

namespace cblb {

inline constexpr const char* code_version = "cblb 1.0.0";
inline constexpr std::uint16_t checkpoint_version = 1;

namespace detail {

// All binary payloads are little-endian f64/u32/u16; this library targets
// little-endian hosts and writes native byte order.
template <class T>
void put_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_raw(std::istream& is, const char* what) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw format_error(std::string("checkpoint truncated while reading ") + what);
    return v;
}

inline void put_field(std::ostream& os, const SpectralField& f) {
    for (const cplx& v : f.coeffs()) {
        put_raw(os, v.real());
        put_raw(os, v.imag());
    }
}

inline void get_field(std::istream& is, SpectralField& f, const char* name) {
    std::size_t n = f.coeffs().size();
    std::vector<double> buf(2 * n);
    is.read(reinterpret_cast<char*>(buf.data()),
            std::streamsize(buf.size() * sizeof(double)));
    std::size_t got = std::size_t(is.gcount());
    if (got != buf.size() * sizeof(double))
        throw format_error(std::string("checkpoint block '") + name +
                           "' truncated: expected " +
                           std::to_string(buf.size() * sizeof(double)) +
                           " bytes, got " + std::to_string(got));
    for (std::size_t i = 0; i < n; ++i) f.coeffs()[i] = cplx(buf[2 * i], buf[2 * i + 1]);
}

}  // namespace detail

/// Binary checkpoint: magic "CBLB", u16 version, grid dims (3 x u32), box
/// periods (3 x f64), clock t and s (f64), then six coefficient blocks
/// (u1, u2, u3, theta, u10_hat, u10_tilde) as interleaved re/im f64 in
/// row-major (k1, k2, k3) storage order.
inline void write_checkpoint(const State& st, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw format_error("cannot open checkpoint for writing: " + path);
    os.write("CBLB", 4);
    detail::put_raw(os, checkpoint_version);
    const Grid& g = st.grid();
    detail::put_raw(os, std::uint32_t(g.nx));
    detail::put_raw(os, std::uint32_t(g.ny));
    detail::put_raw(os, std::uint32_t(g.nz));
    detail::put_raw(os, g.lx);
    detail::put_raw(os, g.ly);
    detail::put_raw(os, g.lz);
    detail::put_raw(os, st.clock.t);
    detail::put_raw(os, st.clock.s);
    for (const SpectralField* f :
         {&st.u1, &st.u2, &st.u3, &st.theta, &st.u10_hat, &st.u10_tilde})
        detail::put_field(os, *f);
    if (!os) throw format_error("write failed for checkpoint: " + path);
}

inline State read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw format_error("cannot open checkpoint for reading: " + path);
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CBLB", 4) != 0)
        throw format_error("bad checkpoint magic in " + path);
    auto version = detail::get_raw<std::uint16_t>(is, "version");
    if (version != checkpoint_version)
        throw format_error("checkpoint version mismatch: file has " +
                           std::to_string(version) + ", reader expects " +
                           std::to_string(checkpoint_version));
    auto nx = detail::get_raw<std::uint32_t>(is, "nx");
    auto ny = detail::get_raw<std::uint32_t>(is, "ny");
    auto nz = detail::get_raw<std::uint32_t>(is, "nz");
    double lx = detail::get_raw<double>(is, "lx");
    double ly = detail::get_raw<double>(is, "ly");
    double lz = detail::get_raw<double>(is, "lz");
    Grid g(int(nx), int(ny), int(nz), lx, ly, lz);
    State st(g);
    st.clock.t = detail::get_raw<double>(is, "t");
    st.clock.s = detail::get_raw<double>(is, "s");
    const char* names[] = {"u1", "u2", "u3", "theta", "u10_hat", "u10_tilde"};
    SpectralField* fields[] = {&st.u1, &st.u2,       &st.u3,
                               &st.theta, &st.u10_hat, &st.u10_tilde};
    for (int i = 0; i < 6; ++i) detail::get_field(is, *fields[i], names[i]);
    return st;
}

/// Deterministic shortest-round-trip formatting for all f64 text output.
inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// CSV time series
// ---------------------------------------------------------------------------

inline constexpr const char* csv_schema = "cblb-csv-1";

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(const CsvTable& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw format_error("cannot open CSV for writing: " + path);
    os << "# schema: " << csv_schema << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw format_error("CSV row width " + std::to_string(row.size()) +
                               " does not match header width " +
                               std::to_string(t.columns.size()));
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    if (!os) throw format_error("write failed for CSV: " + path);
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw format_error("cannot open CSV for reading: " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("# schema: ", 0) != 0)
        throw format_error("missing CSV schema line in " + path);
    std::string schema = line.substr(10);
    if (schema != csv_schema)
        throw format_error("CSV schema mismatch: file has '" + schema +
                           "', reader expects '" + csv_schema + "'");
    CsvTable t;
    if (!std::getline(is, line)) throw format_error("missing CSV header in " + path);
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.columns.size())
            throw format_error("CSV row width " + std::to_string(row.size()) +
                               " does not match header width " +
                               std::to_string(t.columns.size()) + " in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

inline void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw format_error("cannot open JSON for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os) throw format_error("write failed for JSON: " + path);
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw format_error("cannot open JSON for reading: " + path);
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error("JSON parse error in " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit content hash, reported as 16 hex digits.
inline std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw format_error("cannot open file for hashing: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct ManifestEntry {
    std::string name;
    std::string hash;
};

/// Run provenance record: the verbatim config text, code version, grid, wall
/// times, and an inventory of emitted files with content hashes.  Wall times
/// live only here so that result JSON stays byte-deterministic.
struct Manifest {
    std::string version = code_version;
    std::string config_text;
    int nx = 0, ny = 0, nz = 0;
    double lx = 0, ly = 0, lz = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<ManifestEntry> files;

    void add_file(const std::string& dir, const std::string& name) {
        files.push_back({name, content_hash(read_file_bytes(dir + "/" + name))});
    }
};

inline nlohmann::json manifest_to_json(const Manifest& m) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : m.files) files.push_back({{"name", e.name}, {"hash", e.hash}});
    return {{"version", m.version},
            {"config", m.config_text},
            {"grid", {{"nx", m.nx}, {"ny", m.ny}, {"nz", m.nz},
                      {"lx", m.lx}, {"ly", m.ly}, {"lz", m.lz}}},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at},
            {"files", files}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    try {
        m.version = j.at("version").get<std::string>();
        m.config_text = j.at("config").get<std::string>();
        const auto& g = j.at("grid");
        m.nx = g.at("nx").get<int>();
        m.ny = g.at("ny").get<int>();
        m.nz = g.at("nz").get<int>();
        m.lx = g.at("lx").get<double>();
        m.ly = g.at("ly").get<double>();
        m.lz = g.at("lz").get<double>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        for (const auto& e : j.at("files"))
            m.files.push_back({e.at("name").get<std::string>(),
                               e.at("hash").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

/// Verify that every listed file is present with the recorded content hash.
inline void verify_manifest(const Manifest& m, const std::string& dir) {
    for (const auto& e : m.files) {
        std::string h = content_hash(read_file_bytes(dir + "/" + e.name));
        if (h != e.hash)
            throw format_error("hash mismatch for " + e.name + ": manifest has " +
                               e.hash + ", file has " + h);
    }
}

}  // namespace cblb

#endif
