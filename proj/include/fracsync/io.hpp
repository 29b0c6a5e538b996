#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracsync/path.hpp"
#include "fracsync/rde.hpp"
#include "fracsync/transform.hpp"
#include "fracsync/types.hpp"
#include "fracsync/young.hpp"

namespace fracsync {

inline nlohmann::json to_json(const YoungResult& r) {
    return nlohmann::json{
        {"value", r.value}, {"refinement_gap", r.refinement_gap}, {"margin", r.alpha_beta_margin}};
}

inline nlohmann::json to_json(const EquivalenceReport& r) {
    return nlohmann::json{{"sup_distance", r.sup_distances.empty() ? 0.0 : r.sup_distances[0]},
                          {"refinement_order", r.refinement_order},
                          {"pass", r.pass}};
}

namespace detail {

inline std::string format_double(double v) {
    if (!std::isfinite(v)) throw Error("non-finite value in artifact output");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// CSV with header `t,value` (scalar) or `t,v0,v1,...` (vector paths).
inline std::string path_to_csv(const SamplePath& path) {
    std::ostringstream out;
    if (path.dim() == 1) {
        out << "t,value\n";
    } else {
        out << "t";
        for (std::size_t c = 0; c < path.dim(); ++c) out << ",v" << c;
        out << "\n";
    }
    for (std::size_t i = 0; i < path.points(); ++i) {
        out << detail::format_double(path.grid().time(i));
        for (std::size_t c = 0; c < path.dim(); ++c)
            out << "," << detail::format_double(path.at(i, c));
        out << "\n";
    }
    return out.str();
}

inline SamplePath path_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV");
    std::size_t dim = 0;
    for (char ch : line)
        if (ch == ',') ++dim;
    if (dim == 0) throw Error("CSV header must have a time column and value columns");

    std::vector<double> times;
    std::vector<double> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            const double v = std::stod(cell);
            if (col == 0)
                times.push_back(v);
            else
                data.push_back(v);
            ++col;
        }
        if (col != dim + 1) throw Error("ragged CSV row");
    }
    if (times.size() < 2) throw Error("CSV needs at least two rows");
    TimeGrid grid(times.front(), times.back(), times.size() - 1);
    SamplePath path(grid, dim);
    path.data() = std::move(data);
    return path;
}

/// Binary cache: magic "FSYNC1\n", then little-endian u64 {dim, steps} and
/// f64 {t0, t1} followed by row-major f64 values.
inline std::string path_to_binary(const SamplePath& path) {
    static_assert(std::endian::native == std::endian::little,
                  "binary cache assumes a little-endian host");
    std::string out("FSYNC1\n");
    auto put = [&out](const void* p, std::size_t n) {
        out.append(static_cast<const char*>(p), n);
    };
    const std::uint64_t dim = path.dim();
    const std::uint64_t steps = path.grid().steps();
    const double t0 = path.grid().t0();
    const double t1 = path.grid().t1();
    put(&dim, 8);
    put(&steps, 8);
    put(&t0, 8);
    put(&t1, 8);
    put(path.data().data(), path.data().size() * 8);
    return out;
}

inline SamplePath path_from_binary(std::string_view bytes) {
    static_assert(std::endian::native == std::endian::little,
                  "binary cache assumes a little-endian host");
    if (bytes.size() < 7 + 32 || bytes.substr(0, 7) != "FSYNC1\n")
        throw Error("not a path cache (bad magic)");
    const char* p = bytes.data() + 7;
    std::uint64_t dim = 0, steps = 0;
    double t0 = 0.0, t1 = 0.0;
    std::memcpy(&dim, p, 8);
    std::memcpy(&steps, p + 8, 8);
    std::memcpy(&t0, p + 16, 8);
    std::memcpy(&t1, p + 24, 8);
    const std::size_t count = (steps + 1) * dim;
    if (bytes.size() != 7 + 32 + count * 8) throw Error("truncated path cache");
    SamplePath path(TimeGrid(t0, t1, steps), dim);
    std::memcpy(path.data().data(), p + 32, count * 8);
    return path;
}

/// Coupled trajectory as CSV `t,u0,..,v0,..` (or any channel prefixes).
inline std::string coupled_to_csv(const CoupledTrajectory& traj, const char* u_prefix = "u",
                                  const char* v_prefix = "v") {
    std::ostringstream out;
    out << "t";
    for (std::size_t c = 0; c < traj.dim; ++c) out << "," << u_prefix << c;
    for (std::size_t c = 0; c < traj.dim; ++c) out << "," << v_prefix << c;
    out << "\n";
    for (std::size_t i = 0; i < traj.grid.points(); ++i) {
        out << detail::format_double(traj.grid.time(i));
        for (std::size_t c = 0; c < traj.dim; ++c)
            out << "," << detail::format_double(traj.u_data[i * traj.dim + c]);
        for (std::size_t c = 0; c < traj.dim; ++c)
            out << "," << detail::format_double(traj.v_data[i * traj.dim + c]);
        out << "\n";
    }
    return out.str();
}

/// CSV from named columns of equal length.
inline std::string columns_to_csv(const std::vector<std::string>& names,
                                  const std::vector<Vec>& columns) {
    if (names.size() != columns.size() || names.empty()) throw Error("mismatched CSV columns");
    std::ostringstream out;
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << "\n";
    const std::size_t rows = columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows) throw Error("mismatched CSV column lengths");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << detail::format_double(columns[c][r]);
        out << "\n";
    }
    return out.str();
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Collects artifact files under one directory and writes a manifest with a
/// content hash per file. Writing is serialized through this collector so
/// manifests are deterministic.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw Error("cannot write artifact '" + name + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        char hash[32];
        std::snprintf(hash, sizeof(hash), "fnv1a64:%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        entries_[name] = {content.size(), hash};
    }

    /// Writes manifest.json listing every artifact with its hash.
    void finalize() {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& [name, entry] : entries_) {
            files.push_back({{"name", name},
                             {"bytes", entry.first},
                             {"hash", entry.second}});
        }
        nlohmann::json manifest{{"format", "fracsync-manifest-1"}, {"files", files}};
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::pair<std::size_t, std::string>> entries_;
};

}  // namespace fracsync
