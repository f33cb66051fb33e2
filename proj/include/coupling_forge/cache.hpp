#pragma once

// Gzip-compressed binary table cache, keyed by (spec hash, x). Entries are
// CBOR-encoded table documents; corrupt or unreadable files count as misses.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <zlib.h>

#include "coupling_forge/coupling.hpp"
#include "coupling_forge/serialize.hpp"

namespace coupling_forge {

inline std::string cache_file_path(const std::string& dir, const StructureSpec& spec,
                                   double x) {
    return dir + "/" + spec_hash(spec, x) + ".cfz";
}

inline void store_table_cache(const CouplingTable& table, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string path = cache_file_path(dir, table.spec, table.x);
    const std::vector<std::uint8_t> blob = nlohmann::json::to_cbor(table_to_json(table));
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open cache file for writing: " + path);
    const int written = gzwrite(f, blob.data(), static_cast<unsigned>(blob.size()));
    gzclose(f);
    if (written != static_cast<int>(blob.size()))
        throw std::runtime_error("cache write failed: " + path);
}

inline std::optional<CouplingTable> load_table_cache(const StructureSpec& spec, double x,
                                                     const std::string& dir) {
    const std::string path = cache_file_path(dir, spec, x);
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) return std::nullopt;
    std::vector<std::uint8_t> blob;
    std::uint8_t buf[1 << 16];
    for (;;) {
        const int got = gzread(f, buf, sizeof(buf));
        if (got < 0) {
            gzclose(f);
            return std::nullopt;
        }
        blob.insert(blob.end(), buf, buf + got);
        if (got < static_cast<int>(sizeof(buf))) break;
    }
    gzclose(f);
    try {
        CouplingTable table = table_from_json(nlohmann::json::from_cbor(blob));
        if (!(table.spec == spec) || table.x != x) return std::nullopt;
        return table;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace coupling_forge
