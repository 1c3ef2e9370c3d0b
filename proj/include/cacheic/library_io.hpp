#pragma once

#include <filesystem>
#include <fstream>
#include <optional>

#include "cacheic/library.hpp"

#include <json.hpp>

// Directory import/export for a ContentLibrary: one raw binary per file plus
// a JSON manifest recording N, F, seed and part labels.
namespace cacheic::library {

struct LibraryManifest {
    int n_files = 0;
    int file_bits = 0;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> part_labels;
    std::vector<std::string> file_names;
};

inline std::vector<std::uint8_t> pack_bits(const BitString& bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t t = 0; t < bits.size(); ++t)
        if (bits[t]) bytes[t / 8] |= std::uint8_t(0x80u >> (t % 8));
    return bytes;
}

inline BitString unpack_bits(const std::vector<std::uint8_t>& bytes, int bit_count) {
    BitString bits(std::size_t(bit_count), 0);
    for (int t = 0; t < bit_count; ++t)
        bits[std::size_t(t)] =
            (bytes[std::size_t(t) / 8] >> (7 - std::size_t(t) % 8)) & 1u;
    return bits;
}

inline void export_library(const ContentLibrary& lib, const std::filesystem::path& dir,
                           std::optional<std::uint64_t> seed = std::nullopt,
                           const std::vector<std::string>& part_labels = {
                               "12", "13", "23"}) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["format"] = "cacheic-library";
    manifest["n_files"] = lib.n_files;
    manifest["file_bits"] = lib.file_bits;
    if (seed)
        manifest["seed"] = *seed;
    else
        manifest["seed"] = nullptr;
    manifest["part_labels"] = part_labels;
    std::vector<std::string> names;
    for (int n = 1; n <= lib.n_files; ++n) {
        std::string name = "file_" + std::to_string(n) + ".bin";
        names.push_back(name);
        auto bytes = pack_bits(lib.payloads[std::size_t(n - 1)]);
        std::ofstream out(dir / name, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  std::streamsize(bytes.size()));
        if (!out) throw internal_error("export_library: cannot write " + name);
    }
    manifest["files"] = names;
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    if (!mf) throw internal_error("export_library: cannot write manifest.json");
}

inline std::pair<ContentLibrary, LibraryManifest>
import_library(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw domain_error("import_library: missing manifest.json in " + dir.string());
    nlohmann::json manifest = nlohmann::json::parse(mf);
    LibraryManifest info;
    info.n_files = manifest.at("n_files").get<int>();
    info.file_bits = manifest.at("file_bits").get<int>();
    if (!manifest.at("seed").is_null())
        info.seed = manifest.at("seed").get<std::uint64_t>();
    for (const auto& l : manifest.at("part_labels")) info.part_labels.push_back(l);
    for (const auto& f : manifest.at("files")) info.file_names.push_back(f);
    if (int(info.file_names.size()) != info.n_files)
        throw domain_error("import_library: manifest file list does not match N");

    std::vector<BitString> payloads;
    for (const std::string& name : info.file_names) {
        std::ifstream in(dir / name, std::ios::binary);
        if (!in) throw domain_error("import_library: missing payload " + name);
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        if (int(bytes.size()) * 8 < info.file_bits)
            throw domain_error("import_library: payload " + name + " is too short");
        payloads.push_back(unpack_bits(bytes, info.file_bits));
    }
    return {ContentLibrary(info.n_files, info.file_bits, std::move(payloads)), info};
}

} // namespace cacheic::library
