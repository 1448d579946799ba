#include "simclust/store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "simclust/error.hpp"

namespace simclust {

namespace fs = std::filesystem;

namespace {

std::uint32_t read_u32_le(std::span<const std::byte> bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
        v = (v << 8) | std::to_integer<std::uint32_t>(bytes[offset + i]);
    }
    return v;
}

void append_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
    }
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > UINT32_MAX) {
        throw ValidationError(std::string(what) + " does not fit in a u32 header field");
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// FVEC1

FvecData parse_fvec(std::span<const std::byte> bytes) {
    if (bytes.size() < kFvecMagic.size()
        || std::memcmp(bytes.data(), kFvecMagic.data(), kFvecMagic.size()) != 0) {
        throw ParseError("bad magic: expected \"FVEC1\"", 0);
    }
    if (bytes.size() < kFvecHeaderSize) {
        throw ParseError("truncated header", bytes.size());
    }

    FvecData out;
    out.dim = read_u32_le(bytes, 5);
    out.count = read_u32_le(bytes, 9);
    if (out.dim == 0) {
        throw ParseError("dim must be positive", 5);
    }
    if (out.count == 0) {
        throw ParseError("count must be positive", 9);
    }

    const std::uint64_t n = static_cast<std::uint64_t>(out.dim) * out.count;
    const std::uint64_t expected = kFvecHeaderSize + 4 * n;
    if (bytes.size() < expected) {
        throw ParseError("truncated payload: expected " + std::to_string(expected) + " bytes, file has "
                             + std::to_string(bytes.size()),
                         bytes.size());
    }
    if (bytes.size() > expected) {
        throw ParseError("trailing bytes after payload", expected);
    }

    out.values.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t offset = kFvecHeaderSize + 4 * i;
        const float f = std::bit_cast<float>(read_u32_le(bytes, offset));
        if (!std::isfinite(f)) {
            throw ParseError("non-finite value in row " + std::to_string(i / out.dim), offset);
        }
        out.values[i] = f;
    }
    return out;
}

std::vector<std::byte> encode_fvec(std::size_t dim, std::span<const float> values) {
    if (dim == 0) {
        throw ValidationError("cannot encode vectors of dimension 0");
    }
    if (values.empty()) {
        throw ValidationError("cannot encode an empty vector list");
    }
    if (values.size() % dim != 0) {
        throw ValidationError("ragged rows: " + std::to_string(values.size()) + " values is not a multiple of dim "
                              + std::to_string(dim));
    }

    std::vector<std::byte> out;
    out.reserve(kFvecHeaderSize + 4 * values.size());
    for (char c : kFvecMagic) {
        out.push_back(static_cast<std::byte>(c));
    }
    append_u32_le(out, checked_u32(dim, "dim"));
    append_u32_le(out, checked_u32(values.size() / dim, "count"));
    for (float f : values) {
        append_u32_le(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

FvecData load_fvec(const fs::path& path) {
    const auto bytes = read_binary_file(path);
    try {
        return parse_fvec(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset());
    }
}

void save_fvec(const fs::path& path, std::size_t dim, std::span<const float> values) {
    write_binary_file(path, encode_fvec(dim, values));
}

void save_fvec(const fs::path& path, const std::vector<std::vector<float>>& rows) {
    if (rows.empty()) {
        throw ValidationError("cannot save an empty vector list");
    }
    const std::size_t dim = rows.front().size();
    std::vector<float> flat;
    flat.reserve(dim * rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != dim) {
            throw ValidationError("ragged rows: row " + std::to_string(i) + " has length "
                                  + std::to_string(rows[i].size()) + ", expected " + std::to_string(dim));
        }
        flat.insert(flat.end(), rows[i].begin(), rows[i].end());
    }
    save_fvec(path, dim, flat);
}

// ---------------------------------------------------------------------------
// Stores

ClassEmbeddings::ClassEmbeddings(std::string name, std::size_t dim, std::vector<float> values)
    : name_(std::move(name)), dim_(dim), values_(std::move(values)) {
    if (name_.empty()) {
        throw ValidationError("class name must be nonempty");
    }
    if (dim_ == 0) {
        throw ValidationError("class '" + name_ + "': dim must be positive");
    }
    if (values_.empty()) {
        throw ValidationError("class '" + name_ + "' has no vectors");
    }
    if (values_.size() % dim_ != 0) {
        throw ValidationError("class '" + name_ + "': ragged rows");
    }
    for (float f : values_) {
        if (!std::isfinite(f)) {
            throw ValidationError("class '" + name_ + "' contains a non-finite value");
        }
    }
}

DatasetStore::DatasetStore(std::size_t dim, std::vector<ClassEmbeddings> classes, std::string source_tag)
    : dim_(dim), classes_(std::move(classes)), source_tag_(std::move(source_tag)) {
    if (dim_ == 0) {
        throw ValidationError("store dim must be positive");
    }
    if (classes_.empty()) {
        throw ValidationError("store must contain at least one class");
    }
    std::set<std::string_view> seen;
    for (const auto& c : classes_) {
        if (c.dim() != dim_) {
            throw ValidationError("class '" + c.name() + "' has dim " + std::to_string(c.dim())
                                  + ", store dim is " + std::to_string(dim_));
        }
        if (!seen.insert(c.name()).second) {
            throw ValidationError("duplicate class name '" + c.name() + "'");
        }
    }
}

std::vector<std::string> DatasetStore::class_names() const {
    std::vector<std::string> names;
    names.reserve(classes_.size());
    for (const auto& c : classes_) {
        names.push_back(c.name());
    }
    return names;
}

std::optional<std::size_t> DatasetStore::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].name() == name) {
            return i;
        }
    }
    return std::nullopt;
}

DatasetStore load_store(const fs::path& manifest_path) {
    const Json doc = read_json_file(manifest_path);
    const fs::path base = manifest_path.parent_path();

    std::size_t dim = 0;
    std::string source_tag;
    std::vector<ClassEmbeddings> classes;
    try {
        dim = doc.at("dim").get<std::size_t>();
        source_tag = doc.value("source_tag", std::string{});
        for (const auto& entry : doc.at("classes")) {
            auto name = entry.at("name").get<std::string>();
            const auto file = entry.at("file").get<std::string>();
            const auto count = entry.at("count").get<std::size_t>();

            auto data = load_fvec(base / file);
            if (data.dim != dim) {
                throw ValidationError("class '" + name + "': file dim " + std::to_string(data.dim)
                                      + " does not match manifest dim " + std::to_string(dim));
            }
            if (data.count != count) {
                throw ValidationError("class '" + name + "': manifest declares count " + std::to_string(count)
                                      + " but file holds " + std::to_string(data.count));
            }
            classes.emplace_back(std::move(name), dim, std::move(data.values));
        }
    } catch (const Json::exception& e) {
        throw ValidationError(manifest_path.string() + ": malformed manifest: " + e.what());
    }
    return DatasetStore(dim, std::move(classes), std::move(source_tag));
}

void save_store(const DatasetStore& store, const fs::path& manifest_path) {
    const fs::path base = manifest_path.parent_path();
    if (!base.empty()) {
        fs::create_directories(base);
    }

    Json doc;
    doc["dim"] = store.dim();
    Json classes = Json::array();
    for (std::size_t i = 0; i < store.size(); ++i) {
        char file[32];
        std::snprintf(file, sizeof(file), "class_%04zu.fvec", i);
        const auto& c = store[i];
        save_fvec(base / file, c.dim(), c.values());
        classes.push_back({{"name", c.name()}, {"file", file}, {"count", c.size()}});
    }
    doc["classes"] = std::move(classes);
    doc["source_tag"] = store.source_tag();
    write_text_file(manifest_path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Splits

std::optional<int> ClusterSplit::cluster_of(std::string_view name) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] == name) {
            return assignments[i];
        }
    }
    return std::nullopt;
}

std::vector<std::string> ClusterSplit::members(int cluster) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (assignments[i] == cluster) {
            out.push_back(classes[i]);
        }
    }
    return out;
}

std::vector<std::size_t> ClusterSplit::cluster_sizes() const {
    std::vector<std::size_t> sizes(std::max(k, 0), 0);
    for (int a : assignments) {
        if (a >= 0 && a < k) {
            ++sizes[a];
        }
    }
    return sizes;
}

void validate_split(const ClusterSplit& split) {
    if (split.k < 1) {
        throw ValidationError("split k must be at least 1, got " + std::to_string(split.k));
    }
    if (split.classes.size() != split.assignments.size()) {
        throw ValidationError("split classes and assignments differ in length");
    }
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < split.classes.size(); ++i) {
        if (!seen.insert(split.classes[i]).second) {
            throw ValidationError("class '" + split.classes[i] + "' assigned more than once");
        }
        const int id = split.assignments[i];
        if (id < 0 || id >= split.k) {
            throw ValidationError("class '" + split.classes[i] + "' has cluster id " + std::to_string(id)
                                  + " outside [0, " + std::to_string(split.k) + ")");
        }
    }
    const auto sizes = split.cluster_sizes();
    for (int c = 0; c < split.k; ++c) {
        if (sizes[c] == 0) {
            throw ValidationError("cluster " + std::to_string(c) + " is empty");
        }
    }
}

void validate_split(const ClusterSplit& split, std::span<const std::string> names) {
    validate_split(split);
    for (const auto& name : names) {
        if (!split.cluster_of(name)) {
            throw ValidationError("class '" + name + "' is missing from the split");
        }
    }
    if (names.size() != split.classes.size()) {
        for (const auto& name : split.classes) {
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                throw ValidationError("split names unknown class '" + name + "'");
            }
        }
    }
}

Json split_to_json(const ClusterSplit& split) {
    Json doc;
    doc["k"] = split.k;
    doc["linkage"] = split.linkage;
    Json assignments = Json::object();
    for (std::size_t i = 0; i < split.classes.size(); ++i) {
        assignments[split.classes[i]] = split.assignments[i];
    }
    doc["assignments"] = std::move(assignments);
    if (split.merge_heights) {
        doc["merge_heights"] = *split.merge_heights;
    } else {
        doc["merge_heights"] = nullptr;
    }
    return doc;
}

ClusterSplit split_from_json(const Json& doc) {
    ClusterSplit split;
    try {
        split.k = doc.at("k").get<int>();
        split.linkage = doc.value("linkage", std::string("ward"));
        for (const auto& [name, id] : doc.at("assignments").items()) {
            split.classes.push_back(name);
            split.assignments.push_back(id.get<int>());
        }
        if (doc.contains("merge_heights") && !doc["merge_heights"].is_null()) {
            split.merge_heights = doc["merge_heights"].get<std::vector<double>>();
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed split: ") + e.what());
    }
    validate_split(split);
    return split;
}

void save_split(const ClusterSplit& split, const fs::path& path) {
    validate_split(split);
    write_text_file(path, split_to_json(split).dump(2) + "\n");
}

ClusterSplit load_split(const fs::path& path) {
    return split_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// File helpers

std::vector<std::byte> read_binary_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    std::vector<std::byte> out(raw.size());
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_binary_file(const fs::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

void write_text_file(const fs::path& path, std::string_view text) {
    write_binary_file(path, std::as_bytes(std::span(text.data(), text.size())));
}

Json read_json_file(const fs::path& path) {
    const auto text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": invalid JSON: " + e.what(), e.byte);
    }
}

}  // namespace simclust
