#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

/**
 * @file store.hpp
 * @brief Embedding storage: the FVEC1 binary format, dataset manifests and
 * cluster split files.
 *
 * FVEC1 layout (little-endian, no padding, no trailer):
 *
 *     "FVEC1" | u32 dim | u32 count | count * dim float32, row-major
 */

namespace simclust {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kFvecMagic = "FVEC1";
inline constexpr std::size_t kFvecHeaderSize = 5 + 4 + 4;

/// A block of `count` row vectors of length `dim`, as stored in an FVEC1 file.
struct FvecData {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<float> values;

    std::span<const float> row(std::size_t i) const { return {values.data() + i * dim, dim}; }

    bool operator==(const FvecData&) const = default;
};

/// Decodes an in-memory FVEC1 image. Every failure is a ParseError carrying
/// the byte offset of the offending field.
FvecData parse_fvec(std::span<const std::byte> bytes);

/// Encodes `values` (row-major, `values.size()` a multiple of `dim`).
/// Identical input always yields identical bytes.
std::vector<std::byte> encode_fvec(std::size_t dim, std::span<const float> values);

FvecData load_fvec(const std::filesystem::path& path);
void save_fvec(const std::filesystem::path& path, std::size_t dim, std::span<const float> values);

/// Row-list convenience overload; throws ValidationError on ragged rows.
void save_fvec(const std::filesystem::path& path, const std::vector<std::vector<float>>& rows);

/// All feature vectors of one class.
class ClassEmbeddings {
public:
    ClassEmbeddings(std::string name, std::size_t dim, std::vector<float> values);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return values_.size() / dim_; }
    std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    std::span<const float> values() const noexcept { return values_; }

    bool operator==(const ClassEmbeddings&) const = default;

private:
    std::string name_;
    std::size_t dim_;
    std::vector<float> values_;
};

/// Ordered collection of classes sharing one embedding dimension. Class order
/// is canonical: it fixes matrix rows/columns everywhere downstream.
class DatasetStore {
public:
    DatasetStore(std::size_t dim, std::vector<ClassEmbeddings> classes, std::string source_tag = {});

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return classes_.size(); }
    const std::vector<ClassEmbeddings>& classes() const noexcept { return classes_; }
    const ClassEmbeddings& operator[](std::size_t i) const { return classes_[i]; }
    const std::string& source_tag() const noexcept { return source_tag_; }

    std::vector<std::string> class_names() const;
    std::optional<std::size_t> index_of(std::string_view name) const;

    bool operator==(const DatasetStore&) const = default;

private:
    std::size_t dim_;
    std::vector<ClassEmbeddings> classes_;
    std::string source_tag_;
};

/// Reads a manifest and every FVEC file it references (paths relative to the
/// manifest's directory) and checks all store invariants.
DatasetStore load_store(const std::filesystem::path& manifest_path);

/// Writes the manifest plus one `class_NNNN.fvec` per class next to it.
void save_store(const DatasetStore& store, const std::filesystem::path& manifest_path);

/// Partition of class names into `k` clusters.
struct ClusterSplit {
    int k = 0;
    /// Class names in canonical order, parallel to `assignments`.
    std::vector<std::string> classes;
    std::vector<int> assignments;
    std::string linkage = "ward";
    std::optional<std::vector<double>> merge_heights;

    std::optional<int> cluster_of(std::string_view name) const;
    std::vector<std::string> members(int cluster) const;
    std::vector<std::size_t> cluster_sizes() const;

    bool operator==(const ClusterSplit&) const = default;
};

/// Checks that every id lies in [0, k) and every cluster is nonempty.
/// Duplicate class names are rejected too.
void validate_split(const ClusterSplit& split);

/// validate_split plus: the split covers exactly `names`.
void validate_split(const ClusterSplit& split, std::span<const std::string> names);

Json split_to_json(const ClusterSplit& split);
ClusterSplit split_from_json(const Json& doc);

void save_split(const ClusterSplit& split, const std::filesystem::path& path);
ClusterSplit load_split(const std::filesystem::path& path);

// Small file helpers shared by the other modules.
std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_binary_file(const std::filesystem::path& path, std::span<const std::byte> bytes);
Json read_json_file(const std::filesystem::path& path);

}  // namespace simclust
