#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simclust/store.hpp"

/**
 * @file similarity.hpp
 * @brief Class centroids and the pairwise class similarity matrix.
 *
 * The matrix stores cosine *distances*: 0 for identical directions, 1 for
 * orthogonal, 2 for opposite. Small means similar.
 */

namespace simclust {

using FeatureVector = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);
double squared_norm(std::span<const double> v);

/// 1 - cos(u, v), clamped to [0, 2]. Throws DomainError for a zero-norm
/// argument and ValidationError for a length mismatch.
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// cos(u, v), clamped to [-1, 1]. Same preconditions as cosine_distance.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Widens a stored float32 row to the 64-bit working precision.
FeatureVector to_feature_vector(std::span<const float> v);

/// Element-wise mean of the class's rows, accumulated in row order.
FeatureVector compute_centroid(const ClassEmbeddings& cls);

/// Sum over rows of the squared Euclidean distance to the class centroid.
double compute_inertia(const ClassEmbeddings& cls);

/// Ordered class name -> centroid map.
class CentroidSet {
public:
    CentroidSet() = default;
    CentroidSet(std::size_t dim, std::vector<std::string> names, std::vector<FeatureVector> centroids);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& name(std::size_t i) const { return names_[i]; }
    std::span<const double> centroid(std::size_t i) const { return centroids_[i]; }
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// Centroids of `names`, in the order given. Throws ValidationError for
    /// an unknown name.
    CentroidSet subset(std::span<const std::string> names) const;

    void push_back(std::string name, FeatureVector centroid);

    bool operator==(const CentroidSet&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> names_;
    std::vector<FeatureVector> centroids_;
};

CentroidSet compute_centroids(const DatasetStore& store, unsigned threads = 1);

/// Labeled square matrix of pairwise cosine distances, row-major.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::vector<std::string> labels, std::vector<double> values);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * size(), size()}; }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const SimilarityMatrix&) const = default;

private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

/// Throws ValidationError unless the matrix is symmetric and zero-diagonal
/// within `tol` and every entry lies in [0, 2].
void check_similarity_matrix(const SimilarityMatrix& m, double tol = 1e-9);

/// Pairwise cosine distances between centroids. Only the upper triangle is
/// computed; the lower triangle is a copy and the diagonal is exactly 0.
/// Rows may be split across `threads`; the result is bit-identical to the
/// serial computation. Throws DomainError naming a zero-norm centroid.
SimilarityMatrix similarity_matrix(const CentroidSet& centroids, unsigned threads = 1);

struct SimilarityResult {
    CentroidSet centroids;
    SimilarityMatrix matrix;
};

SimilarityResult build_similarity_matrix(const DatasetStore& store, unsigned threads = 1);

/// CSV: header row is an empty cell followed by the labels; each data row is
/// a label followed by shortest round-trip decimal values.
std::string similarity_matrix_to_csv(const SimilarityMatrix& m);
SimilarityMatrix similarity_matrix_from_csv(std::string_view text);

void save_similarity_matrix(const SimilarityMatrix& m, const std::filesystem::path& path);
SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace simclust
