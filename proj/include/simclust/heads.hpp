#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "simclust/similarity.hpp"
#include "simclust/store.hpp"

/**
 * @file heads.hpp
 * @brief Classifier heads evaluated directly on precomputed feature vectors.
 *
 * Two kinds are provided: a nearest-centroid head (cosine distance to class
 * centroids) and a linear softmax head trained by full-batch gradient descent
 * on multinomial cross-entropy with a step learning-rate schedule.
 */

namespace simclust {

enum class HeadKind { nearest_centroid, linear };

std::string to_string(HeadKind kind);
HeadKind parse_head_kind(std::string_view text);

/// Common interface of the per-cluster classifiers.
class Head {
public:
    virtual ~Head() = default;

    virtual HeadKind kind() const noexcept = 0;
    virtual const std::vector<std::string>& classes() const noexcept = 0;
    virtual std::size_t dim() const noexcept = 0;

    /// Index into classes() of the predicted class.
    virtual std::size_t predict_index(std::span<const double> query) const = 0;

    virtual Json to_json() const = 0;

    const std::string& predict(std::span<const double> query) const { return classes()[predict_index(query)]; }
};

class NearestCentroidHead final : public Head {
public:
    /// Throws ValidationError for an empty set and DomainError for a
    /// zero-norm centroid.
    explicit NearestCentroidHead(CentroidSet centroids);

    HeadKind kind() const noexcept override { return HeadKind::nearest_centroid; }
    const std::vector<std::string>& classes() const noexcept override { return centroids_.names(); }
    std::size_t dim() const noexcept override { return centroids_.dim(); }
    std::size_t predict_index(std::span<const double> query) const override;
    Json to_json() const override;

    const CentroidSet& centroids() const noexcept { return centroids_; }

private:
    CentroidSet centroids_;
};

/// Class whose centroid is nearest to `query` in cosine distance; ties go to
/// the first class.
const std::string& nc_predict(const NearestCentroidHead& head, std::span<const double> query);

struct TrainConfig {
    int epochs = 100;
    double lr0 = 0.1;
    int step_size = 30;
    double gamma = 0.1;
    double l2 = 0.0;
    /// Unused by full-batch descent; kept so configurations round-trip.
    std::uint64_t seed = 0;

    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

/// lr0 * gamma^floor(epoch / step_size), epochs counted from 0.
double learning_rate(const TrainConfig& cfg, int epoch);

Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& doc, TrainConfig defaults = {});

/// Multinomial logistic regression: logits = W q + b.
class LinearHead final : public Head {
public:
    LinearHead(std::vector<std::string> classes, std::size_t dim, std::vector<double> weights, std::vector<double> bias,
               int trained_epochs = 0, TrainConfig config = {});

    /// All-zero parameters.
    static LinearHead zeros(std::vector<std::string> classes, std::size_t dim);

    HeadKind kind() const noexcept override { return HeadKind::linear; }
    const std::vector<std::string>& classes() const noexcept override { return classes_; }
    std::size_t dim() const noexcept override { return dim_; }
    std::size_t predict_index(std::span<const double> query) const override;
    Json to_json() const override;

    std::vector<double> logits(std::span<const double> query) const;

    /// Row-major C x d.
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> bias() const noexcept { return bias_; }
    int trained_epochs() const noexcept { return trained_epochs_; }
    const TrainConfig& config() const noexcept { return config_; }

private:
    std::vector<std::string> classes_;
    std::size_t dim_;
    std::vector<double> weights_;
    std::vector<double> bias_;
    int trained_epochs_;
    TrainConfig config_;
};

/// Numerically stable softmax (max-shifted).
std::vector<double> softmax(std::span<const double> logits);

struct LinearPrediction {
    std::size_t index;
    std::string class_name;
    std::vector<double> probabilities;
};

LinearPrediction linear_predict(const LinearHead& head, std::span<const double> query);

/// Flattened training data: row i of `features` has label `labels[i]`.
struct LabeledBatch {
    std::size_t dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> features;
    std::vector<std::size_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
};

/// Class i of `data` becomes label i.
LabeledBatch make_batch(std::span<const ClassEmbeddings> data);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad_weights;
    std::vector<double> grad_bias;
};

/// Mean cross-entropy over the batch plus (l2 / 2) * ||W||², with its
/// gradient. The bias is not regularized.
LossGradient cross_entropy_loss(const LabeledBatch& batch, std::span<const double> weights, std::span<const double> bias,
                                double l2);

/// Full-batch gradient descent from zero-initialized parameters. When
/// `loss_trace` is given it receives epochs + 1 values: the loss before each
/// update and the final loss. Throws ValidationError for fewer than two
/// classes and TrainingError if the parameters or loss become non-finite.
LinearHead train_linear_head(std::span<const ClassEmbeddings> data, const TrainConfig& cfg,
                             std::vector<double>* loss_trace = nullptr);

/// Builds a head of the requested kind over `data`; nearest-centroid heads
/// ignore `cfg`.
std::shared_ptr<const Head> train_head(HeadKind kind, std::span<const ClassEmbeddings> data, const TrainConfig& cfg);

std::shared_ptr<const Head> head_from_json(const Json& doc);
void save_head(const Head& head, const std::filesystem::path& path);
std::shared_ptr<const Head> load_head(const std::filesystem::path& path);

}  // namespace simclust
