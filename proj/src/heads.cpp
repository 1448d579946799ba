#include "simclust/heads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simclust/error.hpp"

namespace simclust {

std::string to_string(HeadKind kind) {
    switch (kind) {
        case HeadKind::nearest_centroid:
            return "nearest_centroid";
        case HeadKind::linear:
            return "linear";
    }
    return "unknown";
}

HeadKind parse_head_kind(std::string_view text) {
    if (text == "nearest_centroid") {
        return HeadKind::nearest_centroid;
    }
    if (text == "linear") {
        return HeadKind::linear;
    }
    throw ValidationError("unknown head kind '" + std::string(text) + "' (expected nearest_centroid or linear)");
}

// ---------------------------------------------------------------------------
// Nearest centroid

NearestCentroidHead::NearestCentroidHead(CentroidSet centroids) : centroids_(std::move(centroids)) {
    if (centroids_.empty()) {
        throw ValidationError("nearest-centroid head needs at least one class");
    }
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
        if (!(squared_norm(centroids_.centroid(i)) > 0.0)) {
            throw DomainError("centroid of class '" + centroids_.name(i) + "' has zero norm");
        }
    }
}

std::size_t NearestCentroidHead::predict_index(std::span<const double> query) const {
    if (query.size() != dim()) {
        throw ValidationError("query has dim " + std::to_string(query.size()) + ", head expects "
                              + std::to_string(dim()));
    }
    std::size_t best_index = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
        const double d = cosine_distance(query, centroids_.centroid(i));
        if (d < best) {
            best = d;
            best_index = i;
        }
    }
    return best_index;
}

Json NearestCentroidHead::to_json() const {
    Json doc;
    doc["kind"] = to_string(kind());
    doc["classes"] = centroids_.names();
    Json rows = Json::array();
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
        const auto c = centroids_.centroid(i);
        rows.push_back(std::vector<double>(c.begin(), c.end()));
    }
    doc["centroids"] = std::move(rows);
    return doc;
}

const std::string& nc_predict(const NearestCentroidHead& head, std::span<const double> query) {
    return head.predict(query);
}

// ---------------------------------------------------------------------------
// Training configuration

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ValidationError("epochs must be at least 1");
    }
    if (!(lr0 > 0.0) || !std::isfinite(lr0)) {
        throw ValidationError("lr0 must be positive");
    }
    if (step_size < 1) {
        throw ValidationError("step_size must be at least 1");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ValidationError("gamma must lie in (0, 1]");
    }
    if (!(l2 >= 0.0) || !std::isfinite(l2)) {
        throw ValidationError("l2 must be nonnegative");
    }
}

double learning_rate(const TrainConfig& cfg, int epoch) {
    return cfg.lr0 * std::pow(cfg.gamma, epoch / cfg.step_size);
}

Json train_config_to_json(const TrainConfig& cfg) {
    return Json{{"epochs", cfg.epochs}, {"lr0", cfg.lr0},  {"step_size", cfg.step_size},
                {"gamma", cfg.gamma},   {"l2", cfg.l2},    {"seed", cfg.seed}};
}

TrainConfig train_config_from_json(const Json& doc, TrainConfig cfg) {
    try {
        cfg.epochs = doc.value("epochs", cfg.epochs);
        cfg.lr0 = doc.value("lr0", cfg.lr0);
        cfg.step_size = doc.value("step_size", cfg.step_size);
        cfg.gamma = doc.value("gamma", cfg.gamma);
        cfg.l2 = doc.value("l2", cfg.l2);
        cfg.seed = doc.value("seed", cfg.seed);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed training config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Linear head

LinearHead::LinearHead(std::vector<std::string> classes, std::size_t dim, std::vector<double> weights,
                       std::vector<double> bias, int trained_epochs, TrainConfig config)
    : classes_(std::move(classes)),
      dim_(dim),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      trained_epochs_(trained_epochs),
      config_(config) {
    if (classes_.empty() || dim_ == 0) {
        throw ValidationError("linear head needs at least one class and a positive dim");
    }
    if (weights_.size() != classes_.size() * dim_ || bias_.size() != classes_.size()) {
        throw ValidationError("linear head parameter shapes do not match " + std::to_string(classes_.size())
                              + " classes x " + std::to_string(dim_));
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(weights_.begin(), weights_.end(), finite) || !std::all_of(bias_.begin(), bias_.end(), finite)) {
        throw ValidationError("linear head has non-finite parameters");
    }
}

LinearHead LinearHead::zeros(std::vector<std::string> classes, std::size_t dim) {
    const std::size_t c = classes.size();
    return LinearHead(std::move(classes), dim, std::vector<double>(c * dim, 0.0), std::vector<double>(c, 0.0));
}

std::vector<double> LinearHead::logits(std::span<const double> query) const {
    if (query.size() != dim_) {
        throw ValidationError("query has dim " + std::to_string(query.size()) + ", head expects "
                              + std::to_string(dim_));
    }
    std::vector<double> out(bias_);
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        out[c] += dot(std::span(weights_).subspan(c * dim_, dim_), query);
    }
    return out;
}

std::size_t LinearHead::predict_index(std::span<const double> query) const {
    const auto z = logits(query);
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

Json LinearHead::to_json() const {
    Json doc;
    doc["kind"] = to_string(kind());
    doc["classes"] = classes_;
    Json rows = Json::array();
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        rows.push_back(std::vector<double>(weights_.begin() + c * dim_, weights_.begin() + (c + 1) * dim_));
    }
    doc["W"] = std::move(rows);
    doc["b"] = bias_;
    doc["trained_epochs"] = trained_epochs_;
    doc["config"] = train_config_to_json(config_);
    return doc;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double shift = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - shift);
        total += p[i];
    }
    for (auto& v : p) {
        v /= total;
    }
    return p;
}

LinearPrediction linear_predict(const LinearHead& head, std::span<const double> query) {
    const auto z = head.logits(query);
    LinearPrediction out;
    out.index = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    out.class_name = head.classes()[out.index];
    out.probabilities = softmax(z);
    return out;
}

// ---------------------------------------------------------------------------
// Training

LabeledBatch make_batch(std::span<const ClassEmbeddings> data) {
    LabeledBatch batch;
    if (data.empty()) {
        return batch;
    }
    batch.dim = data.front().dim();
    batch.num_classes = data.size();
    for (std::size_t c = 0; c < data.size(); ++c) {
        if (data[c].dim() != batch.dim) {
            throw ValidationError("class '" + data[c].name() + "' has dim " + std::to_string(data[c].dim())
                                  + ", expected " + std::to_string(batch.dim));
        }
        for (float v : data[c].values()) {
            batch.features.push_back(static_cast<double>(v));
        }
        batch.labels.insert(batch.labels.end(), data[c].size(), c);
    }
    return batch;
}

LossGradient cross_entropy_loss(const LabeledBatch& batch, std::span<const double> weights, std::span<const double> bias,
                                double l2) {
    const std::size_t d = batch.dim;
    const std::size_t num_classes = batch.num_classes;
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    LossGradient out;
    out.grad_weights.assign(num_classes * d, 0.0);
    out.grad_bias.assign(num_classes, 0.0);

    std::vector<double> z(num_classes);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto x = batch.row(i);
        for (std::size_t c = 0; c < num_classes; ++c) {
            z[c] = bias[c] + dot(weights.subspan(c * d, d), x);
        }
        const double zmax = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (double v : z) {
            total += std::exp(v - zmax);
        }
        const double log_partition = zmax + std::log(total);
        out.loss += (log_partition - z[batch.labels[i]]) * inv_n;

        for (std::size_t c = 0; c < num_classes; ++c) {
            const double residual = std::exp(z[c] - log_partition) - (c == batch.labels[i] ? 1.0 : 0.0);
            const double scaled = residual * inv_n;
            out.grad_bias[c] += scaled;
            double* g = out.grad_weights.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) {
                g[j] += scaled * x[j];
            }
        }
    }

    if (l2 > 0.0) {
        out.loss += 0.5 * l2 * dot(weights, weights);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            out.grad_weights[i] += l2 * weights[i];
        }
    }
    return out;
}

LinearHead train_linear_head(std::span<const ClassEmbeddings> data, const TrainConfig& cfg,
                             std::vector<double>* loss_trace) {
    cfg.validate();
    if (data.size() < 2) {
        throw ValidationError("linear head training needs at least two classes, got " + std::to_string(data.size()));
    }
    const auto batch = make_batch(data);
    const std::size_t d = batch.dim;

    std::vector<double> weights(batch.num_classes * d, 0.0);
    std::vector<double> bias(batch.num_classes, 0.0);
    if (loss_trace) {
        loss_trace->clear();
        loss_trace->reserve(cfg.epochs + 1);
    }

    const auto check_finite = [&](double loss, int epoch) {
        const auto finite = [](double v) { return std::isfinite(v); };
        if (!std::isfinite(loss) || !std::all_of(weights.begin(), weights.end(), finite)
            || !std::all_of(bias.begin(), bias.end(), finite)) {
            throw TrainingError("non-finite loss or parameters at epoch " + std::to_string(epoch)
                                + " (lr=" + format_double(learning_rate(cfg, epoch)) + "); try a smaller lr0");
        }
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto step = cross_entropy_loss(batch, weights, bias, cfg.l2);
        check_finite(step.loss, epoch);
        if (loss_trace) {
            loss_trace->push_back(step.loss);
        }
        const double lr = learning_rate(cfg, epoch);
        for (std::size_t i = 0; i < weights.size(); ++i) {
            weights[i] -= lr * step.grad_weights[i];
        }
        for (std::size_t c = 0; c < bias.size(); ++c) {
            bias[c] -= lr * step.grad_bias[c];
        }
    }
    const double final_loss = cross_entropy_loss(batch, weights, bias, cfg.l2).loss;
    check_finite(final_loss, cfg.epochs);
    if (loss_trace) {
        loss_trace->push_back(final_loss);
    }

    std::vector<std::string> classes;
    for (const auto& c : data) {
        classes.push_back(c.name());
    }
    return LinearHead(std::move(classes), d, std::move(weights), std::move(bias), cfg.epochs, cfg);
}

std::shared_ptr<const Head> train_head(HeadKind kind, std::span<const ClassEmbeddings> data, const TrainConfig& cfg) {
    if (data.empty()) {
        throw ValidationError("cannot build a head without classes");
    }
    if (kind == HeadKind::nearest_centroid) {
        CentroidSet centroids;
        for (const auto& c : data) {
            centroids.push_back(c.name(), compute_centroid(c));
        }
        return std::make_shared<NearestCentroidHead>(std::move(centroids));
    }
    if (data.size() == 1) {
        // A one-class cluster has nothing to discriminate.
        return std::make_shared<LinearHead>(LinearHead::zeros({data.front().name()}, data.front().dim()));
    }
    return std::make_shared<LinearHead>(train_linear_head(data, cfg));
}

// ---------------------------------------------------------------------------
// Serialization

std::shared_ptr<const Head> head_from_json(const Json& doc) {
    try {
        const auto kind = parse_head_kind(doc.value("kind", std::string("linear")));
        auto classes = doc.at("classes").get<std::vector<std::string>>();
        if (kind == HeadKind::nearest_centroid) {
            auto rows = doc.at("centroids").get<std::vector<std::vector<double>>>();
            if (rows.empty() || rows.size() != classes.size()) {
                throw ValidationError("nearest-centroid head: centroid rows do not match classes");
            }
            const std::size_t dim = rows.front().size();
            return std::make_shared<NearestCentroidHead>(CentroidSet(dim, std::move(classes), std::move(rows)));
        }

        const auto rows = doc.at("W").get<std::vector<std::vector<double>>>();
        auto bias = doc.at("b").get<std::vector<double>>();
        if (rows.empty() || rows.size() != classes.size()) {
            throw ValidationError("linear head: W rows do not match classes");
        }
        const std::size_t dim = rows.front().size();
        std::vector<double> weights;
        for (const auto& r : rows) {
            if (r.size() != dim) {
                throw ValidationError("linear head: ragged W");
            }
            weights.insert(weights.end(), r.begin(), r.end());
        }
        TrainConfig cfg;
        if (doc.contains("config")) {
            cfg = train_config_from_json(doc["config"]);
        }
        return std::make_shared<LinearHead>(std::move(classes), dim, std::move(weights), std::move(bias),
                                            doc.value("trained_epochs", 0), cfg);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed head: ") + e.what());
    }
}

void save_head(const Head& head, const std::filesystem::path& path) {
    write_text_file(path, head.to_json().dump(2) + "\n");
}

std::shared_ptr<const Head> load_head(const std::filesystem::path& path) {
    try {
        return head_from_json(read_json_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace simclust
