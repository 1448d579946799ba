#include "simclust/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "parallel.hpp"
#include "simclust/error.hpp"

namespace simclust {

double dot(std::span<const double> u, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i] * v[i];
    }
    return acc;
}

double squared_norm(std::span<const double> v) {
    return dot(v, v);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw ValidationError("cosine of vectors with different lengths (" + std::to_string(u.size()) + " vs "
                              + std::to_string(v.size()) + ")");
    }
    const double nu = squared_norm(u);
    const double nv = squared_norm(v);
    if (!(nu > 0.0) || !(nv > 0.0)) {
        throw DomainError("cosine distance is undefined for a zero-norm vector");
    }
    const double c = dot(u, v) / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp(c, -1.0, 1.0);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    return 1.0 - cosine_similarity(u, v);
}

FeatureVector to_feature_vector(std::span<const float> v) {
    return FeatureVector(v.begin(), v.end());
}

FeatureVector compute_centroid(const ClassEmbeddings& cls) {
    const std::size_t n = cls.size();
    if (n == 0) {
        throw ValidationError("class '" + cls.name() + "' is empty");
    }
    FeatureVector mean(cls.dim(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = cls.row(r);
        for (std::size_t j = 0; j < mean.size(); ++j) {
            mean[j] += static_cast<double>(row[j]);
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(n);
    }
    return mean;
}

double compute_inertia(const ClassEmbeddings& cls) {
    const auto centroid = compute_centroid(cls);
    double total = 0.0;
    for (std::size_t r = 0; r < cls.size(); ++r) {
        const auto row = cls.row(r);
        for (std::size_t j = 0; j < centroid.size(); ++j) {
            const double delta = static_cast<double>(row[j]) - centroid[j];
            total += delta * delta;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------

CentroidSet::CentroidSet(std::size_t dim, std::vector<std::string> names, std::vector<FeatureVector> centroids)
    : dim_(dim), names_(std::move(names)), centroids_(std::move(centroids)) {
    if (names_.size() != centroids_.size()) {
        throw ValidationError("centroid set: names and centroids differ in length");
    }
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (centroids_[i].size() != dim_) {
            throw ValidationError("centroid '" + names_[i] + "' has length " + std::to_string(centroids_[i].size())
                                  + ", expected " + std::to_string(dim_));
        }
        if (!seen.insert(names_[i]).second) {
            throw ValidationError("duplicate centroid name '" + names_[i] + "'");
        }
    }
}

std::optional<std::size_t> CentroidSet::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - names_.begin());
}

CentroidSet CentroidSet::subset(std::span<const std::string> names) const {
    std::vector<std::string> out_names;
    std::vector<FeatureVector> out_centroids;
    for (const auto& name : names) {
        const auto idx = index_of(name);
        if (!idx) {
            throw ValidationError("no centroid for class '" + name + "'");
        }
        out_names.push_back(name);
        out_centroids.push_back(centroids_[*idx]);
    }
    return CentroidSet(dim_, std::move(out_names), std::move(out_centroids));
}

void CentroidSet::push_back(std::string name, FeatureVector centroid) {
    if (names_.empty() && dim_ == 0) {
        dim_ = centroid.size();
    }
    if (centroid.size() != dim_) {
        throw ValidationError("centroid '" + name + "' has length " + std::to_string(centroid.size())
                              + ", expected " + std::to_string(dim_));
    }
    if (index_of(name)) {
        throw ValidationError("duplicate centroid name '" + name + "'");
    }
    names_.push_back(std::move(name));
    centroids_.push_back(std::move(centroid));
}

CentroidSet compute_centroids(const DatasetStore& store, unsigned threads) {
    std::vector<FeatureVector> centroids(store.size());
    detail::parallel_for(store.size(), threads, [&](std::size_t i) { centroids[i] = compute_centroid(store[i]); });
    return CentroidSet(store.dim(), store.class_names(), std::move(centroids));
}

// ---------------------------------------------------------------------------

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
    if (values_.size() != labels_.size() * labels_.size()) {
        throw ValidationError("similarity matrix: " + std::to_string(values_.size()) + " values for "
                              + std::to_string(labels_.size()) + " labels");
    }
}

void check_similarity_matrix(const SimilarityMatrix& m, double tol) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(m(i, i)) > tol) {
            throw ValidationError("similarity matrix diagonal entry for '" + m.labels()[i] + "' is nonzero");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (!(v >= 0.0 && v <= 2.0)) {
                throw ValidationError("similarity matrix entry (" + m.labels()[i] + ", " + m.labels()[j]
                                      + ") = " + format_double(v) + " outside [0, 2]");
            }
            if (std::abs(v - m(j, i)) > tol) {
                throw ValidationError("similarity matrix is not symmetric at (" + m.labels()[i] + ", "
                                      + m.labels()[j] + ")");
            }
        }
    }
}

SimilarityMatrix similarity_matrix(const CentroidSet& centroids, unsigned threads) {
    const std::size_t n = centroids.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(squared_norm(centroids.centroid(i)) > 0.0)) {
            throw DomainError("centroid of class '" + centroids.name(i) + "' has zero norm");
        }
    }

    std::vector<double> values(n * n, 0.0);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            values[i * n + j] = cosine_distance(centroids.centroid(i), centroids.centroid(j));
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            values[i * n + j] = values[j * n + i];
        }
    }
    return SimilarityMatrix(centroids.names(), std::move(values));
}

SimilarityResult build_similarity_matrix(const DatasetStore& store, unsigned threads) {
    SimilarityResult out;
    out.centroids = compute_centroids(store, threads);
    out.matrix = similarity_matrix(out.centroids, threads);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

/// Splits CSV text into records; handles quoted fields with doubled quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;

    auto end_record = [&] {
        if (field_started || !record.empty()) {
            record.push_back(std::move(field));
            records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        field_started = false;
    };

    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            end_record();
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
        } else {
            field += c;
            field_started = true;
        }
        ++i;
    }
    if (in_quotes) {
        throw ParseError("unterminated quoted field in CSV", text.size());
    }
    end_record();
    return records;
}

double parse_double(const std::string& s, std::size_t row, std::size_t col) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ValidationError("similarity CSV: cannot parse '" + s + "' at row " + std::to_string(row) + ", column "
                              + std::to_string(col));
    }
    return v;
}

}  // namespace

std::string similarity_matrix_to_csv(const SimilarityMatrix& m) {
    std::string out;
    for (const auto& label : m.labels()) {
        out += ',';
        out += quote_csv(label);
    }
    out += '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += quote_csv(m.labels()[i]);
        for (std::size_t j = 0; j < m.size(); ++j) {
            out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

SimilarityMatrix similarity_matrix_from_csv(std::string_view text) {
    const auto records = parse_csv(text);
    if (records.empty()) {
        throw ValidationError("similarity CSV is empty");
    }
    const auto& header = records.front();
    if (header.empty() || !header.front().empty()) {
        throw ValidationError("similarity CSV header must start with an empty cell");
    }
    std::vector<std::string> labels(header.begin() + 1, header.end());
    const std::size_t n = labels.size();
    if (n == 0) {
        throw ValidationError("similarity CSV has no labels");
    }
    if (records.size() != n + 1) {
        throw ValidationError("similarity CSV has " + std::to_string(records.size() - 1) + " data rows for "
                              + std::to_string(n) + " labels");
    }

    std::vector<double> values;
    values.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = records[i + 1];
        if (rec.size() != n + 1) {
            throw ValidationError("similarity CSV row " + std::to_string(i + 1) + " has " + std::to_string(rec.size())
                                  + " fields, expected " + std::to_string(n + 1));
        }
        if (rec.front() != labels[i]) {
            throw ValidationError("similarity CSV row label '" + rec.front() + "' does not match column label '"
                                  + labels[i] + "'");
        }
        for (std::size_t j = 0; j < n; ++j) {
            values.push_back(parse_double(rec[j + 1], i + 1, j + 1));
        }
    }
    SimilarityMatrix m(std::move(labels), std::move(values));
    check_similarity_matrix(m);
    return m;
}

void save_similarity_matrix(const SimilarityMatrix& m, const std::filesystem::path& path) {
    write_text_file(path, similarity_matrix_to_csv(m));
}

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path) {
    try {
        return similarity_matrix_from_csv(read_text_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace simclust
