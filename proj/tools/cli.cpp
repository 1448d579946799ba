#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "simclust/clustering.hpp"
#include "simclust/error.hpp"
#include "simclust/eval.hpp"
#include "simclust/heads.hpp"
#include "simclust/routing.hpp"
#include "simclust/similarity.hpp"
#include "simclust/store.hpp"
#include "simclust/synth.hpp"

namespace simclust::cli {

namespace fs = std::filesystem;

namespace {

/// Resolved runtime settings. Precedence: flag, then --config file, then
/// SIMCLUST_THREADS (threads only), then built-in defaults.
struct Settings {
    unsigned threads = 1;
    AggregateMode mode = AggregateMode::mean;
    HeadKind head_kind = HeadKind::nearest_centroid;
    TrainConfig train;
};

struct SettingFlags {
    std::string config_path;
    unsigned threads = 0;
    std::string mode;
    std::string head_kind;
    TrainConfig train;

    CLI::Option* threads_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* head_kind_opt = nullptr;
    CLI::Option* epochs_opt = nullptr;
    CLI::Option* lr0_opt = nullptr;
    CLI::Option* step_size_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* l2_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_setting_flags(CLI::App* app, SettingFlags& f, bool training) {
    app->add_option("--config", f.config_path, "Optional JSON config; flags override its values")
        ->check(CLI::ExistingFile);
    f.threads_opt = app->add_option("--threads", f.threads, "Worker threads (default: SIMCLUST_THREADS or all cores)")
                        ->check(CLI::PositiveNumber);
    f.mode_opt = app->add_option("--mode", f.mode, "Cluster score aggregation: mean (default) or sum")
                     ->check(CLI::IsMember({"mean", "sum"}));
    if (!training) {
        return;
    }
    f.head_kind_opt = app->add_option("--head-kind", f.head_kind, "Head type: nearest_centroid (default) or linear")
                          ->check(CLI::IsMember({"nearest_centroid", "linear"}));
    f.epochs_opt = app->add_option("--epochs", f.train.epochs, "Linear head: gradient-descent epochs")
                       ->check(CLI::PositiveNumber);
    f.lr0_opt = app->add_option("--lr0", f.train.lr0, "Linear head: initial learning rate")->check(CLI::PositiveNumber);
    f.step_size_opt = app->add_option("--step-size", f.train.step_size, "Linear head: epochs per learning-rate step")
                          ->check(CLI::PositiveNumber);
    f.gamma_opt = app->add_option("--gamma", f.train.gamma, "Linear head: learning-rate decay factor in (0, 1]")
                      ->check(CLI::Range(0.0, 1.0));
    f.l2_opt = app->add_option("--l2", f.train.l2, "Linear head: L2 penalty on W")->check(CLI::NonNegativeNumber);
    f.seed_opt = app->add_option("--train-seed", f.train.seed, "Linear head: reserved seed");
}

unsigned default_threads() {
    if (const char* env = std::getenv("SIMCLUST_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Settings resolve(const SettingFlags& f) {
    Settings s;
    s.threads = default_threads();

    if (!f.config_path.empty()) {
        const Json doc = read_json_file(f.config_path);
        try {
            if (doc.contains("threads")) {
                const int t = doc["threads"].get<int>();
                if (t < 1) {
                    throw ValidationError("config threads must be at least 1");
                }
                s.threads = static_cast<unsigned>(t);
            }
            if (doc.contains("aggregate_mode")) {
                s.mode = parse_aggregate_mode(doc["aggregate_mode"].get<std::string>());
            }
            if (doc.contains("head_kind")) {
                s.head_kind = parse_head_kind(doc["head_kind"].get<std::string>());
            }
            if (doc.contains("train")) {
                s.train = train_config_from_json(doc["train"]);
            }
        } catch (const Json::exception& e) {
            throw ValidationError(f.config_path + ": malformed config: " + e.what());
        }
    }

    const auto given = [](const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; };
    if (given(f.threads_opt)) s.threads = f.threads;
    if (given(f.mode_opt)) s.mode = parse_aggregate_mode(f.mode);
    if (given(f.head_kind_opt)) s.head_kind = parse_head_kind(f.head_kind);
    if (given(f.epochs_opt)) s.train.epochs = f.train.epochs;
    if (given(f.lr0_opt)) s.train.lr0 = f.train.lr0;
    if (given(f.step_size_opt)) s.train.step_size = f.train.step_size;
    if (given(f.gamma_opt)) s.train.gamma = f.train.gamma;
    if (given(f.l2_opt)) s.train.l2 = f.train.l2;
    if (given(f.seed_opt)) s.train.seed = f.train.seed;
    s.train.validate();
    return s;
}

PipelineConfig pipeline_config(const Settings& s, int k) {
    PipelineConfig cfg;
    cfg.k = k;
    cfg.head_kind = s.head_kind;
    cfg.train = s.train;
    cfg.mode = s.mode;
    cfg.threads = s.threads;
    return cfg;
}

/// Input artifacts are checked up front so the error names the stage that
/// should have produced them.
void require(const std::string& path, const std::string& what, const std::string& stage) {
    if (!fs::exists(path)) {
        throw IoError("missing " + what + " '" + path + "'" + (stage.empty() ? "" : " (produced by `simclust " + stage + "`)"));
    }
}

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
}

void write_json(const fs::path& path, const Json& doc) {
    ensure_parent(path);
    write_text_file(path, doc.dump(2) + "\n");
}

fs::path head_path(const fs::path& dir, int cluster) {
    return dir / ("head_" + std::to_string(cluster) + ".json");
}

/// Centroids FVEC rows are in matrix label order.
CentroidSet load_centroids(const std::string& centroids_path, const SimilarityMatrix& matrix) {
    const auto data = load_fvec(centroids_path);
    if (data.count != matrix.size()) {
        throw ValidationError("centroid file holds " + std::to_string(data.count) + " rows but the matrix has "
                              + std::to_string(matrix.size()) + " labels");
    }
    std::vector<FeatureVector> rows;
    for (std::size_t i = 0; i < data.count; ++i) {
        rows.push_back(to_feature_vector(data.row(i)));
    }
    return CentroidSet(data.dim, matrix.labels(), std::move(rows));
}

struct RoutingInputs {
    std::string simmat;
    std::string centroids;
    std::string split;
};

void add_routing_inputs(CLI::App* app, RoutingInputs& in) {
    app->add_option("--simmat", in.simmat, "Similarity matrix CSV (labels)")->required();
    app->add_option("--centroids", in.centroids, "Centroid FVEC written by `simmat`")->required();
    app->add_option("--split", in.split, "Split JSON written by `split`")->required();
}

struct RoutingArtifacts {
    ClusterSplit split;
    std::vector<CentroidSet> cluster_centroids;
};

RoutingArtifacts load_routing(const RoutingInputs& in) {
    require(in.simmat, "similarity matrix", "simmat");
    require(in.centroids, "centroid file", "simmat");
    require(in.split, "split file", "split");
    const auto matrix = load_similarity_matrix(in.simmat);
    const auto centroids = load_centroids(in.centroids, matrix);
    auto split = load_split(in.split);
    auto sets = cluster_centroid_sets(split, centroids);
    return RoutingArtifacts{std::move(split), std::move(sets)};
}

std::vector<FeatureVector> load_queries(const std::string& path) {
    require(path, "query file", "");
    const auto data = load_fvec(path);
    std::vector<FeatureVector> out;
    for (std::size_t i = 0; i < data.count; ++i) {
        out.push_back(to_feature_vector(data.row(i)));
    }
    return out;
}

std::vector<std::shared_ptr<const Head>> load_heads(const fs::path& dir, int k) {
    std::vector<std::shared_ptr<const Head>> heads;
    for (int c = 0; c < k; ++c) {
        const auto path = head_path(dir, c);
        require(path.string(), "head file", "train");
        heads.push_back(load_head(path));
    }
    return heads;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_simmat(const std::string& store_path, const std::string& matrix_out, const std::string& centroids_out,
               const Settings& s, std::ostream& err) {
    require(store_path, "store manifest", "synth");
    const auto store = load_store(store_path);
    const auto result = build_similarity_matrix(store, s.threads);

    ensure_parent(matrix_out);
    save_similarity_matrix(result.matrix, matrix_out);

    std::vector<float> rows;
    for (std::size_t i = 0; i < result.centroids.size(); ++i) {
        const auto c = result.centroids.centroid(i);
        for (double v : c) {
            rows.push_back(static_cast<float>(v));
        }
    }
    ensure_parent(centroids_out);
    save_fvec(centroids_out, store.dim(), rows);
    err << "simmat: " << store.size() << " classes, dim " << store.dim() << " -> " << matrix_out << ", "
        << centroids_out << "\n";
    return kOk;
}

int cmd_split(const std::string& matrix_path, int k, const std::string& out_path, std::ostream& err) {
    require(matrix_path, "similarity matrix", "simmat");
    const auto matrix = load_similarity_matrix(matrix_path);
    const auto result = ward_cluster(matrix, k);
    ensure_parent(out_path);
    save_split(result.split, out_path);

    err << "split: k=" << k << " sizes";
    for (auto n : result.split.cluster_sizes()) {
        err << " " << n;
    }
    err << " -> " << out_path << "\n";
    return kOk;
}

struct TrainArgs {
    std::string store;
    std::string split;
    std::optional<int> cluster;
    bool monolithic = false;
    bool all = false;
    std::string out;
    std::string out_dir;
};

int cmd_train(const TrainArgs& a, const Settings& s, std::ostream& err) {
    require(a.store, "store manifest", "synth");
    const auto store = load_store(a.store);
    const auto cfg = pipeline_config(s, 1);

    if (a.monolithic) {
        if (a.out.empty()) {
            throw ValidationError("--monolithic needs --out");
        }
        const auto head = train_monolithic(store, cfg);
        ensure_parent(a.out);
        save_head(*head, a.out);
        err << "train: monolithic " << to_string(head->kind()) << " head over " << store.size() << " classes -> "
            << a.out << "\n";
        return kOk;
    }

    if (a.split.empty()) {
        throw ValidationError("--split is required unless --monolithic is given");
    }
    require(a.split, "split file", "split");
    const auto split = load_split(a.split);
    validate_split(split, store.class_names());

    if (a.all) {
        if (a.out_dir.empty()) {
            throw ValidationError("--all needs --out-dir");
        }
        const auto heads = train_cluster_heads(store, split, cfg);
        fs::create_directories(a.out_dir);
        for (int c = 0; c < split.k; ++c) {
            save_head(*heads[c], head_path(a.out_dir, c));
        }
        err << "train: " << split.k << " " << to_string(s.head_kind) << " heads -> " << a.out_dir << "\n";
        return kOk;
    }

    const int c = *a.cluster;
    if (c < 0 || c >= split.k) {
        throw ValidationError("cluster " + std::to_string(c) + " outside [0, " + std::to_string(split.k) + ")");
    }
    if (a.out.empty()) {
        throw ValidationError("--cluster needs --out");
    }
    const auto classes = cluster_classes(store, split, c);
    const auto head = train_head(s.head_kind, classes, s.train);
    ensure_parent(a.out);
    save_head(*head, a.out);
    err << "train: cluster " << c << " (" << classes.size() << " classes) -> " << a.out << "\n";
    return kOk;
}

int cmd_route(const RoutingInputs& in, const std::string& query_path, const std::string& out_path, const Settings& s,
              std::ostream& err) {
    const auto artifacts = load_routing(in);
    const auto queries = load_queries(query_path);
    Json decisions = Json::array();
    for (const auto& q : queries) {
        decisions.push_back(routing_decision_to_json(select_cluster(q, artifacts.cluster_centroids, s.mode)));
    }
    write_json(out_path, Json{{"decisions", std::move(decisions)}});
    err << "route: " << queries.size() << " queries -> " << out_path << "\n";
    return kOk;
}

int cmd_predict(const RoutingInputs& in, const std::string& query_path, const std::string& heads_dir,
                const std::string& out_path, const Settings& s, std::ostream& out, std::ostream& err) {
    const auto artifacts = load_routing(in);
    const auto heads = load_heads(heads_dir, artifacts.split.k);
    const auto queries = load_queries(query_path);

    Json predictions = Json::array();
    for (const auto& q : queries) {
        const auto p = predict_class(q, artifacts.split, artifacts.cluster_centroids, heads, s.mode);
        out << p.class_name << "\n";
        predictions.push_back(Json{{"class_name", p.class_name}, {"routing", routing_decision_to_json(p.routing)}});
    }
    if (!out_path.empty()) {
        write_json(out_path, Json{{"predictions", std::move(predictions)}});
    }
    err << "predict: " << queries.size() << " queries\n";
    return kOk;
}

struct EvalArgs {
    std::string store;
    std::string split;
    int k = 0;
    double test_fraction = 0.25;
    std::uint64_t seed = 0;
    bool report_rss = false;
    std::string out;
};

int cmd_eval(const EvalArgs& a, const Settings& s, std::ostream& err) {
    require(a.store, "store manifest", "synth");
    const auto store = load_store(a.store);
    auto parts = split_train_test(store, a.test_fraction, a.seed);

    Pipeline pipeline = [&] {
        if (!a.split.empty()) {
            require(a.split, "split file", "split");
            auto split = load_split(a.split);
            const auto cfg = pipeline_config(s, split.k);
            return build_pipeline(std::move(parts.train), std::move(split), cfg);
        }
        if (a.k < 1) {
            throw ValidationError("eval needs either -k or --split");
        }
        return build_pipeline(std::move(parts.train), pipeline_config(s, a.k));
    }();
    const auto monolithic = train_monolithic(pipeline.store, pipeline.config);
    auto report = evaluate(pipeline, *monolithic, parts.test);
    if (a.report_rss) {
        report.notes.push_back("peak resident set " + std::to_string(peak_rss_kib()) + " KiB (informational)");
    }
    write_json(a.out, eval_report_to_json(report));
    err << "eval: routing " << report.routing_accuracy << ", end-to-end " << report.end_to_end_top1
        << ", monolithic " << report.monolithic_top1 << " over " << report.n_eval << " vectors -> " << a.out << "\n";
    return kOk;
}

int cmd_synth(const std::string& spec_path, std::optional<std::uint64_t> seed, const std::string& out_dir,
              std::ostream& err) {
    require(spec_path, "synth spec", "");
    auto spec = synth_spec_from_json(read_json_file(spec_path));
    if (seed) {
        spec.seed = *seed;
    }
    const auto synth = generate(spec);
    fs::create_directories(out_dir);
    save_store(synth.store, fs::path(out_dir) / "manifest.json");
    write_json(fs::path(out_dir) / "ground_truth.json", synth.ground_truth_json());
    err << "synth: " << synth.store.size() << " classes x " << spec.n_per_class << " vectors, dim " << spec.dim
        << " -> " << out_dir << "\n";
    return kOk;
}

struct ExtendArgs {
    std::string store;
    std::string split;
    std::string heads_dir;
    std::string new_class;
    std::string name;
    std::string out_dir;
};

int cmd_extend(const ExtendArgs& a, const Settings& s, std::ostream& err) {
    require(a.store, "store manifest", "synth");
    require(a.split, "split file", "split");
    require(a.new_class, "new-class FVEC", "");

    const auto store = load_store(a.store);
    auto split = load_split(a.split);
    validate_split(split, store.class_names());
    auto heads = load_heads(a.heads_dir, split.k);
    const auto data = load_fvec(a.new_class);
    const ClassEmbeddings new_class(a.name, data.dim, data.values);

    auto sim = build_similarity_matrix(store, s.threads);
    auto sets = cluster_centroid_sets(split, sim.centroids);
    PipelineConfig cfg = pipeline_config(s, split.k);
    Pipeline pipeline{store, std::move(sim.centroids), std::move(sim.matrix), std::move(split), std::move(sets),
                      heads, cfg};

    // Retrain with the same head kind (and linear settings) the target
    // cluster was trained with.
    const int target = assign_new_class(compute_centroid(new_class), pipeline.split, pipeline.centroids);
    pipeline.config.head_kind = heads[target]->kind();
    if (const auto* linear = dynamic_cast<const LinearHead*>(heads[target].get()); linear && linear->trained_epochs() > 0) {
        pipeline.config.train = linear->config();
    }
    const auto result = extend_and_retrain(pipeline, new_class);

    const fs::path out_dir(a.out_dir);
    fs::create_directories(out_dir);
    for (int c = 0; c < result.pipeline.split.k; ++c) {
        if (c == result.report.cluster) {
            save_head(*result.pipeline.heads[c], head_path(out_dir, c));
        } else {
            fs::copy_file(head_path(a.heads_dir, c), head_path(out_dir, c), fs::copy_options::overwrite_existing);
        }
    }
    save_split(result.pipeline.split, out_dir / "split.json");

    // Updated manifest: existing class files stay where they are.
    const fs::path manifest_dir = fs::absolute(a.store).parent_path();
    Json manifest = read_json_file(a.store);
    for (auto& entry : manifest["classes"]) {
        const fs::path original = manifest_dir / entry["file"].get<std::string>();
        entry["file"] = fs::relative(original, fs::absolute(out_dir)).generic_string();
    }
    const std::string new_file = "class_" + std::to_string(store.size()) + "_new.fvec";
    save_fvec(out_dir / new_file, new_class.dim(), new_class.values());
    manifest["classes"].push_back(Json{{"name", new_class.name()}, {"file", new_file}, {"count", new_class.size()}});
    write_json(out_dir / "manifest.json", manifest);
    write_json(out_dir / "extension_report.json", extension_report_to_json(result.report));

    err << "extend: '" << new_class.name() << "' -> cluster " << result.report.cluster << ", retrained "
        << result.report.retrained_classes << " of " << result.report.total_classes << " classes\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"simclust: similarity-based sub-dataset clustering over feature embeddings"};
    app.name("simclust");
    app.require_subcommand(1);

    // simmat
    auto* simmat = app.add_subcommand("simmat", "Store -> class centroids (FVEC) and cosine-distance matrix (CSV)");
    std::string simmat_store, simmat_out, simmat_centroids;
    SettingFlags simmat_flags;
    simmat->add_option("--store", simmat_store, "Dataset manifest JSON")->required();
    simmat->add_option("--out", simmat_out, "Output similarity matrix CSV")->required();
    simmat->add_option("--out-centroids", simmat_centroids, "Output centroid FVEC (matrix label order)")->required();
    add_setting_flags(simmat, simmat_flags, false);

    // split
    auto* split = app.add_subcommand("split", "Similarity matrix -> Ward-linkage cluster split JSON");
    std::string split_matrix, split_out;
    int split_k = 0;
    split->add_option("--simmat", split_matrix, "Similarity matrix CSV")->required();
    split->add_option("-k,--clusters", split_k, "Number of clusters (>= 1)")->required()->check(CLI::PositiveNumber);
    split->add_option("--out", split_out, "Output split JSON")->required();

    // train
    auto* train = app.add_subcommand("train", "Store + split -> head file(s)");
    TrainArgs train_args;
    SettingFlags train_flags;
    int train_cluster = -1;
    train->add_option("--store", train_args.store, "Dataset manifest JSON")->required();
    train->add_option("--split", train_args.split, "Split JSON");
    auto* cluster_opt = train->add_option("--cluster", train_cluster, "Train the head of this cluster")
                            ->check(CLI::NonNegativeNumber);
    auto* mono_opt = train->add_flag("--monolithic", train_args.monolithic, "Train one head over every class");
    auto* all_opt = train->add_flag("--all", train_args.all, "Train every cluster head into --out-dir");
    cluster_opt->excludes(mono_opt)->excludes(all_opt);
    mono_opt->excludes(all_opt);
    train->add_option("--out", train_args.out, "Output head JSON (--cluster / --monolithic)");
    train->add_option("--out-dir", train_args.out_dir, "Output directory for head_<c>.json (--all)");
    add_setting_flags(train, train_flags, true);

    // route
    auto* route = app.add_subcommand("route", "Query FVEC -> routing decisions JSON");
    RoutingInputs route_in;
    std::string route_query, route_out;
    SettingFlags route_flags;
    add_routing_inputs(route, route_in);
    route->add_option("--query", route_query, "Query FVEC (one or more vectors)")->required();
    route->add_option("--out", route_out, "Output decisions JSON")->required();
    add_setting_flags(route, route_flags, false);

    // predict
    auto* predict = app.add_subcommand("predict", "Query FVEC -> predicted class per vector (stdout)");
    RoutingInputs predict_in;
    std::string predict_query, predict_heads, predict_out;
    SettingFlags predict_flags;
    add_routing_inputs(predict, predict_in);
    predict->add_option("--query", predict_query, "Query FVEC (one or more vectors)")->required();
    predict->add_option("--heads-dir", predict_heads, "Directory holding head_<c>.json")->required();
    predict->add_option("--out", predict_out, "Optional predictions JSON");
    add_setting_flags(predict, predict_flags, false);

    // eval
    auto* eval = app.add_subcommand("eval", "Store -> evaluation report JSON (clustered vs monolithic)");
    EvalArgs eval_args;
    SettingFlags eval_flags;
    eval->add_option("--store", eval_args.store, "Dataset manifest JSON")->required();
    eval->add_option("-k,--clusters", eval_args.k, "Number of Ward clusters")->check(CLI::PositiveNumber);
    eval->add_option("--split", eval_args.split, "Use this split instead of clustering");
    eval->add_option("--test-fraction", eval_args.test_fraction, "Per-class held-out fraction")
        ->check(CLI::Range(0.0, 1.0));
    eval->add_option("--seed", eval_args.seed, "Train/test split seed");
    eval->add_flag("--report-rss", eval_args.report_rss, "Append peak resident set size to the report notes");
    eval->add_option("--out", eval_args.out, "Output report JSON")->required();
    add_setting_flags(eval, eval_flags, true);

    // synth
    auto* synth = app.add_subcommand("synth", "Synth spec JSON -> store (manifest + FVEC) and ground truth");
    std::string synth_spec, synth_out;
    std::uint64_t synth_seed = 0;
    synth->add_option("--spec", synth_spec, "Synth spec JSON")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "Override the spec's seed");
    synth->add_option("--out-dir", synth_out, "Output directory")->required();

    // extend
    auto* extend = app.add_subcommand("extend", "Add a class: assign it to a cluster and retrain only that head");
    ExtendArgs extend_args;
    SettingFlags extend_flags;
    extend->add_option("--store", extend_args.store, "Dataset manifest JSON")->required();
    extend->add_option("--split", extend_args.split, "Split JSON")->required();
    extend->add_option("--heads-dir", extend_args.heads_dir, "Directory holding head_<c>.json")->required();
    extend->add_option("--new-class", extend_args.new_class, "FVEC of the new class")->required();
    extend->add_option("--name", extend_args.name, "Name of the new class")->required();
    extend->add_option("--out-dir", extend_args.out_dir, "Output directory for updated artifacts")->required();
    add_setting_flags(extend, extend_flags, false);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kUsage;
    }

    try {
        if (simmat->parsed()) {
            return cmd_simmat(simmat_store, simmat_out, simmat_centroids, resolve(simmat_flags), err);
        }
        if (split->parsed()) {
            return cmd_split(split_matrix, split_k, split_out, err);
        }
        if (train->parsed()) {
            if (cluster_opt->count() == 0 && !train_args.monolithic && !train_args.all) {
                err << "usage error: train needs one of --cluster N, --monolithic or --all\n" << train->help();
                return kUsage;
            }
            if (cluster_opt->count() > 0) {
                train_args.cluster = train_cluster;
            }
            return cmd_train(train_args, resolve(train_flags), err);
        }
        if (route->parsed()) {
            return cmd_route(route_in, route_query, route_out, resolve(route_flags), err);
        }
        if (predict->parsed()) {
            return cmd_predict(predict_in, predict_query, predict_heads, predict_out, resolve(predict_flags), out, err);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_args, resolve(eval_flags), err);
        }
        if (synth->parsed()) {
            return cmd_synth(synth_spec, synth_seed_opt->count() ? std::optional(synth_seed) : std::nullopt, synth_out,
                             err);
        }
        if (extend->parsed()) {
            return cmd_extend(extend_args, resolve(extend_flags), err);
        }
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kUsage;
}

}  // namespace simclust::cli
