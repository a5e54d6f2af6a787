// Command-line surface for the trust-evaluation pipeline: synthetic data,
// hypergraph construction, training, ranking and the experiment commands.

#include "hypertrust/builders.hpp"
#include "hypertrust/data_io.hpp"
#include "hypertrust/evaluation.hpp"
#include "hypertrust/trainer.hpp"
#include "hypertrust/trust.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace hypertrust;

namespace {

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

nlohmann::json config_json(const TrainConfig& c) {
    nlohmann::json j;
    j["epochs"] = c.epochs;
    j["lr"] = c.lr;
    j["p_a"] = c.p_a;
    j["p_h"] = c.p_h;
    j["lambda_dev"] = c.weights.lambda_dev;
    j["lambda_hyp"] = c.weights.lambda_hyp;
    j["lambda1"] = c.weights.lambda1;
    j["lambda2"] = c.weights.lambda2;
    j["layers"] = c.layers;
    j["embedding_dim"] = c.embedding_dim;
    j["seed"] = c.seed;
    j["weight_decay"] = c.weight_decay;
    j["activation"] = c.activation == Activation::ReLU ? "relu" : "identity";
    return j;
}

// Every command drops a manifest next to its outputs: command, resolved
// config, paths, seed and artifact hashes.
void write_manifest(const fs::path& dir, const std::string& command, const nlohmann::json& config,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<fs::path>& outputs, std::uint64_t seed) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = nlohmann::json::array();
    j["artifact_hashes"] = nlohmann::json::object();
    for (const auto& out : outputs) {
        j["outputs"].push_back(out.string());
        char hashbuf[32];
        std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                      static_cast<unsigned long long>(hash_file(out)));
        j["artifact_hashes"][out.filename().string()] = hashbuf;
    }
    j["seed"] = seed;
    j["timestamp"] = iso_timestamp();
    write_file_atomic(dir / (command + "_manifest.json"), j.dump(2) + "\n");
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0) {
        throw std::runtime_error("bad grid spec '" + spec + "', expected lo:hi:step");
    }
    std::vector<double> values;
    for (double v = lo; v <= hi + 1e-9; v += step) values.push_back(v);
    if (values.empty()) throw std::runtime_error("grid spec '" + spec + "' yields no values");
    return values;
}

// Graph construction must agree between train and rank/eval, so both sides
// take the same two knobs.
struct GraphOptions {
    int clusters = 0;          // 0 = max(2, round(sqrt(n)))
    std::uint64_t build_seed = 1;

    Hypergraph build(const Dataset& ds) const {
        return build_all(ds, BuildConfig{clusters, build_seed});
    }
};

void add_graph_options(CLI::App* cmd, GraphOptions& opts) {
    cmd->add_option("--clusters", opts.clusters, "proximity cluster count (0 = sqrt heuristic)");
    cmd->add_option("--build-seed", opts.build_seed, "seed for proximity clustering");
}

struct TrainOptions {
    std::string config_file;
    TrainConfig config;
    // CLI override tracking: CLI11 counts how often each flag was seen.
    CLI::App* cmd = nullptr;

    void add_flags(CLI::App* app) {
        cmd = app;
        app->add_option("--config", config_file, "key=value config file (or $HYPERTRUST_CONFIG)");
        app->add_option("--epochs", config.epochs, "training epochs");
        app->add_option("--lr", config.lr, "learning rate");
        app->add_option("--p-a", config.p_a, "device-masking probability");
        app->add_option("--p-h", config.p_h, "membership-masking probability");
        app->add_option("--lambda-dev", config.weights.lambda_dev, "device decorrelation weight");
        app->add_option("--lambda-hyp", config.weights.lambda_hyp, "hyperedge decorrelation weight");
        app->add_option("--lambda1", config.weights.lambda1, "hyperedge loss weight");
        app->add_option("--lambda2", config.weights.lambda2, "parameter regularization weight");
        app->add_option("--layers", config.layers, "HGNN layer count");
        app->add_option("--dim", config.embedding_dim, "embedding width");
        app->add_option("--seed", config.seed, "training seed");
        app->add_option("--weight-decay", config.weight_decay, "decoupled weight decay");
    }

    // File values first, then any flag the user actually passed on top.
    TrainConfig resolve() const {
        std::string file = config_file;
        if (file.empty()) {
            if (const char* env = std::getenv("HYPERTRUST_CONFIG")) file = env;
        }
        if (file.empty()) return config;

        TrainConfig from_file = config_from_file(file);
        auto overridden = [&](const std::string& flag) { return cmd->count(flag) > 0; };
        if (overridden("--epochs")) from_file.epochs = config.epochs;
        if (overridden("--lr")) from_file.lr = config.lr;
        if (overridden("--p-a")) from_file.p_a = config.p_a;
        if (overridden("--p-h")) from_file.p_h = config.p_h;
        if (overridden("--lambda-dev")) from_file.weights.lambda_dev = config.weights.lambda_dev;
        if (overridden("--lambda-hyp")) from_file.weights.lambda_hyp = config.weights.lambda_hyp;
        if (overridden("--lambda1")) from_file.weights.lambda1 = config.weights.lambda1;
        if (overridden("--lambda2")) from_file.weights.lambda2 = config.weights.lambda2;
        if (overridden("--layers")) from_file.layers = config.layers;
        if (overridden("--dim")) from_file.embedding_dim = config.embedding_dim;
        if (overridden("--seed")) from_file.seed = config.seed;
        if (overridden("--weight-decay")) from_file.weight_decay = config.weight_decay;
        return from_file;
    }
};

Matrix embeddings_for(const fs::path& checkpoint, const Dataset& ds, const GraphOptions& graph_opts) {
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    const Hypergraph graph = graph_opts.build(ds);
    if (ckpt.params.input_dim() != graph.num_devices()) {
        throw std::runtime_error("checkpoint expects " + std::to_string(ckpt.params.input_dim()) +
                                 " devices but the dataset has " + std::to_string(graph.num_devices()));
    }
    return infer_embeddings(graph, ckpt.params).devices;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hypergraph-based trust evaluation"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    Index synth_n = 76;
    std::uint64_t synth_seed = 7;
    std::string synth_out = ".";
    SynthKnobs knobs;
    synth->add_option("--n", synth_n, "device count")->required();
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--link-prob", knobs.link_prob, "link probability");
    synth->add_option("--friend-prob", knobs.friend_prob, "friendship probability");
    synth->add_option("--interests", knobs.n_interests, "interest pool size");
    synth->add_option("--interests-per-device", knobs.interests_per_device, "interests per device");
    synth->add_option("--collabs", knobs.n_collabs, "collaboration record count");
    synth->add_option("--collab-success-rate", knobs.collab_success_rate, "collaboration success rate");
    synth->add_option("--types", knobs.n_types, "device type count");

    // ---- build ----
    auto* build = app.add_subcommand("build", "build the relationship hypergraph");
    std::string build_data, build_out;
    GraphOptions build_graph;
    build->add_option("--data", build_data, "dataset directory")->required();
    build->add_option("--out", build_out, "output hypergraph file")->required();
    add_graph_options(build, build_graph);

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train the model");
    std::string train_data, train_out;
    GraphOptions train_graph;
    TrainOptions train_opts;
    train_cmd->add_option("--data", train_data, "dataset directory")->required();
    train_cmd->add_option("--out", train_out, "output directory")->required();
    add_graph_options(train_cmd, train_graph);
    train_opts.add_flags(train_cmd);

    // ---- rank ----
    auto* rank_cmd = app.add_subcommand("rank", "rank collaborators for an initiator");
    std::string rank_ckpt, rank_data, rank_out = ".";
    DeviceId rank_initiator = 0;
    int rank_top = -1;
    GraphOptions rank_graph;
    rank_cmd->add_option("--checkpoint", rank_ckpt, "checkpoint file")->required();
    rank_cmd->add_option("--data", rank_data, "dataset directory")->required();
    rank_cmd->add_option("--initiator", rank_initiator, "initiator device id")->required();
    rank_cmd->add_option("--top", rank_top, "keep only the top K entries");
    rank_cmd->add_option("--out", rank_out, "output directory");
    add_graph_options(rank_cmd, rank_graph);

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "evaluation exports");
    std::string eval_mode, eval_ckpt, eval_data, eval_out = ".";
    DeviceId eval_initiator = 5;
    int eval_top = 8;
    GraphOptions eval_graph;
    eval_cmd->add_option("mode", eval_mode, "ss | hist | project")->required();
    eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
    eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
    eval_cmd->add_option("--initiator", eval_initiator, "initiator device id");
    eval_cmd->add_option("--top", eval_top, "trusted group size");
    eval_cmd->add_option("--out", eval_out, "output directory");
    add_graph_options(eval_cmd, eval_graph);

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "masking-probability sensitivity grid");
    std::string sweep_data, sweep_grid = "0.1:0.9:0.1", sweep_out = ".";
    int sweep_workers = 2;
    DeviceId sweep_initiator = 5;
    int sweep_top = 8;
    GraphOptions sweep_graph;
    TrainOptions sweep_opts;
    sweep_cmd->add_option("--data", sweep_data, "dataset directory")->required();
    sweep_cmd->add_option("--grid", sweep_grid, "lo:hi:step for both axes");
    sweep_cmd->add_option("--workers", sweep_workers, "parallel cells");
    sweep_cmd->add_option("--initiator", sweep_initiator, "initiator device id");
    sweep_cmd->add_option("--top", sweep_top, "trusted group size");
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    add_graph_options(sweep_cmd, sweep_graph);
    sweep_opts.add_flags(sweep_cmd);

    // ---- scale ----
    auto* scale_cmd = app.add_subcommand("scale", "node-count experiment");
    std::string scale_data, scale_sizes = "30,40,50,60,70", scale_out = ".";
    DeviceId scale_initiator = 5;
    GraphOptions scale_graph;
    TrainOptions scale_opts;
    scale_cmd->add_option("--data", scale_data, "dataset directory")->required();
    scale_cmd->add_option("--sizes", scale_sizes, "comma-separated subset sizes");
    scale_cmd->add_option("--initiator", scale_initiator, "initiator device id");
    scale_cmd->add_option("--out", scale_out, "output directory");
    add_graph_options(scale_cmd, scale_graph);
    scale_opts.add_flags(scale_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            const Dataset ds = generate_synthetic(synth_n, synth_seed, knobs);
            save_dataset(ds, synth_out);
            nlohmann::json cfg;
            cfg["n"] = synth_n;
            cfg["link_prob"] = knobs.link_prob;
            cfg["friend_prob"] = knobs.friend_prob;
            cfg["n_interests"] = knobs.n_interests;
            cfg["interests_per_device"] = knobs.interests_per_device;
            cfg["n_collabs"] = knobs.n_collabs;
            cfg["collab_success_rate"] = knobs.collab_success_rate;
            cfg["n_types"] = knobs.n_types;
            const fs::path out(synth_out);
            write_manifest(out, "synth", cfg, {},
                           {out / "nodes.csv", out / "links.csv", out / "friendships.csv",
                            out / "interests.csv", out / "collaborations.csv"},
                           synth_seed);
            std::cout << "wrote dataset with " << ds.num_devices() << " devices, " << ds.links.size()
                      << " links, " << ds.friendships.size() << " friendships, "
                      << ds.collaborations.size() << " collaborations to " << synth_out << "\n";
        } else if (*build) {
            const Dataset ds = load_dataset(build_data);
            const Hypergraph graph = build_graph.build(ds);
            save_hypergraph(graph, build_out);
            for (int k = 0; k < kRelationKindCount; ++k) {
                const auto kind = static_cast<RelationKind>(k);
                std::cout << to_string(kind) << "=" << graph.count_of_kind(kind) << " ";
            }
            std::cout << "total=" << graph.num_hyperedges() << "\n";
            nlohmann::json cfg;
            cfg["clusters"] = build_graph.clusters;
            cfg["build_seed"] = build_graph.build_seed;
            write_manifest(fs::path(build_out).parent_path(), "build", cfg, {{"data", build_data}},
                           {build_out}, build_graph.build_seed);
        } else if (*train_cmd) {
            const TrainConfig config = train_opts.resolve();
            const Dataset ds = load_dataset(train_data);
            const Hypergraph graph = train_graph.build(ds);
            const TrainReport report = train(graph, config);

            const fs::path out(train_out);
            fs::create_directories(out);
            save_checkpoint(report.params, config_hash(config), out / "checkpoint.bin");
            save_loss_history_csv(report.history, out / "loss_history.csv");
            save_run_metadata(config, out / "run_config.txt");
            write_manifest(out, "train", config_json(config), {{"data", train_data}},
                           {out / "checkpoint.bin", out / "loss_history.csv", out / "run_config.txt"},
                           config.seed);
            std::cout << "trained " << config.epochs << " epochs in " << report.seconds
                      << " s; total loss " << report.history.front().total << " -> "
                      << report.history.back().total << "\n";
        } else if (*rank_cmd) {
            const Dataset ds = load_dataset(rank_data);
            const Matrix emb = embeddings_for(rank_ckpt, ds, rank_graph);
            const TrustRanking ranking = rank(rank_initiator, emb);

            const fs::path out(rank_out);
            fs::create_directories(out);
            save_ranking_csv(ranking, out / "ranking.csv", rank_top);
            save_ranking_json(ranking, TrainConfig{}, out / "ranking.json", rank_top);
            nlohmann::json cfg;
            cfg["initiator"] = rank_initiator;
            cfg["top"] = rank_top;
            write_manifest(out, "rank", cfg, {{"data", rank_data}, {"checkpoint", rank_ckpt}},
                           {out / "ranking.csv", out / "ranking.json"}, 0);
            std::cout << "top collaborator for device " << rank_initiator << ": device "
                      << ranking.entries.front().first << " (trust "
                      << ranking.entries.front().second << ")\n";
        } else if (*eval_cmd) {
            const Dataset ds = load_dataset(eval_data);
            const Matrix emb = embeddings_for(eval_ckpt, ds, eval_graph);
            const fs::path out(eval_out);
            fs::create_directories(out);
            nlohmann::json cfg;
            cfg["mode"] = eval_mode;
            cfg["initiator"] = eval_initiator;
            cfg["top"] = eval_top;

            if (eval_mode == "ss") {
                const double ss = trust_cluster_ss(emb, eval_initiator, eval_top);
                write_file_atomic(out / "eval_ss.csv", "initiator,k,ss\n" + std::to_string(eval_initiator) +
                                                           "," + std::to_string(eval_top) + "," +
                                                           format_double(ss) + "\n");
                write_manifest(out, "eval", cfg, {{"data", eval_data}, {"checkpoint", eval_ckpt}},
                               {out / "eval_ss.csv"}, 0);
                std::cout << "silhouette (initiator " << eval_initiator << ", top " << eval_top
                          << "): " << ss << "\n";
            } else if (eval_mode == "hist") {
                std::vector<double> edges;
                for (int b = -10; b <= 10; ++b) edges.push_back(b / 10.0);
                const TrustHistogram hist = trust_distribution(emb, eval_initiator, edges);
                save_histogram_csv(hist, out / "trust_histogram.csv");
                write_manifest(out, "eval", cfg, {{"data", eval_data}, {"checkpoint", eval_ckpt}},
                               {out / "trust_histogram.csv"}, 0);
                std::cout << "wrote trust_histogram.csv\n";
            } else if (eval_mode == "project") {
                const Matrix proj = pca_2d(emb);
                const TrustRanking ranking = rank(eval_initiator, emb);
                std::vector<std::string> groups(static_cast<std::size_t>(emb.rows()), "other");
                groups[static_cast<std::size_t>(eval_initiator)] = "initiator";
                for (int i = 0; i < eval_top && i < static_cast<int>(ranking.entries.size()); ++i) {
                    groups[static_cast<std::size_t>(ranking.entries[static_cast<std::size_t>(i)].first)] = "trusted";
                }
                save_projection_csv(proj, groups, out / "projection.csv");
                write_manifest(out, "eval", cfg, {{"data", eval_data}, {"checkpoint", eval_ckpt}},
                               {out / "projection.csv"}, 0);
                std::cout << "wrote projection.csv\n";
            } else {
                throw std::runtime_error("unknown eval mode '" + eval_mode + "' (expected ss|hist|project)");
            }
        } else if (*sweep_cmd) {
            const Dataset ds = load_dataset(sweep_data);
            const Hypergraph graph = sweep_graph.build(ds);
            SweepConfig config;
            config.train = sweep_opts.resolve();
            config.initiator = sweep_initiator;
            config.top_k = sweep_top;
            config.workers = sweep_workers;
            const std::vector<double> axis = parse_grid(sweep_grid);
            const SensitivityGrid grid = sensitivity_sweep(graph, config, axis, axis);

            const fs::path out(sweep_out);
            fs::create_directories(out);
            save_heatmap_csv(grid, out / "heatmap.csv");
            nlohmann::json cfg = config_json(config.train);
            cfg["grid"] = sweep_grid;
            cfg["workers"] = sweep_workers;
            cfg["initiator"] = sweep_initiator;
            cfg["top"] = sweep_top;
            write_manifest(out, "sweep", cfg, {{"data", sweep_data}}, {out / "heatmap.csv"},
                           config.train.seed);
            std::cout << "wrote heatmap.csv (" << grid.ss.rows() << "x" << grid.ss.cols() << " cells)\n";
        } else if (*scale_cmd) {
            const Dataset ds = load_dataset(scale_data);
            std::vector<Index> sizes;
            for (const auto& tok : CLI::detail::split(scale_sizes, ',')) sizes.push_back(std::stol(tok));
            const TrainConfig config = scale_opts.resolve();
            const auto table = node_count_experiment(ds, sizes, config,
                                                     BuildConfig{scale_graph.clusters, scale_graph.build_seed},
                                                     scale_initiator);
            const fs::path out(scale_out);
            fs::create_directories(out);
            save_scaling_csv(table, out / "scaling.csv");
            nlohmann::json cfg = config_json(config);
            cfg["sizes"] = scale_sizes;
            cfg["initiator"] = scale_initiator;
            write_manifest(out, "scale", cfg, {{"data", scale_data}}, {out / "scaling.csv"}, config.seed);
            for (const auto& row : table) {
                std::cout << row.size << " devices -> device " << row.selected << " (trust "
                          << row.trust_value << ")\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
