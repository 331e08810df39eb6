#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medsynth/errors.hpp"
#include "medsynth/eval/discriminator.hpp"
#include "medsynth/eval/marginals.hpp"
#include "medsynth/eval/pca.hpp"
#include "medsynth/eval/svg.hpp"
#include "medsynth/numeric/random.hpp"
#include "medsynth/records/csv.hpp"
#include "medsynth/records/schema.hpp"
#include "medsynth/records/toy.hpp"
#include "medsynth/vae/serialize.hpp"
#include "medsynth/vae/train.hpp"

namespace medsynth {

// Exit codes: 0 success, 1 usage, 2 data/format problem, 3 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// Stable per-diagnosis seed so `train --all` results do not depend on the
// order diagnoses are processed.
inline std::uint64_t derive_child_seed(std::uint64_t master_seed, const std::string& label) {
    return derive_seed(master_seed, label);
}

namespace detail {

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw FormatError("write failed for " + path.string());
}

inline std::vector<PatientRecord> load_records(const std::filesystem::path& path) {
    const ParseResult parsed = parse_records(read_text(path));
    for (const auto& issue : parsed.issues)
        std::cerr << path.string() << ": warning: " << issue << '\n';
    if (parsed.records.empty())
        throw FormatError(path.string() + ": no valid records");
    return parsed.records;
}

// Schema covering two files at once, so both encode against one layout.
inline DataSchema union_schema(const std::vector<PatientRecord>& a,
                               const std::vector<PatientRecord>& b) {
    std::vector<PatientRecord> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    return infer_schema(pooled);
}

inline std::vector<FeatureVector> encode_all(const std::vector<PatientRecord>& records,
                                             const DataSchema& schema) {
    std::vector<FeatureVector> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(encode_record(rec, schema));
    return out;
}

inline std::string filename_safe(std::string name) {
    for (auto& c : name)
        if (c == '/' || c == '\\') c = '_';
    return name;
}

struct TrainOptions {
    std::filesystem::path input;
    std::filesystem::path output;
    std::string diagnosis;
    bool all = false;
    VaeConfig config;  // input_dim filled per diagnosis
    std::string snapshots_dir;
    bool epochs_overridden = false;
    int verbosity = 0;
};

inline void train_one(const std::vector<PatientRecord>& records,
                      const std::string& diagnosis, std::uint64_t seed,
                      const TrainOptions& opts, const std::filesystem::path& model_path) {
    const DataSchema schema = infer_schema(records);
    VaeConfig config = opts.config;
    config.input_dim = FeatureLayout::for_schema(schema).total_dim;
    config.seed = seed;
    if (opts.epochs_overridden) config.snapshot_epochs = default_snapshot_epochs(config.epochs);

    RandomSource rng = seeded_rng(seed);
    VaeModel model = init_model(config, schema, diagnosis, rng);
    const TrainingTrace trace = train(model, records, config, rng);
    save_model(model, model_path);

    if (opts.verbosity >= 1) {
        for (const auto& e : trace.epochs) {
            std::fprintf(stderr,
                         "%s: epoch %zu/%zu recon %.4f kl %.4f total %.4f beta %.2f\n",
                         diagnosis.c_str(), e.epoch, config.epochs, e.mean_reconstruction,
                         e.mean_kl, e.mean_total, e.beta);
        }
    }

    if (!opts.snapshots_dir.empty()) {
        const std::filesystem::path dir(opts.snapshots_dir);
        std::filesystem::create_directories(dir);
        const std::vector<FeatureVector> real = encode_all(records, schema);
        const std::string stem = filename_safe(diagnosis);
        for (const auto& snap : trace.snapshots) {
            const ScatterDataset scatter = pca_scatter(real, snap.samples);
            const std::string base = stem + ".epoch" + std::to_string(snap.epoch);
            write_text(dir / (base + ".scatter.csv"), write_scatter_csv(scatter));
            write_text(dir / (base + ".scatter.svg"), render_scatter_svg(scatter));
        }
    }
}

inline void run_train(const TrainOptions& opts) {
    const auto records = load_records(opts.input);
    const auto partitions = partition_by_diagnosis(records);
    if (opts.all) {
        std::filesystem::create_directories(opts.output);
        for (const auto& [diagnosis, group] : partitions) {
            const std::uint64_t child = derive_child_seed(opts.config.seed, diagnosis);
            const auto path =
                opts.output / ("model." + filename_safe(diagnosis) + ".json");
            train_one(group, diagnosis, child, opts, path);
            std::cout << diagnosis << ": " << group.size() << " records -> "
                      << path.string() << '\n';
        }
        return;
    }
    const auto it = partitions.find(opts.diagnosis);
    if (it == partitions.end())
        throw FormatError(opts.input.string() + ": no records for diagnosis \"" +
                          opts.diagnosis + "\"");
    train_one(it->second, opts.diagnosis, opts.config.seed, opts, opts.output);
    std::cout << opts.diagnosis << ": " << it->second.size() << " records -> "
              << opts.output.string() << '\n';
}

}  // namespace detail

// Front door used by main() and the tests; args exclude the program name.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"Per-diagnosis VAE training, synthetic patient generation, and fidelity checks"};
    app.require_subcommand(1);

    // infer-schema
    std::string in_path, out_path;
    auto* schema_cmd = app.add_subcommand("infer-schema", "Infer a feature schema from a CSV");
    schema_cmd->add_option("--in", in_path, "input records CSV")->required();
    schema_cmd->add_option("--out", out_path, "output schema JSON")->required();

    // train
    detail::TrainOptions train_opts;
    std::string train_in, train_out;
    auto* train_cmd = app.add_subcommand("train", "Train one VAE per diagnosis");
    train_cmd->add_option("--in", train_in, "input records CSV")->required();
    train_cmd->add_option("--out", train_out, "model JSON path (directory with --all)")
        ->required();
    auto* diag_opt = train_cmd->add_option("--diagnosis", train_opts.diagnosis,
                                           "diagnosis partition to train on");
    auto* all_flag =
        train_cmd->add_flag("--all", train_opts.all, "train every diagnosis partition");
    all_flag->excludes(diag_opt);
    auto* epochs_opt =
        train_cmd->add_option("--epochs", train_opts.config.epochs, "training epochs");
    train_cmd->add_option("--hidden", train_opts.config.hidden_dim, "hidden layer width");
    train_cmd->add_option("--latent", train_opts.config.latent_dim, "latent dimension");
    train_cmd->add_option("--batch", train_opts.config.batch_size, "minibatch size");
    train_cmd->add_option("--lr", train_opts.config.learning_rate, "Adam learning rate");
    train_cmd->add_option("--seed", train_opts.config.seed, "master RNG seed");
    train_cmd->add_option("--snapshots-dir", train_opts.snapshots_dir,
                          "write per-snapshot scatter CSV/SVG here");
    train_cmd->add_flag("-v,--verbose", train_opts.verbosity, "print per-epoch losses");

    // generate
    std::string model_path, gen_out, mode_name = "sample";
    std::size_t gen_count = 0;
    std::uint64_t gen_seed = 0;
    auto* gen_cmd = app.add_subcommand("generate", "Sample synthetic records from a model");
    gen_cmd->add_option("--model", model_path, "trained model JSON")->required();
    gen_cmd->add_option("--count", gen_count, "number of records")->required();
    gen_cmd->add_option("--seed", gen_seed, "RNG seed");
    gen_cmd->add_option("--mode", mode_name, "decode mode")
        ->check(CLI::IsMember({"sample", "argmax"}));
    gen_cmd->add_option("--out", gen_out, "output CSV")->required();

    // eval-pca
    std::string real_path, syn_path, scatter_out, svg_out;
    auto* pca_cmd = app.add_subcommand("eval-pca", "Project real vs synthetic to 2-D PCA");
    pca_cmd->add_option("--real", real_path, "real records CSV")->required();
    pca_cmd->add_option("--synthetic", syn_path, "synthetic records CSV")->required();
    pca_cmd->add_option("--out", scatter_out, "scatter CSV output")->required();
    pca_cmd->add_option("--svg", svg_out, "optional scatter SVG output");

    // eval-discriminator
    std::string disc_real, disc_syn, disc_out;
    std::uint64_t disc_seed = 0;
    auto* disc_cmd =
        app.add_subcommand("eval-discriminator", "Train a real-vs-synthetic classifier");
    disc_cmd->add_option("--real", disc_real, "real records CSV")->required();
    disc_cmd->add_option("--synthetic", disc_syn, "synthetic records CSV")->required();
    disc_cmd->add_option("--seed", disc_seed, "split/search seed");
    disc_cmd->add_option("--out", disc_out, "report JSON output")->required();

    // stats
    std::string stats_in, stats_out;
    std::vector<std::string> compare_paths;
    auto* stats_cmd = app.add_subcommand("stats", "Marginal statistics of a records CSV");
    auto* stats_in_opt = stats_cmd->add_option("--in", stats_in, "records CSV");
    auto* compare_opt = stats_cmd->add_option("--compare", compare_paths,
                                              "two CSVs to diff")
                            ->expected(2);
    stats_in_opt->excludes(compare_opt);
    stats_cmd->add_option("--out", stats_out, "report JSON output")->required();

    // make-toy
    std::string toy_spec_path, toy_out;
    std::size_t toy_count = 0;
    std::uint64_t toy_seed = 0;
    auto* toy_cmd = app.add_subcommand("make-toy", "Generate a synthetic toy dataset");
    toy_cmd->add_option("--spec", toy_spec_path,
                        "toy distribution JSON (omit for the built-in default)");
    toy_cmd->add_option("--count", toy_count, "number of records")->required();
    toy_cmd->add_option("--seed", toy_seed, "RNG seed");
    toy_cmd->add_option("--out", toy_out, "output CSV")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*schema_cmd) {
            const auto records = detail::load_records(in_path);
            detail::write_text(out_path, schema_to_json(infer_schema(records)).dump(2) + "\n");
        } else if (*train_cmd) {
            if (!train_opts.all && train_opts.diagnosis.empty())
                throw FormatError("train: pass --diagnosis NAME or --all");
            train_opts.input = train_in;
            train_opts.output = train_out;
            train_opts.epochs_overridden = epochs_opt->count() > 0;
            detail::run_train(train_opts);
        } else if (*gen_cmd) {
            const VaeModel model = load_model(model_path);
            RandomSource rng = seeded_rng(gen_seed);
            const auto records =
                generate(model, gen_count, rng,
                         mode_name == "argmax" ? DecodeMode::Argmax : DecodeMode::Sample);
            detail::write_text(gen_out, write_records(records));
        } else if (*pca_cmd) {
            const auto real = detail::load_records(real_path);
            const auto synthetic = detail::load_records(syn_path);
            const DataSchema schema = detail::union_schema(real, synthetic);
            const ScatterDataset scatter = pca_scatter(detail::encode_all(real, schema),
                                                       detail::encode_all(synthetic, schema));
            detail::write_text(scatter_out, write_scatter_csv(scatter));
            if (!svg_out.empty()) detail::write_text(svg_out, render_scatter_svg(scatter));
        } else if (*disc_cmd) {
            const auto real = detail::load_records(disc_real);
            const auto synthetic = detail::load_records(disc_syn);
            const DataSchema schema = detail::union_schema(real, synthetic);
            RandomSource rng = seeded_rng(disc_seed);
            const DiscriminatorReport report = fit_discriminator(
                detail::encode_all(real, schema), detail::encode_all(synthetic, schema), rng);
            detail::write_text(disc_out, discriminator_report_to_json(report).dump(2) + "\n");
            std::cout << render_discriminator_table(report);
        } else if (*stats_cmd) {
            if (stats_in.empty() == compare_paths.empty())
                throw FormatError("stats: pass exactly one of --in or --compare");
            if (!stats_in.empty()) {
                const auto records = detail::load_records(stats_in);
                const MarginalReport report = marginal_report(records, infer_schema(records));
                detail::write_text(stats_out, marginal_report_to_json(report).dump(2) + "\n");
            } else {
                const auto a = detail::load_records(compare_paths[0]);
                const auto b = detail::load_records(compare_paths[1]);
                const DataSchema schema = detail::union_schema(a, b);
                const MarginalDivergence d = compare_marginals(marginal_report(a, schema),
                                                               marginal_report(b, schema));
                detail::write_text(stats_out, divergence_to_json(d).dump(2) + "\n");
            }
        } else if (*toy_cmd) {
            ToySpec spec = default_toy_spec();
            if (!toy_spec_path.empty()) {
                const std::string text = detail::read_text(toy_spec_path);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(text);
                } catch (const nlohmann::json::parse_error& e) {
                    throw FormatError(toy_spec_path + ": invalid JSON: " + e.what());
                }
                spec = toy_spec_from_json(j);
            }
            validate_toy_spec(spec);
            RandomSource rng = seeded_rng(toy_seed);
            detail::write_text(toy_out, write_records(generate_toy_dataset(spec, toy_count, rng)));
        }
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {  // FormatError, ShapeError, bad JSON, ...
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace medsynth
