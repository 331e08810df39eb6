// Acceptance checks for the full pipeline. Each numbered check prints one
// [PASS]/[FAIL] line with the measured values next to the pinned bounds;
// the process exits nonzero if any check fails.
//
// Usage: acceptance <path-to-medsynth-cli>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "medsynth/medsynth.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace medsynth;

namespace {

int g_failures = 0;

void report(int number, bool pass, const std::string& label, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", number, label.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

bool run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null";
    return std::system(cmd.c_str()) == 0;
}

Vector random_input(const FeatureLayout& layout, RandomSource& rng) {
    Vector x(layout.total_dim, 0.0);
    x[layout.gender.offset + static_cast<std::size_t>(rng.uniform_below(2))] = 1.0;
    x[layout.age.offset] = rng.uniform();
    x[layout.month.offset +
      static_cast<std::size_t>(rng.uniform_below(layout.month.length))] = 1.0;
    for (std::size_t i = 0; i < layout.symptoms.length; ++i)
        if (rng.bernoulli(0.5)) x[layout.symptoms.offset + i] = 1.0;
    return x;
}

FeatureLayout reduced_layout() {
    // A compact 10-wide layout (2 gender + 1 age + 4 month-like + 3 symptom
    // slots); the loss and gradients are generic over the layout ranges.
    return FeatureLayout{{0, 2}, {2, 1}, {3, 4}, {7, 3}, 10};
}

FeatureLayout wide_layout() {
    DataSchema schema;
    schema.symptom_vocab = {"abdominal pain", "diarrhea", "fever", "vomiting"};
    schema.age_min = 0.0;
    schema.age_max = 100.0;
    return FeatureLayout::for_schema(schema);
}

// --------------------------------------------------------------------------
// 1. Analytic gradients vs central finite differences on 5 random models.
// --------------------------------------------------------------------------
void check_gradients() {
    const auto start = std::chrono::steady_clock::now();
    RandomSource rng = seeded_rng(501);
    const std::vector<std::pair<FeatureLayout, std::size_t>> configs = {
        {reduced_layout(), 2}, {reduced_layout(), 4}, {wide_layout(), 2},
        {wide_layout(), 4},    {reduced_layout(), 2},
    };
    double worst = 0.0;
    bool pass = true;
    for (const auto& [layout, latent] : configs) {
        EncoderParams enc = init_encoder(layout.total_dim, 16, latent, rng);
        DecoderParams dec = init_decoder(layout.total_dim, 16, latent, rng);
        const Vector x = random_input(layout, rng);
        const Vector eps = rng.standard_normal_vector(latent);
        const double beta = 0.7;

        VaeGradients grads = zero_vae_gradients(enc, dec);
        elbo_backward(enc, dec, layout, 0.1, x, eps, beta, grads);
        const GradCheckReport check = gradient_check(
            [&](const Vector& p) {
                EncoderParams e = enc;
                DecoderParams d = dec;
                set_params(e, d, p);
                return negative_elbo(e, d, layout, 0.1, x, eps, beta).total;
            },
            flatten_params(enc, dec), flatten_grads(grads), 1e-5, 1e-4);
        worst = std::max(worst, check.max_rel_error);
        pass = pass && check.pass;
    }
    const double elapsed = seconds_since(start);
    pass = pass && elapsed < 60.0;
    report(1, pass, "gradient correctness",
           fmt("5 models (D 10/19, L 2/4, H 16), max rel err %.3g (< 1e-4), %.2f s (< 60 s)",
               worst, elapsed));
}

// --------------------------------------------------------------------------
// 2. Closed-form KL vs 1e6-draw Monte Carlo on 10 random posteriors.
// --------------------------------------------------------------------------
void check_kl_oracle() {
    RandomSource rng = seeded_rng(502);
    double worst_rel = 0.0;
    bool pass = true;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t latent = 1 + static_cast<std::size_t>(rng.uniform_below(4));
        GaussianLatent q;
        for (std::size_t i = 0; i < latent; ++i) {
            q.mu.push_back(rng.uniform(-2.0, 2.0));
            q.logvar.push_back(rng.uniform(-1.5, 1.5));
        }
        const double closed = kl_to_standard_normal(q);
        RandomSource mc_rng = seeded_rng(9000 + static_cast<std::uint64_t>(trial));
        const double mc = oracles::mc_kl(q.mu, q.logvar, 1000000, mc_rng);
        const double rel = std::abs(mc - closed) / closed;
        worst_rel = std::max(worst_rel, rel);
        pass = pass && rel <= 0.01;
    }
    const GaussianLatent standard{Vector(3, 0.0), Vector(3, 0.0)};
    pass = pass && kl_to_standard_normal(standard) == 0.0;
    report(2, pass, "KL oracle",
           fmt("10 posteriors (L<=4, |mu|<=2, |logvar|<=1.5), worst rel err %.4f%% "
               "(<= 1%%), KL(0,0) == 0",
               100.0 * worst_rel));
}

struct Criterion3Artifacts {
    bool ready = false;
    std::filesystem::path train_csv;
    std::filesystem::path model_json;
    std::vector<PatientRecord> train_records;
    std::vector<PatientRecord> generated;
};

// --------------------------------------------------------------------------
// 3. Full CLI pipeline at reference scale: 150 records, 90 epochs, 1000
//    samples; marginals must track the training set.
// --------------------------------------------------------------------------
Criterion3Artifacts check_distribution_matching(const std::string& cli,
                                                const std::filesystem::path& dir) {
    const auto start = std::chrono::steady_clock::now();
    Criterion3Artifacts art;
    art.train_csv = dir / "train.csv";
    art.model_json = dir / "model.json";
    const auto gen_csv = dir / "generated.csv";

    const bool cli_ok =
        run_cli(cli, "make-toy --count 150 --seed 33 --out \"" + art.train_csv.string() +
                         "\"") &&
        run_cli(cli, "train --in \"" + art.train_csv.string() +
                         "\" --diagnosis ToyDisease --epochs 90 --seed 7 --out \"" +
                         art.model_json.string() + "\"") &&
        run_cli(cli, "generate --model \"" + art.model_json.string() +
                         "\" --count 1000 --seed 21 --mode sample --out \"" +
                         gen_csv.string() + "\"");
    if (!cli_ok) {
        report(3, false, "distribution matching (CLI, 150 records / 90 epochs / 1000 samples)",
               "pipeline command failed");
        return art;
    }

    art.train_records = parse_records(testutil::read_file(art.train_csv)).records;
    art.generated = parse_records(testutil::read_file(gen_csv)).records;
    if (art.train_records.size() != 150 || art.generated.size() != 1000) {
        report(3, false, "distribution matching (CLI, 150 records / 90 epochs / 1000 samples)",
               fmt("expected 150 train / 1000 generated records, got %zu / %zu",
                   art.train_records.size(), art.generated.size()));
        return art;
    }

    const DataSchema schema = infer_schema(art.train_records);
    const MarginalReport real = marginal_report(art.train_records, schema);
    const MarginalReport syn = marginal_report(art.generated, schema);

    double worst_symptom = 0.0;
    for (const auto& [name, freq] : real.symptom_frequencies)
        worst_symptom =
            std::max(worst_symptom, std::abs(freq - syn.symptom_frequencies.at(name)));
    const double age_gap = std::abs(real.age_mean - syn.age_mean);
    const double gender_gap = std::abs(real.female_frequency - syn.female_frequency);
    const double elapsed = seconds_since(start);

    const bool pass = worst_symptom <= 0.10 && age_gap <= 5.0 && gender_gap <= 0.10 &&
                      elapsed < 300.0;
    art.ready = true;
    report(3, pass, "distribution matching (CLI, 150 records / 90 epochs / 1000 samples)",
           fmt("worst symptom gap %.3f (<= 0.10), age mean gap %.2f y (<= 5), gender gap "
               "%.3f (<= 0.10), %.1f s (< 300 s)",
               worst_symptom, age_gap, gender_gap, elapsed));
    return art;
}

// --------------------------------------------------------------------------
// 4. A logistic discriminator stays near chance on the reference model.
// --------------------------------------------------------------------------
void check_discriminator(const Criterion3Artifacts& art) {
    if (!art.ready) {
        report(4, false, "near-chance discriminability", "reference model unavailable");
        return;
    }
    const VaeModel model = load_model(art.model_json);
    RandomSource gen_rng = seeded_rng(55);
    const auto synthetic_records = generate(model, 150, gen_rng, DecodeMode::Sample);

    std::vector<FeatureVector> real_fv, syn_fv;
    for (const auto& rec : art.train_records)
        real_fv.push_back(encode_record(rec, model.schema));
    for (const auto& rec : synthetic_records)
        syn_fv.push_back(encode_record(rec, model.schema));

    int ok = 0;
    std::string aucs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomSource rng = seeded_rng(seed);
        const DiscriminatorReport r = fit_discriminator(real_fv, syn_fv, rng);
        if (r.auc <= 0.75) ++ok;
        aucs += fmt("%s%.3f", seed == 1 ? "" : " ", r.auc);
    }
    report(4, ok >= 4, "near-chance discriminability",
           fmt("150 real vs 150 generated, AUC <= 0.75 for %d/5 seeds (need >= 4); aucs: %s",
               ok, aucs.c_str()));
}

double centroid_distance(const ScatterDataset& dataset) {
    double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
    std::size_t nr = 0, ns = 0;
    for (const auto& p : dataset.points) {
        if (p.source == PointSource::Real) {
            rx += p.pc1;
            ry += p.pc2;
            ++nr;
        } else {
            sx += p.pc1;
            sy += p.pc2;
            ++ns;
        }
    }
    rx /= static_cast<double>(nr);
    ry /= static_cast<double>(nr);
    sx /= static_cast<double>(ns);
    sy /= static_cast<double>(ns);
    return std::hypot(rx - sx, ry - sy);
}

double pooled_axis_std(const ScatterDataset& dataset) {
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(dataset.points.size());
    for (const auto& p : dataset.points) {
        mx += p.pc1;
        my += p.pc2;
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0;
    for (const auto& p : dataset.points) {
        vx += (p.pc1 - mx) * (p.pc1 - mx);
        vy += (p.pc2 - my) * (p.pc2 - my);
    }
    vx /= n - 1.0;
    vy /= n - 1.0;
    return std::sqrt(0.5 * (vx + vy));
}

// --------------------------------------------------------------------------
// 5. PCA clouds drift toward the real data as training progresses.
// --------------------------------------------------------------------------
void check_pca_trend(const Criterion3Artifacts& art) {
    std::vector<PatientRecord> records = art.train_records;
    if (records.empty()) {
        RandomSource rng = seeded_rng(33);
        records = generate_toy_dataset(default_toy_spec(), 150, rng);
    }
    const DataSchema schema = infer_schema(records);
    std::vector<FeatureVector> real_fv;
    for (const auto& rec : records) real_fv.push_back(encode_record(rec, schema));

    int ok = 0;
    std::string details;
    for (std::uint64_t seed = 101; seed <= 105; ++seed) {
        VaeConfig config;
        config.input_dim = FeatureLayout::for_schema(schema).total_dim;
        config.epochs = 90;
        config.snapshot_epochs = {0, 90};
        config.seed = seed;
        RandomSource rng = seeded_rng(seed);
        VaeModel model = init_model(config, schema, records.front().diagnosis, rng);
        const TrainingTrace trace = train(model, records, config, rng);

        const ScatterDataset before = pca_scatter(real_fv, trace.snapshots[0].samples);
        const ScatterDataset after = pca_scatter(real_fv, trace.snapshots[1].samples);
        const double d0 = centroid_distance(before);
        const double d90 = centroid_distance(after);
        const double spread = pooled_axis_std(after);
        if (d90 <= 0.75 * spread && d90 < d0) ++ok;
        details += fmt("%sd0 %.3f -> d90 %.3f (cap %.3f)", seed == 101 ? "" : "; ", d0,
                       d90, 0.75 * spread);
    }
    report(5, ok >= 4, "PCA convergence trend",
           fmt("epoch-90 centroid gap under 0.75x pooled std and below epoch-0 for %d/5 "
               "seeds (need >= 4); %s",
               ok, details.c_str()));
}

// --------------------------------------------------------------------------
// 6. Power-iteration PCA vs a Jacobi eigen-decomposition oracle.
// --------------------------------------------------------------------------
void check_pca_oracle() {
    RandomSource rng = seeded_rng(506);
    double worst_eig = 0.0, worst_cos = 0.0, worst_orth = 0.0;
    bool pass = true;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_below(7));   // 2..8
        const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform_below(8)); // 1..8
        const std::size_t k = std::min(n - 1, dim);
        if (k < 1) continue;
        DenseMatrix data(n, dim);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                data.at(r, c) = rng.standard_normal() * static_cast<double>(c + 1);

        const PcaModel model = pca_fit(data, k);
        const oracles::EigenResult oracle =
            oracles::jacobi_eigen(oracles::sample_covariance(data));

        for (std::size_t i = 0; i < k; ++i) {
            const double rel = std::abs(model.eigenvalues[i] - oracle.values[i]) /
                               std::max({model.eigenvalues[i], oracle.values[i], 1e-12});
            worst_eig = std::max(worst_eig, rel);
            pass = pass && rel <= 1e-6;

            Vector oracle_vec = oracle.vectors[i];
            detail::fix_sign(oracle_vec);
            const double cos_dist = 1.0 - dot(model.components[i], oracle_vec);
            worst_cos = std::max(worst_cos, cos_dist);
            pass = pass && cos_dist <= 1e-6;
        }
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double expected = i == j ? 1.0 : 0.0;
                const double err =
                    std::abs(dot(model.components[i], model.components[j]) - expected);
                worst_orth = std::max(worst_orth, err);
                pass = pass && err <= 1e-8;
            }
    }
    report(6, pass, "PCA oracle",
           fmt("20 random matrices (n,D <= 8, k = min(n-1,D)): eigenvalue rel err %.3g "
               "(<= 1e-6), cosine distance %.3g (<= 1e-6), orthonormality err %.3g (<= 1e-8)",
               worst_eig, worst_cos, worst_orth));
}

// --------------------------------------------------------------------------
// 7. Encode -> certainty params -> argmax decode round-trips 1000 records.
// --------------------------------------------------------------------------
void check_codec_roundtrip() {
    DataSchema schema;
    schema.symptom_vocab = {"cough", "diarrhea", "fever", "headache", "rash", "vomiting"};
    schema.age_min = 0.0;
    schema.age_max = 90.0;
    const FeatureLayout layout = FeatureLayout::for_schema(schema);

    RandomSource rng = seeded_rng(507);
    std::size_t exact = 0;
    double worst_age = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        PatientRecord rec;
        rec.gender = rng.bernoulli(0.5) ? Gender::Female : Gender::Male;
        rec.age_years = std::round(rng.uniform(0.0, 90.0) * 10.0) / 10.0;
        rec.month = static_cast<Month>(rng.uniform_below(12));
        for (const auto& s : schema.symptom_vocab)
            if (rng.bernoulli(0.4)) rec.symptoms.insert(s);
        rec.diagnosis = "X";

        const FeatureVector fv = encode_record(rec, schema);
        DecodedParams certainty;
        certainty.gender_probs = detail::slice(fv.values, layout.gender);
        certainty.month_probs = detail::slice(fv.values, layout.month);
        certainty.symptom_probs = detail::slice(fv.values, layout.symptoms);
        certainty.age_mean = fv.values[layout.age.offset];

        const PatientRecord back =
            decode_params(certainty, schema, rec.diagnosis, DecodeMode::Argmax, rng);
        const double age_err = std::abs(back.age_years - rec.age_years);
        worst_age = std::max(worst_age, age_err);
        if (back.gender == rec.gender && back.month == rec.month &&
            back.symptoms == rec.symptoms && age_err <= 0.1)
            ++exact;
    }
    report(7, exact == 1000, "codec round-trip",
           fmt("%zu/1000 records preserved exactly (age within 0.1 y; worst %.3g)", exact,
               worst_age));
}

// --------------------------------------------------------------------------
// 8. Bitwise training determinism and save/load/generate persistence.
// --------------------------------------------------------------------------
void check_determinism(const std::string& cli, const std::filesystem::path& dir,
                       const Criterion3Artifacts& art) {
    bool train_identical = false;
    if (art.ready) {
        const auto a = dir / "det_a.json";
        const auto b = dir / "det_b.json";
        const std::string common = "train --in \"" + art.train_csv.string() +
                                   "\" --diagnosis ToyDisease --epochs 12 --seed 99 --out ";
        if (run_cli(cli, common + "\"" + a.string() + "\"") &&
            run_cli(cli, common + "\"" + b.string() + "\""))
            train_identical = !testutil::read_file(a).empty() &&
                              testutil::read_file(a) == testutil::read_file(b);
    }

    // save -> load -> generate equals the pre-save generation
    RandomSource data_rng = seeded_rng(60);
    const auto records = generate_toy_dataset(default_toy_spec(), 60, data_rng);
    const DataSchema schema = infer_schema(records);
    VaeConfig config;
    config.input_dim = FeatureLayout::for_schema(schema).total_dim;
    config.epochs = 8;
    config.snapshot_epochs = {};
    config.seed = 13;
    RandomSource train_rng = seeded_rng(config.seed);
    VaeModel model = init_model(config, schema, "ToyDisease", train_rng);
    train(model, records, config, train_rng);

    RandomSource gen_before = seeded_rng(77);
    const auto before = generate(model, 30, gen_before, DecodeMode::Sample);
    const auto model_path = dir / "persist.json";
    save_model(model, model_path);
    const VaeModel loaded = load_model(model_path);
    RandomSource gen_after = seeded_rng(77);
    const auto after = generate(loaded, 30, gen_after, DecodeMode::Sample);

    bool generations_equal = before.size() == after.size();
    for (std::size_t i = 0; generations_equal && i < before.size(); ++i)
        generations_equal = before[i].gender == after[i].gender &&
                            before[i].age_years == after[i].age_years &&
                            before[i].month == after[i].month &&
                            before[i].symptoms == after[i].symptoms &&
                            before[i].diagnosis == after[i].diagnosis;

    report(8, train_identical && generations_equal, "determinism and persistence",
           fmt("repeat training byte-identical: %s; save/load/generate record-identical: %s",
               train_identical ? "yes" : "no", generations_equal ? "yes" : "no"));
}

// --------------------------------------------------------------------------
// 9. The confusion table renders the reference rows verbatim.
// --------------------------------------------------------------------------
void check_report_fidelity() {
    const DiscriminatorReport r = discriminator_report_from_counts(3, 15, 7, 30);
    const std::string expected =
        "Synthetic identified as synthetic 20.0%\n"
        "Real identified as synthetic 23.3%\n"
        "Synthetic identified as real 80.0%\n";
    const std::string got = render_discriminator_table(r);
    report(9, got == expected, "report fidelity",
           got == expected ? "confusion table rows match the reference rendering verbatim"
                           : "rendered table differs from the reference rows");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-medsynth-cli>\n");
        return 2;
    }
    const std::string cli = argv[1];

    const auto ticks = std::chrono::steady_clock::now().time_since_epoch().count();
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() /
        ("medsynth-acceptance-" + std::to_string(ticks));
    std::filesystem::create_directories(dir);

    check_gradients();
    check_kl_oracle();
    const Criterion3Artifacts art = check_distribution_matching(cli, dir);
    check_discriminator(art);
    check_pca_trend(art);
    check_pca_oracle();
    check_codec_roundtrip();
    check_determinism(cli, dir, art);
    check_report_fidelity();

    std::error_code ec;
    std::filesystem::remove_all(dir, ec);

    std::printf("acceptance: %d/9 checks passed\n", 9 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
