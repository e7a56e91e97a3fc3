// tabaug: train constrained-structure WGAN/GAN augmenters on tabular data,
// run the SMOTE baseline, and drive the cross-validated experiment grids.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabaug/errors.hpp"
#include "tabaug/eval.hpp"
#include "tabaug/report.hpp"

namespace fs = std::filesystem;
using namespace tabaug;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string config_path;
    std::string data_dir = "data";
    std::uint64_t seed = 42;
    bool seed_given = false;
};

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base) {
    if (j.contains("iterations")) base.iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("batch_size")) base.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("n_critic")) base.n_critic = j.at("n_critic").get<std::size_t>();
    if (j.contains("clip_c")) base.clip_c = j.at("clip_c").get<double>();
    if (j.contains("learning_rate")) base.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("optimizer"))
        base.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("loss_kind"))
        base.loss_kind = gan_loss_from_string(j.at("loss_kind").get<std::string>());
    return base;
}

/// Config precedence: command-line flag > config file > built-in default.
ExperimentConfig load_experiment_config(const CommonOptions& options) {
    ExperimentConfig cfg;
    if (!options.config_path.empty()) {
        std::ifstream in(options.config_path);
        if (!in) throw DataError("cannot open config file: " + options.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("config file: " + std::string(e.what()));
        }
        cfg.wgan_cfg = train_config_from_json(j, cfg.wgan_cfg);
        if (j.contains("gan")) cfg.gan_cfg = train_config_from_json(j.at("gan"), cfg.gan_cfg);
        if (j.contains("hidden")) cfg.hidden = j.at("hidden").get<std::vector<std::size_t>>();
        if (j.contains("unconstrained_d"))
            cfg.unconstrained_d = j.at("unconstrained_d").get<std::vector<std::size_t>>();
        if (j.contains("folds")) cfg.folds = j.at("folds").get<std::size_t>();
        if (j.contains("smote_k")) cfg.smote_params.k = j.at("smote_k").get<std::size_t>();
        if (j.contains("r_iwgan_delta"))
            cfg.grid_r_iwgan_delta = j.at("r_iwgan_delta").get<double>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<std::size_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (options.seed_given || options.config_path.empty()) cfg.seed = options.seed;
    cfg.wgan_cfg.seed = cfg.seed;
    cfg.gan_cfg.seed = cfg.seed;
    return cfg;
}

Dataset resolve_dataset(const std::string& name_or_path, const std::string& data_dir) {
    for (const auto& descriptor : registry()) {
        if (descriptor.name == name_or_path)
            return load_dataset(descriptor, fs::path(data_dir) / descriptor.file_name);
    }
    const fs::path path(name_or_path);
    if (!fs::exists(path))
        throw DataError("'" + name_or_path + "' is neither a registry dataset name "
                        "(australian, german, pima, spect) nor an existing file");
    return load_generic(path, path.stem().string());
}

Augmenter parse_method(const std::string& method, double delta, bool allow_smote) {
    const std::string valid = allow_smote
                                  ? "smote, gan, wgan, iwgan, mwgan, swgan, r_iwgan"
                                  : "gan, wgan, iwgan, mwgan, swgan, r_iwgan";
    try {
        Augmenter augmenter = method == "r_iwgan" ? Augmenter{AugmenterKind::r_iwgan, delta}
                                                  : augmenter_from_name(method);
        if (augmenter.kind == AugmenterKind::none ||
            (!allow_smote && augmenter.kind == AugmenterKind::smote))
            throw InvalidArgument("method '" + method + "' not usable here");
        if (augmenter.kind == AugmenterKind::r_iwgan && !is_permitted_delta(augmenter.delta))
            throw InvalidArgument("r_iwgan delta must be one of +-0.10, +-0.20, +-0.30");
        return augmenter;
    } catch (const InvalidArgument&) {
        throw InvalidArgument("unknown method '" + method + "'; valid methods: " + valid);
    }
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write: " + path.string());
    out << content;
}

int cmd_augment(const CommonOptions& options, const std::string& dataset_arg,
                const std::string& method, double delta, const std::string& out_path) {
    const ExperimentConfig cfg = load_experiment_config(options);
    const Augmenter augmenter = parse_method(method, delta, /*allow_smote=*/true);
    const Dataset ds = resolve_dataset(dataset_arg, options.data_dir);

    const auto [minority, majority] = split_by_class(ds);
    const std::size_t n_needed = majority.rows - minority.rows;
    const Matrix synthetic =
        synthesize_minority(minority, n_needed, augmenter, cfg,
                            derive_seed(cfg.seed, "augment:" + ds.name + ":" +
                                                      augmenter_name(augmenter)));

    std::ostringstream os;
    os << "# fingerprint: " << fingerprint(cfg) << " dataset=" << ds.name << ":"
       << ds.fingerprint << " method=" << augmenter_name(augmenter) << "\n";
    for (std::size_t c = 0; c < ds.X.cols; ++c) os << ds.feature_names[c] << ',';
    os << "label\n";
    for (std::size_t r = 0; r < ds.X.rows; ++r) {
        for (std::size_t c = 0; c < ds.X.cols; ++c) os << format6(ds.X(r, c)) << ',';
        os << ds.y[r] << "\n";
    }
    for (std::size_t r = 0; r < synthetic.rows; ++r) {
        for (std::size_t c = 0; c < synthetic.cols; ++c) os << format6(synthetic(r, c)) << ',';
        os << ds.minority_label << "\n";
    }
    write_file(out_path, os.str());
    std::cout << "wrote " << out_path << " (" << ds.X.rows << " original + " << synthetic.rows
              << " synthetic rows)\n";
    return kExitOk;
}

int cmd_train(const CommonOptions& options, const std::string& dataset_arg,
              const std::string& method, double delta, const std::string& out_path,
              const std::string& trace_path) {
    const ExperimentConfig cfg = load_experiment_config(options);
    const Augmenter augmenter = parse_method(method, delta, /*allow_smote=*/false);
    const Dataset ds = resolve_dataset(dataset_arg, options.data_dir);

    const Matrix minority = split_by_class(ds).first;
    const ArchSpec spec = arch_for_augmenter(augmenter, ds.X.cols, cfg);
    TrainConfig tc = augmenter.kind == AugmenterKind::gan ? cfg.gan_cfg : cfg.wgan_cfg;
    tc.seed = derive_seed(cfg.seed, "train:" + ds.name + ":" + augmenter_name(augmenter));
    tc.batch_size = std::min(tc.batch_size, minority.rows);

    const auto [model, trace] = augmenter.kind == AugmenterKind::gan
                                    ? train_gan(minority, spec, tc)
                                    : train_wgan(minority, spec, tc);

    auto j = nlohmann::ordered_json::parse(to_json(model));
    j["fingerprint"] = fingerprint(cfg) + " dataset=" + ds.name + ":" + ds.fingerprint;
    write_file(out_path, j.dump(2) + "\n");

    if (!trace_path.empty()) {
        std::ostringstream os;
        os << "# fingerprint: " << fingerprint(cfg) << " dataset=" << ds.name << ":"
           << ds.fingerprint << " method=" << augmenter_name(augmenter) << "\n";
        write_trace_csv(os, trace);
        write_file(trace_path, os.str());
    }
    std::cout << "trained " << augmenter_name(augmenter) << " on " << ds.name << " ("
              << minority.rows << " minority rows, " << tc.iterations << " iterations)\n";
    return kExitOk;
}

int cmd_grid(const CommonOptions& options, const std::string& datasets_arg,
             const std::string& out_dir, std::size_t threads, bool threads_given) {
    ExperimentConfig cfg = load_experiment_config(options);
    if (threads_given) cfg.threads = threads;

    std::vector<Dataset> datasets;
    if (datasets_arg == "all") {
        for (const auto& descriptor : registry())
            datasets.push_back(
                load_dataset(descriptor, fs::path(options.data_dir) / descriptor.file_name));
    } else {
        std::istringstream ss(datasets_arg);
        std::string token;
        while (std::getline(ss, token, ','))
            if (!token.empty()) datasets.push_back(resolve_dataset(token, options.data_dir));
    }
    if (datasets.empty()) throw InvalidArgument("grid: no datasets given");

    const std::vector<Augmenter> augmenters = {
        {AugmenterKind::none, 0.0},   {AugmenterKind::smote, 0.0},
        {AugmenterKind::gan, 0.0},    {AugmenterKind::wgan, 0.0},
        {AugmenterKind::iwgan, 0.0},  {AugmenterKind::mwgan, 0.0},
        {AugmenterKind::swgan, 0.0},  {AugmenterKind::r_iwgan, cfg.grid_r_iwgan_delta},
    };
    const std::vector<ClassifierKind> classifiers = {
        ClassifierKind::knn, ClassifierKind::ann, ClassifierKind::svm, ClassifierKind::rf,
        ClassifierKind::gbc};

    const ExperimentGrid grid = run_grid(datasets, augmenters, classifiers, cfg.folds, cfg);
    const GridSummary summary = summarize(grid);

    std::ostringstream grid_os;
    write_grid_csv(grid_os, grid);
    write_file(fs::path(out_dir) / "grid.csv", grid_os.str());
    std::ostringstream summary_os;
    write_summary_csv(summary_os, grid, summary);
    write_file(fs::path(out_dir) / "summary.csv", summary_os.str());

    std::cout << "grid: " << grid.cells.size() << " cells over " << datasets.size()
              << " datasets\n"
              << "constrained improved over wgan in " << summary.improved_over_wgan << "/"
              << summary.groups_evaluated << " groups (published reference: 17/20)\n"
              << "iwgan best overall in " << summary.iwgan_best << "/"
              << summary.groups_evaluated << " groups (published reference: 15/20)\n";
    for (const auto& group : summary.excluded_groups)
        std::cout << "excluded (failed cells): " << group << "\n";
    std::cout << "wrote " << (fs::path(out_dir) / "grid.csv").string() << ", "
              << (fs::path(out_dir) / "summary.csv").string() << "\n";
    return kExitOk;
}

int cmd_convergence(const CommonOptions& options, const std::string& dataset_arg,
                    const std::string& out_dir) {
    const ExperimentConfig cfg = load_experiment_config(options);
    const Dataset ds = resolve_dataset(dataset_arg, options.data_dir);
    const auto [wgan_trace, iwgan_trace] = convergence_compare(ds, cfg);

    std::ostringstream os;
    write_convergence_csv(os, wgan_trace, iwgan_trace,
                          fingerprint(cfg) + " dataset=" + ds.name + ":" + ds.fingerprint);
    const fs::path out_path = fs::path(out_dir) / ("convergence_" + ds.name + ".csv");
    write_file(out_path, os.str());

    std::cout << "initial generator-loss ratio (iwgan/wgan): "
              << format6(initial_loss_ratio(wgan_trace, iwgan_trace))
              << " (published reference: about 1/10)\n"
              << "wrote " << out_path.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOptions& options, const std::string& dataset_arg,
              const std::string& out_dir) {
    const ExperimentConfig cfg = load_experiment_config(options);
    const Dataset ds = resolve_dataset(dataset_arg, options.data_dir);
    const std::vector<ClassifierKind> classifiers = {
        ClassifierKind::knn, ClassifierKind::ann, ClassifierKind::svm, ClassifierKind::rf,
        ClassifierKind::gbc};
    const std::vector<double> deltas(kRelativeDeltas.begin(), kRelativeDeltas.end());

    const SweepResult sweep = relative_iso_sweep(ds, classifiers, deltas, cfg.folds, cfg);

    std::ostringstream os;
    write_sweep_csv(os, sweep);
    const fs::path out_path = fs::path(out_dir) / "sweep.csv";
    write_file(out_path, os.str());

    for (const auto& [clf, rho] : sweep.trend)
        std::cout << "trend " << to_string(clf) << ": spearman(|delta|, auc) = " << format6(rho)
                  << "\n";
    std::cout << "wrote " << out_path.string() << "\n";
    return kExitOk;
}

// Self-test: quick versions of the numeric cross-checks (rank AUC vs pair
// counting, analytic vs numeric gradients, builder/validator round trips).
int cmd_check() {
    bool all_ok = true;
    const auto report = [&](const char* name, bool ok) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        all_ok = all_ok && ok;
    };

    {
        Rng rng(7);
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            const std::size_t n = 2 + rng.below(60);
            std::vector<double> scores(n);
            std::vector<int> labels(n);
            bool has_pos = false, has_neg = false;
            for (std::size_t i = 0; i < n; ++i) {
                scores[i] = (rng.below(8)) / 4.0; // deliberate ties
                labels[i] = rng.below(2) ? 1 : 0;
                (labels[i] ? has_pos : has_neg) = true;
            }
            if (!has_pos || !has_neg) continue;
            double pairs = 0.0, wins = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (labels[i] == 1 && labels[j] == 0) {
                        pairs += 1.0;
                        if (scores[i] > scores[j]) wins += 1.0;
                        else if (scores[i] == scores[j]) wins += 0.5;
                    }
            ok = std::abs(auc(scores, labels) - wins / pairs) < 1e-12;
        }
        report("auc rank statistic == brute-force pair counting", ok);
    }

    {
        Rng rng(11);
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial) {
            const std::size_t in = 1 + rng.below(6), hidden = 1 + rng.below(8);
            MlpParams net = init_mlp({in, hidden, 1}, Activation::tanh, Activation::sigmoid, rng);
            Matrix batch(4, in), target(4, 1);
            for (double& v : batch.data) v = rng.uniform(-1.0, 1.0);
            for (double& v : target.data) v = rng.below(2);
            ok = gradient_check(net, batch, LossKind::logistic, target) < 1e-6;
        }
        report("analytic gradients match central differences", ok);
    }

    {
        bool ok = true;
        for (std::size_t d : {2, 8, 14}) {
            ok = ok && validate(build_isomorphic(d, {64, 32})).empty();
            ok = ok && validate(build_mirror(d, {64, 32})).empty();
            ok = ok && validate(build_self_symmetric(d, {64, 32})).empty();
            for (double delta : kRelativeDeltas)
                ok = ok && validate(build_relative_isomorphic(d, {64, 32}, delta)).empty();
        }
        const auto plus10 = build_relative_isomorphic(8, {64, 32}, 0.10);
        const auto minus30 = build_relative_isomorphic(8, {64, 32}, -0.30);
        ok = ok && plus10.d_hidden() == std::vector<std::size_t>{70, 35};
        ok = ok && minus30.d_hidden() == std::vector<std::size_t>{45, 22};
        report("architecture builders satisfy their validators", ok);
    }

    {
        Rng rng(21);
        MlpParams net = init_mlp({4, 16, 4}, Activation::relu, Activation::identity, rng);
        MlpParams once = net;
        clip_weights(once, 0.01);
        MlpParams twice = once;
        clip_weights(twice, 0.01);
        bool ok = true;
        for (std::size_t l = 0; l < once.weights.size(); ++l)
            ok = ok && once.weights[l].data == twice.weights[l].data &&
                 once.biases[l] == twice.biases[l];
        report("weight clipping is idempotent", ok);
    }

    return all_ok ? kExitOk : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular data augmentation with constrained-structure WGANs"};
    app.require_subcommand(1);

    CommonOptions options;
    std::string dataset_arg, method = "wgan", out_path, trace_path, out_dir = ".";
    std::string datasets_arg = "all";
    double delta = 0.10;
    std::size_t threads = 1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", options.config_path, "JSON config file");
        cmd->add_option("--data-dir", options.data_dir,
                        "directory with the registry dataset files (default: data)");
        cmd->add_option("--seed", options.seed, "master seed (default 42)")
            ->each([&](const std::string&) { options.seed_given = true; });
    };

    auto* augment = app.add_subcommand("augment", "balance a dataset and write augmented CSV");
    augment->add_option("--dataset", dataset_arg, "registry name or file path")->required();
    augment->add_option("--method", method, "smote|gan|wgan|iwgan|mwgan|swgan|r_iwgan");
    augment->add_option("--delta", delta, "r_iwgan width delta (default +0.10)");
    augment->add_option("--out", out_path, "output CSV")->required();
    add_common(augment);

    auto* train = app.add_subcommand("train", "train one generator and save the model");
    train->add_option("--dataset", dataset_arg, "registry name or file path")->required();
    train->add_option("--method", method, "gan|wgan|iwgan|mwgan|swgan|r_iwgan");
    train->add_option("--delta", delta, "r_iwgan width delta (default +0.10)");
    train->add_option("--out", out_path, "output model JSON")->required();
    train->add_option("--trace", trace_path, "optional loss-trace CSV");
    add_common(train);

    auto* grid = app.add_subcommand("grid", "datasets x augmenters x classifiers AUC grid");
    grid->add_option("--datasets", datasets_arg, "'all' or comma-separated names/paths");
    grid->add_option("--out", out_dir, "output directory")->required();
    auto* threads_opt = grid->add_option("--threads", threads, "worker threads (default 1)");
    add_common(grid);

    auto* convergence =
        app.add_subcommand("convergence", "wgan vs iwgan generator-loss traces");
    convergence->add_option("--dataset", dataset_arg, "registry name or file path")->required();
    convergence->add_option("--out", out_dir, "output directory")->required();
    add_common(convergence);

    auto* sweep = app.add_subcommand("sweep", "r_iwgan node-perturbation sweep");
    sweep->add_option("--dataset", dataset_arg, "registry name or file path")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();
    add_common(sweep);

    app.add_subcommand("check", "run built-in numeric self-tests");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(augment))
            return cmd_augment(options, dataset_arg, method, delta, out_path);
        if (app.got_subcommand(train))
            return cmd_train(options, dataset_arg, method, delta, out_path, trace_path);
        if (app.got_subcommand(grid))
            return cmd_grid(options, datasets_arg, out_dir, threads, threads_opt->count() > 0);
        if (app.got_subcommand(convergence))
            return cmd_convergence(options, dataset_arg, out_dir);
        if (app.got_subcommand(sweep)) return cmd_sweep(options, dataset_arg, out_dir);
        return cmd_check();
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericFault& e) {
        std::cerr << "numeric fault: " << e.what() << "\n";
        return kExitNumeric;
    }
}
