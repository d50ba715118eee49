#include "gtfdi/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "gtfdi/classifiers.hpp"
#include "gtfdi/config.hpp"
#include "gtfdi/dataset.hpp"
#include "gtfdi/evaluation.hpp"
#include "gtfdi/monitor.hpp"
#include "gtfdi/sim.hpp"
#include "gtfdi/util.hpp"

namespace gtfdi::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

void write_output(const std::string& path, const std::string& content) {
    ensure_parent_dir(path);
    write_file(path, content);
}

std::string file_checksum(const std::string& path) { return to_hex(fnv1a64(read_file(path))); }

CommandProfile parse_profile(double constant, const std::string& steps,
                             const std::string& ramps) {
    if (!steps.empty() && !ramps.empty())
        throw std::invalid_argument("--steps and --ramps are mutually exclusive");
    const std::string& spec = steps.empty() ? ramps : steps;
    if (spec.empty()) return CommandProfile::constant(constant);
    std::vector<std::pair<double, double>> pts;
    for (const auto& part : split(spec, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 2)
            throw std::invalid_argument("profile point '" + part + "': expected t:value");
        pts.emplace_back(parse_double(fields[0]), parse_double(fields[1]));
    }
    return CommandProfile(pts, steps.empty() ? CommandProfile::Interp::Linear
                                             : CommandProfile::Interp::Hold);
}

struct HpFlags {
    Hyperparams hp;
    void attach(CLI::App* cmd) {
        cmd->add_option("--lda-shrinkage", hp.lda_shrinkage, "LDA covariance shrinkage");
        cmd->add_option("--svm-c", hp.svm_c, "SVM regularization C");
        cmd->add_option("--svm-epochs", hp.svm_epochs, "SVM training epochs");
        cmd->add_option("--svm-eta0", hp.svm_eta0, "SVM initial learning rate");
        cmd->add_option("--knn-k", hp.knn_k, "KNN neighbor count");
        cmd->add_option("--tree-max-depth", hp.tree_max_depth, "CART maximum depth");
        cmd->add_option("--tree-min-leaf", hp.tree_min_leaf, "CART minimum leaf size");
    }
};

int cmd_simulate(const std::string& out, double duration, double dt, std::uint64_t seed,
                 double command, const std::string& steps, const std::string& ramps,
                 const std::string& faults_path, const std::string& params_path,
                 double noise) {
    const EngineParams params =
        params_path.empty() ? EngineParams{} : load_params(params_path);
    FaultSchedule schedule;
    schedule.noise_level = 0.0;
    if (!faults_path.empty()) schedule = schedule_from_text(read_file(faults_path));
    if (noise >= 0.0) schedule.noise_level = noise;

    const CommandProfile profile = parse_profile(command, steps, ramps);
    const Trajectory traj = simulate(profile, duration, dt, params, schedule, seed);
    write_output(out, trajectory_to_csv(traj));
    std::cout << "wrote " << traj.size() << " samples to " << out << "\n";
    return 0;
}

int cmd_gen_dataset(const std::string& out, const std::string& scenario_str, int runs,
                    const std::string& role, double duration, double dt, std::uint64_t seed,
                    double noise, int jobs, const std::string& corr_out) {
    const Scenario scenario = scenario_from_name(scenario_str);
    const ScenarioInfo info = scenario_info(scenario);
    if (role != "train" && role != "test")
        throw std::invalid_argument("--role must be train or test");
    const bool is_test = role == "test";
    if (runs <= 0) runs = is_test ? info.default_test_runs : info.default_train_runs;
    // decorrelate the test split from the train split drawn with the same seed
    const std::uint64_t eff_seed = is_test ? seed ^ 0x7e57da7aULL : seed;
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());

    const Dataset ds =
        generate_dataset(scenario, runs, duration, dt, eff_seed, noise, jobs, is_test);
    write_output(out, dataset_to_csv(ds));
    if (!corr_out.empty()) write_output(corr_out, correlation_matrix(ds).to_csv());

    json meta;
    meta["command"] = "gen-dataset";
    meta["version"] = kVersion;
    meta["scenario"] = ds.scenario;
    meta["class_names"] = ds.class_names;
    meta["seed"] = seed;
    meta["role"] = role;
    meta["runs"] = runs;
    meta["duration"] = duration;
    meta["dt"] = dt;
    meta["noise"] = noise;
    meta["outputs"] = {{fs::path(out).filename().string(), file_checksum(out)}};
    write_file(out + ".meta.json", meta.dump(1) + "\n");

    std::cout << "wrote " << ds.size() << " samples (" << runs << " runs, scenario "
              << ds.scenario << ") to " << out << "\n";
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& out,
              const std::string& algo_str, std::uint64_t seed, const Hyperparams& hp,
              const std::string& positive_class, const std::string& norm_out) {
    Dataset ds = load_dataset(data_path);
    if (!positive_class.empty()) {
        int cls = -1;
        for (int c = 0; c < ds.n_classes(); ++c)
            if (ds.class_names[c] == positive_class) cls = c;
        if (cls <= 0)
            throw std::invalid_argument("--positive-class '" + positive_class +
                                        "' not found among fault classes");
        ds = relabel_binary(ds, cls, positive_class);
    }
    const Algo algo = algo_from_name(algo_str);
    TrainedModel model = fit(algo, ds, hp, seed);
    const double train_time = model.training_time_s;
    // output files must be byte-identical for identical flags and seed;
    // wall-clock time goes to stdout, not into the artifact
    model.training_time_s = 0.0;
    ensure_parent_dir(out);
    save_model(model, out);
    if (!norm_out.empty()) write_output(norm_out, model.norm.to_json());

    json manifest;
    manifest["command"] = "train";
    manifest["version"] = kVersion;
    manifest["algorithm"] = algo_str;
    manifest["data"] = {{"file", fs::path(data_path).filename().string()},
                        {"checksum", file_checksum(data_path)}};
    manifest["seed"] = seed;
    manifest["positive_class"] = positive_class;
    manifest["outputs"] = {{fs::path(out).filename().string(), file_checksum(out)}};
    write_file(out + ".manifest.json", manifest.dump(1) + "\n");

    std::cout << "trained " << algo_str << " on " << ds.size() << " samples in "
              << fmt6(train_time) << " s -> " << out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& cm_out, int cv_k, std::uint64_t seed,
                 const Hyperparams& hp) {
    const TrainedModel model = load_model(model_path);
    const Dataset ds = load_dataset(data_path);
    if (static_cast<int>(model.class_names.size()) < ds.n_classes())
        throw std::invalid_argument("evaluate: dataset has more classes than the model");

    std::vector<int> actual, predicted;
    actual.reserve(ds.size());
    for (const auto& s : ds.samples) actual.push_back(s.label);
    predicted = predict_batch(model, ds);
    const ConfusionMatrix cm = confusion(actual, predicted,
                                         static_cast<int>(model.class_names.size()),
                                         model.class_names);

    std::cout << "accuracy: " << fmt6(accuracy(cm)) << " %\n";
    std::cout << "macro F1: " << fmt6(macro_f1(cm)) << "\n";
    std::cout << "confusion (row-normalized %):\n" << cm.render_percent();
    if (!cm_out.empty()) {
        write_output(cm_out, cm.to_csv());
        std::cout << "confusion counts written to " << cm_out << "\n";
    }
    if (cv_k > 0) {
        const CvResult cv = cross_validate(model.algo, ds, cv_k, seed, hp);
        std::cout << cv_k << "-fold CV on " << data_path << " (" << algo_name(model.algo)
                  << ", refit per fold): mean " << fmt6(cv.mean) << " %, std "
                  << fmt6(cv.stddev) << " %\n  folds:";
        for (double a : cv.fold_accuracy) std::cout << " " << fmt6(a);
        std::cout << "\n";
    }
    return 0;
}

int cmd_compare(const std::string& train_path, const std::string& test_path,
                const std::string& algos_str, std::uint64_t seed, const Hyperparams& hp,
                const std::string& out_csv, const std::string& out_table, int cv_k) {
    const Dataset train = load_dataset(train_path);
    const Dataset test = load_dataset(test_path);
    std::vector<Algo> algos;
    for (const auto& name : split(algos_str, ',')) algos.push_back(algo_from_name(trim(name)));

    const MetricsReport report = compare(algos, train, test, hp, seed);
    std::cout << report.render_text();
    if (cv_k > 0) {
        std::cout << cv_k << "-fold CV accuracy on the training set:\n";
        for (Algo a : algos) {
            const CvResult cv = cross_validate(a, train, cv_k, seed, hp);
            std::cout << "  " << algo_name(a) << ": mean " << fmt6(cv.mean) << " %, std "
                      << fmt6(cv.stddev) << " %\n";
        }
    }
    if (!out_csv.empty()) {
        write_output(out_csv, report.to_csv());
        json manifest;
        manifest["command"] = "compare";
        manifest["version"] = kVersion;
        manifest["train"] = {{"file", fs::path(train_path).filename().string()},
                             {"checksum", file_checksum(train_path)}};
        manifest["test"] = {{"file", fs::path(test_path).filename().string()},
                            {"checksum", file_checksum(test_path)}};
        manifest["seed"] = seed;
        manifest["outputs"] = {{fs::path(out_csv).filename().string(), file_checksum(out_csv)}};
        write_file(out_csv + ".manifest.json", manifest.dump(1) + "\n");
    }
    if (!out_table.empty()) write_output(out_table, report.render_text());
    return 0;
}

int cmd_monitor(const std::string& bank_path, const std::string& input,
                const std::string& format_str, const std::string& out_path,
                const std::string& summary_path, int debounce) {
    const Bank bank = build_bank(bank_config_from_text(read_file(bank_path)));
    StreamFormat format = StreamFormat::Auto;
    if (format_str == "csv")
        format = StreamFormat::Csv;
    else if (format_str == "jsonl")
        format = StreamFormat::Jsonl;
    else if (format_str != "auto")
        throw std::invalid_argument("--format must be auto, csv or jsonl");

    std::ifstream file_in;
    std::istream* in = &std::cin;
    if (input != "-") {
        file_in.open(input);
        if (!file_in) throw std::runtime_error("cannot open input: " + input);
        in = &file_in;
    }
    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!out_path.empty() && out_path != "-") {
        ensure_parent_dir(out_path);
        file_out.open(out_path);
        if (!file_out) throw std::runtime_error("cannot open output: " + out_path);
        out = &file_out;
    }

    const MonitorSummary summary = monitor_stream(*in, bank, *out, format, debounce);
    const std::string summary_json = summary.to_json();
    if (!summary_path.empty())
        write_output(summary_path, summary_json);
    else
        std::cout << summary_json;
    return summary.any_fault() ? 2 : 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"fault detection and isolation toolkit for a desk-scale turbojet"};
    app.name("gtfdi");
    app.require_subcommand(1);
    int exit_code = 0;

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the engine and write a trajectory CSV");
    std::string sim_out, sim_steps, sim_ramps, sim_faults, sim_params;
    double sim_duration = 100.0, sim_dt = 0.1, sim_command = 0.6, sim_noise = -1.0;
    std::uint64_t sim_seed = 0;
    sim->add_option("-o,--output", sim_out, "trajectory CSV path")->required();
    sim->add_option("--duration", sim_duration, "simulated seconds (default 100)");
    sim->add_option("--dt", sim_dt, "sample period in seconds (default 0.1)");
    sim->add_option("--seed", sim_seed, "noise seed");
    sim->add_option("--command", sim_command, "constant throttle command in [0,1]");
    sim->add_option("--steps", sim_steps, "stepped profile, e.g. 0:0.5,30:0.8");
    sim->add_option("--ramps", sim_ramps, "ramped profile, e.g. 0:0.5,50:0.8");
    sim->add_option("--faults", sim_faults, "fault schedule file");
    sim->add_option("--params", sim_params, "engine parameter key=value file");
    sim->add_option("--noise", sim_noise, "override measurement noise level");
    sim->callback([&] {
        exit_code = cmd_simulate(sim_out, sim_duration, sim_dt, sim_seed, sim_command,
                                 sim_steps, sim_ramps, sim_faults, sim_params, sim_noise);
    });

    // gen-dataset
    auto* gen = app.add_subcommand("gen-dataset", "generate a labeled fault dataset");
    std::string gen_out, gen_scenario, gen_corr, gen_role = "train";
    int gen_runs = 0, gen_jobs = 0;
    double gen_duration = 100.0, gen_dt = 0.1, gen_noise = 0.02;
    std::uint64_t gen_seed = 0;
    gen->add_option("-o,--output", gen_out, "dataset CSV path")->required();
    gen->add_option("--scenario", gen_scenario, "FD001, FD002, T2 or T3")->required();
    gen->add_option("--runs", gen_runs, "number of runs (default from scenario/role)");
    gen->add_option("--role", gen_role, "train or test (default train)");
    gen->add_option("--duration", gen_duration, "seconds per run (default 100)");
    gen->add_option("--dt", gen_dt, "sample period (default 0.1)");
    gen->add_option("--seed", gen_seed, "master seed");
    gen->add_option("--noise", gen_noise, "measurement noise level (default 0.02)");
    gen->add_option("--jobs", gen_jobs, "parallel runs (default: hardware)");
    gen->add_option("--corr-out", gen_corr, "write the feature correlation matrix CSV here");
    gen->callback([&] {
        exit_code = cmd_gen_dataset(gen_out, gen_scenario, gen_runs, gen_role, gen_duration,
                                    gen_dt, gen_seed, gen_noise, gen_jobs, gen_corr);
    });

    // train
    auto* train = app.add_subcommand("train", "fit a classifier and save the model");
    std::string train_data, train_out, train_algo, train_positive, train_norm;
    std::uint64_t train_seed = 0;
    HpFlags train_hp;
    train->add_option("--data", train_data, "training dataset CSV")->required();
    train->add_option("-o,--output", train_out, "model JSON path")->required();
    train->add_option("--algo", train_algo, "lda, svm, knn or tree")->required();
    train->add_option("--seed", train_seed, "training seed (SVM shuffling)");
    train->add_option("--positive-class", train_positive,
                      "binarize labels: this class -> faulty, rest -> healthy");
    train->add_option("--norm-out", train_norm,
                      "write the fitted normalization stats JSON here");
    train_hp.attach(train);
    train->callback([&] {
        exit_code = cmd_train(train_data, train_out, train_algo, train_seed, train_hp.hp,
                              train_positive, train_norm);
    });

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a model on a labeled dataset");
    std::string eval_model, eval_data, eval_cm;
    int eval_cv = 0;
    std::uint64_t eval_seed = 0;
    HpFlags eval_hp;
    eval->add_option("--model", eval_model, "model JSON path")->required();
    eval->add_option("--data", eval_data, "labeled dataset CSV")->required();
    eval->add_option("--cm-out", eval_cm, "write confusion counts CSV here");
    eval->add_option("--cv", eval_cv, "also run k-fold cross-validation (refits)");
    eval->add_option("--seed", eval_seed, "fold shuffling seed");
    eval_hp.attach(eval);
    eval->callback([&] {
        exit_code = cmd_evaluate(eval_model, eval_data, eval_cm, eval_cv, eval_seed,
                                 eval_hp.hp);
    });

    // compare
    auto* cmp = app.add_subcommand("compare", "train and score several classifiers");
    std::string cmp_train, cmp_test, cmp_algos = "lda,svm,knn,tree", cmp_csv, cmp_table;
    int cmp_cv = 0;
    std::uint64_t cmp_seed = 0;
    HpFlags cmp_hp;
    cmp->add_option("--train", cmp_train, "training dataset CSV")->required();
    cmp->add_option("--test", cmp_test, "test dataset CSV")->required();
    cmp->add_option("--algos", cmp_algos, "comma list (default lda,svm,knn,tree)");
    cmp->add_option("--seed", cmp_seed, "training seed");
    cmp->add_option("-o,--output", cmp_csv, "report CSV path");
    cmp->add_option("--table", cmp_table, "write the aligned text table here");
    cmp->add_option("--cv", cmp_cv, "also report k-fold CV on the training set");
    cmp_hp.attach(cmp);
    cmp->callback([&] {
        exit_code = cmd_compare(cmp_train, cmp_test, cmp_algos, cmp_seed, cmp_hp.hp, cmp_csv,
                                cmp_table, cmp_cv);
    });

    // monitor
    auto* mon = app.add_subcommand("monitor", "watch a telemetry stream with a model bank");
    std::string mon_bank, mon_input = "-", mon_format = "auto", mon_out, mon_summary;
    int mon_debounce = 0;
    mon->add_option("--bank", mon_bank, "bank config file")->required();
    mon->add_option("--input", mon_input, "trajectory CSV/JSONL file, or - for stdin");
    mon->add_option("--format", mon_format, "auto, csv or jsonl (default auto)");
    mon->add_option("-o,--output", mon_out, "status JSONL path (default stdout)");
    mon->add_option("--summary", mon_summary, "write the final summary JSON here");
    mon->add_option("--debounce", mon_debounce,
                    "override consecutive-sample debounce (1 = per-sample lamp)");
    mon->callback([&] {
        exit_code = cmd_monitor(mon_bank, mon_input, mon_format, mon_out, mon_summary,
                                mon_debounce);
    });

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run 'gtfdi --help' for usage\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

}  // namespace gtfdi::cli
