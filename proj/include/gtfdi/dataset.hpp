#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gtfdi/engine.hpp"
#include "gtfdi/sim.hpp"

namespace gtfdi {

struct Sample {
    std::array<double, kNumSignals> features{};
    int label = 0;  // 0 = healthy
    double t = 0.0;
    int run_id = 0;
};

struct NormStats {
    std::array<double, kNumSignals> mean{};
    std::array<double, kNumSignals> stddev{};
    std::array<bool, kNumSignals> retained{};

    std::string to_json() const;
    static NormStats from_json(const std::string& json_text);
};

struct Dataset {
    std::vector<Sample> samples;
    std::vector<std::string> class_names{"Healthy"};
    std::optional<NormStats> norm;  // present once normalized
    std::string scenario;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }
};

// The two benchmark scenarios plus the single-sensor study cases.
enum class Scenario { FD001, FD002, T2Sensor, T3Sensor };

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

struct ScenarioInfo {
    std::vector<std::string> class_names;
    int default_train_runs;
    int default_test_runs;
};
ScenarioInfo scenario_info(Scenario s);

// Per run: a random command profile over the scenario's operating band, a
// fault class (round-robin balanced, shuffled), a magnitude from the class's
// range and a random onset window; fault-active samples carry the class
// label. `test_role` selects the scenario's held-out session envelope, which
// for the turbine-inlet study is a shifted slice of the band.
Dataset generate_dataset(Scenario scenario, int n_runs, double duration, double dt,
                         std::uint64_t seed, double noise_level = 0.02, int jobs = 1,
                         bool test_role = false);

struct CleanReport {
    struct Dropped {
        int run_id;
        double t;
    };
    struct Winsorized {
        int run_id;
        double t;
        int feature;
        double old_value;
        double new_value;
    };
    std::vector<Dropped> dropped;
    std::vector<Winsorized> winsorized;
};

// Drop rows with non-finite entries and clamp per-run outliers beyond six
// standard deviations of the run median. Errors out if more than 10% of the
// rows are lost.
std::pair<Dataset, CleanReport> clean(const Dataset& dataset);

NormStats normalize_fit(const Dataset& dataset);
Dataset normalize_apply(const Dataset& dataset, const NormStats& stats);
Dataset denormalize_apply(const Dataset& dataset, const NormStats& stats);
std::array<double, kNumSignals> normalize_features(const std::array<double, kNumSignals>& x,
                                                   const NormStats& stats);

struct CorrelationMatrix {
    std::array<std::array<double, kNumSignals>, kNumSignals> r{};
    std::array<bool, kNumSignals> constant{};

    std::string to_csv() const;
};
CorrelationMatrix correlation_matrix(const Dataset& dataset);

// Stratified k-fold: (train_indices, validation_indices) per fold.
std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(const Dataset& dataset,
                                                                       int k,
                                                                       std::uint64_t seed);

// Binary view for the per-component monitor models: positive_class -> 1,
// everything else -> 0.
Dataset relabel_binary(const Dataset& dataset, int positive_class,
                       const std::string& positive_name = "Faulty");

Dataset subset(const Dataset& dataset, const std::vector<int>& indices);

// header `t,mf,...,N,label,run_id`
std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(const std::string& csv,
                         const std::vector<std::string>& class_names = {});
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);  // picks up `<path>.meta.json` if present

std::uint64_t dataset_checksum(const Dataset& dataset);

}  // namespace gtfdi
