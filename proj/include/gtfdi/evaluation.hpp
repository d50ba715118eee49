#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gtfdi/classifiers.hpp"
#include "gtfdi/dataset.hpp"

namespace gtfdi {

// rows = actual class, columns = predicted class, raw counts
struct ConfusionMatrix {
    std::vector<std::vector<long>> counts;
    std::vector<std::string> class_names;

    long total() const;
    long trace() const;
    // row-normalized percentage view matching the usual reporting layout
    std::string render_percent() const;
    std::string to_csv() const;
};

ConfusionMatrix confusion(const std::vector<int>& actual, const std::vector<int>& predicted,
                          int n_classes, const std::vector<std::string>& class_names = {});

double accuracy(const ConfusionMatrix& cm);             // percent
double f1(const ConfusionMatrix& cm, int positive);     // 2TP/(2TP+FP+FN), 0 when undefined
double macro_f1(const ConfusionMatrix& cm);
double precision_of(const ConfusionMatrix& cm, int cls);
double recall_of(const ConfusionMatrix& cm, int cls);

// A trained predictor over raw (unnormalized) feature vectors.
using Predictor = std::function<int(const std::array<double, kNumSignals>&)>;
// Fits a predictor on a training set; the fitted artifact must normalize
// internally, exactly like the TrainedModel-based fitters do.
using Fitter = std::function<Predictor(const Dataset&)>;

struct CvResult {
    std::vector<double> fold_accuracy;  // percent, one per fold
    double mean = 0.0;
    double stddev = 0.0;
};

CvResult cross_validate(const Fitter& fitter, const Dataset& dataset, int k,
                        std::uint64_t seed);
CvResult cross_validate(Algo algo, const Dataset& dataset, int k, std::uint64_t seed,
                        const Hyperparams& hp = {});

struct CompareRow {
    std::string classifier;
    bool ok = false;
    std::string error;
    double accuracy = 0.0;  // percent on the test set
    double macro_f1 = 0.0;
    double training_time_s = 0.0;
    std::vector<double> precision;  // per class
    std::vector<double> recall;
    ConfusionMatrix cm;
};

struct MetricsReport {
    std::vector<CompareRow> rows;  // sorted by accuracy, failures last

    std::string render_text() const;  // aligned table
    std::string to_csv() const;       // classifier,accuracy,f1,train_time_s
};

// Fit every algorithm on `train`, score on `test`. A failed fit marks its row
// and the others proceed.
MetricsReport compare(const std::vector<Algo>& algos, const Dataset& train,
                      const Dataset& test, const Hyperparams& hp = {},
                      std::uint64_t seed = 0);

}  // namespace gtfdi
