#include "gtfdi/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "gtfdi/util.hpp"

namespace gtfdi {

long ConfusionMatrix::total() const {
    long t = 0;
    for (const auto& row : counts)
        for (long v : row) t += v;
    return t;
}

long ConfusionMatrix::trace() const {
    long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

ConfusionMatrix confusion(const std::vector<int>& actual, const std::vector<int>& predicted,
                          int n_classes, const std::vector<std::string>& class_names) {
    if (actual.empty() || actual.size() != predicted.size())
        throw std::invalid_argument("confusion: label vectors must be equal and non-empty");
    if (n_classes < 1) throw std::invalid_argument("confusion: need at least one class");
    ConfusionMatrix cm;
    cm.counts.assign(n_classes, std::vector<long>(n_classes, 0));
    cm.class_names = class_names;
    if (cm.class_names.empty())
        for (int c = 0; c < n_classes; ++c) cm.class_names.push_back("class" + std::to_string(c));
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const int a = actual[i], p = predicted[i];
        if (a < 0 || a >= n_classes || p < 0 || p >= n_classes)
            throw std::invalid_argument("confusion: label out of range at index " +
                                        std::to_string(i));
        ++cm.counts[a][p];
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const long t = cm.total();
    if (t == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    return 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(t);
}

double f1(const ConfusionMatrix& cm, int positive) {
    const int n = static_cast<int>(cm.counts.size());
    if (positive < 0 || positive >= n)
        throw std::invalid_argument("f1: positive class out of range");
    const double tp = static_cast<double>(cm.counts[positive][positive]);
    double fp = 0.0, fn = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == positive) continue;
        fp += static_cast<double>(cm.counts[i][positive]);
        fn += static_cast<double>(cm.counts[positive][i]);
    }
    const double denom = 2.0 * tp + fp + fn;
    return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

double macro_f1(const ConfusionMatrix& cm) {
    const int n = static_cast<int>(cm.counts.size());
    double sum = 0.0;
    for (int c = 0; c < n; ++c) sum += f1(cm, c);
    return sum / n;
}

double precision_of(const ConfusionMatrix& cm, int cls) {
    double col = 0.0;
    for (const auto& row : cm.counts) col += static_cast<double>(row[cls]);
    return col == 0.0 ? 0.0 : static_cast<double>(cm.counts[cls][cls]) / col;
}

double recall_of(const ConfusionMatrix& cm, int cls) {
    double row = 0.0;
    for (long v : cm.counts[cls]) row += static_cast<double>(v);
    return row == 0.0 ? 0.0 : static_cast<double>(cm.counts[cls][cls]) / row;
}

std::string ConfusionMatrix::render_percent() const {
    const int n = static_cast<int>(counts.size());
    std::size_t w = 9;
    for (const auto& name : class_names) w = std::max(w, name.size() + 2);
    std::ostringstream os;
    os << std::string(w, ' ');
    for (const auto& name : class_names)
        os << name << std::string(w - name.size(), ' ');
    os << "\n";
    for (int a = 0; a < n; ++a) {
        os << class_names[a] << std::string(w - class_names[a].size(), ' ');
        long row_total = 0;
        for (long v : counts[a]) row_total += v;
        for (int p = 0; p < n; ++p) {
            char buf[32];
            const double pct =
                row_total == 0 ? 0.0 : 100.0 * static_cast<double>(counts[a][p]) / row_total;
            std::snprintf(buf, sizeof(buf), "%.1f", pct);
            os << buf << std::string(w - std::string(buf).size(), ' ');
        }
        os << "\n";
    }
    return os.str();
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream os;
    os << "actual\\predicted";
    for (const auto& name : class_names) os << "," << name;
    os << "\n";
    for (std::size_t a = 0; a < counts.size(); ++a) {
        os << class_names[a];
        for (long v : counts[a]) os << "," << v;
        os << "\n";
    }
    return os.str();
}

CvResult cross_validate(const Fitter& fitter, const Dataset& dataset, int k,
                        std::uint64_t seed) {
    const auto folds = kfold_split(dataset, k, seed);
    CvResult result;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        try {
            const Dataset train = subset(dataset, folds[f].first);
            const Dataset val = subset(dataset, folds[f].second);
            const Predictor predictor = fitter(train);
            std::vector<int> actual, predicted;
            actual.reserve(val.size());
            predicted.reserve(val.size());
            for (const auto& s : val.samples) {
                actual.push_back(s.label);
                predicted.push_back(predictor(s.features));
            }
            result.fold_accuracy.push_back(
                accuracy(confusion(actual, predicted, dataset.n_classes())));
        } catch (const std::exception& e) {
            throw std::runtime_error("cross_validate: fold " + std::to_string(f) +
                                     " failed: " + e.what());
        }
    }
    double mean = 0.0;
    for (double a : result.fold_accuracy) mean += a;
    mean /= static_cast<double>(result.fold_accuracy.size());
    double var = 0.0;
    for (double a : result.fold_accuracy) var += (a - mean) * (a - mean);
    result.mean = mean;
    result.stddev = std::sqrt(var / static_cast<double>(result.fold_accuracy.size()));
    return result;
}

CvResult cross_validate(Algo algo, const Dataset& dataset, int k, std::uint64_t seed,
                        const Hyperparams& hp) {
    const Fitter fitter = [algo, hp, seed](const Dataset& train) -> Predictor {
        auto model = std::make_shared<TrainedModel>(fit(algo, train, hp, seed));
        return [model](const std::array<double, kNumSignals>& x) {
            return predict_raw(*model, x);
        };
    };
    return cross_validate(fitter, dataset, k, seed);
}

MetricsReport compare(const std::vector<Algo>& algos, const Dataset& train,
                      const Dataset& test, const Hyperparams& hp, std::uint64_t seed) {
    if (test.empty()) throw std::invalid_argument("compare: empty test set");
    MetricsReport report;
    for (Algo algo : algos) {
        CompareRow row;
        row.classifier = algo_name(algo);
        try {
            const TrainedModel model = fit(algo, train, hp, seed);
            const std::vector<int> predicted = predict_batch(model, test);
            std::vector<int> actual;
            actual.reserve(test.size());
            for (const auto& s : test.samples) actual.push_back(s.label);
            row.cm = confusion(actual, predicted, train.n_classes(), train.class_names);
            row.accuracy = accuracy(row.cm);
            row.macro_f1 = gtfdi::macro_f1(row.cm);
            row.training_time_s = model.training_time_s;
            for (int c = 0; c < train.n_classes(); ++c) {
                row.precision.push_back(precision_of(row.cm, c));
                row.recall.push_back(recall_of(row.cm, c));
            }
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const CompareRow& a, const CompareRow& b) {
                         if (a.ok != b.ok) return a.ok;
                         return a.accuracy > b.accuracy;
                     });
    return report;
}

std::string MetricsReport::render_text() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %10s %8s %14s\n", "classifier", "accuracy",
                  "f1", "train_time_s");
    os << buf;
    os << std::string(47, '-') << "\n";
    for (const auto& row : rows) {
        if (row.ok) {
            std::snprintf(buf, sizeof(buf), "%-12s %9.2f%% %8.3f %14.3f\n",
                          row.classifier.c_str(), row.accuracy, row.macro_f1,
                          row.training_time_s);
            os << buf;
        } else {
            std::snprintf(buf, sizeof(buf), "%-12s FAILED: %s\n", row.classifier.c_str(),
                          row.error.c_str());
            os << buf;
        }
    }
    return os.str();
}

std::string MetricsReport::to_csv() const {
    std::ostringstream os;
    os << "classifier,accuracy,f1,train_time_s\n";
    for (const auto& row : rows) {
        if (!row.ok) {
            os << row.classifier << ",failed,,\n";
            continue;
        }
        os << row.classifier << "," << fmt6(row.accuracy) << "," << fmt6(row.macro_f1) << ","
           << fmt6(row.training_time_s) << "\n";
    }
    return os.str();
}

}  // namespace gtfdi
