#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gtfdi/dataset.hpp"

namespace gtfdi {

enum class Algo { LDA, SVM, KNN, Tree };

Algo algo_from_name(const std::string& name);
std::string algo_name(Algo a);

struct Hyperparams {
    double lda_shrinkage = 1e-3;  // pooled-covariance ridge toward its diagonal

    double svm_c = 30.0;   // hinge regularization: lambda = 1/(C n)
    int svm_epochs = 600;
    double svm_eta0 = 4.0;  // step schedule eta_t = eta0 / sqrt(1 + t)

    int knn_k = 5;

    int tree_max_depth = 12;
    int tree_min_leaf = 5;
};

struct LdaPayload {
    std::vector<std::array<double, kNumSignals>> means;
    std::array<std::array<double, kNumSignals>, kNumSignals> cov_inv{};
    std::vector<double> log_priors;
};

struct SvmPayload {
    std::vector<std::array<double, kNumSignals>> weights;  // one-vs-rest
    std::vector<double> bias;
};

struct KnnPayload {
    std::vector<std::array<double, kNumSignals>> points;  // normalized
    std::vector<int> labels;
    int k = 5;
};

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int leaf_label = -1;
};

struct TreePayload {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct TrainedModel {
    Algo algo = Algo::LDA;
    std::vector<std::string> class_names;
    NormStats norm;
    double training_time_s = 0.0;
    std::uint64_t dataset_checksum = 0;
    std::variant<LdaPayload, SvmPayload, KnnPayload, TreePayload> payload;
};

// Per-epoch primal objective of the one-vs-rest problems, for diagnostics.
struct SvmTrainTrace {
    std::vector<std::vector<double>> epoch_objective;  // [class][epoch]
};

// Each fit normalizes internally (z-score fitted on the training set) and
// stores the stats in the returned model.
TrainedModel fit_lda(const Dataset& train, const Hyperparams& hp = {});
TrainedModel fit_linear_svm(const Dataset& train, const Hyperparams& hp = {},
                            std::uint64_t seed = 0, SvmTrainTrace* trace = nullptr);
TrainedModel fit_knn(const Dataset& train, const Hyperparams& hp = {});
TrainedModel fit_tree(const Dataset& train, const Hyperparams& hp = {});
TrainedModel fit(Algo algo, const Dataset& train, const Hyperparams& hp = {},
                 std::uint64_t seed = 0);

// `predict` expects features already normalized with the model's stats;
// `predict_raw` normalizes first. Ties always resolve to the lowest class.
int predict(const TrainedModel& model, const std::array<double, kNumSignals>& x);
int predict(const TrainedModel& model, const std::vector<double>& x);  // throws on size != 12
int predict_raw(const TrainedModel& model, const std::array<double, kNumSignals>& x_raw);
std::vector<int> predict_batch(const TrainedModel& model, const Dataset& raw);

double gini_impurity(const std::vector<long>& class_counts);

// discriminant direction Sigma^-1 (mu_1 - mu_0) of a binary LDA model, in
// normalized feature space
std::array<double, kNumSignals> lda_direction(const TrainedModel& model);

// Versioned JSON with a payload checksum; load rejects corrupt or
// version-mismatched files outright.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace gtfdi
