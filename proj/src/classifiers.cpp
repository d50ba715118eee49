#include "gtfdi/classifiers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gtfdi/rng.hpp"

namespace gtfdi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0);
    return std::max(1e-9, static_cast<double>(ns.count()) * 1e-9);
}

void check_trainable(const Dataset& train, int min_per_class) {
    if (train.empty()) throw std::invalid_argument("fit: empty training set");
    std::vector<long> counts(train.n_classes(), 0);
    for (const auto& s : train.samples) {
        if (s.label < 0 || s.label >= train.n_classes())
            throw std::invalid_argument("fit: label out of range");
        ++counts[s.label];
    }
    int present = 0;
    for (int c = 0; c < train.n_classes(); ++c) {
        if (counts[c] == 0) continue;
        ++present;
        if (counts[c] < min_per_class)
            throw std::invalid_argument("fit: class '" + train.class_names[c] + "' has only " +
                                        std::to_string(counts[c]) + " samples");
    }
    if (present < 2) throw std::invalid_argument("fit: need at least 2 classes present");
}

}  // namespace

Algo algo_from_name(const std::string& name) {
    if (name == "lda") return Algo::LDA;
    if (name == "svm") return Algo::SVM;
    if (name == "knn") return Algo::KNN;
    if (name == "tree") return Algo::Tree;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected lda,svm,knn,tree)");
}

std::string algo_name(Algo a) {
    switch (a) {
        case Algo::LDA: return "lda";
        case Algo::SVM: return "svm";
        case Algo::KNN: return "knn";
        case Algo::Tree: return "tree";
    }
    return "?";
}

TrainedModel fit_lda(const Dataset& train, const Hyperparams& hp) {
    const auto t0 = Clock::now();
    check_trainable(train, 2);
    const int K = train.n_classes();
    const int d = kNumSignals;

    const NormStats stats = normalize_fit(train);
    const Dataset norm = normalize_apply(train, stats);
    const auto n = static_cast<double>(norm.size());

    LdaPayload payload;
    payload.means.assign(K, {});
    std::vector<long> counts(K, 0);
    for (const auto& s : norm.samples) {
        ++counts[s.label];
        for (int f = 0; f < d; ++f) payload.means[s.label][f] += s.features[f];
    }
    for (int c = 0; c < K; ++c)
        if (counts[c] > 0)
            for (int f = 0; f < d; ++f) payload.means[c][f] /= static_cast<double>(counts[c]);

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
    for (const auto& s : norm.samples) {
        Eigen::VectorXd dx(d);
        for (int f = 0; f < d; ++f) dx(f) = s.features[f] - payload.means[s.label][f];
        sigma += dx * dx.transpose();
    }
    int present = 0;
    for (long c : counts) present += c > 0;
    sigma /= std::max(1.0, n - present);

    const double lambda = hp.lda_shrinkage;
    Eigen::MatrixXd shrunk = (1.0 - lambda) * sigma;
    for (int f = 0; f < d; ++f) shrunk(f, f) += lambda * sigma(f, f);
    // dropped (zero-variance) features contribute inert unit dimensions
    for (int f = 0; f < d; ++f)
        if (!stats.retained[f]) {
            shrunk.row(f).setZero();
            shrunk.col(f).setZero();
            shrunk(f, f) = 1.0;
        }

    const Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "fit_lda: pooled covariance not positive definite; increase lda_shrinkage");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) payload.cov_inv[a][b] = inv(a, b);

    payload.log_priors.assign(K, -std::numeric_limits<double>::infinity());
    for (int c = 0; c < K; ++c)
        if (counts[c] > 0) payload.log_priors[c] = std::log(counts[c] / n);

    TrainedModel model;
    model.algo = Algo::LDA;
    model.class_names = train.class_names;
    model.norm = stats;
    model.dataset_checksum = dataset_checksum(train);
    model.payload = std::move(payload);
    model.training_time_s = seconds_since(t0);
    return model;
}

TrainedModel fit_linear_svm(const Dataset& train, const Hyperparams& hp, std::uint64_t seed,
                            SvmTrainTrace* trace) {
    const auto t0 = Clock::now();
    check_trainable(train, 1);
    if (!(hp.svm_c > 0.0) || hp.svm_epochs < 1 || !(hp.svm_eta0 > 0.0))
        throw std::invalid_argument("fit_linear_svm: bad hyperparameters");
    const int K = train.n_classes();
    const int d = kNumSignals;

    const NormStats stats = normalize_fit(train);
    const Dataset norm = normalize_apply(train, stats);
    const auto n = norm.size();
    const double lambda = 1.0 / (hp.svm_c * static_cast<double>(n));

    SvmPayload payload;
    payload.weights.assign(K, {});
    payload.bias.assign(K, 0.0);
    if (trace) trace->epoch_objective.assign(K, {});

    for (int c = 0; c < K; ++c) {
        Rng rng(splitmix64(seed) ^ (0x51edULL * (c + 1)));
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::array<double, kNumSignals> w{};
        double b = 0.0;
        // Polyak average of the iterates; it is both the returned solution
        // and what the per-epoch objective is evaluated on
        std::array<double, kNumSignals> w_avg{};
        double b_avg = 0.0;
        long t = 0;

        auto objective = [&] {
            double hinge = 0.0;
            for (const auto& s : norm.samples) {
                const double y = s.label == c ? 1.0 : -1.0;
                double m = b_avg;
                for (int f = 0; f < d; ++f) m += w_avg[f] * s.features[f];
                hinge += std::max(0.0, 1.0 - y * m);
            }
            double wn = 0.0;
            for (double v : w_avg) wn += v * v;
            return 0.5 * lambda * wn + hinge / static_cast<double>(n);
        };

        for (int epoch = 0; epoch < hp.svm_epochs; ++epoch) {
            for (int i = static_cast<int>(n) - 1; i > 0; --i)
                std::swap(order[i], order[rng.uniform_int(0, i)]);
            for (int idx : order) {
                ++t;
                const double eta = hp.svm_eta0 / std::sqrt(1.0 + static_cast<double>(t));
                const auto& s = norm.samples[idx];
                const double y = s.label == c ? 1.0 : -1.0;
                double m = b;
                for (int f = 0; f < d; ++f) m += w[f] * s.features[f];
                const double shrink = 1.0 - eta * lambda;
                if (y * m < 1.0) {
                    for (int f = 0; f < d; ++f)
                        w[f] = shrink * w[f] + eta * y * s.features[f];
                    b += eta * y;
                } else {
                    for (int f = 0; f < d; ++f) w[f] *= shrink;
                }
                const double k = 1.0 / static_cast<double>(t);
                for (int f = 0; f < d; ++f) w_avg[f] += k * (w[f] - w_avg[f]);
                b_avg += k * (b - b_avg);
            }
            const double obj = objective();
            if (!std::isfinite(obj))
                throw std::runtime_error(
                    "fit_linear_svm: objective diverged (learning rate eta0=" +
                    std::to_string(hp.svm_eta0) + ", C=" + std::to_string(hp.svm_c) + ")");
            if (trace) trace->epoch_objective[c].push_back(obj);
        }
        payload.weights[c] = w_avg;
        payload.bias[c] = b_avg;
    }

    TrainedModel model;
    model.algo = Algo::SVM;
    model.class_names = train.class_names;
    model.norm = stats;
    model.dataset_checksum = dataset_checksum(train);
    model.payload = std::move(payload);
    model.training_time_s = seconds_since(t0);
    return model;
}

TrainedModel fit_knn(const Dataset& train, const Hyperparams& hp) {
    const auto t0 = Clock::now();
    check_trainable(train, 1);
    if (hp.knn_k < 1 || static_cast<std::size_t>(hp.knn_k) > train.size())
        throw std::invalid_argument("fit_knn: k must lie in [1, n_train]");

    const NormStats stats = normalize_fit(train);
    const Dataset norm = normalize_apply(train, stats);

    KnnPayload payload;
    payload.k = hp.knn_k;
    payload.points.reserve(norm.size());
    payload.labels.reserve(norm.size());
    for (const auto& s : norm.samples) {
        payload.points.push_back(s.features);
        payload.labels.push_back(s.label);
    }

    TrainedModel model;
    model.algo = Algo::KNN;
    model.class_names = train.class_names;
    model.norm = stats;
    model.dataset_checksum = dataset_checksum(train);
    model.payload = std::move(payload);
    model.training_time_s = seconds_since(t0);
    return model;
}

double gini_impurity(const std::vector<long>& class_counts) {
    long total = 0;
    for (long c : class_counts) total += c;
    if (total == 0) return 0.0;
    double g = 1.0;
    for (long c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = std::numeric_limits<double>::infinity();
};

int majority_label(const std::vector<long>& counts) {
    int best = 0;
    long best_n = -1;
    for (int c = 0; c < static_cast<int>(counts.size()); ++c)
        if (counts[c] > best_n) {  // strict: tie keeps the lowest class index
            best_n = counts[c];
            best = c;
        }
    return best;
}

}  // namespace

TrainedModel fit_tree(const Dataset& train, const Hyperparams& hp) {
    const auto t0 = Clock::now();
    if (train.empty()) throw std::invalid_argument("fit_tree: empty training set");
    if (hp.tree_max_depth < 1 || hp.tree_min_leaf < 1)
        throw std::invalid_argument("fit_tree: bad hyperparameters");
    const int K = train.n_classes();

    const NormStats stats = normalize_fit(train);
    const Dataset norm = normalize_apply(train, stats);

    TreePayload payload;
    struct Work {
        int node;
        std::vector<int> idx;
        int depth;
    };
    std::vector<Work> stack;
    payload.nodes.emplace_back();
    {
        std::vector<int> all(norm.size());
        std::iota(all.begin(), all.end(), 0);
        stack.push_back({0, std::move(all), 0});
    }

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();
        auto& idx = work.idx;

        std::vector<long> counts(K, 0);
        for (int i : idx) ++counts[norm.samples[i].label];
        const double node_gini = gini_impurity(counts);
        const auto n_node = static_cast<long>(idx.size());

        auto make_leaf = [&] { payload.nodes[work.node].leaf_label = majority_label(counts); };
        if (node_gini == 0.0 || work.depth >= hp.tree_max_depth ||
            n_node < 2 * hp.tree_min_leaf) {
            make_leaf();
            continue;
        }

        // best greedy split over all features and midpoints between sorted
        // adjacent distinct values, both children at least min_leaf
        SplitChoice best;
        std::vector<int> sorted = idx;
        for (int f = 0; f < kNumSignals; ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
                const double va = norm.samples[a].features[f];
                const double vb = norm.samples[b].features[f];
                return va < vb || (va == vb && a < b);
            });
            std::vector<long> left(K, 0);
            std::vector<long> right = counts;
            for (long i = 0; i + 1 < n_node; ++i) {
                const int a = sorted[i];
                ++left[norm.samples[a].label];
                --right[norm.samples[a].label];
                const double va = norm.samples[a].features[f];
                const double vb = norm.samples[sorted[i + 1]].features[f];
                if (va == vb) continue;
                const long nl = i + 1, nr = n_node - nl;
                if (nl < hp.tree_min_leaf || nr < hp.tree_min_leaf) continue;
                const double wg = (nl * gini_impurity(left) + nr * gini_impurity(right)) /
                                  static_cast<double>(n_node);
                if (wg < best.weighted_gini - 1e-12) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = 0.5 * (va + vb);
                    best.weighted_gini = wg;
                }
            }
        }
        if (!best.found) {
            make_leaf();
            continue;
        }

        std::vector<int> left_idx, right_idx;
        for (int i : idx)
            (norm.samples[i].features[best.feature] <= best.threshold ? left_idx : right_idx)
                .push_back(i);
        const int left_node = static_cast<int>(payload.nodes.size());
        payload.nodes.emplace_back();
        payload.nodes.emplace_back();
        payload.nodes[work.node].feature = best.feature;
        payload.nodes[work.node].threshold = best.threshold;
        payload.nodes[work.node].left = left_node;
        payload.nodes[work.node].right = left_node + 1;
        stack.push_back({left_node, std::move(left_idx), work.depth + 1});
        stack.push_back({left_node + 1, std::move(right_idx), work.depth + 1});
    }

    TrainedModel model;
    model.algo = Algo::Tree;
    model.class_names = train.class_names;
    model.norm = stats;
    model.dataset_checksum = dataset_checksum(train);
    model.payload = std::move(payload);
    model.training_time_s = seconds_since(t0);
    return model;
}

TrainedModel fit(Algo algo, const Dataset& train, const Hyperparams& hp, std::uint64_t seed) {
    switch (algo) {
        case Algo::LDA: return fit_lda(train, hp);
        case Algo::SVM: return fit_linear_svm(train, hp, seed);
        case Algo::KNN: return fit_knn(train, hp);
        case Algo::Tree: return fit_tree(train, hp);
    }
    throw std::invalid_argument("fit: unknown algorithm");
}

namespace {

int predict_lda(const LdaPayload& p, const std::array<double, kNumSignals>& x) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < static_cast<int>(p.means.size()); ++c) {
        // delta_c = x' Sinv mu_c - 0.5 mu_c' Sinv mu_c + log pi_c
        double xs = 0.0, ms = 0.0;
        for (int a = 0; a < kNumSignals; ++a) {
            double smu = 0.0;
            for (int b = 0; b < kNumSignals; ++b) smu += p.cov_inv[a][b] * p.means[c][b];
            xs += x[a] * smu;
            ms += p.means[c][a] * smu;
        }
        const double score = xs - 0.5 * ms + p.log_priors[c];
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

int predict_svm(const SvmPayload& p, const std::array<double, kNumSignals>& x) {
    int best = 0;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < static_cast<int>(p.weights.size()); ++c) {
        double m = p.bias[c];
        for (int f = 0; f < kNumSignals; ++f) m += p.weights[c][f] * x[f];
        if (m > best_margin) {
            best_margin = m;
            best = c;
        }
    }
    return best;
}

int predict_knn(const KnnPayload& p, const std::array<double, kNumSignals>& x, int n_classes) {
    const auto n = p.points.size();
    std::vector<std::pair<double, int>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (int f = 0; f < kNumSignals; ++f) {
            const double d = p.points[i][f] - x[f];
            d2 += d * d;
        }
        dist[i] = {d2, static_cast<int>(i)};
    }
    const auto k = static_cast<std::size_t>(std::min<long>(p.k, static_cast<long>(n)));
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    std::sort(dist.begin(), dist.begin() + k);

    std::vector<long> votes(n_classes, 0);
    std::vector<double> cumdist(n_classes, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const int label = p.labels[dist[i].second];
        ++votes[label];
        cumdist[label] += std::sqrt(dist[i].first);
    }
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
        if (votes[c] > votes[best] ||
            (votes[c] == votes[best] && cumdist[c] < cumdist[best] - 1e-15))
            best = c;
    }
    return best;
}

int predict_tree(const TreePayload& p, const std::array<double, kNumSignals>& x) {
    int node = 0;
    while (p.nodes[node].feature >= 0)
        node = (x[p.nodes[node].feature] <= p.nodes[node].threshold) ? p.nodes[node].left
                                                                     : p.nodes[node].right;
    return p.nodes[node].leaf_label;
}

}  // namespace

int predict(const TrainedModel& model, const std::array<double, kNumSignals>& x) {
    switch (model.algo) {
        case Algo::LDA: return predict_lda(std::get<LdaPayload>(model.payload), x);
        case Algo::SVM: return predict_svm(std::get<SvmPayload>(model.payload), x);
        case Algo::KNN:
            return predict_knn(std::get<KnnPayload>(model.payload), x,
                               static_cast<int>(model.class_names.size()));
        case Algo::Tree: return predict_tree(std::get<TreePayload>(model.payload), x);
    }
    throw std::logic_error("predict: unknown algorithm");
}

int predict(const TrainedModel& model, const std::vector<double>& x) {
    if (x.size() != kNumSignals)
        throw std::invalid_argument("predict: expected " + std::to_string(kNumSignals) +
                                    " features, got " + std::to_string(x.size()));
    std::array<double, kNumSignals> a{};
    std::copy(x.begin(), x.end(), a.begin());
    return predict(model, a);
}

int predict_raw(const TrainedModel& model, const std::array<double, kNumSignals>& x_raw) {
    return predict(model, normalize_features(x_raw, model.norm));
}

std::vector<int> predict_batch(const TrainedModel& model, const Dataset& raw) {
    std::vector<int> out;
    out.reserve(raw.size());
    for (const auto& s : raw.samples) out.push_back(predict_raw(model, s.features));
    return out;
}

std::array<double, kNumSignals> lda_direction(const TrainedModel& model) {
    const auto& p = std::get<LdaPayload>(model.payload);
    if (p.means.size() != 2)
        throw std::invalid_argument("lda_direction: model is not binary");
    std::array<double, kNumSignals> w{};
    for (int a = 0; a < kNumSignals; ++a)
        for (int b = 0; b < kNumSignals; ++b)
            w[a] += p.cov_inv[a][b] * (p.means[1][b] - p.means[0][b]);
    return w;
}

}  // namespace gtfdi
