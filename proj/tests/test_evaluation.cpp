#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gtfdi/evaluation.hpp"
#include "gtfdi/rng.hpp"

using namespace gtfdi;

TEST_CASE("confusion: perfect predictions give a diagonal matrix") {
    const std::vector<int> a{0, 1, 2, 1, 0, 2};
    const ConfusionMatrix cm = confusion(a, a, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(cm.counts[i][j] == (i == j ? (i == 0 ? 2 : 2) : 0));
    CHECK(accuracy(cm) == doctest::Approx(100.0));
}

TEST_CASE("confusion: hand-counted 2x2 case") {
    const ConfusionMatrix cm = confusion({0, 0, 1, 1}, {0, 1, 1, 1}, 2);
    CHECK(cm.counts[0][0] == 1);
    CHECK(cm.counts[0][1] == 1);
    CHECK(cm.counts[1][0] == 0);
    CHECK(cm.counts[1][1] == 2);
}

TEST_CASE("confusion: out-of-range labels name the index") {
    CHECK_THROWS_WITH_AS(confusion({0, 5}, {0, 0}, 2), doctest::Contains("index 1"),
                         std::invalid_argument);
    CHECK_THROWS_AS(confusion({}, {}, 2), std::invalid_argument);
    CHECK_THROWS_AS(confusion({0, 1}, {0}, 2), std::invalid_argument);
}

TEST_CASE("confusion: order of pairs does not matter") {
    Rng rng(3);
    std::vector<int> a, p;
    for (int i = 0; i < 500; ++i) {
        a.push_back(rng.uniform_int(0, 3));
        p.push_back(rng.uniform_int(0, 3));
    }
    const ConfusionMatrix cm1 = confusion(a, p, 4);
    std::vector<int> order(a.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(0, i)]);
    std::vector<int> a2, p2;
    for (int i : order) {
        a2.push_back(a[i]);
        p2.push_back(p[i]);
    }
    const ConfusionMatrix cm2 = confusion(a2, p2, 4);
    CHECK(cm1.counts == cm2.counts);
}

TEST_CASE("accuracy: binary reduction equals the trace formula") {
    // TP=8, TN=8, FP=2, FN=2 -> 80%
    ConfusionMatrix cm;
    cm.class_names = {"Healthy", "Faulty"};
    cm.counts = {{8, 2}, {2, 8}};
    CHECK(accuracy(cm) == doctest::Approx(80.0).epsilon(1e-12));
    const double tp = 8, tn = 8, fp = 2, fn = 2;
    CHECK(accuracy(cm) ==
          doctest::Approx(100.0 * (tp + tn) / (tp + tn + fp + fn)).epsilon(1e-14));
}

TEST_CASE("accuracy: the reported single-sensor case reconstructs to 94.65") {
    // healthy row (100, 0), faulty row (10.7, 89.3), balanced classes
    ConfusionMatrix cm;
    cm.class_names = {"Healthy", "Faulty"};
    cm.counts = {{1000, 0}, {107, 893}};
    CHECK(accuracy(cm) == doctest::Approx(94.65).epsilon(1e-12));
    CHECK(std::abs(accuracy(cm) - 94.63) < 0.05);
}

TEST_CASE("f1: endpoints and the direct formula") {
    ConfusionMatrix perfect;
    perfect.class_names = {"a", "b"};
    perfect.counts = {{10, 0}, {0, 10}};
    CHECK(f1(perfect, 1) == doctest::Approx(1.0));

    // TP=8, FP=2, FN=2 -> 0.8
    ConfusionMatrix cm;
    cm.class_names = {"Healthy", "Faulty"};
    cm.counts = {{90, 2}, {2, 8}};
    CHECK(f1(cm, 1) == doctest::Approx(0.8).epsilon(1e-12));

    // degenerate positive class with no support
    ConfusionMatrix empty_pos;
    empty_pos.class_names = {"a", "b"};
    empty_pos.counts = {{5, 0}, {0, 0}};
    CHECK(f1(empty_pos, 1) == 0.0);
}

TEST_CASE("f1: bounds and the zero-error equivalence") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix cm;
        cm.class_names = {"a", "b"};
        const long tp = rng.uniform_int(1, 50);
        const long fp = rng.uniform_int(0, 50);
        const long fn = rng.uniform_int(0, 50);
        const long tn = rng.uniform_int(0, 50);
        cm.counts = {{tn, fp}, {fn, tp}};
        const double score = f1(cm, 1);
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
        CHECK((score == doctest::Approx(1.0)) == (fp == 0 && fn == 0));
    }
}

TEST_CASE("macro f1 averages the per-class scores") {
    ConfusionMatrix cm;
    cm.class_names = {"a", "b", "c"};
    cm.counts = {{5, 1, 0}, {1, 7, 2}, {0, 0, 4}};
    const double expected = (f1(cm, 0) + f1(cm, 1) + f1(cm, 2)) / 3.0;
    CHECK(macro_f1(cm) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("render: row-normalized percentages match the reporting layout") {
    ConfusionMatrix cm;
    cm.class_names = {"Healthy", "Faulty"};
    cm.counts = {{1000, 0}, {107, 893}};
    const std::string view = cm.render_percent();
    CHECK(view.find("100.0") != std::string::npos);
    CHECK(view.find("10.7") != std::string::npos);
    CHECK(view.find("89.3") != std::string::npos);
    const std::string csv = cm.to_csv();
    CHECK(csv.find("Healthy,1000,0") != std::string::npos);
    CHECK(csv.find("Faulty,107,893") != std::string::npos);
}

TEST_CASE("cross_validate: chance level for a constant predictor on balanced data") {
    const Dataset ds = generate_dataset(Scenario::T2Sensor, 8, 25.0, 0.1, 31, 0.02, 2);
    // force close-to-balanced labels by relabeling on sample parity
    Dataset balanced = ds;
    for (std::size_t i = 0; i < balanced.size(); ++i)
        balanced.samples[i].label = static_cast<int>(i % 2);
    const Fitter constant_fitter = [](const Dataset&) -> Predictor {
        return [](const std::array<double, kNumSignals>&) { return 0; };
    };
    const CvResult cv = cross_validate(constant_fitter, balanced, 5, 3);
    REQUIRE(cv.fold_accuracy.size() == 5);
    CHECK(cv.mean == doctest::Approx(50.0).epsilon(0.02));
}

TEST_CASE("cross_validate: five folds of 200 on 1000 samples, each scored once") {
    const Dataset ds = generate_dataset(Scenario::T2Sensor, 2, 50.0, 0.1, 33, 0.02, 1);
    REQUIRE(ds.size() == 1000);
    Hyperparams hp;
    const CvResult cv = cross_validate(Algo::LDA, ds, 5, 7, hp);
    REQUIRE(cv.fold_accuracy.size() == 5);
    for (double a : cv.fold_accuracy) {
        CHECK(a >= 0.0);
        CHECK(a <= 100.0);
    }
    CHECK(cv.mean ==
          doctest::Approx((cv.fold_accuracy[0] + cv.fold_accuracy[1] + cv.fold_accuracy[2] +
                           cv.fold_accuracy[3] + cv.fold_accuracy[4]) /
                          5.0));
}

TEST_CASE("cross_validate: fit failures carry the fold index") {
    const Dataset ds = generate_dataset(Scenario::T2Sensor, 4, 20.0, 0.1, 35, 0.02, 1);
    const Fitter broken = [](const Dataset&) -> Predictor {
        throw std::runtime_error("boom");
    };
    CHECK_THROWS_WITH_AS(cross_validate(broken, ds, 3, 0), doctest::Contains("fold 0"),
                         std::runtime_error);
}

TEST_CASE("compare: memorizing tree scores 100 on identical train/test") {
    const Dataset ds = generate_dataset(Scenario::T2Sensor, 4, 20.0, 0.1, 37, 0.02, 1);
    Hyperparams hp;
    hp.tree_max_depth = 64;
    hp.tree_min_leaf = 1;
    const MetricsReport report = compare({Algo::Tree}, ds, ds, hp, 0);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].ok);
    CHECK(report.rows[0].accuracy == doctest::Approx(100.0));
    CHECK(report.rows[0].recall[0] == doctest::Approx(1.0));
}

TEST_CASE("compare: a failing fit marks its row, others proceed") {
    const Dataset ds = generate_dataset(Scenario::T2Sensor, 4, 20.0, 0.1, 39, 0.02, 1);
    Hyperparams hp;
    hp.knn_k = 1000000;  // invalid for this dataset size
    hp.svm_epochs = 10;
    const MetricsReport report = compare({Algo::LDA, Algo::KNN}, ds, ds, hp, 0);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].classifier == "lda");
    CHECK(report.rows[0].ok);
    CHECK(!report.rows[1].ok);
    CHECK(!report.rows[1].error.empty());
    const std::string csv = report.to_csv();
    CHECK(csv.find("classifier,accuracy,f1,train_time_s") == 0);
    CHECK(csv.find("knn,failed") != std::string::npos);
}

TEST_CASE("compare: rows come out sorted by accuracy") {
    const Dataset train = generate_dataset(Scenario::T2Sensor, 6, 30.0, 0.1, 41, 0.02, 2);
    const Dataset test = generate_dataset(Scenario::T2Sensor, 3, 30.0, 0.1, 1041, 0.02, 2);
    Hyperparams hp;
    hp.svm_epochs = 40;
    const MetricsReport report = compare({Algo::LDA, Algo::SVM, Algo::KNN, Algo::Tree}, train,
                                         test, hp, 0);
    REQUIRE(report.rows.size() == 4);
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i)
        if (report.rows[i].ok && report.rows[i + 1].ok)
            CHECK(report.rows[i].accuracy >= report.rows[i + 1].accuracy);
}
