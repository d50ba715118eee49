#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gtfdi/classifiers.hpp"
#include "gtfdi/cli.hpp"
#include "gtfdi/config.hpp"
#include "gtfdi/dataset.hpp"
#include "gtfdi/evaluation.hpp"
#include "gtfdi/monitor.hpp"
#include "gtfdi/sim.hpp"
#include "gtfdi/util.hpp"

namespace py = pybind11;
using namespace gtfdi;

namespace {

std::array<double, kNumSignals> to_features(const std::vector<double>& v) {
    if (v.size() != kNumSignals)
        throw std::invalid_argument("expected " + std::to_string(kNumSignals) + " features");
    std::array<double, kNumSignals> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
}

Hyperparams hp_from_kwargs(const py::kwargs& kw) {
    Hyperparams hp;
    for (auto item : kw) {
        const std::string key = py::cast<std::string>(item.first);
        if (key == "lda_shrinkage") hp.lda_shrinkage = py::cast<double>(item.second);
        else if (key == "svm_c") hp.svm_c = py::cast<double>(item.second);
        else if (key == "svm_epochs") hp.svm_epochs = py::cast<int>(item.second);
        else if (key == "svm_eta0") hp.svm_eta0 = py::cast<double>(item.second);
        else if (key == "knn_k") hp.knn_k = py::cast<int>(item.second);
        else if (key == "tree_max_depth") hp.tree_max_depth = py::cast<int>(item.second);
        else if (key == "tree_min_leaf") hp.tree_min_leaf = py::cast<int>(item.second);
        else throw std::invalid_argument("unknown hyperparameter '" + key + "'");
    }
    return hp;
}

}  // namespace

PYBIND11_MODULE(_gtfdi, m) {
    m.doc() = "turbojet fault detection and isolation toolkit";
    m.attr("__version__") = kVersion;
    m.attr("SIGNALS") = signal_names();

    py::class_<EngineParams>(m, "EngineParams")
        .def(py::init<>())
        .def_readwrite("R", &EngineParams::R)
        .def_readwrite("V1", &EngineParams::V1)
        .def_readwrite("V2", &EngineParams::V2)
        .def_readwrite("I", &EngineParams::I)
        .def_readwrite("gamma", &EngineParams::gamma)
        .def_readwrite("cp", &EngineParams::cp)
        .def_readwrite("LHV", &EngineParams::LHV)
        .def_readwrite("sigma_cc", &EngineParams::sigma_cc)
        .def_readwrite("m_ref", &EngineParams::m_ref)
        .def_readwrite("P1", &EngineParams::P1)
        .def_readwrite("T1", &EngineParams::T1)
        .def_readwrite("eta_c", &EngineParams::eta_c)
        .def_readwrite("eta_t", &EngineParams::eta_t)
        .def_readwrite("N_ref", &EngineParams::N_ref)
        .def("validate", &EngineParams::validate);

    m.def(
        "steady_state",
        [](double fuel_kgps, const EngineParams& p) {
            const EngineState s = steady_state(fuel_kgps, p);
            return py::dict(py::arg("P2") = s.P2, py::arg("P4") = s.P4, py::arg("N") = s.N);
        },
        py::arg("fuel_kgps"), py::arg("params") = EngineParams{},
        "equilibrium state for a constant fuel rate");

    m.def(
        "simulate",
        [](const std::vector<std::pair<double, double>>& profile, bool ramp, double duration,
           double dt, double noise, std::uint64_t seed, const std::string& faults,
           const EngineParams& params) {
            FaultSchedule schedule;
            schedule.noise_level = noise;
            if (!faults.empty()) {
                schedule = schedule_from_text(faults);
                schedule.noise_level = noise;
            }
            const CommandProfile prof(profile, ramp ? CommandProfile::Interp::Linear
                                                    : CommandProfile::Interp::Hold);
            const Trajectory traj = simulate(prof, duration, dt, params, schedule, seed);
            std::vector<double> t;
            std::vector<std::vector<double>> signals;
            for (const auto& rec : traj.records) {
                t.push_back(rec.t);
                signals.emplace_back(rec.signals.begin(), rec.signals.end());
            }
            return py::dict(py::arg("t") = t, py::arg("signals") = signals);
        },
        py::arg("profile"), py::arg("ramp") = false, py::arg("duration") = 100.0,
        py::arg("dt") = 0.1, py::arg("noise") = 0.0, py::arg("seed") = 0,
        py::arg("faults") = "", py::arg("params") = EngineParams{},
        "run the engine over a command profile of (t, value) points and log telemetry");

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("class_names",
                               [](const Dataset& d) { return d.class_names; })
        .def("__len__", [](const Dataset& d) { return d.size(); })
        .def("features",
             [](const Dataset& d, std::size_t i) {
                 const auto& f = d.samples.at(i).features;
                 return std::vector<double>(f.begin(), f.end());
             })
        .def("label", [](const Dataset& d, std::size_t i) { return d.samples.at(i).label; })
        .def("run_id", [](const Dataset& d, std::size_t i) { return d.samples.at(i).run_id; })
        .def("to_csv", [](const Dataset& d) { return dataset_to_csv(d); })
        .def("save", [](const Dataset& d, const std::string& path) { save_dataset(d, path); });

    m.def(
        "generate_dataset",
        [](const std::string& scenario, int runs, double duration, double dt,
           std::uint64_t seed, double noise, int jobs, bool test_role) {
            return generate_dataset(scenario_from_name(scenario), runs, duration, dt, seed,
                                    noise, jobs, test_role);
        },
        py::arg("scenario"), py::arg("runs"), py::arg("duration") = 100.0,
        py::arg("dt") = 0.1, py::arg("seed") = 0, py::arg("noise") = 0.02,
        py::arg("jobs") = 1, py::arg("test_role") = false);

    m.def("load_dataset", &load_dataset, py::arg("path"));
    m.def("relabel_binary", &relabel_binary, py::arg("dataset"), py::arg("positive_class"),
          py::arg("positive_name") = "Faulty");

    py::class_<TrainedModel>(m, "Model")
        .def_property_readonly("algorithm",
                               [](const TrainedModel& m_) { return algo_name(m_.algo); })
        .def_property_readonly("class_names",
                               [](const TrainedModel& m_) { return m_.class_names; })
        .def_property_readonly("training_time_s",
                               [](const TrainedModel& m_) { return m_.training_time_s; })
        .def("predict",
             [](const TrainedModel& m_, const std::vector<double>& x) {
                 return predict_raw(m_, to_features(x));
             })
        .def("predict_class",
             [](const TrainedModel& m_, const std::vector<double>& x) {
                 return m_.class_names.at(predict_raw(m_, to_features(x)));
             })
        .def("save", [](const TrainedModel& m_, const std::string& path) {
            save_model(m_, path);
        });

    m.def(
        "fit",
        [](const std::string& algo, const Dataset& train, std::uint64_t seed,
           const py::kwargs& kw) {
            return fit(algo_from_name(algo), train, hp_from_kwargs(kw), seed);
        },
        py::arg("algo"), py::arg("train"), py::arg("seed") = 0);
    m.def("load_model", &load_model, py::arg("path"));

    m.def(
        "confusion",
        [](const std::vector<int>& actual, const std::vector<int>& predicted, int n_classes) {
            const ConfusionMatrix cm = confusion(actual, predicted, n_classes);
            return cm.counts;
        },
        py::arg("actual"), py::arg("predicted"), py::arg("n_classes"));
    m.def(
        "accuracy",
        [](const std::vector<std::vector<long>>& counts) {
            ConfusionMatrix cm;
            cm.counts = counts;
            for (std::size_t i = 0; i < counts.size(); ++i)
                cm.class_names.push_back("class" + std::to_string(i));
            return accuracy(cm);
        },
        py::arg("counts"), "percent correct from a confusion-count matrix");
    m.def(
        "f1",
        [](const std::vector<std::vector<long>>& counts, int positive) {
            ConfusionMatrix cm;
            cm.counts = counts;
            for (std::size_t i = 0; i < counts.size(); ++i)
                cm.class_names.push_back("class" + std::to_string(i));
            return f1(cm, positive);
        },
        py::arg("counts"), py::arg("positive") = 1);

    m.def(
        "compare",
        [](const std::vector<std::string>& algos, const Dataset& train, const Dataset& test,
           std::uint64_t seed, const py::kwargs& kw) {
            std::vector<Algo> as;
            for (const auto& a : algos) as.push_back(algo_from_name(a));
            const MetricsReport report = compare(as, train, test, hp_from_kwargs(kw), seed);
            py::list rows;
            for (const auto& row : report.rows) {
                py::dict d;
                d["classifier"] = row.classifier;
                d["ok"] = row.ok;
                d["accuracy"] = row.accuracy;
                d["f1"] = row.macro_f1;
                d["train_time_s"] = row.training_time_s;
                if (!row.ok) d["error"] = row.error;
                rows.append(d);
            }
            return rows;
        },
        py::arg("algos"), py::arg("train"), py::arg("test"), py::arg("seed") = 0);

    m.def(
        "monitor",
        [](const std::string& bank_config_path, const std::string& input_csv) {
            const Bank bank = build_bank(bank_config_from_text(read_file(bank_config_path)));
            std::istringstream in(read_file(input_csv));
            std::ostringstream out;
            const MonitorSummary summary = monitor_stream(in, bank, out);
            py::dict d;
            d["samples"] = summary.samples;
            d["skipped"] = summary.skipped;
            d["any_fault"] = summary.any_fault();
            py::list comps;
            for (const auto& c : summary.components) {
                py::dict cd;
                cd["component"] = c.component;
                cd["first_red_t"] = c.first_red_t;
                py::list eps;
                for (const auto& e : c.episodes)
                    eps.append(py::make_tuple(e.onset, e.end));
                cd["episodes"] = eps;
                comps.append(cd);
            }
            d["components"] = comps;
            return d;
        },
        py::arg("bank_config"), py::arg("input_csv"),
        "run a model bank over a trajectory CSV and return the episode summary");

    m.def("cli_run", &gtfdi::cli::run, py::arg("args"),
          "invoke the command-line interface; returns the exit code");
}
