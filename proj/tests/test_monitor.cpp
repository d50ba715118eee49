#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "gtfdi/dataset.hpp"
#include "gtfdi/monitor.hpp"
#include "gtfdi/sim.hpp"
#include "gtfdi/util.hpp"

using namespace gtfdi;

namespace {

namespace fs = std::filesystem;

struct TestBank {
    fs::path dir;
    BankConfig config;

    TestBank() {
        dir = fs::temp_directory_path() / "gtfdi_monitor_test";
        fs::create_directories(dir);
        // per-component binary detectors from one multi-class sensor dataset
        const Dataset train = generate_dataset(Scenario::FD002, 15, 60.0, 0.1, 711, 0.02, 4);
        const struct {
            const char* name;
            int cls;
        } comps[] = {{"T2", 1}, {"T3", 2}};
        config.dt = 0.1;
        config.default_debounce = 5;
        for (const auto& c : comps) {
            const TrainedModel m = fit_lda(relabel_binary(train, c.cls, c.name));
            const std::string path = (dir / (std::string(c.name) + "_lda.json")).string();
            save_model(m, path);
            config.entries.push_back({c.name, path, {}, 0});
        }
    }
};

TestBank& test_bank() {
    static TestBank bank;
    return bank;
}

Trajectory faulted_run(int target, double mag, double t0, double t1, std::uint64_t seed) {
    EngineParams p;
    FaultSchedule sched;
    sched.noise_level = 0.02;
    sched.specs.push_back({FaultKind::SensorBias, target, mag, t0, t1});
    const CommandProfile profile({{0.0, 0.55}, {30.0, 0.75}, {60.0, 0.45}},
                                 CommandProfile::Interp::Linear);
    return simulate(profile, 80.0, 0.1, p, sched, seed);
}

}  // namespace

TEST_CASE("debounce: M=1 mirrors the raw verdicts") {
    Debouncer d(1);
    CHECK(d.update(true) == true);
    CHECK(d.update(false) == false);
    CHECK(d.update(true) == true);
}

TEST_CASE("debounce: M=3 with F,F,H,F,F,F fires on the sixth sample") {
    Debouncer d(3);
    CHECK(d.update(true) == false);
    CHECK(d.update(true) == false);
    CHECK(d.update(false) == false);
    CHECK(d.update(true) == false);
    CHECK(d.update(true) == false);
    CHECK(d.update(true) == true);
}

TEST_CASE("debounce: alternating verdicts never fire with M=2") {
    Debouncer d(2);
    for (int i = 0; i < 50; ++i) {
        CHECK(d.update(true) == false);
        CHECK(d.update(false) == false);
    }
}

TEST_CASE("debounce: symmetric hysteresis back to green") {
    Debouncer d(3);
    for (int i = 0; i < 3; ++i) d.update(true);
    CHECK(d.red());
    d.update(false);
    d.update(false);
    CHECK(d.red());  // only two healthy in a row
    d.update(false);
    CHECK(!d.red());
    CHECK_THROWS_AS(Debouncer(0), std::invalid_argument);
}

TEST_CASE("build_bank: validation errors name the problem") {
    BankConfig empty;
    CHECK_THROWS_WITH_AS(build_bank(empty), doctest::Contains("at least one"),
                         std::invalid_argument);

    BankConfig dup = test_bank().config;
    dup.entries.push_back(dup.entries[0]);
    CHECK_THROWS_WITH_AS(build_bank(dup), doctest::Contains("duplicate"),
                         std::invalid_argument);

    BankConfig missing = test_bank().config;
    missing.entries[0].model_path = "/nonexistent/model.json";
    CHECK_THROWS_WITH_AS(build_bank(missing), doctest::Contains("T2"), std::runtime_error);

    BankConfig bad_m = test_bank().config;
    bad_m.default_debounce = 0;
    CHECK_THROWS_AS(build_bank(bad_m), std::invalid_argument);
}

TEST_CASE("build_bank: loads every entry of a valid config") {
    const Bank bank = build_bank(test_bank().config);
    REQUIRE(bank.entries.size() == 2);
    CHECK(bank.entries[0].component == "T2");
    CHECK(bank.entries[1].component == "T3");
    CHECK(bank.entries[0].debounce == 5);
}

TEST_CASE("bank config: text round trip") {
    const std::string text = bank_config_to_text(test_bank().config);
    const BankConfig parsed = bank_config_from_text(text);
    REQUIRE(parsed.entries.size() == 2);
    CHECK(parsed.dt == doctest::Approx(0.1));
    CHECK(parsed.default_debounce == 5);
    CHECK(parsed.entries[0].component == "T2");
    CHECK(parsed.entries[0].model_path == test_bank().config.entries[0].model_path);
    CHECK_THROWS_AS(bank_config_from_text("[bogus]\n"), std::invalid_argument);
    CHECK_THROWS_AS(bank_config_from_text("nonsense\n"), std::invalid_argument);
}

TEST_CASE("process_sample: healthy steady telemetry produces healthy verdicts") {
    const Bank bank = build_bank(test_bank().config);
    EngineParams p;
    FaultSchedule none;
    none.noise_level = 0.02;
    const Trajectory traj =
        simulate(CommandProfile::constant(0.6), 20.0, 0.1, p, none, 515);
    long faulty = 0;
    for (const auto& rec : traj.records) {
        const auto verdicts = process_sample(bank, rec.signals, rec.t);
        REQUIRE(verdicts.size() == 2);
        for (const auto& v : verdicts) faulty += v.faulty;
    }
    // a handful of noise flickers is fine, sustained verdicts are not
    CHECK(faulty < 0.05 * 2.0 * static_cast<double>(traj.size()));
}

TEST_CASE("process_sample: an active T2 gain fault trips only the T2 component") {
    const Bank bank = build_bank(test_bank().config);
    const Trajectory traj = faulted_run(kSigT2, 0.05, 5.0, 75.0, 99);
    long t2_hits = 0, t3_hits = 0, inside = 0;
    for (const auto& rec : traj.records) {
        if (rec.t < 5.0 || rec.t >= 75.0) continue;
        ++inside;
        const auto verdicts = process_sample(bank, rec.signals, rec.t);
        t2_hits += verdicts[0].faulty;
        t3_hits += verdicts[1].faulty;
    }
    CHECK(t2_hits > 0.8 * inside);
    CHECK(t3_hits < 0.1 * inside);
}

TEST_CASE("process_sample: identical sample, identical verdicts; non-finite rejected") {
    const Bank bank = build_bank(test_bank().config);
    std::array<double, kNumSignals> x{};
    x.fill(1.0);
    const auto a = process_sample(bank, x, 0.0);
    const auto b = process_sample(bank, x, 0.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].predicted_class == b[i].predicted_class);
        CHECK(a[i].faulty == b[i].faulty);
    }
    x[3] = std::nan("");
    CHECK_THROWS_AS(process_sample(bank, x, 0.0), std::invalid_argument);
}

TEST_CASE("monitor_stream: empty stream gives an empty summary") {
    const Bank bank = build_bank(test_bank().config);
    std::istringstream in("t,mf,P1,T1,P2,T2,P3,T3,P4,T4,P5,T5,N\n");
    std::ostringstream out;
    const MonitorSummary summary = monitor_stream(in, bank, out);
    CHECK(summary.samples == 0);
    CHECK(!summary.any_fault());
    for (const auto& c : summary.components) CHECK(c.episodes.empty());
}

TEST_CASE("monitor_stream: episode onset lands within the debounce latency bound") {
    const Bank bank = build_bank(test_bank().config);
    const Trajectory traj = faulted_run(kSigT2, 0.05, 40.0, 75.0, 1234);
    std::istringstream in(trajectory_to_csv(traj));
    std::ostringstream out;
    const MonitorSummary summary = monitor_stream(in, bank, out);

    const auto& t2 = summary.components[0];
    REQUIRE(!t2.episodes.empty());
    // detection latency is at least (M-1) dt and the episode starts promptly
    CHECK(t2.episodes[0].onset >= 40.0 + 4 * 0.1 - 1e-9);
    CHECK(t2.episodes[0].onset <= 41.0);
    // untargeted component stays green
    CHECK(summary.components[1].episodes.empty());
    CHECK(summary.any_fault());

    // one status line per component per sample
    long lines = 0;
    std::istringstream recount(out.str());
    std::string line;
    while (std::getline(recount, line)) ++lines;
    CHECK(lines == static_cast<long>(2 * traj.size()));
}

TEST_CASE("monitor_stream: jsonl input and malformed-row policy") {
    const Bank bank = build_bank(test_bank().config);
    std::ostringstream stream;
    stream << R"({"t":0.0,"features":[20,101,300,180,390,172,900,115,800,101,760,52000]})"
           << "\n";
    stream << "garbage line\n";
    for (int i = 1; i < 40; ++i)
        stream << R"({"t":)" << (0.1 * i)
               << R"(,"features":[20,101,300,180,390,172,900,115,800,101,760,52000]})"
               << "\n";
    std::istringstream in(stream.str());
    std::ostringstream out;
    const MonitorSummary summary = monitor_stream(in, bank, out, StreamFormat::Auto);
    CHECK(summary.samples == 40);
    CHECK(summary.skipped == 1);

    // >5% malformed aborts
    std::ostringstream bad;
    for (int i = 0; i < 30; ++i) bad << "junk,row\n";
    std::istringstream bad_in(bad.str());
    std::ostringstream bad_out;
    CHECK_THROWS_WITH_AS(monitor_stream(bad_in, bank, bad_out, StreamFormat::Csv),
                         doctest::Contains("malformed"), std::runtime_error);
}

TEST_CASE("monitor_stream: removing one entry leaves the other's verdicts unchanged") {
    const Trajectory traj = faulted_run(kSigT3, 0.05, 30.0, 60.0, 777);
    const std::string csv = trajectory_to_csv(traj);

    const Bank full = build_bank(test_bank().config);
    BankConfig only_t3_cfg = test_bank().config;
    only_t3_cfg.entries.erase(only_t3_cfg.entries.begin());
    const Bank only_t3 = build_bank(only_t3_cfg);

    std::istringstream in1(csv), in2(csv);
    std::ostringstream out1, out2;
    const MonitorSummary s1 = monitor_stream(in1, full, out1);
    const MonitorSummary s2 = monitor_stream(in2, only_t3, out2);

    REQUIRE(s1.components.size() == 2);
    REQUIRE(s2.components.size() == 1);
    const auto& a = s1.components[1];
    const auto& b = s2.components[0];
    CHECK(a.faulty_verdicts == b.faulty_verdicts);
    REQUIRE(a.episodes.size() == b.episodes.size());
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
        CHECK(a.episodes[i].onset == doctest::Approx(b.episodes[i].onset));
        CHECK(a.episodes[i].end == doctest::Approx(b.episodes[i].end));
    }
}

TEST_CASE("monitor_stream: replay determinism is byte-identical") {
    const Bank bank = build_bank(test_bank().config);
    const Trajectory traj = faulted_run(kSigT2, 0.05, 20.0, 50.0, 31);
    const std::string csv = trajectory_to_csv(traj);
    std::istringstream in1(csv), in2(csv);
    std::ostringstream out1, out2;
    monitor_stream(in1, bank, out1);
    monitor_stream(in2, bank, out2);
    CHECK(out1.str() == out2.str());
}

TEST_CASE("bank entries: a full-coverage feature subset matches the default") {
    BankConfig cfg = test_bank().config;
    for (int f = 0; f < kNumSignals; ++f) cfg.entries[0].feature_subset.push_back(f);
    const Bank masked = build_bank(cfg);
    const Bank full = build_bank(test_bank().config);
    const Trajectory traj = faulted_run(kSigT2, 0.05, 10.0, 60.0, 4242);
    for (std::size_t i = 0; i < traj.size(); i += 7) {
        const auto a = process_sample(masked, traj.records[i].signals, traj.records[i].t);
        const auto b = process_sample(full, traj.records[i].signals, traj.records[i].t);
        CHECK(a[0].predicted_class == b[0].predicted_class);
    }
    // out-of-range subset index is rejected at build time
    cfg.entries[0].feature_subset.push_back(99);
    CHECK_THROWS_AS(build_bank(cfg), std::invalid_argument);
}
