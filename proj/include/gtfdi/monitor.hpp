#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "gtfdi/classifiers.hpp"

namespace gtfdi {

struct BankEntryConfig {
    std::string component;
    std::string model_path;
    std::vector<int> feature_subset;  // empty = full 12-vector
    int debounce = 0;                 // 0 = use the bank default
};

struct BankConfig {
    std::vector<BankEntryConfig> entries;
    double dt = 0.1;
    int default_debounce = 5;
};

// flat `key = value` format with one [component.NAME] section per entry
BankConfig bank_config_from_text(const std::string& text);
std::string bank_config_to_text(const BankConfig& config);

struct BankEntry {
    std::string component;
    TrainedModel model;
    std::vector<int> feature_subset;
    int debounce = 5;
};

struct Bank {
    std::vector<BankEntry> entries;
    double dt = 0.1;
};

// Loads every model and validates the wiring (unique components, loadable
// models, in-range feature subsets). Throws naming the offending entry.
Bank build_bank(const BankConfig& config);

struct Verdict {
    std::string component;
    int predicted_class = 0;
    bool faulty = false;
};

// Every entry normalizes with its own stats and predicts independently.
// Features excluded by an entry's subset are neutralized at the training
// mean before prediction.
std::vector<Verdict> process_sample(const Bank& bank,
                                    const std::array<double, kNumSignals>& features, double t);

// Green -> Red after M consecutive faulty raw verdicts, Red -> Green after M
// consecutive healthy ones.
class Debouncer {
  public:
    explicit Debouncer(int m);
    bool update(bool faulty_verdict);  // returns the debounced state (true = Red)
    bool red() const { return red_; }

  private:
    int m_;
    int streak_ = 0;   // length of the current run of verdicts opposing the state
    bool red_ = false;
};

struct FaultEpisode {
    double onset = 0.0;
    double end = 0.0;  // end of stream if still red
    bool open = false;
};

struct ComponentSummary {
    std::string component;
    std::vector<FaultEpisode> episodes;
    long faulty_verdicts = 0;
    double first_red_t = -1.0;  // -1 when never red
};

struct MonitorSummary {
    std::vector<ComponentSummary> components;
    long samples = 0;
    long skipped = 0;  // malformed or non-finite rows
    bool any_fault() const;
    std::string to_json() const;
};

enum class StreamFormat { Csv, Jsonl, Auto };

// Reads trajectory CSV or JSONL records {"t":..,"features":[12]}, writes one
// status line per component per sample to `out`, and returns the episode
// summary. Aborts if more than 5% of rows are malformed.
MonitorSummary monitor_stream(std::istream& in, const Bank& bank, std::ostream& out,
                              StreamFormat format = StreamFormat::Auto,
                              int debounce_override = 0);

}  // namespace gtfdi
