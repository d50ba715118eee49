#include "gtfdi/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gtfdi/util.hpp"

namespace gtfdi {

using nlohmann::json;

BankConfig bank_config_from_text(const std::string& text) {
    BankConfig config;
    std::istringstream is(text);
    std::string line;
    BankEntryConfig* current = nullptr;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("bank config line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header");
            const std::string section = trim(s.substr(1, s.size() - 2));
            if (section.rfind("component.", 0) != 0)
                fail("expected [component.NAME] section");
            config.entries.emplace_back();
            current = &config.entries.back();
            current->component = section.substr(10);
            if (current->component.empty()) fail("empty component name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (!current) {
            if (key == "dt")
                config.dt = parse_double(value);
            else if (key == "debounce")
                config.default_debounce = static_cast<int>(parse_long(value));
            else
                fail("unknown top-level key '" + key + "'");
            continue;
        }
        if (key == "model") {
            current->model_path = value;
        } else if (key == "debounce") {
            current->debounce = static_cast<int>(parse_long(value));
        } else if (key == "features") {
            if (value == "all") {
                current->feature_subset.clear();
            } else {
                for (const auto& name : split(value, ',')) {
                    const int idx = signal_index(trim(name));
                    if (idx < 0) fail("unknown feature '" + trim(name) + "'");
                    current->feature_subset.push_back(idx);
                }
            }
        } else {
            fail("unknown entry key '" + key + "'");
        }
    }
    return config;
}

std::string bank_config_to_text(const BankConfig& config) {
    std::ostringstream os;
    os << "dt = " << fmt6(config.dt) << "\n";
    os << "debounce = " << config.default_debounce << "\n";
    for (const auto& e : config.entries) {
        os << "\n[component." << e.component << "]\n";
        os << "model = \"" << e.model_path << "\"\n";
        if (e.debounce > 0) os << "debounce = " << e.debounce << "\n";
        if (!e.feature_subset.empty()) {
            os << "features = ";
            for (std::size_t i = 0; i < e.feature_subset.size(); ++i)
                os << (i ? "," : "") << signal_names()[e.feature_subset[i]];
            os << "\n";
        }
    }
    return os.str();
}

Bank build_bank(const BankConfig& config) {
    if (config.entries.empty())
        throw std::invalid_argument("build_bank: a bank must monitor at least one component");
    if (!(config.dt > 0.0)) throw std::invalid_argument("build_bank: dt must be positive");
    std::set<std::string> seen;
    Bank bank;
    bank.dt = config.dt;
    for (const auto& ec : config.entries) {
        if (!seen.insert(ec.component).second)
            throw std::invalid_argument("build_bank: duplicate component '" + ec.component +
                                        "'");
        BankEntry entry;
        entry.component = ec.component;
        try {
            entry.model = load_model(ec.model_path);
        } catch (const std::exception& e) {
            throw std::runtime_error("build_bank: entry '" + ec.component +
                                     "': " + e.what());
        }
        entry.feature_subset = ec.feature_subset;
        std::sort(entry.feature_subset.begin(), entry.feature_subset.end());
        for (int f : entry.feature_subset)
            if (f < 0 || f >= kNumSignals)
                throw std::invalid_argument("build_bank: entry '" + ec.component +
                                            "': feature index out of range");
        entry.debounce = ec.debounce > 0 ? ec.debounce : config.default_debounce;
        if (entry.debounce < 1)
            throw std::invalid_argument("build_bank: entry '" + ec.component +
                                        "': debounce must be >= 1");
        bank.entries.push_back(std::move(entry));
    }
    return bank;
}

std::vector<Verdict> process_sample(const Bank& bank,
                                    const std::array<double, kNumSignals>& features,
                                    double t) {
    (void)t;
    for (double v : features)
        if (!std::isfinite(v))
            throw std::invalid_argument("process_sample: non-finite feature");
    std::vector<Verdict> verdicts;
    verdicts.reserve(bank.entries.size());
    for (const auto& entry : bank.entries) {
        std::array<double, kNumSignals> x = normalize_features(features, entry.model.norm);
        if (!entry.feature_subset.empty()) {
            for (int f = 0; f < kNumSignals; ++f)
                if (!std::binary_search(entry.feature_subset.begin(),
                                        entry.feature_subset.end(), f))
                    x[f] = 0.0;  // training-mean in normalized space
        }
        const int cls = predict(entry.model, x);
        verdicts.push_back({entry.component, cls, cls != 0});
    }
    return verdicts;
}

Debouncer::Debouncer(int m) : m_(m) {
    if (m < 1) throw std::invalid_argument("Debouncer: M must be >= 1");
}

bool Debouncer::update(bool faulty_verdict) {
    if (faulty_verdict == red_) {
        streak_ = 0;
        return red_;
    }
    if (++streak_ >= m_) {
        red_ = faulty_verdict;
        streak_ = 0;
    }
    return red_;
}

bool MonitorSummary::any_fault() const {
    for (const auto& c : components)
        if (!c.episodes.empty()) return true;
    return false;
}

std::string MonitorSummary::to_json() const {
    json j;
    j["samples"] = samples;
    j["skipped"] = skipped;
    j["components"] = json::array();
    for (const auto& c : components) {
        json jc;
        jc["component"] = c.component;
        jc["faulty_verdicts"] = c.faulty_verdicts;
        jc["first_red_t"] = c.first_red_t;
        jc["episodes"] = json::array();
        for (const auto& e : c.episodes)
            jc["episodes"].push_back(
                {{"onset", e.onset}, {"end", e.end}, {"open", e.open}});
        j["components"].push_back(jc);
    }
    return j.dump(1) + "\n";
}

namespace {

struct ParsedRow {
    bool ok = false;
    double t = 0.0;
    std::array<double, kNumSignals> features{};
};

ParsedRow parse_csv_row(const std::string& line) {
    ParsedRow row;
    const auto fields = split(line, ',');
    // trajectory layout (13 cols) or dataset layout (15 cols, label/run_id ignored)
    if (fields.size() != 1 + kNumSignals && fields.size() != 3 + kNumSignals) return row;
    try {
        row.t = parse_double(fields[0]);
        for (int f = 0; f < kNumSignals; ++f) row.features[f] = parse_double(fields[f + 1]);
    } catch (const std::exception&) {
        return row;
    }
    row.ok = true;
    return row;
}

ParsedRow parse_jsonl_row(const std::string& line) {
    ParsedRow row;
    try {
        const json j = json::parse(line);
        row.t = j.at("t").get<double>();
        const auto feats = j.at("features").get<std::vector<double>>();
        if (feats.size() != kNumSignals) return row;
        std::copy(feats.begin(), feats.end(), row.features.begin());
        row.ok = true;
    } catch (const json::exception&) {
        row.ok = false;
    }
    return row;
}

bool all_finite(const std::array<double, kNumSignals>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

MonitorSummary monitor_stream(std::istream& in, const Bank& bank, std::ostream& out,
                              StreamFormat format, int debounce_override) {
    MonitorSummary summary;
    std::vector<Debouncer> debouncers;
    for (const auto& entry : bank.entries) {
        debouncers.emplace_back(debounce_override > 0 ? debounce_override : entry.debounce);
        summary.components.push_back({entry.component, {}, 0, -1.0});
    }

    std::string line;
    bool header_checked = false;
    long rows_seen = 0;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty()) continue;

        StreamFormat fmt = format;
        if (fmt == StreamFormat::Auto) fmt = s[0] == '{' ? StreamFormat::Jsonl : StreamFormat::Csv;
        if (fmt == StreamFormat::Csv && !header_checked) {
            header_checked = true;
            if (s.rfind("t,", 0) == 0) continue;  // header row
        }

        ++rows_seen;
        ParsedRow row = fmt == StreamFormat::Csv ? parse_csv_row(s) : parse_jsonl_row(s);
        if (row.ok && !all_finite(row.features)) row.ok = false;
        if (!row.ok) {
            ++summary.skipped;
            if (rows_seen >= 20 && summary.skipped * 20 > rows_seen)
                throw std::runtime_error("monitor_stream: more than 5% malformed rows (" +
                                         std::to_string(summary.skipped) + " of " +
                                         std::to_string(rows_seen) + ")");
            continue;
        }

        ++summary.samples;
        const auto verdicts = process_sample(bank, row.features, row.t);
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            auto& comp = summary.components[i];
            if (verdicts[i].faulty) ++comp.faulty_verdicts;
            const bool was_red = debouncers[i].red();
            const bool red = debouncers[i].update(verdicts[i].faulty);
            if (red && !was_red) {
                comp.episodes.push_back({row.t, row.t, true});
                if (comp.first_red_t < 0.0) comp.first_red_t = row.t;
            } else if (!red && was_red && !comp.episodes.empty()) {
                comp.episodes.back().end = row.t;
                comp.episodes.back().open = false;
            }
            if (red && !comp.episodes.empty() && comp.episodes.back().open)
                comp.episodes.back().end = row.t;

            json rec;
            rec["t"] = row.t;
            rec["component"] = verdicts[i].component;
            rec["status"] = red ? "red" : "green";
            rec["class"] =
                bank.entries[i].model.class_names[verdicts[i].predicted_class];
            out << rec.dump() << "\n";
        }
    }
    return summary;
}

}  // namespace gtfdi
