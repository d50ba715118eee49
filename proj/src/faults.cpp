#include "gtfdi/faults.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gtfdi/engine.hpp"
#include "gtfdi/util.hpp"

namespace gtfdi {

bool is_sensor_kind(FaultKind k) {
    return k == FaultKind::SensorBias || k == FaultKind::SensorGain;
}

std::string fault_kind_name(FaultKind k) {
    switch (k) {
        case FaultKind::SensorBias: return "bias";
        case FaultKind::SensorGain: return "gain";
        case FaultKind::ActuatorLockInPlace: return "lock";
        case FaultKind::ActuatorOffset: return "offset";
    }
    return "?";
}

FaultKind fault_kind_from_name(const std::string& name) {
    if (name == "bias") return FaultKind::SensorBias;
    if (name == "gain") return FaultKind::SensorGain;
    if (name == "lock") return FaultKind::ActuatorLockInPlace;
    if (name == "offset") return FaultKind::ActuatorOffset;
    throw std::invalid_argument("unknown fault kind: '" + name + "'");
}

void FaultSpec::validate() const {
    if (!(t_start < t_end))
        throw std::invalid_argument("fault spec: t_start must precede t_end");
    if (!(magnitude >= -0.5 && magnitude <= 0.5))
        throw std::invalid_argument("fault spec: magnitude outside [-0.5, 0.5]");
    if (is_sensor_kind(kind)) {
        if (target < 0 || target >= kNumSignals)
            throw std::invalid_argument("fault spec: sensor fault needs a signal target");
    } else {
        if (target != kActuatorTarget)
            throw std::invalid_argument("fault spec: actuator fault must target the fuel servo");
        if (kind == FaultKind::ActuatorOffset && !(magnitude >= 0.05 && magnitude <= 0.15))
            throw std::invalid_argument("fault spec: offset magnitude outside [0.05, 0.15]");
    }
}

void FaultSchedule::validate() const {
    if (!(noise_level >= 0.0))
        throw std::invalid_argument("fault schedule: noise level must be non-negative");
    for (const auto& s : specs) s.validate();
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            if (specs[i].target != specs[j].target) continue;
            const bool disjoint = specs[i].t_end <= specs[j].t_start ||
                                  specs[j].t_end <= specs[i].t_start;
            if (!disjoint)
                throw std::invalid_argument(
                    "fault schedule: overlapping windows on the same target");
        }
}

double apply_sensor_fault(double value, const FaultSpec& spec, double t) {
    if (!is_sensor_kind(spec.kind))
        throw std::invalid_argument("apply_sensor_fault: spec is an actuator fault");
    if (!spec.active_at(t)) return value;
    if (spec.kind == FaultKind::SensorGain) return value * (1.0 + spec.magnitude);
    return value + spec.magnitude * value;  // bias scaled by the healthy nominal
}

double apply_actuator_fault(double commanded_flow, double last_healthy_flow,
                            const FaultSpec& spec, double t) {
    if (is_sensor_kind(spec.kind))
        throw std::invalid_argument("apply_actuator_fault: spec is a sensor fault");
    if (!spec.active_at(t)) return commanded_flow;
    if (spec.kind == FaultKind::ActuatorLockInPlace) return last_healthy_flow;
    return commanded_flow * (1.0 + spec.magnitude);
}

double add_measurement_noise(double value, double noise_level, Rng& rng) {
    if (!(noise_level >= 0.0))
        throw std::invalid_argument("add_measurement_noise: negative noise level");
    if (noise_level == 0.0) return value;
    const double sigma = 0.5 * noise_level * std::abs(value);
    return value + rng.normal(0.0, sigma);
}

std::vector<FaultSpec> active_faults(const FaultSchedule& schedule, double t) {
    schedule.validate();
    std::vector<FaultSpec> out;
    for (const auto& s : schedule.specs)
        if (s.active_at(t)) out.push_back(s);
    return out;
}

std::string schedule_to_text(const FaultSchedule& schedule) {
    std::ostringstream os;
    os << "noise=" << fmt6(schedule.noise_level) << "\n";
    for (const auto& s : schedule.specs) {
        const std::string target =
            s.target == kActuatorTarget ? "FSS" : signal_names()[s.target];
        os << fault_kind_name(s.kind) << "," << target << "," << fmt6(s.magnitude) << ","
           << fmt6(s.t_start) << "," << fmt6(s.t_end) << "\n";
    }
    return os.str();
}

FaultSchedule schedule_from_text(const std::string& text) {
    FaultSchedule sched;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.rfind("noise=", 0) == 0) {
            sched.noise_level = parse_double(s.substr(6));
            continue;
        }
        const auto fields = split(s, ',');
        if (fields.size() != 5)
            throw std::invalid_argument("fault schedule line " + std::to_string(lineno) +
                                        ": expected kind,target,magnitude,t_start,t_end");
        FaultSpec spec;
        spec.kind = fault_kind_from_name(trim(fields[0]));
        const std::string target = trim(fields[1]);
        if (target == "FSS" || target == "fss") {
            spec.target = kActuatorTarget;
        } else {
            spec.target = signal_index(target);
            if (spec.target < 0)
                throw std::invalid_argument("fault schedule line " + std::to_string(lineno) +
                                            ": unknown target '" + target + "'");
        }
        spec.magnitude = parse_double(fields[2]);
        spec.t_start = parse_double(fields[3]);
        spec.t_end = parse_double(fields[4]);
        sched.specs.push_back(spec);
    }
    sched.validate();
    return sched;
}

}  // namespace gtfdi
