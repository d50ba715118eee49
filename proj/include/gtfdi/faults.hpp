#pragma once

#include <string>
#include <vector>

#include "gtfdi/rng.hpp"

namespace gtfdi {

enum class FaultKind { SensorBias, SensorGain, ActuatorLockInPlace, ActuatorOffset };

bool is_sensor_kind(FaultKind k);
std::string fault_kind_name(FaultKind k);
FaultKind fault_kind_from_name(const std::string& name);

// target of an actuator fault (the fuel servo) instead of a signal index
inline constexpr int kActuatorTarget = -1;

struct FaultSpec {
    FaultKind kind;
    int target;        // signal index 0..11, or kActuatorTarget
    double magnitude;  // fraction, e.g. +0.05 = +5%
    double t_start;    // s, inclusive
    double t_end;      // s, exclusive

    bool active_at(double t) const { return t >= t_start && t < t_end; }
    void validate() const;
};

struct FaultSchedule {
    std::vector<FaultSpec> specs;
    double noise_level = 0.02;  // 2-sigma fraction of signal magnitude

    void validate() const;  // per-spec checks plus same-target overlap rejection
};

// Sensor corruption inside the fault window. `value` is the healthy reading,
// which also serves as the operating-point nominal for the bias kind.
double apply_sensor_fault(double value, const FaultSpec& spec, double t);

// Actuator corruption of the delivered fuel flow. Lock-in-place holds the
// flow captured at fault onset; offset amplifies the commanded flow.
double apply_actuator_fault(double commanded_flow, double last_healthy_flow,
                            const FaultSpec& spec, double t);

// Additive white Gaussian noise with 2*sigma = noise_level * |value|.
double add_measurement_noise(double value, double noise_level, Rng& rng);

// Specs whose window contains t, in schedule order.
std::vector<FaultSpec> active_faults(const FaultSchedule& schedule, double t);

// One spec per line `kind,target,magnitude,t_start,t_end`, plus `noise=<level>`.
std::string schedule_to_text(const FaultSchedule& schedule);
FaultSchedule schedule_from_text(const std::string& text);

}  // namespace gtfdi
