#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gtfdi/engine.hpp"
#include "gtfdi/faults.hpp"
#include "gtfdi/fuel.hpp"

namespace gtfdi {

struct TrajectoryRecord {
    double t = 0.0;
    std::array<double, kNumSignals> signals{};  // telemetry order, see Signal
};

struct Trajectory {
    double dt = 0.1;
    std::vector<TrajectoryRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

// Drive the engine over [0, duration) and log the 12 monitored signals every
// dt. The run starts at the equilibrium for the initial command, the servo
// response is evaluated in closed form, and the schedule corrupts delivered
// fuel (actuator faults) and recorded telemetry (sensor faults + noise).
//
// The logged mf channel is the metered flow the servo reports (the healthy
// command response); actuator faults act downstream of that metering point,
// so lock/offset failures show up as engine state inconsistent with mf.
Trajectory simulate(const CommandProfile& profile, double duration, double dt,
                    const EngineParams& params, const FaultSchedule& faults,
                    std::uint64_t seed);

// header `t,mf,P1,T1,P2,T2,P3,T3,P4,T4,P5,T5,N`, fixed 6-decimal fields
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& csv);

}  // namespace gtfdi
