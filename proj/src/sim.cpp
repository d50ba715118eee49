#include "gtfdi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gtfdi/util.hpp"

namespace gtfdi {

Trajectory simulate(const CommandProfile& profile, double duration, double dt,
                    const EngineParams& params, const FaultSchedule& faults,
                    std::uint64_t seed) {
    if (duration < 0.0) throw std::invalid_argument("simulate: negative duration");
    if (!(dt > 0.0 && dt <= 0.1))
        throw std::invalid_argument("simulate: dt must lie in (0, 0.1] s");
    params.validate();
    faults.validate();

    Trajectory traj;
    traj.dt = dt;
    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    if (n == 0) return traj;
    traj.records.reserve(n);

    FuelSupplyState servo;
    servo.y = servo.gain * std::clamp(profile.value_at(0.0), 0.0, 1.0);
    const FuelResponse healthy(profile, servo, duration + dt);

    // capture the healthy flow at each actuator fault onset for lock-in-place
    std::vector<std::pair<FaultSpec, double>> actuator_faults;
    std::vector<FaultSpec> sensor_faults;
    for (const auto& spec : faults.specs) {
        if (is_sensor_kind(spec.kind))
            sensor_faults.push_back(spec);
        else
            actuator_faults.emplace_back(spec, healthy.at(spec.t_start));
    }

    auto delivered_kgps = [&](double t) {
        double flow = healthy.at(t);
        for (const auto& [spec, onset_flow] : actuator_faults)
            flow = apply_actuator_fault(flow, onset_flow, spec, t);
        return flow * params.fuel_density / 3600.0;
    };

    EngineState state = steady_state(std::max(delivered_kgps(0.0), 1e-6), params);
    Rng rng(seed);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const StationConditions st = evaluate_components(state, delivered_kgps(t), params);

        TrajectoryRecord rec;
        rec.t = t;
        rec.signals[kSigMf] = healthy.at(t);
        rec.signals[kSigP1] = params.P1;
        rec.signals[kSigT1] = params.T1;
        rec.signals[kSigP2] = state.P2;
        rec.signals[kSigT2] = st.T2;
        rec.signals[kSigP3] = st.P3;
        rec.signals[kSigT3] = st.T3;
        rec.signals[kSigP4] = state.P4;
        rec.signals[kSigT4] = st.T4;
        rec.signals[kSigP5] = st.P5;
        rec.signals[kSigT5] = st.T5;
        rec.signals[kSigN] = state.N;

        for (const auto& spec : sensor_faults)
            rec.signals[spec.target] = apply_sensor_fault(rec.signals[spec.target], spec, t);
        if (faults.noise_level > 0.0)
            for (auto& v : rec.signals)
                v = add_measurement_noise(v, faults.noise_level, rng);

        traj.records.push_back(rec);

        if (k + 1 < n) {
            try {
                state = integrate_step(state, delivered_kgps, t, dt, params);
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "simulate: " << e.what() << " (sample " << k << ", t=" << t << " s)";
                throw std::runtime_error(os.str());
            }
        }
    }
    return traj;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t";
    for (const auto& name : signal_names()) os << "," << name;
    os << "\n";
    for (const auto& rec : traj.records) {
        os << fmt6(rec.t);
        for (double v : rec.signals) os << "," << fmt6(v);
        os << "\n";
    }
    return os.str();
}

Trajectory trajectory_from_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("trajectory CSV: empty input");
    const auto header = split(trim(line), ',');
    if (header.size() != 1 + kNumSignals || header[0] != "t")
        throw std::invalid_argument("trajectory CSV: unexpected header");
    for (int i = 0; i < kNumSignals; ++i)
        if (header[i + 1] != signal_names()[i])
            throw std::invalid_argument("trajectory CSV: unexpected column '" + header[i + 1] +
                                        "'");
    Trajectory traj;
    std::size_t lineno = 1;
    double prev_t = 0.0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty()) continue;
        const auto fields = split(s, ',');
        if (fields.size() != 1 + kNumSignals)
            throw std::invalid_argument("trajectory CSV line " + std::to_string(lineno) +
                                        ": wrong field count");
        TrajectoryRecord rec;
        rec.t = parse_double(fields[0]);
        for (int i = 0; i < kNumSignals; ++i) rec.signals[i] = parse_double(fields[i + 1]);
        if (traj.records.size() == 1) traj.dt = rec.t - prev_t;
        prev_t = rec.t;
        traj.records.push_back(rec);
    }
    return traj;
}

}  // namespace gtfdi
