#pragma once

#include <array>
#include <functional>
#include <string>

namespace gtfdi {

// The 12 monitored signals, in telemetry column order.
enum Signal : int {
    kSigMf = 0,
    kSigP1,
    kSigT1,
    kSigP2,
    kSigT2,
    kSigP3,
    kSigT3,
    kSigP4,
    kSigT4,
    kSigP5,
    kSigT5,
    kSigN,
    kNumSignals = 12,
};

const std::array<std::string, kNumSignals>& signal_names();
int signal_index(const std::string& name);  // -1 if unknown

// Engine constants. Pressures kPa, temperatures K, works kJ/s, speed rpm.
//
// The first block holds the rig reference values; the second block closes the
// component relations (efficiencies, flow maps, nozzle geometry) with values
// chosen for a stable, monotone desk-scale operating envelope.
struct EngineParams {
    double R = 0.287;      // gas constant, kJ/(kg K)
    double V1 = 0.24;      // compressor-side pseudo-volume, m^3
    double V2 = 0.36;      // turbine-side pseudo-volume, m^3
    double I = 3.2e-4;     // shaft inertia, kg m^2
    double gamma = 1.4;    // heat-capacity ratio
    double cp = 1.075;     // specific heat, kJ/(kg K)
    double LHV = 43000.0;  // fuel heating value, kJ/kg
    double sigma_cc = 0.96;
    double m_ref = 0.5;  // reference air mass flow, kg/s
    double P1 = 101.0;   // ambient pressure, kPa
    double T1 = 300.0;   // ambient temperature, K

    double eta_c = 0.75;
    double eta_t = 0.80;
    double eta_cc = 0.98;
    double N_ref = 78000.0;  // rpm

    // mass-flow maps
    double flow_droop = 0.03;        // compressor flow falloff per unit of (P2/P1 - 1)
    double turbine_flow_k = 0.046;   // mdot_t = k * P3 / sqrt(T3), kg sqrt(K)/(kPa s)
    double nozzle_area = 2.2e-3;     // m^2
    double fuel_density = 0.8;       // kg/L

    void validate() const;  // throws std::invalid_argument on a bad constant
};

// State vector of the three ODEs.
struct EngineState {
    double P2 = 101.0;  // kPa
    double P4 = 101.0;  // kPa
    double N = 40000.0;  // rpm

    bool valid(const EngineParams& p) const;
};

// Everything the algebraic component pass produces for one state.
struct StationConditions {
    double T2 = 0, T3 = 0, T4 = 0, T5 = 0;  // K
    double P3 = 0, P5 = 0;                  // kPa
    double mdot_c = 0, mdot_t = 0, mdot_n = 0;  // kg/s
    double W_c = 0, W_t = 0;                // kJ/s
    double dT2_dt = 0, dT4_dt = 0;          // K/s
};

struct StateDerivative {
    double dP2_dt = 0;  // kPa/s
    double dP4_dt = 0;  // kPa/s
    double dN_dt = 0;   // rpm/s
};

// One pass of the engine calculation: compressor, combustor, turbine, nozzle.
// Temperature rates are left at zero; the overload below fills them from the
// previous step's state via the component relations.
StationConditions evaluate_components(const EngineState& s, double fuel_kgps,
                                      const EngineParams& p);
StationConditions evaluate_components(const EngineState& s, double fuel_kgps,
                                      const EngineParams& p, const EngineState& prev,
                                      double dt);

// dP2/dt = (R/V1)[(mdot_c - mdot_t) T2 + mdot_c dT2/dt]
// dP4/dt = (R/V2)[(mdot_t - mdot_n) T4 + mdot_t dT4/dt]
// dN/dt  = (1/N)(60/2pi)^2 (W_t - W_c)/I,  works converted kJ/s -> W
StateDerivative state_derivatives(const EngineState& s, const StationConditions& st,
                                  const EngineParams& p);

// Time derivative with the temperature-rate terms closed self-consistently:
// dT2/dt and dT4/dt are eliminated through the algebraic station relations so
// the field depends on (state, fuel) only. This is what the integrator uses.
StateDerivative engine_rates(const EngineState& s, double fuel_kgps, const EngineParams& p,
                             StationConditions* stations_out = nullptr);

// Fixed-step RK4. The time-varying overload samples fuel at the substep times.
EngineState integrate_step(const EngineState& s, double fuel_kgps, double dt,
                           const EngineParams& p);
EngineState integrate_step(const EngineState& s, const std::function<double(double)>& fuel_at,
                           double t, double dt, const EngineParams& p);

// Equilibrium for a constant fuel rate: flow balances solved per component,
// shaft speed by bracketed bisection on the work balance.
EngineState steady_state(double fuel_kgps, const EngineParams& p);

}  // namespace gtfdi
