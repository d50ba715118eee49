#include "gtfdi/engine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gtfdi {

namespace {

constexpr double kRpmPerRadPerSec = 60.0 / (2.0 * 3.14159265358979323846);

double pow_safe(double base, double e) { return std::pow(base, e); }

[[noreturn]] void station_error(const std::string& station, const std::string& what,
                                const EngineState& s) {
    std::ostringstream os;
    os << station << ": " << what << " (P2=" << s.P2 << " kPa, P4=" << s.P4
       << " kPa, N=" << s.N << " rpm)";
    throw std::domain_error(os.str());
}

}  // namespace

const std::array<std::string, kNumSignals>& signal_names() {
    static const std::array<std::string, kNumSignals> names = {
        "mf", "P1", "T1", "P2", "T2", "P3", "T3", "P4", "T4", "P5", "T5", "N"};
    return names;
}

int signal_index(const std::string& name) {
    const auto& names = signal_names();
    for (int i = 0; i < kNumSignals; ++i)
        if (names[i] == name) return i;
    return -1;
}

void EngineParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("EngineParams: ") + name +
                                        " must be strictly positive");
    };
    positive(R, "R");
    positive(V1, "V1");
    positive(V2, "V2");
    positive(I, "I");
    positive(cp, "cp");
    positive(LHV, "LHV");
    positive(m_ref, "m_ref");
    positive(P1, "P1");
    positive(T1, "T1");
    positive(N_ref, "N_ref");
    positive(turbine_flow_k, "turbine_flow_k");
    positive(nozzle_area, "nozzle_area");
    positive(fuel_density, "fuel_density");
    if (!(gamma > 1.0 && gamma < 2.0))
        throw std::invalid_argument("EngineParams: gamma must lie in (1, 2)");
    if (!(sigma_cc > 0.0 && sigma_cc <= 1.0))
        throw std::invalid_argument("EngineParams: sigma_cc must lie in (0, 1]");
    auto efficiency = [](double v, const char* name) {
        if (!(v > 0.0 && v <= 1.0))
            throw std::invalid_argument(std::string("EngineParams: ") + name +
                                        " must lie in (0, 1]");
    };
    efficiency(eta_c, "eta_c");
    efficiency(eta_t, "eta_t");
    efficiency(eta_cc, "eta_cc");
}

bool EngineState::valid(const EngineParams& p) const {
    return std::isfinite(P2) && std::isfinite(P4) && std::isfinite(N) && P2 >= p.P1 &&
           P4 >= p.P1 && N > 0.0;
}

namespace {

double compressor_T2(double P2, const EngineParams& p) {
    const double kappa = (p.gamma - 1.0) / p.gamma;
    const double pr = P2 / p.P1;
    return p.T1 * (1.0 + (pow_safe(pr, kappa) - 1.0) / p.eta_c);
}

double compressor_flow(double P2, double N, const EngineParams& p) {
    const double pr = P2 / p.P1;
    const double f = 1.0 - p.flow_droop * (pr - 1.0);
    return std::max(0.0, p.m_ref * (N / p.N_ref) * f);
}

double combustor_T3(double mdot_c, double T2, double fuel_kgps, const EngineParams& p) {
    const double mdot_mix = mdot_c + fuel_kgps;
    if (mdot_mix <= 0.0) return p.T1;
    return (fuel_kgps * p.LHV * p.eta_cc + mdot_c * p.cp * T2) / (mdot_mix * p.cp);
}

// algebraic T4 chain, used both by the full component pass and by the
// partial-derivative probes of the consistent-rate closure
double turbine_T4(const EngineState& s, double fuel_kgps, const EngineParams& p) {
    const double kappa = (p.gamma - 1.0) / p.gamma;
    const double T2 = compressor_T2(s.P2, p);
    const double mdot_c = compressor_flow(s.P2, s.N, p);
    const double T3 = combustor_T3(mdot_c, T2, fuel_kgps, p);
    const double P3 = p.sigma_cc * s.P2;
    const double x = s.P4 / P3;
    return T3 * (1.0 - p.eta_t * (1.0 - pow_safe(x, kappa)));
}

struct NozzleResult {
    double P5, T5, mdot;
};

NozzleResult nozzle_flow(double P4, double T4, const EngineParams& p) {
    const double kappa = (p.gamma - 1.0) / p.gamma;
    const double g = p.gamma;
    const double pr_crit = pow_safe((g + 1.0) / 2.0, 1.0 / kappa);
    const double pr = P4 / p.P1;

    double P5, mach;
    if (pr >= pr_crit) {  // choked
        P5 = P4 / pr_crit;
        mach = 1.0;
    } else {
        P5 = p.P1;
        const double m2 = (2.0 / (g - 1.0)) * (pow_safe(pr, kappa) - 1.0);
        mach = std::sqrt(std::max(0.0, m2));
    }
    const double T5 = T4 * pow_safe(P5 / P4, kappa);
    const double R_si = p.R * 1000.0;  // J/(kg K)
    const double rho5 = P5 * 1000.0 / (R_si * T5);
    const double v5 = mach * std::sqrt(g * R_si * T5);
    return {P5, T5, rho5 * p.nozzle_area * v5};
}

}  // namespace

StationConditions evaluate_components(const EngineState& s, double fuel_kgps,
                                      const EngineParams& p) {
    if (fuel_kgps < 0.0) throw std::domain_error("fuel rate must be non-negative");
    if (!(s.N > 0.0)) station_error("shaft", "speed must be positive", s);
    if (s.P2 < p.P1 * (1.0 - 1e-12))
        station_error("compressor", "pressure ratio below 1", s);
    if (s.P4 < p.P1 * (1.0 - 1e-12)) station_error("nozzle", "P4 below ambient", s);

    StationConditions st;
    st.T2 = compressor_T2(s.P2, p);
    st.mdot_c = compressor_flow(s.P2, s.N, p);
    st.P3 = p.sigma_cc * s.P2;
    st.T3 = combustor_T3(st.mdot_c, st.T2, fuel_kgps, p);
    st.mdot_t = p.turbine_flow_k * st.P3 / std::sqrt(st.T3);
    // the expansion relation extends smoothly to P4 >= P3 (negative turbine
    // work, a restoring condition during transients)
    st.T4 = turbine_T4(s, fuel_kgps, p);

    st.W_c = st.mdot_c * p.cp * (st.T2 - p.T1);
    st.W_t = st.mdot_t * p.cp * (st.T3 - st.T4);

    const NozzleResult nz = nozzle_flow(s.P4, st.T4, p);
    st.P5 = nz.P5;
    st.T5 = nz.T5;
    st.mdot_n = nz.mdot;
    return st;
}

StationConditions evaluate_components(const EngineState& s, double fuel_kgps,
                                      const EngineParams& p, const EngineState& prev,
                                      double dt) {
    StationConditions st = evaluate_components(s, fuel_kgps, p);
    if (dt > 0.0) {
        st.dT2_dt = (st.T2 - compressor_T2(prev.P2, p)) / dt;
        st.dT4_dt = (st.T4 - turbine_T4(prev, fuel_kgps, p)) / dt;
    }
    return st;
}

StateDerivative state_derivatives(const EngineState& s, const StationConditions& st,
                                  const EngineParams& p) {
    if (s.N == 0.0) throw std::domain_error("shaft speed is zero: dN/dt is singular");
    StateDerivative d;
    d.dP2_dt = (p.R / p.V1) * ((st.mdot_c - st.mdot_t) * st.T2 + st.mdot_c * st.dT2_dt);
    d.dP4_dt = (p.R / p.V2) * ((st.mdot_t - st.mdot_n) * st.T4 + st.mdot_t * st.dT4_dt);
    d.dN_dt = (1.0 / s.N) * kRpmPerRadPerSec * kRpmPerRadPerSec *
              ((st.W_t - st.W_c) * 1000.0) / p.I;
    return d;
}

StateDerivative engine_rates(const EngineState& s, double fuel_kgps, const EngineParams& p,
                             StationConditions* stations_out) {
    StationConditions st = evaluate_components(s, fuel_kgps, p);

    // dT2/dt = (dT2/dP2) * dP2/dt; T2 depends on P2 only, so the compressor
    // pressure balance closes to a scalar linear relation in dP2/dt.
    const double kappa = (p.gamma - 1.0) / p.gamma;
    const double dT2dP2 =
        p.T1 * kappa * pow_safe(s.P2 / p.P1, kappa - 1.0) / (p.eta_c * p.P1);
    const double c1 = p.R / p.V1;
    const double denom2 = 1.0 - c1 * st.mdot_c * dT2dP2;
    if (denom2 < 0.05)
        throw std::runtime_error("engine_rates: compressor capacitance closure degenerate");
    const double dP2 = c1 * (st.mdot_c - st.mdot_t) * st.T2 / denom2;
    st.dT2_dt = dT2dP2 * dP2;

    const double dN = (1.0 / s.N) * kRpmPerRadPerSec * kRpmPerRadPerSec *
                      ((st.W_t - st.W_c) * 1000.0) / p.I;

    // dT4/dt is closed through the expansion relation's own-pressure term
    // only, dT4/dt = (dT4/dP4) dP4/dt. The cross couplings (through P2 and N)
    // feed back positively with the small shaft inertia and destabilize large
    // transients, so they are excluded from the rate term.
    const double kappa4 = (p.gamma - 1.0) / p.gamma;
    const double x = s.P4 / st.P3;
    const double b4 = st.T3 * p.eta_t * kappa4 * pow_safe(x, kappa4 - 1.0) / st.P3;

    const double c2 = p.R / p.V2;
    const double denom4 = 1.0 - c2 * st.mdot_t * b4;
    if (denom4 < 0.05)
        throw std::runtime_error("engine_rates: turbine capacitance closure degenerate");
    const double dP4 = c2 * (st.mdot_t - st.mdot_n) * st.T4 / denom4;
    st.dT4_dt = b4 * dP4;
    

    if (stations_out) *stations_out = st;
    return state_derivatives(s, st, p);  // the literal balances on the closed rates
}

namespace {

EngineState axpy(const EngineState& s, double a, const StateDerivative& d) {
    return {s.P2 + a * d.dP2_dt, s.P4 + a * d.dP4_dt, s.N + a * d.dN_dt};
}

}  // namespace

EngineState integrate_step(const EngineState& s, const std::function<double(double)>& fuel_at,
                           double t, double dt, const EngineParams& p) {
    if (!(dt > 0.0 && dt <= 0.1))
        throw std::invalid_argument("integrate_step: dt must lie in (0, 0.1] s");
    try {
        const StateDerivative k1 = engine_rates(s, fuel_at(t), p);
        const double fm = fuel_at(t + 0.5 * dt);
        const StateDerivative k2 = engine_rates(axpy(s, 0.5 * dt, k1), fm, p);
        const StateDerivative k3 = engine_rates(axpy(s, 0.5 * dt, k2), fm, p);
        const StateDerivative k4 = engine_rates(axpy(s, dt, k3), fuel_at(t + dt), p);
        EngineState out = s;
        out.P2 += dt / 6.0 * (k1.dP2_dt + 2 * k2.dP2_dt + 2 * k3.dP2_dt + k4.dP2_dt);
        out.P4 += dt / 6.0 * (k1.dP4_dt + 2 * k2.dP4_dt + 2 * k3.dP4_dt + k4.dP4_dt);
        out.N += dt / 6.0 * (k1.dN_dt + 2 * k2.dN_dt + 2 * k3.dN_dt + k4.dN_dt);
        if (!out.valid(p)) {
            std::ostringstream os;
            os << "integration blow-up at t=" << t << " dt=" << dt << ": state (P2=" << out.P2
               << ", P4=" << out.P4 << ", N=" << out.N << ") violates invariants";
            throw std::runtime_error(os.str());
        }
        return out;
    } catch (const std::domain_error& e) {
        std::ostringstream os;
        os << "integration failed at t=" << t << " dt=" << dt << ": " << e.what();
        throw std::runtime_error(os.str());
    }
}

EngineState integrate_step(const EngineState& s, double fuel_kgps, double dt,
                           const EngineParams& p) {
    return integrate_step(
        s, [fuel_kgps](double) { return fuel_kgps; }, 0.0, dt, p);
}

namespace {

// P2 from the compressor/turbine flow balance at fixed N: fixed-point
// iteration, the turbine side is nearly proportional to P2.
double solve_P2(double N, double fuel_kgps, const EngineParams& p) {
    double P2 = std::max(p.P1 * 1.05, p.P1 + 1.0);
    for (int it = 0; it < 400; ++it) {
        const double mdot_c = compressor_flow(P2, N, p);
        const double T2 = compressor_T2(P2, p);
        const double T3 = combustor_T3(mdot_c, T2, fuel_kgps, p);
        if (!(T3 > 0.0)) throw std::runtime_error("steady_state: non-positive T3");
        const double target = mdot_c * std::sqrt(T3) / (p.turbine_flow_k * p.sigma_cc);
        const double next = 0.5 * (P2 + target);  // damped
        if (std::abs(next - P2) < 1e-12 * P2) return next;
        P2 = next;
    }
    return P2;
}

// P4 from the turbine/nozzle flow balance; mdot_n grows monotonically in P4.
double solve_P4(double P3, double T3, double mdot_t, double fuel_kgps, double P2, double N,
                const EngineParams& p) {
    double lo = p.P1 * (1.0 + 1e-10);
    double hi = P3 * (1.0 - 1e-10);
    if (hi <= lo) throw std::runtime_error("steady_state: P3 at or below ambient");
    auto resid = [&](double P4) {
        const double T4 = turbine_T4({P2, P4, N}, fuel_kgps, p);
        return nozzle_flow(P4, T4, p).mdot - mdot_t;
    };
    double flo = resid(lo);
    double fhi = resid(hi);
    if (flo > 0.0) return lo;
    if (fhi < 0.0) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = resid(mid);
        if (fm <= 0.0)
            lo = mid, flo = fm;
        else
            hi = mid, fhi = fm;
    }
    return 0.5 * (lo + hi);
}

struct Balance {
    EngineState state;
    double work_excess;  // W_t - W_c, kJ/s
};

Balance balance_at(double N, double fuel_kgps, const EngineParams& p) {
    const double P2 = solve_P2(N, fuel_kgps, p);
    const double mdot_c = compressor_flow(P2, N, p);
    const double T2 = compressor_T2(P2, p);
    const double T3 = combustor_T3(mdot_c, T2, fuel_kgps, p);
    const double P3 = p.sigma_cc * P2;
    const double mdot_t = p.turbine_flow_k * P3 / std::sqrt(T3);
    const double P4 = solve_P4(P3, T3, mdot_t, fuel_kgps, P2, N, p);
    const double T4 = turbine_T4({P2, P4, N}, fuel_kgps, p);
    const double W_c = mdot_c * p.cp * (T2 - p.T1);
    const double W_t = mdot_t * p.cp * (T3 - T4);
    return {{P2, P4, N}, W_t - W_c};
}

}  // namespace

EngineState steady_state(double fuel_kgps, const EngineParams& p) {
    if (!(fuel_kgps > 0.0))
        throw std::invalid_argument("steady_state: fuel rate must be positive");
    p.validate();

    // Scan the speed range for a sign change of the work balance, skipping
    // speeds where no consistent flow balance exists (below self-sustain).
    const int kGrid = 60;
    const double n_lo = 0.2 * p.N_ref, n_hi = 1.2 * p.N_ref;
    double prev_n = 0.0, prev_g = 0.0, last_resid = 0.0;
    bool have_prev = false, bracketed = false;
    double a = 0, b = 0;
    for (int i = 0; i <= kGrid; ++i) {
        const double N = n_lo + (n_hi - n_lo) * i / kGrid;
        double g;
        try {
            g = balance_at(N, fuel_kgps, p).work_excess;
        } catch (const std::exception&) {
            have_prev = false;
            continue;
        }
        last_resid = g;
        if (have_prev && prev_g > 0.0 && g <= 0.0) {
            a = prev_n;
            b = N;
            bracketed = true;
            break;
        }
        prev_n = N;
        prev_g = g;
        have_prev = true;
    }
    if (!bracketed) {
        std::ostringstream os;
        os << "steady_state: no equilibrium for fuel rate " << fuel_kgps
           << " kg/s in the modeled speed range (last work residual " << last_resid
           << " kJ/s)";
        throw std::runtime_error(os.str());
    }

    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        const double g = balance_at(mid, fuel_kgps, p).work_excess;
        if (g > 0.0)
            a = mid;
        else
            b = mid;
    }
    return balance_at(0.5 * (a + b), fuel_kgps, p).state;
}

}  // namespace gtfdi
