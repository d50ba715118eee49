#pragma once

#include <deque>
#include <utility>
#include <vector>

namespace gtfdi {

// Commanded input trace. Breakpoints are (t, value) pairs sorted by time;
// Hold keeps the previous value until the next breakpoint, Linear ramps
// between them. Constant extrapolation outside the covered span.
class CommandProfile {
  public:
    enum class Interp { Hold, Linear };

    CommandProfile() = default;
    CommandProfile(std::vector<std::pair<double, double>> points, Interp interp);
    static CommandProfile constant(double value);

    double value_at(double t) const;
    Interp interp() const { return interp_; }
    const std::vector<std::pair<double, double>>& points() const { return points_; }

  private:
    std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
    Interp interp_ = Interp::Hold;
};

// First-order-plus-dead-time servo: gain K (L/hr per unit command),
// time constant tau, dead time theta, saturation bounds on the output.
struct FuelSupplyState {
    double gain = 40.0;   // L/hr at full command
    double tau = 0.8;     // s
    double theta = 0.2;   // s
    double y = 0.0;       // current fuel flow, L/hr
    double y_min = 0.0;   // saturation bounds, L/hr
    double y_max = 40.0;
    double t = 0.0;                                  // internal clock
    std::deque<std::pair<double, double>> history;   // (time, command) covering theta

    void validate() const;
};

// Discrete streaming update: exact zero-order-hold discretization of the lag
// applied to the command delayed by theta. Returns the new state and the
// saturated fuel flow. Commands are clamped to [0, 1].
std::pair<FuelSupplyState, double> fuel_supply_step(double command, FuelSupplyState fss,
                                                    double dt);

// Exact continuous response of the same servo to a whole command profile.
// Closed-form piecewise exponential per profile segment, so the integrator
// can sample fuel flow at arbitrary substep times without discretization
// error. Saturation is applied at evaluation.
class FuelResponse {
  public:
    FuelResponse(const CommandProfile& profile, const FuelSupplyState& servo,
                 double horizon_s);

    double at(double t) const;  // L/hr
    double kgps_at(double t, double fuel_density) const {
        return at(t) * fuel_density / 3600.0;
    }

  private:
    struct Segment {
        double t0;      // segment start
        double y0;      // lag state at t0
        double u0;      // delayed command input (L/hr) at t0
        double slope;   // input ramp rate within the segment, L/hr per s
    };
    std::vector<Segment> segments_;
    double tau_, y_min_, y_max_;
};

}  // namespace gtfdi
