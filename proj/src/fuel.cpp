#include "gtfdi/fuel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gtfdi {

CommandProfile::CommandProfile(std::vector<std::pair<double, double>> points, Interp interp)
    : points_(std::move(points)), interp_(interp) {
    if (points_.empty()) throw std::invalid_argument("CommandProfile: no breakpoints");
    if (!std::is_sorted(points_.begin(), points_.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        throw std::invalid_argument("CommandProfile: breakpoints must be sorted by time");
}

CommandProfile CommandProfile::constant(double value) {
    return CommandProfile({{0.0, value}}, Interp::Hold);
}

double CommandProfile::value_at(double t) const {
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double v, const auto& pt) { return v < pt.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (interp_ == Interp::Hold) return lo.second;
    const double w = (t - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
}

void FuelSupplyState::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("fuel supply: tau must be positive");
    if (!(theta >= 0.0)) throw std::invalid_argument("fuel supply: theta must be non-negative");
    if (!(gain > 0.0)) throw std::invalid_argument("fuel supply: gain must be positive");
    if (!(y_min <= y_max)) throw std::invalid_argument("fuel supply: bad saturation bounds");
}

std::pair<FuelSupplyState, double> fuel_supply_step(double command, FuelSupplyState fss,
                                                    double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("fuel_supply_step: dt must be positive");
    fss.validate();
    command = std::clamp(command, 0.0, 1.0);
    fss.history.emplace_back(fss.t, command);

    // delayed command in effect over (t, t+dt]; zero before any history ages
    // past the dead time
    const double t_query = fss.t + dt - fss.theta + 1e-12;
    double u = 0.0;
    for (auto it = fss.history.rbegin(); it != fss.history.rend(); ++it) {
        if (it->first <= t_query) {
            u = it->second;
            break;
        }
    }

    const double a = std::exp(-dt / fss.tau);
    fss.y = a * fss.y + (1.0 - a) * fss.gain * u;
    fss.y = std::clamp(fss.y, fss.y_min, fss.y_max);
    fss.t += dt;

    // prune history older than the dead time, keeping one entry at or before it
    const double cutoff = fss.t - fss.theta;
    while (fss.history.size() > 1 && fss.history[1].first <= cutoff) fss.history.pop_front();

    return {fss, fss.y};
}

FuelResponse::FuelResponse(const CommandProfile& profile, const FuelSupplyState& servo,
                           double horizon_s) {
    servo.validate();
    tau_ = servo.tau;
    y_min_ = servo.y_min;
    y_max_ = servo.y_max;

    auto input_at = [&](double t) {
        return servo.gain * std::clamp(profile.value_at(t - servo.theta), 0.0, 1.0);
    };

    std::vector<double> knots{0.0};
    for (const auto& pt : profile.points()) {
        const double tk = pt.first + servo.theta;
        if (tk > 0.0 && tk < horizon_s) knots.push_back(tk);
    }
    knots.push_back(horizon_s);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                knots.end());

    const bool linear = profile.interp() == CommandProfile::Interp::Linear;
    double y = servo.y;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        Segment seg;
        seg.t0 = knots[i];
        seg.y0 = y;
        seg.u0 = input_at(knots[i]);
        const double len = knots[i + 1] - knots[i];
        seg.slope = linear ? (input_at(knots[i + 1]) - seg.u0) / len : 0.0;
        segments_.push_back(seg);
        // closed-form lag response exactly at the segment end
        const double e = std::exp(-len / tau_);
        y = seg.u0 + seg.slope * len - seg.slope * tau_ +
            (seg.y0 - seg.u0 + seg.slope * tau_) * e;
    }
    if (segments_.empty()) segments_.push_back({0.0, y, input_at(0.0), 0.0});
}

double FuelResponse::at(double t) const {
    t = std::max(t, 0.0);
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.t0; });
    const Segment& seg = (it == segments_.begin()) ? segments_.front() : *(it - 1);
    const double dtau = t - seg.t0;
    const double e = std::exp(-dtau / tau_);
    const double y = seg.u0 + seg.slope * dtau - seg.slope * tau_ +
                     (seg.y0 - seg.u0 + seg.slope * tau_) * e;
    return std::clamp(y, y_min_, y_max_);
}

}  // namespace gtfdi
