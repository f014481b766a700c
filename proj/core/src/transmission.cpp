#include "bests/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bests/errors.hpp"

namespace bests::transmission {
namespace {

constexpr int kBisectionIterations = 80;
constexpr double kConservationTolerance = 1e-9;

double output_volume(const ClosedSystem& sys, double rho) {
  double total = 0.0;
  for (const auto& unit : sys.outputs) total += geometry::unit_volume(unit, rho);
  return total;
}

}  // namespace

const char* to_string(Group group) { return group == Group::kA ? "A" : "B"; }

double InputUnit::rib_gain() const {
  return std::min(1.0, gain_base + gain_per_rib * ribs);
}

void InputUnit::validate() const {
  if (!(v_rest_ml > 0.0)) throw DomainError("input v_rest must be positive");
  if (!(alpha_max_rad > 0.0)) {
    throw DomainError("input alpha_max must be positive");
  }
  if (ribs < 0) throw DomainError("input rib count must be >= 0");
  if (!(squeeze_exponent > 0.0)) {
    throw DomainError("input squeeze exponent must be positive");
  }
  if (!(gain_base >= 0.0) || !(gain_per_rib >= 0.0)) {
    throw DomainError("input squeeze gains must be >= 0");
  }
}

double input_volume(const InputUnit& input, double alpha) {
  if (!(alpha >= 0.0 && alpha <= input.alpha_max_rad)) {
    std::ostringstream msg;
    msg << "twist angle " << alpha << " rad outside [0, "
        << input.alpha_max_rad << "]";
    throw DomainError(msg.str());
  }
  const double squeeze =
      std::pow(alpha / input.alpha_max_rad, input.squeeze_exponent) *
      input.rib_gain();
  return std::max(0.0, input.v_rest_ml * (1.0 - squeeze));
}

double shrinkage_rate(const InputUnit& input, double alpha) {
  return (input.v_rest_ml - input_volume(input, alpha)) / input.v_rest_ml;
}

double ClosedSystem::flat_volume_ml() const {
  double total = 0.0;
  for (const auto& unit : outputs) total += unit.v_flat_ml;
  return total;
}

double ClosedSystem::max_output_volume_ml() const {
  double total = 0.0;
  for (const auto& unit : outputs) total += geometry::max_unit_volume(unit);
  return total;
}

double ClosedSystem::max_saturation_curvature() const {
  double rho = 0.0;
  for (const auto& unit : outputs) {
    const double sat = geometry::saturation_curvature(unit);
    if (std::isfinite(sat)) rho = std::max(rho, sat);
  }
  return rho;
}

void ClosedSystem::validate() const {
  input.validate();
  if (outputs.empty()) throw DomainError("closed system has no output units");
  for (const auto& unit : outputs) unit.validate();
  if (!(v_total_ml > 0.0)) throw DomainError("v_total must be positive");
}

ClosedSystem balanced_at_rest(ClosedSystem sys) {
  sys.input.v_rest_ml = sys.v_total_ml - sys.flat_volume_ml();
  return sys;
}

Equilibrium solve_equilibrium(const ClosedSystem& sys, double alpha) {
  const double v_in = input_volume(sys.input, alpha);
  const double eta = (sys.input.v_rest_ml - v_in) / sys.input.v_rest_ml;
  const double tol = kConservationTolerance * sys.v_total_ml;
  auto residual = [&](double rho) {
    return v_in + output_volume(sys, rho) - sys.v_total_ml;
  };
  auto result = [&](double rho) {
    const double v_out = output_volume(sys, rho);
    return Equilibrium{alpha, rho, eta, v_in, v_out,
                       v_in + v_out - sys.v_total_ml};
  };

  const double at_rest = residual(0.0);
  if (at_rest > tol) {
    std::ostringstream msg;
    msg << "system under-inflated by " << at_rest
        << " mL: no non-negative curvature conserves the gas";
    throw DomainError(msg.str());
  }
  if (at_rest >= 0.0) return result(0.0);

  double hi = sys.max_saturation_curvature();
  const double at_full = residual(hi);
  if (at_full < 0.0) {
    if (-at_full <= tol) return result(hi);
    std::ostringstream msg;
    msg << "outputs saturated: " << -at_full
        << " mL of expelled gas cannot be absorbed at twist " << alpha
        << " rad";
    throw SaturationError(msg.str(), -at_full);
  }

  // The residual is strictly increasing in rho up to `hi`; a fixed number of
  // halvings keeps the result monotone in alpha.
  double lo = 0.0;
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return result(hi);
}

void BeltCoupling::validate() const {
  if (!(gear_ratio > 0.0)) throw DomainError("belt gear ratio must be positive");
  if (ticks_per_rev < 4 || ticks_per_rev % 2 != 0) {
    throw DomainError("belt encoder resolution must be an even count >= 4");
  }
}

std::int64_t BeltCoupling::input_ticks(Group group, double servo) const {
  const double ticks_per_rad =
      static_cast<double>(ticks_per_rev) / (2.0 * std::numbers::pi);
  const std::int64_t position = std::llround(gear_ratio * servo * ticks_per_rad);
  const std::int64_t rest =
      std::llround(gear_ratio * rest_phase_a * ticks_per_rad);
  std::int64_t ticks = position - rest;
  if (group == Group::kB) ticks += ticks_per_rev / 2;
  ticks %= ticks_per_rev;
  if (ticks < 0) ticks += ticks_per_rev;
  if (ticks > ticks_per_rev / 2) ticks -= ticks_per_rev;
  return ticks;
}

double BeltCoupling::twist_fraction(Group group, double servo) const {
  const std::int64_t ticks = input_ticks(group, servo);
  return static_cast<double>(ticks < 0 ? -ticks : ticks) /
         static_cast<double>(ticks_per_rev / 2);
}

CoupledState coupled_state(const BeltCoupling& belt, const ClosedSystem& sys_a,
                           const ClosedSystem& sys_b, double servo) {
  const double alpha_a =
      belt.twist_fraction(Group::kA, servo) * sys_a.input.alpha_max_rad;
  const double alpha_b =
      belt.twist_fraction(Group::kB, servo) * sys_b.input.alpha_max_rad;
  return {servo, solve_equilibrium(sys_a, alpha_a),
          solve_equilibrium(sys_b, alpha_b)};
}

LegBendProfile leg_bend_profile(const ClosedSystem& sys_a,
                                const ClosedSystem& sys_b,
                                const CoupledState& state) {
  LegBendProfile profile{state.a.eta, state.b.eta, {}};
  profile.legs.reserve(sys_a.outputs.size() + sys_b.outputs.size());
  for (const auto& unit : sys_a.outputs) {
    profile.legs.push_back({unit.id, Group::kA, unit.size_class,
                            geometry::unit_bend(unit, state.a.rho)});
  }
  for (const auto& unit : sys_b.outputs) {
    profile.legs.push_back({unit.id, Group::kB, unit.size_class,
                            geometry::unit_bend(unit, state.b.rho)});
  }
  return profile;
}

LegBendProfile leg_bend_profile(const BeltCoupling& belt,
                                const ClosedSystem& sys_a,
                                const ClosedSystem& sys_b, double servo) {
  return leg_bend_profile(sys_a, sys_b,
                          coupled_state(belt, sys_a, sys_b, servo));
}

}  // namespace bests::transmission
