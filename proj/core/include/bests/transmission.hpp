#pragma once

// Closed-gas transmission: a servo twists an input bellows, the expelled gas
// is shared by the output units of the same system, and a timing belt holds
// the two input bellows half a turn apart.

#include <cstdint>
#include <string>
#include <vector>

#include "bests/geometry.hpp"

namespace bests::transmission {

enum class Group { kA, kB };

const char* to_string(Group group);

// Twist-to-volume law of an input bellows:
//   v_in(alpha) = v_rest * (1 - (alpha / alpha_max)^squeeze_exponent * gain)
// with gain = min(1, gain_base + gain_per_rib * ribs), clamped at zero.
struct InputUnit {
  double v_rest_ml = 600.0;
  double alpha_max_rad = 3.141592653589793;
  int ribs = 6;
  double squeeze_exponent = 1.0;
  double gain_base = 0.015;
  double gain_per_rib = 0.005;

  double rib_gain() const;
  void validate() const;  // throws DomainError
};

double input_volume(const InputUnit& input, double alpha);

// eta = (v_rest - v_in) / v_rest.
double shrinkage_rate(const InputUnit& input, double alpha);

struct ClosedSystem {
  InputUnit input;
  std::vector<geometry::BellowsUnit> outputs;
  double v_total_ml = 600.0;

  double flat_volume_ml() const;        // sum of output residuals
  double max_output_volume_ml() const;  // all outputs saturated
  double max_saturation_curvature() const;
  void validate() const;
};

// Sets input.v_rest_ml so that the untwisted system balances at rho = 0.
ClosedSystem balanced_at_rest(ClosedSystem sys);

struct Equilibrium {
  double alpha;
  double rho;
  double eta;
  double v_in_ml;
  double v_out_ml;
  double residual_ml;  // v_in + v_out - v_total
};

// Unique rho >= 0 conserving the enclosed gas at twist `alpha`.
// Throws DomainError for an out-of-range twist or an under-inflated system,
// SaturationError when the outputs cannot absorb the expelled gas.
Equilibrium solve_equilibrium(const ClosedSystem& sys, double alpha);

// Both input bellows ride one belt. The servo angle is read through an
// encoder of `ticks_per_rev` counts so that the half-turn offset between A
// and B is exact; each input's twist is its angular distance from its rest
// orientation, mapped linearly onto [0, alpha_max].
struct BeltCoupling {
  double gear_ratio = 1.0;
  double rest_phase_a = 0.0;  // servo phase at which input A is untwisted
  std::int64_t ticks_per_rev = std::int64_t{1} << 20;

  static constexpr double kPhaseOffset = 3.141592653589793;

  void validate() const;

  // Fraction of full twist in [0, 1].
  double twist_fraction(Group group, double servo) const;

 private:
  std::int64_t input_ticks(Group group, double servo) const;
};

struct CoupledState {
  double servo;
  Equilibrium a;
  Equilibrium b;
};

CoupledState coupled_state(const BeltCoupling& belt, const ClosedSystem& sys_a,
                           const ClosedSystem& sys_b, double servo);

struct LegBend {
  std::string id;
  Group group;
  geometry::SizeClass size_class;
  double bend;
};

struct LegBendProfile {
  double eta_a;
  double eta_b;
  std::vector<LegBend> legs;  // outputs of A in order, then outputs of B
};

LegBendProfile leg_bend_profile(const ClosedSystem& sys_a,
                                const ClosedSystem& sys_b,
                                const CoupledState& state);

LegBendProfile leg_bend_profile(const BeltCoupling& belt,
                                const ClosedSystem& sys_a,
                                const ClosedSystem& sys_b, double servo);

}  // namespace bests::transmission
