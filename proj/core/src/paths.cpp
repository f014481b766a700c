#include <cmath>
#include <numbers>

#include "bests/errors.hpp"
#include "bests/locomotion.hpp"

namespace bests::locomotion {

std::vector<Point> s_curve_waypoints(double radius_cm, int points_per_arc) {
  if (!(radius_cm > 0.0) || points_per_arc < 2) {
    throw DomainError("S curve needs a positive radius and >= 2 points per arc");
  }
  constexpr double pi = std::numbers::pi;
  std::vector<Point> points{{0.0, 0.0}};
  // Left semicircle about (0, R), then right semicircle about (0, 3R).
  for (int i = 1; i <= points_per_arc; ++i) {
    const double psi = pi * i / points_per_arc;
    points.push_back(
        {radius_cm * std::sin(psi), radius_cm - radius_cm * std::cos(psi)});
  }
  for (int i = 1; i <= points_per_arc; ++i) {
    const double psi = pi * i / points_per_arc;
    points.push_back({-radius_cm * std::sin(psi),
                      3.0 * radius_cm - radius_cm * std::cos(psi)});
  }
  const double chord = 2.0 * radius_cm * std::sin(0.5 * pi / points_per_arc);
  points.push_back({chord, 4.0 * radius_cm});
  return points;
}

std::vector<Point> o_curve_waypoints(double radius_cm, int points) {
  if (!(radius_cm > 0.0) || points < 3) {
    throw DomainError("O curve needs a positive radius and >= 3 points");
  }
  constexpr double pi = std::numbers::pi;
  std::vector<Point> out{{0.0, 0.0}};
  // Clockwise about (0, -R).
  for (int i = 1; i <= points; ++i) {
    const double psi = 2.0 * pi * i / points;
    out.push_back(
        {radius_cm * std::sin(psi), -radius_cm + radius_cm * std::cos(psi)});
  }
  const double chord = 2.0 * radius_cm * std::sin(pi / points);
  out.push_back({chord, 0.0});
  return out;
}

}  // namespace bests::locomotion
