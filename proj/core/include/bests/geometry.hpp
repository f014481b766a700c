#pragma once

// Arc-geometry bending model of heat-bonded bellows segments.
//
// A segment cross-section consists of a separated arc of length s1 and a
// contacted straight run of length s2 with s1 + s2 = r. All segments of a
// closed system share one curvature rho (uniform internal pressure).
//
// Units: millimetres, radians, millilitres.

#include <string>

namespace bests::geometry {

enum class SizeClass { kLarge, kSmall };

const char* to_string(SizeClass size_class);

// Fabrication-time geometry of one bellows segment. The split between arc
// and straight run is a fixed fraction `beta` of the film radius.
class SegmentGeometry {
 public:
  // Throws DomainError unless radius_mm > 0, depth_mm > 0 and 0 <= beta < 1.
  SegmentGeometry(double radius_mm, double beta, double depth_mm);

  double radius() const noexcept { return radius_; }
  double beta() const noexcept { return beta_; }
  double depth() const noexcept { return depth_; }
  double arc_length() const noexcept { return arc_length_; }            // s1
  double straight_length() const noexcept { return straight_length_; }  // s2

  // Half central angle at which the segment stops bending further.
  double theta_cap() const noexcept { return theta_cap_; }

 private:
  double radius_;
  double beta_;
  double depth_;
  double arc_length_;
  double straight_length_;
  double theta_cap_;
};

struct BellowsUnit {
  std::string id;
  SizeClass size_class = SizeClass::kLarge;
  SegmentGeometry segment{30.0, 0.5, 40.0};
  int n_segments = 1;
  double v_flat_ml = 0.0;  // residual gas held by the flat laminate

  // Throws DomainError when n_segments < 1 or v_flat_ml < 0.
  void validate() const;
};

struct JointBend {
  double k;    // length of A-B (mm)
  double phi;  // bending angle of half a segment (rad)
};

// Law-of-cosines / law-of-sines construction for a straight run `s2`
// joined to an arc of length `s1` whose half central angle is `theta`.
// Requires s1 >= 0, s2 >= 0, s1 + s2 > 0 and 0 <= theta <= pi/2.
JointBend joint_bend(double s1, double s2, double theta);

// theta = s1 * rho / 2. Throws DomainError for rho < 0.
double central_angle(const SegmentGeometry& seg, double rho);

struct HalfSegmentBend {
  double k;
  double phi;
  bool saturated;
};

// Evaluates the joint at the current curvature; past the cap the joint is
// held at theta_cap and `saturated` is set.
HalfSegmentBend half_segment_bend(const SegmentGeometry& seg, double rho);

struct BendState {
  double rho;
  double radius_of_curvature;  // +inf at rho == 0
  double theta;                // s1 * rho / 2, unclamped
  double k;
  double phi;
  double unit_bend;
  bool saturated;
};

BendState bend_state(const BellowsUnit& unit, double rho);

// 2 * phi * n_segments.
double unit_bend(const BellowsUnit& unit, double rho);

// Enclosed gas volume in mL: per segment the circular-segment area between
// arc and chord times the segment depth, plus the flat residual.
double unit_volume(const BellowsUnit& unit, double rho);

// Smallest rho at which the unit saturates; +inf when beta == 0.
double saturation_curvature(const BellowsUnit& unit);

// Bend and volume at (and beyond) saturation.
double max_unit_bend(const BellowsUnit& unit);
double max_unit_volume(const BellowsUnit& unit);

}  // namespace bests::geometry
