#pragma once

#include <Eigen/Geometry>

#include "shadowfield/geometry.hpp"
#include "shadowfield/shadow_field.hpp"

namespace shadowfield {

using Quat = Eigen::Quaterniond;

struct BarrierParams {
  double delta = 0.1;   // in (0, 1)
  double weight = 1.0;  // >= 0

  /// Throws std::invalid_argument when out of range.
  void validate() const;
};

struct OrientationParams {
  double alpha = 0.1;    // in (0, 1)
  double beta = 1.0;     // != 0
  double epsilon = 10.0; // > 0
  double roll = 0.0;     // fixed roll of the locked orientation, rad

  void validate() const;
};

/// End-effector pose. The camera boresight is the body +x axis.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

struct ScalarWithDerivative {
  double value = 0.0;
  double derivative = 0.0;
};

/// -ln z above delta, quadratic extension below it; C1 at z = delta.
ScalarWithDerivative relaxed_log_barrier(double z, double delta);

struct CostWithGradient {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};

/// weight * barrier(F(x_ee)), gradient wrt x_ee through the interpolant.
CostWithGradient visibility_cost(const ShadowField& field, const Vec3& x_ee, const BarrierParams& params);

/// Intrinsic Z-Y-X rotation.
Quat quaternion_from_ypr(double yaw, double pitch, double roll);

/// Orientation whose +x axis points from p_ee to p_light. Throws
/// std::invalid_argument when the points coincide.
Quat desired_orientation(const Vec3& p_ee, const Vec3& p_light, double roll);

/// 1 - geodesic_angle / pi, in [0, 1]; invariant to q -> -q. Throws
/// std::invalid_argument unless both inputs are unit within 1e-9.
double quaternion_error_complement(const Quat& current, const Quat& desired);

/// max(alpha, ln(epsilon * e / (1 - e))) / beta with e clamped to [1e-6, 1 - 1e-6].
double gamma_scale(double error_complement, const OrientationParams& params);

/// gamma(e) * (1 - e)^2.
double orientation_penalty(double error_complement, const OrientationParams& params);

struct OrientationCost {
  double value = 0.0;
  double error_complement = 1.0;
  /// d value / d r for the perturbed orientation q * R(r), r a body-frame
  /// rotation vector. Central differences.
  Vec3 gradient = Vec3::Zero();
};

OrientationCost orientation_cost(const Pose& pose, const Vec3& p_light, const OrientationParams& params);

}  // namespace shadowfield
