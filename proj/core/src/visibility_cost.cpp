#include "shadowfield/visibility_cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace shadowfield {
namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kComplementClamp = 1e-6;
constexpr double kChartStep = 1e-6;

void require_unit(const Quat& q, const char* name) {
  if (!(std::abs(q.norm() - 1.0) <= kUnitTolerance)) {
    throw std::invalid_argument(std::string(name) + " quaternion is not unit norm");
  }
}

Quat body_perturbed(const Quat& q, const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle == 0.0) return q;
  return (q * Quat(Eigen::AngleAxisd(angle, rotvec / angle))).normalized();
}

}  // namespace

void BarrierParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("barrier delta must lie in (0, 1)");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw std::invalid_argument("barrier weight must be >= 0");
}

void OrientationParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("orientation alpha must lie in (0, 1)");
  if (beta == 0.0 || !std::isfinite(beta)) throw std::invalid_argument("orientation beta must be nonzero");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("orientation epsilon must be > 0");
  if (!std::isfinite(roll)) throw std::invalid_argument("orientation roll must be finite");
}

ScalarWithDerivative relaxed_log_barrier(double z, double delta) {
  if (z >= delta) return {-std::log(z), -1.0 / z};
  const double s = (z - 2.0 * delta) / delta;
  return {0.5 * (s * s - 1.0) - std::log(delta), (z - 2.0 * delta) / (delta * delta)};
}

CostWithGradient visibility_cost(const ShadowField& field, const Vec3& x_ee, const BarrierParams& params) {
  const FieldSample f = field.sample_with_gradient(x_ee);
  const ScalarWithDerivative b = relaxed_log_barrier(f.value, params.delta);
  return {params.weight * b.value, params.weight * b.derivative * f.gradient};
}

Quat quaternion_from_ypr(double yaw, double pitch, double roll) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

Quat desired_orientation(const Vec3& p_ee, const Vec3& p_light, double roll) {
  const Vec3 v = p_light - p_ee;
  if (!(v.norm() > 0.0)) throw std::invalid_argument("end effector coincides with the light");
  const double yaw = std::atan2(v.y(), v.x());
  const double pitch = -std::atan2(v.z(), std::hypot(v.x(), v.y()));
  return quaternion_from_ypr(yaw, pitch, roll);
}

double quaternion_error_complement(const Quat& current, const Quat& desired) {
  require_unit(current, "current");
  require_unit(desired, "desired");
  const Quat d = current.conjugate() * desired;
  const double angle = 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
  return std::clamp(1.0 - angle / std::numbers::pi, 0.0, 1.0);
}

double gamma_scale(double error_complement, const OrientationParams& params) {
  const double e = std::clamp(error_complement, kComplementClamp, 1.0 - kComplementClamp);
  return std::max(params.alpha, std::log(params.epsilon * e / (1.0 - e))) / params.beta;
}

double orientation_penalty(double error_complement, const OrientationParams& params) {
  const double miss = 1.0 - error_complement;
  return gamma_scale(error_complement, params) * miss * miss;
}

OrientationCost orientation_cost(const Pose& pose, const Vec3& p_light, const OrientationParams& params) {
  const Quat desired = desired_orientation(pose.position, p_light, params.roll);
  const auto value_at = [&](const Quat& q) {
    return orientation_penalty(quaternion_error_complement(q, desired), params);
  };
  OrientationCost out;
  out.error_complement = quaternion_error_complement(pose.orientation, desired);
  out.value = orientation_penalty(out.error_complement, params);
  for (int i = 0; i < 3; ++i) {
    Vec3 h = Vec3::Zero();
    h[i] = kChartStep;
    out.gradient[i] = (value_at(body_perturbed(pose.orientation, h)) - value_at(body_perturbed(pose.orientation, -h))) /
                      (2.0 * kChartStep);
  }
  return out;
}

}  // namespace shadowfield
