#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "shadowfield/geometry.hpp"
#include "shadowfield/occupancy.hpp"
#include "shadowfield/shadow_field.hpp"
#include "shadowfield/visibility_cost.hpp"

namespace shadowfield {

/// Planner state (x, y, z, yaw, pitch) and velocity command of the same layout.
using State = Eigen::Matrix<double, 5, 1>;
using Control = Eigen::Matrix<double, 5, 1>;

inline State make_state(const Vec3& position, double yaw, double pitch) {
  State s;
  s << position, yaw, pitch;
  return s;
}

struct SceneBox {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();
  float occupancy = 1.0f;
};

struct ControlBounds {
  double max_speed = 1.0;         // m/s, norm of the linear part
  double max_angular_rate = 3.0;  // rad/s, per yaw / pitch component
};

struct CostWeights {
  double input_linear = 0.1;   // R on (vx, vy, vz)
  double input_angular = 0.01; // R on (yaw rate, pitch rate)
  double visibility = 1.0;
  double orientation = 1.0;
  double goal = 0.0;           // terminal |p_N - goal|^2 weight; 0 disables it
};

struct SolverOptions {
  int max_iterations = 100;
  double initial_step = 1.0;
  double max_step = 100.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  double gradient_tolerance = 1e-6;
  double decrease_tolerance = 1e-9;
};

struct Scenario {
  GridGeometry grid;
  std::vector<SceneBox> scene;
  double threshold = kDefaultOccupancyThreshold;
  Vec3 light = Vec3::Zero();
  State start = State::Zero();
  std::optional<Vec3> goal;
  int horizon_steps = 20;
  double dt = 0.05;
  ControlBounds bounds;
  CostWeights weights;
  BarrierParams barrier;
  OrientationParams orientation;
  SolverOptions solver;
  int rh_steps = 40;

  /// Throws ScenarioError naming the first invalid key.
  void validate() const;
};

/// Names the offending key as a dotted path, e.g. "horizon.dt".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// JSON scenario. Required keys: scene, light, start. Optional: grid
/// {origin, size, resolution}, threshold, goal, horizon {steps, dt}, bounds
/// {max_speed, max_angular_rate}, weights {input, input_angular, visibility,
/// orientation, goal}, barrier {delta}, orientation {alpha, beta, epsilon,
/// roll}, solver {...}, rh_steps. Unknown keys are rejected.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Occupancy grid of the scenario's boxes.
OccupancyGrid build_scene(const Scenario& scenario);

}  // namespace shadowfield
