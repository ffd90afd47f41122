#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "shadowfield/scenario.hpp"
#include "shadowfield/shadow_field.hpp"
#include "shadowfield/visibility_cost.hpp"

namespace shadowfield {

/// Maps the planner state to the camera frame. The default is the identity on
/// position; articulated models override both members consistently.
class EndEffectorModel {
 public:
  virtual ~EndEffectorModel() = default;
  virtual Vec3 position(const State& x) const { return x.head<3>(); }
  /// d position / d state.
  virtual Eigen::Matrix<double, 3, 5> jacobian(const State& /*x*/) const {
    Eigen::Matrix<double, 3, 5> j = Eigen::Matrix<double, 3, 5>::Zero();
    j.leftCols<3>().setIdentity();
    return j;
  }
};

/// Costs charged for step k: input effort of u_k and the state terms at x_{k+1}.
struct StepCost {
  double input = 0.0;
  double visibility = 0.0;
  double orientation = 0.0;
  double total() const { return input + visibility + orientation; }
};

struct CostBreakdown {
  std::vector<StepCost> steps;
  double input = 0.0;
  double visibility = 0.0;
  double orientation = 0.0;
  double terminal = 0.0;
  double total = 0.0;
};

struct Trajectory {
  std::vector<State> states;  // controls.size() + 1 entries
  std::vector<Control> controls;
  CostBreakdown cost;         // filled by total_cost / solve
};

Pose pose_of(const State& x, double roll, const EndEffectorModel& ee = EndEffectorModel{});

/// Euler integration of x' = u. Throws std::invalid_argument when a control
/// exceeds the scenario bounds.
Trajectory rollout(const Scenario& scenario, const State& x0, const std::vector<Control>& controls);

/// Projection onto the control bounds: linear part into the speed ball,
/// angular rates clamped per component.
Control project_control(const Control& u, const ControlBounds& bounds);

/// sum_k [u_k' R u_k + vis(x_{k+1}) + w_o l_o(x_{k+1})] dt + w_goal |p_N - goal|^2.
CostBreakdown total_cost(const Trajectory& trajectory, const Scenario& scenario, const ShadowField& field,
                         const EndEffectorModel& ee = EndEffectorModel{});

/// d total_cost / d u_k for every k, by the adjoint of the rollout.
std::vector<Control> cost_gradient(const Trajectory& trajectory, const Scenario& scenario, const ShadowField& field,
                                   const EndEffectorModel& ee = EndEffectorModel{});

struct SolveStats {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double projected_gradient_norm = 0.0;
};

/// Projected gradient descent with Armijo backtracking from `warm_start`
/// (zeros when absent, projected onto the bounds). The returned cost never
/// exceeds the warm start's. Throws std::runtime_error on a non-finite cost.
Trajectory solve(const Scenario& scenario, const ShadowField& field, const State& x0,
                 const std::optional<std::vector<Control>>& warm_start = std::nullopt,
                 const EndEffectorModel& ee = EndEffectorModel{}, SolveStats* stats = nullptr);

struct LogRow {
  int step = 0;
  State state = State::Zero();
  double field_value = 1.0;
  double error_complement = 1.0;
  StepCost cost;
};

struct RecedingResult {
  Trajectory executed;
  std::vector<LogRow> log;  // rh_steps + 1 rows; row 0 is the start state
};

/// Field snapshot to plan against at a receding-horizon step.
using FieldProvider = std::function<std::shared_ptr<const ShadowField>(int step)>;

RecedingResult receding_horizon(const Scenario& scenario, const FieldProvider& fields,
                                const EndEffectorModel& ee = EndEffectorModel{});

/// "step,x,y,z,yaw,pitch,F,ec,cost_total,cost_vis,cost_orient,cost_input"
void write_log_csv(const std::filesystem::path& path, const std::vector<LogRow>& log);
/// "step,t,x,y,z,yaw,pitch,vx,vy,vz,yaw_rate,pitch_rate"; the last state has empty control columns.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory, double dt);

}  // namespace shadowfield
