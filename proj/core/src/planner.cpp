#include "shadowfield/planner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "number_format.hpp"

namespace shadowfield {
namespace {

using detail::shortest;
using StateGradient = Eigen::Matrix<double, 5, 1>;

constexpr double kBoundSlack = 1e-12;
constexpr double kOrientationStep = 1e-6;
constexpr double kMinLineSearchStep = 1e-14;

/// State-dependent part of a stage, before the dt factor.
struct StateTerms {
  double visibility = 0.0;
  double orientation = 0.0;  // weighted
  double field_value = 1.0;
  double error_complement = 1.0;
};

double orientation_term(const State& x, const Scenario& s, const EndEffectorModel& ee, double* complement) {
  const Pose pose = pose_of(x, s.orientation.roll, ee);
  if ((s.light - pose.position).norm() < 1e-12) {
    if (complement) *complement = 1.0;
    return 0.0;
  }
  const Quat desired = desired_orientation(pose.position, s.light, s.orientation.roll);
  const double ec = quaternion_error_complement(pose.orientation, desired);
  if (complement) *complement = ec;
  return orientation_penalty(ec, s.orientation);
}

StateTerms state_terms(const State& x, const Scenario& s, const ShadowField& field, const EndEffectorModel& ee) {
  StateTerms t;
  const Vec3 p = ee.position(x);
  t.field_value = field.sample(p);
  t.visibility = s.barrier.weight * relaxed_log_barrier(t.field_value, s.barrier.delta).value;
  t.orientation = s.weights.orientation * orientation_term(x, s, ee, &t.error_complement);
  return t;
}

StateGradient state_terms_gradient(const State& x, const Scenario& s, const ShadowField& field,
                                   const EndEffectorModel& ee) {
  const CostWithGradient vis = visibility_cost(field, ee.position(x), s.barrier);
  StateGradient g = ee.jacobian(x).transpose() * vis.gradient;
  if (s.weights.orientation != 0.0) {
    for (int i = 0; i < 5; ++i) {
      State hi = x;
      State lo = x;
      hi[i] += kOrientationStep;
      lo[i] -= kOrientationStep;
      g[i] += s.weights.orientation *
              (orientation_term(hi, s, ee, nullptr) - orientation_term(lo, s, ee, nullptr)) / (2.0 * kOrientationStep);
    }
  }
  return g;
}

double input_cost(const Control& u, const CostWeights& w) {
  return w.input_linear * u.head<3>().squaredNorm() + w.input_angular * u.tail<2>().squaredNorm();
}

Control input_cost_gradient(const Control& u, const CostWeights& w) {
  Control g;
  g << 2.0 * w.input_linear * u.head<3>(), 2.0 * w.input_angular * u.tail<2>();
  return g;
}

bool has_goal(const Scenario& s) { return s.goal.has_value() && s.weights.goal > 0.0; }

double projected_gradient_norm(const std::vector<Control>& u, const std::vector<Control>& g, const ControlBounds& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) sq += (u[k] - project_control(u[k] - g[k], b)).squaredNorm();
  return std::sqrt(sq);
}

Trajectory evaluated(const Scenario& s, const ShadowField& field, const State& x0, const std::vector<Control>& u,
                     const EndEffectorModel& ee) {
  Trajectory t = rollout(s, x0, u);
  t.cost = total_cost(t, s, field, ee);
  return t;
}

}  // namespace

Pose pose_of(const State& x, double roll, const EndEffectorModel& ee) {
  return {ee.position(x), quaternion_from_ypr(x[3], x[4], roll)};
}

Control project_control(const Control& u, const ControlBounds& bounds) {
  Control out = u;
  const double speed = out.head<3>().norm();
  if (speed > bounds.max_speed) out.head<3>() *= bounds.max_speed / speed;
  for (int i = 3; i < 5; ++i) out[i] = std::clamp(out[i], -bounds.max_angular_rate, bounds.max_angular_rate);
  return out;
}

Trajectory rollout(const Scenario& scenario, const State& x0, const std::vector<Control>& controls) {
  Trajectory t;
  t.states.reserve(controls.size() + 1);
  t.states.push_back(x0);
  for (std::size_t k = 0; k < controls.size(); ++k) {
    const Control& u = controls[k];
    if (!u.allFinite() || u.head<3>().norm() > scenario.bounds.max_speed * (1.0 + kBoundSlack) ||
        u.tail<2>().cwiseAbs().maxCoeff() > scenario.bounds.max_angular_rate * (1.0 + kBoundSlack)) {
      throw std::invalid_argument("control " + std::to_string(k) + " violates the bounds");
    }
    t.states.push_back(t.states.back() + scenario.dt * u);
  }
  t.controls = controls;
  return t;
}

CostBreakdown total_cost(const Trajectory& trajectory, const Scenario& scenario, const ShadowField& field,
                         const EndEffectorModel& ee) {
  CostBreakdown c;
  const double dt = scenario.dt;
  c.steps.reserve(trajectory.controls.size());
  for (std::size_t k = 0; k < trajectory.controls.size(); ++k) {
    const StateTerms t = state_terms(trajectory.states[k + 1], scenario, field, ee);
    StepCost step;
    step.input = input_cost(trajectory.controls[k], scenario.weights) * dt;
    step.visibility = t.visibility * dt;
    step.orientation = t.orientation * dt;
    c.input += step.input;
    c.visibility += step.visibility;
    c.orientation += step.orientation;
    c.steps.push_back(step);
  }
  if (has_goal(scenario)) {
    c.terminal = scenario.weights.goal * (ee.position(trajectory.states.back()) - *scenario.goal).squaredNorm();
  }
  c.total = c.input + c.visibility + c.orientation + c.terminal;
  return c;
}

std::vector<Control> cost_gradient(const Trajectory& trajectory, const Scenario& scenario, const ShadowField& field,
                                   const EndEffectorModel& ee) {
  const std::size_t n = trajectory.controls.size();
  const double dt = scenario.dt;
  std::vector<Control> g(n);
  StateGradient lambda = StateGradient::Zero();
  if (has_goal(scenario)) {
    const State& xn = trajectory.states.back();
    lambda = 2.0 * scenario.weights.goal * ee.jacobian(xn).transpose() * (ee.position(xn) - *scenario.goal);
  }
  for (std::size_t k = n; k-- > 0;) {
    lambda += dt * state_terms_gradient(trajectory.states[k + 1], scenario, field, ee);
    g[k] = dt * input_cost_gradient(trajectory.controls[k], scenario.weights) + dt * lambda;
  }
  return g;
}

Trajectory solve(const Scenario& scenario, const ShadowField& field, const State& x0,
                 const std::optional<std::vector<Control>>& warm_start, const EndEffectorModel& ee,
                 SolveStats* stats) {
  const std::size_t n = static_cast<std::size_t>(scenario.horizon_steps);
  std::vector<Control> u(n, Control::Zero());
  if (warm_start) {
    if (warm_start->size() != n) throw std::invalid_argument("warm start length differs from the horizon");
    for (std::size_t k = 0; k < n; ++k) u[k] = project_control((*warm_start)[k], scenario.bounds);
  }
  const SolverOptions& opt = scenario.solver;

  Trajectory best = evaluated(scenario, field, x0, u, ee);
  if (!std::isfinite(best.cost.total)) throw std::runtime_error("non-finite cost at the warm start");
  SolveStats st;
  st.initial_cost = best.cost.total;

  double step = opt.initial_step;
  for (; st.iterations < opt.max_iterations; ++st.iterations) {
    const std::vector<Control> g = cost_gradient(best, scenario, field, ee);
    st.projected_gradient_norm = projected_gradient_norm(best.controls, g, scenario.bounds);
    if (st.projected_gradient_norm < opt.gradient_tolerance) break;

    bool accepted = false;
    Trajectory candidate;
    for (double t = step; t >= kMinLineSearchStep; t *= opt.shrink) {
      std::vector<Control> trial(n);
      double directional = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        trial[k] = project_control(best.controls[k] - t * g[k], scenario.bounds);
        directional += g[k].dot(best.controls[k] - trial[k]);
      }
      candidate = evaluated(scenario, field, x0, trial, ee);
      if (!std::isfinite(candidate.cost.total)) throw std::runtime_error("non-finite cost during line search");
      if (candidate.cost.total <= best.cost.total - opt.armijo * directional) {
        accepted = true;
        step = std::min(t / opt.shrink, opt.max_step);
        break;
      }
    }
    if (!accepted) break;
    const double decrease = best.cost.total - candidate.cost.total;
    best = std::move(candidate);
    if (decrease < opt.decrease_tolerance) {
      ++st.iterations;
      break;
    }
  }
  st.final_cost = best.cost.total;
  if (stats) *stats = st;
  return best;
}

RecedingResult receding_horizon(const Scenario& scenario, const FieldProvider& fields, const EndEffectorModel& ee) {
  RecedingResult out;
  const double dt = scenario.dt;
  State x = scenario.start;
  std::optional<std::vector<Control>> warm;

  const auto log_state = [&](int step, const State& state, const ShadowField& field, double input) {
    const StateTerms t = state_terms(state, scenario, field, ee);
    LogRow row;
    row.step = step;
    row.state = state;
    row.field_value = t.field_value;
    row.error_complement = t.error_complement;
    row.cost = {input, t.visibility * dt, t.orientation * dt};
    out.log.push_back(row);
    return row.cost;
  };

  out.executed.states.push_back(x);
  for (int step = 0; step < scenario.rh_steps; ++step) {
    const std::shared_ptr<const ShadowField> field = fields(step);
    if (!field) throw std::runtime_error("no field published for step " + std::to_string(step));
    if (step == 0) log_state(0, x, *field, 0.0);

    const Trajectory plan = solve(scenario, *field, x, warm, ee);
    const Control u0 = plan.controls.front();
    x = x + dt * u0;

    const StepCost c = log_state(step + 1, x, *field, input_cost(u0, scenario.weights) * dt);
    out.executed.states.push_back(x);
    out.executed.controls.push_back(u0);
    out.executed.cost.steps.push_back(c);
    out.executed.cost.input += c.input;
    out.executed.cost.visibility += c.visibility;
    out.executed.cost.orientation += c.orientation;

    std::vector<Control> shifted(plan.controls.begin() + 1, plan.controls.end());
    shifted.push_back(plan.controls.back());
    warm = std::move(shifted);
  }
  CostBreakdown& total = out.executed.cost;
  total.total = total.input + total.visibility + total.orientation;
  return out;
}

void write_log_csv(const std::filesystem::path& path, const std::vector<LogRow>& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << "step,x,y,z,yaw,pitch,F,ec,cost_total,cost_vis,cost_orient,cost_input\n";
  for (const LogRow& r : log) {
    out << r.step;
    for (int i = 0; i < 5; ++i) out << ',' << shortest(r.state[i]);
    out << ',' << shortest(r.field_value) << ',' << shortest(r.error_complement) << ',' << shortest(r.cost.total())
        << ',' << shortest(r.cost.visibility) << ',' << shortest(r.cost.orientation) << ','
        << shortest(r.cost.input) << '\n';
  }
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory, double dt) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << "step,t,x,y,z,yaw,pitch,vx,vy,vz,yaw_rate,pitch_rate\n";
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    out << k << ',' << shortest(static_cast<double>(k) * dt);
    for (int i = 0; i < 5; ++i) out << ',' << shortest(trajectory.states[k][i]);
    if (k < trajectory.controls.size()) {
      for (int i = 0; i < 5; ++i) out << ',' << shortest(trajectory.controls[k][i]);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

}  // namespace shadowfield
