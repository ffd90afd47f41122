#include "shadowfield/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace shadowfield {
namespace {

using nlohmann::json;

/// Object view that remembers its dotted path and which keys were consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return node_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) throw ScenarioError(key_path(key), "missing required key");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) throw ScenarioError(key_path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ScenarioError(key_path(key), "expected a finite number");
    return d;
  }

  void number(const std::string& key, double& out) {
    if (has(key)) out = number(key);
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = get(key);
    if (!v.is_number_integer()) throw ScenarioError(key_path(key), "expected an integer");
    out = v.get<int>();
  }

  Vec3 vec3(const std::string& key) { return to_vec3(get(key), key_path(key)); }

  Section section(const std::string& key) { return Section(get(key), key_path(key)); }

  /// Rejects keys nobody asked for.
  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ScenarioError(key_path(item.key()), "unknown key");
    }
  }

  static Vec3 to_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ScenarioError(path, "expected an array of three numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) throw ScenarioError(path, "expected an array of three numbers");
      out[i] = v[i].get<double>();
      if (!std::isfinite(out[i])) throw ScenarioError(path, "expected finite coordinates");
    }
    return out;
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const char* message) {
  if (!ok) throw ScenarioError(key, message);
}

}  // namespace

void Scenario::validate() const {
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("grid", e.what());
  }
  require(horizon_steps >= 1, "horizon.steps", "must be >= 1");
  require(dt > 0.0, "horizon.dt", "must be > 0");
  require(rh_steps >= 0, "rh_steps", "must be >= 0");
  require(bounds.max_speed > 0.0, "bounds.max_speed", "must be > 0");
  require(bounds.max_angular_rate > 0.0, "bounds.max_angular_rate", "must be > 0");
  require(weights.input_linear > 0.0, "weights.input", "must be > 0");
  require(weights.input_angular > 0.0, "weights.input_angular", "must be > 0");
  require(weights.visibility >= 0.0, "weights.visibility", "must be >= 0");
  require(weights.orientation >= 0.0, "weights.orientation", "must be >= 0");
  require(weights.goal >= 0.0, "weights.goal", "must be >= 0");
  require(barrier.delta > 0.0 && barrier.delta < 1.0, "barrier.delta", "must lie in (0, 1)");
  require(orientation.alpha > 0.0 && orientation.alpha < 1.0, "orientation.alpha", "must lie in (0, 1)");
  require(orientation.beta != 0.0, "orientation.beta", "must be nonzero");
  require(orientation.epsilon > 0.0, "orientation.epsilon", "must be > 0");
  require(solver.max_iterations >= 0, "solver.max_iterations", "must be >= 0");
  require(solver.initial_step > 0.0, "solver.initial_step", "must be > 0");
  require(solver.max_step >= solver.initial_step, "solver.max_step", "must be >= solver.initial_step");
  require(solver.armijo > 0.0 && solver.armijo < 1.0, "solver.armijo", "must lie in (0, 1)");
  require(solver.shrink > 0.0 && solver.shrink < 1.0, "solver.shrink", "must lie in (0, 1)");
  require(threshold >= 0.0, "threshold", "must be >= 0");
  require(grid.contains(grid.world_to_index(light)), "light", "must lie inside the grid");
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const std::string key = "scene[" + std::to_string(i) + "]";
    require((scene[i].max_corner.array() >= scene[i].min_corner.array()).all(), key + ".max", "must be >= min");
    require(scene[i].occupancy >= 0.0f && scene[i].occupancy <= 1.0f, key + ".occupancy", "must lie in [0, 1]");
  }
}

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<root>", std::string("malformed JSON: ") + e.what());
  }

  Scenario s;
  Section root(doc, "");

  if (root.has("grid")) {
    Section g = root.section("grid");
    Vec3 corner = Vec3::Zero();
    Vec3 size(6.0, 6.0, 1.0);
    double res = 10.0;
    if (g.has("origin")) corner = g.vec3("origin");
    if (g.has("size")) size = g.vec3("size");
    g.number("resolution", res);
    require(res > 0.0, "grid.resolution", "must be > 0");
    for (int a = 0; a < 3; ++a) {
      require(size[a] > 0.0, "grid.size", "must be positive");
      s.grid.dims[a] = std::max(1, static_cast<int>(std::lround(size[a] * res)));
    }
    s.grid.resolution = res;
    s.grid.origin = corner.array() + 0.5 / res;
    g.finish();
  } else {
    s.grid.dims = {60, 60, 10};
    s.grid.resolution = 10.0;
    s.grid.origin = Vec3::Constant(0.05);
  }

  const json& scene = root.get("scene");
  if (!scene.is_array()) throw ScenarioError("scene", "expected an array of boxes");
  for (std::size_t i = 0; i < scene.size(); ++i) {
    Section b(scene[i], "scene[" + std::to_string(i) + "]");
    SceneBox box;
    box.min_corner = b.vec3("min");
    box.max_corner = b.vec3("max");
    if (b.has("occupancy")) box.occupancy = static_cast<float>(b.number("occupancy"));
    b.finish();
    s.scene.push_back(box);
  }

  s.light = root.vec3("light");
  {
    Section st = root.section("start");
    const Vec3 p = st.vec3("position");
    double yaw = 0.0;
    double pitch = 0.0;
    st.number("yaw", yaw);
    st.number("pitch", pitch);
    st.finish();
    s.start = make_state(p, yaw, pitch);
  }
  root.number("threshold", s.threshold);
  if (root.has("goal")) s.goal = root.vec3("goal");
  if (root.has("horizon")) {
    Section h = root.section("horizon");
    h.integer("steps", s.horizon_steps);
    h.number("dt", s.dt);
    h.finish();
  }
  if (root.has("bounds")) {
    Section b = root.section("bounds");
    b.number("max_speed", s.bounds.max_speed);
    b.number("max_angular_rate", s.bounds.max_angular_rate);
    b.finish();
  }
  if (root.has("weights")) {
    Section w = root.section("weights");
    w.number("input", s.weights.input_linear);
    w.number("input_angular", s.weights.input_angular);
    w.number("visibility", s.weights.visibility);
    w.number("orientation", s.weights.orientation);
    w.number("goal", s.weights.goal);
    w.finish();
  }
  if (root.has("barrier")) {
    Section b = root.section("barrier");
    b.number("delta", s.barrier.delta);
    b.finish();
  }
  if (root.has("orientation")) {
    Section o = root.section("orientation");
    o.number("alpha", s.orientation.alpha);
    o.number("beta", s.orientation.beta);
    o.number("epsilon", s.orientation.epsilon);
    o.number("roll", s.orientation.roll);
    o.finish();
  }
  if (root.has("solver")) {
    Section o = root.section("solver");
    o.integer("max_iterations", s.solver.max_iterations);
    o.number("initial_step", s.solver.initial_step);
    o.number("max_step", s.solver.max_step);
    o.number("armijo", s.solver.armijo);
    o.number("shrink", s.solver.shrink);
    o.number("gradient_tolerance", s.solver.gradient_tolerance);
    o.number("decrease_tolerance", s.solver.decrease_tolerance);
    o.finish();
  }
  root.integer("rh_steps", s.rh_steps);
  root.finish();

  // The visibility weight lives in the barrier so the cost layer sees one parameter set.
  s.barrier.weight = s.weights.visibility;
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

OccupancyGrid build_scene(const Scenario& scenario) {
  OccupancyGrid grid(scenario.grid, 0.0f);
  for (const SceneBox& b : scenario.scene) grid.add_box(b.min_corner, b.max_corner, b.occupancy);
  return grid;
}

}  // namespace shadowfield
