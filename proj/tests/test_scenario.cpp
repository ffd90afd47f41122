#include <gtest/gtest.h>

#include <string>

#include "shadowfield/scenario.hpp"

namespace {

using namespace shadowfield;

const char* kMinimal = R"({
  "scene": [{"min": [1.0, 1.0, 0.0], "max": [1.5, 2.0, 0.5]}],
  "light": [0.55, 0.55, 0.25],
  "start": {"position": [2.0, 2.0, 0.25]}
})";

std::string key_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.key();
  }
  return "";
}

TEST(Scenario, MinimalUsesDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.grid.dims, (Index3{60, 60, 10}));
  EXPECT_DOUBLE_EQ(s.grid.resolution, 10.0);
  EXPECT_EQ(s.horizon_steps, 20);
  EXPECT_DOUBLE_EQ(s.dt, 0.05);
  EXPECT_DOUBLE_EQ(s.threshold, 0.5);
  EXPECT_FALSE(s.goal.has_value());
  ASSERT_EQ(s.scene.size(), 1u);
  EXPECT_FLOAT_EQ(s.scene[0].occupancy, 1.0f);
  EXPECT_EQ(s.start, make_state(Vec3(2.0, 2.0, 0.25), 0.0, 0.0));
}

TEST(Scenario, FullDocumentRoundTrip) {
  const Scenario s = parse_scenario(R"({
    "grid": {"origin": [-1, -1, 0], "size": [4, 3, 2], "resolution": 5},
    "scene": [{"min": [0, 0, 0], "max": [1, 1, 1], "occupancy": 0.8}],
    "light": [0.1, 0.1, 0.5],
    "start": {"position": [2, 1, 1], "yaw": 0.5, "pitch": -0.25},
    "threshold": 0.6,
    "goal": [2.5, 1.5, 1.0],
    "horizon": {"steps": 7, "dt": 0.1},
    "bounds": {"max_speed": 2.0, "max_angular_rate": 1.5},
    "weights": {"input": 0.3, "input_angular": 0.02, "visibility": 4, "orientation": 0.5, "goal": 2},
    "barrier": {"delta": 0.2},
    "orientation": {"alpha": 0.3, "beta": 2, "epsilon": 5, "roll": 0.1},
    "solver": {"max_iterations": 12, "initial_step": 0.5, "max_step": 8, "armijo": 0.01,
               "shrink": 0.25, "gradient_tolerance": 1e-5, "decrease_tolerance": 1e-8},
    "rh_steps": 9
  })");
  EXPECT_EQ(s.grid.dims, (Index3{20, 15, 10}));
  EXPECT_TRUE(s.grid.origin.isApprox(Vec3(-0.9, -0.9, 0.1)));
  EXPECT_FLOAT_EQ(s.scene[0].occupancy, 0.8f);
  EXPECT_DOUBLE_EQ(s.threshold, 0.6);
  ASSERT_TRUE(s.goal.has_value());
  EXPECT_EQ(*s.goal, Vec3(2.5, 1.5, 1.0));
  EXPECT_EQ(s.horizon_steps, 7);
  EXPECT_DOUBLE_EQ(s.dt, 0.1);
  EXPECT_DOUBLE_EQ(s.bounds.max_speed, 2.0);
  EXPECT_DOUBLE_EQ(s.bounds.max_angular_rate, 1.5);
  EXPECT_DOUBLE_EQ(s.weights.input_linear, 0.3);
  EXPECT_DOUBLE_EQ(s.weights.input_angular, 0.02);
  EXPECT_DOUBLE_EQ(s.weights.orientation, 0.5);
  EXPECT_DOUBLE_EQ(s.weights.goal, 2.0);
  EXPECT_DOUBLE_EQ(s.barrier.weight, 4.0);
  EXPECT_DOUBLE_EQ(s.barrier.delta, 0.2);
  EXPECT_DOUBLE_EQ(s.orientation.alpha, 0.3);
  EXPECT_DOUBLE_EQ(s.orientation.beta, 2.0);
  EXPECT_DOUBLE_EQ(s.orientation.epsilon, 5.0);
  EXPECT_DOUBLE_EQ(s.orientation.roll, 0.1);
  EXPECT_EQ(s.solver.max_iterations, 12);
  EXPECT_DOUBLE_EQ(s.solver.shrink, 0.25);
  EXPECT_EQ(s.rh_steps, 9);
  EXPECT_DOUBLE_EQ(s.start[3], 0.5);
  EXPECT_DOUBLE_EQ(s.start[4], -0.25);
}

TEST(Scenario, ErrorsNameTheKey) {
  EXPECT_EQ(key_of("{not json"), "<root>");
  EXPECT_EQ(key_of(R"({"scene": [], "start": {"position": [1,1,1]}})"), "light");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [1,1,0.5]})"), "start");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [1,1,0.5], "start": {"position": [1,1,1]},
                     "horizon": {"dt": -1}})"),
            "horizon.dt");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [1,1,0.5], "start": {"position": [1,1,1]},
                     "horizon": {"dt": "fast"}})"),
            "horizon.dt");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [1,1,0.5], "start": {"position": [1,1,1]}, "colour": 3})"),
            "colour");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [1,1,0.5], "start": {"position": [1,1,1]},
                     "weights": {"visiblity": 1}})"),
            "weights.visiblity");
  EXPECT_EQ(key_of(R"({"scene": [{"min": [0,0], "max": [1,1,1]}], "light": [1,1,0.5],
                     "start": {"position": [1,1,1]}})"),
            "scene[0].min");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [100,1,0.5], "start": {"position": [1,1,1]}})"), "light");
  EXPECT_EQ(key_of(R"({"scene": [], "light": [1,1,0.5], "start": {"position": [1,1,1]},
                     "barrier": {"delta": 1.5}})"),
            "barrier.delta");
}

TEST(Scenario, ErrorMessageStartsWithKey) {
  try {
    parse_scenario(R"({"scene": [], "light": [1,1,0.5], "start": {"position": [1,1,1]}, "horizon": {"dt": 0}})");
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("horizon.dt", 0), 0u);
  }
}

TEST(Scenario, BuildSceneMarksBoxCells) {
  const Scenario s = parse_scenario(kMinimal);
  const OccupancyGrid occ = build_scene(s);
  EXPECT_EQ(occ.geometry(), s.grid);
  // Centers in [1.0,1.5] x [1.0,2.0] x [0,0.5]: 5 x 10 x 5 cells.
  EXPECT_EQ(occ.count_above(0.5), 250u);
  EXPECT_FLOAT_EQ(occ.at_world(Vec3(1.25, 1.55, 0.25)), 1.0f);
  EXPECT_FLOAT_EQ(occ.at_world(Vec3(0.85, 1.55, 0.25)), 0.0f);
}

TEST(Scenario, ShippedScenariosLoad) {
  for (const char* name : {"occlusion_escape.json", "narrow_passage.json"}) {
    const Scenario s = load_scenario(std::string(SHADOWFIELD_SCENARIO_DIR) + "/" + name);
    EXPECT_GT(s.rh_steps, 0) << name;
    const OccupancyGrid occ = build_scene(s);
    EXPECT_LE(occ.at_world(s.start.head<3>()), 0.5f) << name;
    EXPECT_LE(occ.at_world(s.light), 0.5f) << name;
  }
}

TEST(Scenario, MissingFileThrows) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

}  // namespace
