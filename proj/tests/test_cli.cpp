#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "shadowfield/occupancy.hpp"
#include "shadowfield/shadow_field.hpp"

namespace {

using namespace shadowfield;
namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"shadowfield"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Value following `key` on its own "key value" line of the command output.
double stat(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string k;
  double v = 0.0;
  while (in >> k >> v) {
    if (k == key) return v;
  }
  ADD_FAILURE() << "no '" << key << "' in output:\n" << out;
  return NAN;
}

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;
};

PgmImage read_pgm(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string magic;
  in >> magic;
  EXPECT_EQ(magic, "P5");
  auto next_int = [&] {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
      in >> std::ws;
    }
    int v = 0;
    in >> v;
    return v;
  };
  PgmImage img;
  img.width = next_int();
  img.height = next_int();
  EXPECT_EQ(next_int(), 255);
  in.get();
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  return img;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("shadowfield_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }

  /// 4 x 4 x 1 m at 10 cells/m with a wall at x in [2.0, 2.3], y in [1.0, 3.0].
  std::string walled_grid() const {
    GridGeometry g;
    g.dims = {40, 40, 10};
    g.resolution = 10.0;
    g.origin = Vec3::Constant(0.05);
    OccupancyGrid occ(g, 0.0f);
    occ.add_box(Vec3(2.0, 1.0, 0.0), Vec3(2.3, 3.0, 1.0), 1.0f);
    save_grid(occ, path("walled.sfg"));
    return path("walled.sfg");
  }

  std::string free_grid(Index3 dims = {20, 20, 5}) const {
    GridGeometry g;
    g.dims = dims;
    g.resolution = 10.0;
    g.origin = Vec3::Constant(0.05);
    save_grid(OccupancyGrid(g, 0.0f), path("free.sfg"));
    return path("free.sfg");
  }

  fs::path dir_;
};

TEST_F(Cli, RequiresExactlyOneSubcommand) {
  EXPECT_NE(run_cli({}).code, 0);
  EXPECT_NE(run_cli({"field", "--bogus"}).code, 0);
}

TEST_F(Cli, IngestEmptyFileGivesFreeGrid) {
  const std::string pts = write("empty.txt", "# nothing here\n\n");
  const Result r = run_cli({"ingest", "--points", pts, "--out", path("g.sfg"), "--size", "1", "2", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(stat(r.out, "points"), 0.0);
  EXPECT_EQ(stat(r.out, "cells"), 10.0 * 20 * 5);
  EXPECT_EQ(stat(r.out, "occupied"), 0.0);
  const OccupancyGrid g = load_grid(path("g.sfg"));
  EXPECT_EQ(g.count_above(kDefaultOccupancyThreshold), 0u);
}

TEST_F(Cli, IngestMalformedLineNamesLineNumber) {
  const std::string pts = write("bad.txt", "1 1 0.5\n0.5 0.5 0.5\n2 oops 1\n");
  const Result r = run_cli({"ingest", "--points", pts, "--out", path("g.sfg"), "--size", "3", "3", "1"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("3"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("g.sfg")));
}

TEST_F(Cli, IngestIsDeterministic) {
  std::string cloud;
  for (int i = 0; i < 200; ++i) {
    cloud += std::to_string(1.0 + 0.01 * i) + " " + std::to_string(2.0 + 0.5 * std::sin(i)) + " 0.45\n";
  }
  const std::string pts = write("cloud.txt", cloud);
  for (const char* out : {"a.sfg", "b.sfg"}) {
    const Result r = run_cli({"ingest", "--points", pts, "--out", path(out), "--size", "4", "4", "1", "--sensor",
                              "0.05", "0.05", "0.45"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GT(stat(r.out, "occupied"), 0.0);
  }
  EXPECT_EQ(read_all(path("a.sfg")), read_all(path("b.sfg")));
}

TEST_F(Cli, FieldOnFreeGridIsOne) {
  const Result r =
      run_cli({"field", "--grid", free_grid(), "--light", "1.0", "1.0", "0.25", "--out", path("f.sff")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(stat(r.out, "min_value"), 1.0);
  EXPECT_EQ(stat(r.out, "cells"), 20.0 * 20 * 5);
  EXPECT_GT(stat(r.out, "cells_per_second"), 0.0);
}

TEST_F(Cli, UnreachableThresholdGivesAllOnes) {
  const Result r = run_cli({"field", "--grid", walled_grid(), "--light", "0.55", "2.05", "0.45", "--threshold",
                            "1.1", "--out", path("f.sff")});
  ASSERT_EQ(r.code, 0) << r.err;
  const ShadowField f = load_field(path("f.sff"));
  for (float v : f.values()) ASSERT_EQ(v, 1.0f);
}

TEST_F(Cli, FieldRejectsLightOutsideGrid) {
  const Result r =
      run_cli({"field", "--grid", free_grid(), "--light", "5.0", "1.0", "0.25", "--out", path("f.sff")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("f.sff")));
}

TEST_F(Cli, FieldWithExtentBuildsLocalField) {
  const Result r = run_cli({"field", "--grid", free_grid(), "--light", "1.05", "1.05", "0.25", "--extent", "0.5",
                            "0.5", "0.2", "--out", path("f.sff")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(stat(r.out, "cells"), 11.0 * 11 * 5);
}

TEST_F(Cli, SliceOfUniformFieldIsUniformWhite) {
  ASSERT_EQ(run_cli({"field", "--grid", free_grid(), "--light", "1.0", "1.0", "0.25", "--out", path("f.sff")}).code,
            0);
  const Result r = run_cli({"slice", "--field", path("f.sff"), "--axis", "z", "--level", "0.25", "--out",
                            path("s.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const PgmImage img = read_pgm(path("s.pgm"));
  EXPECT_EQ(img.width, 20);
  EXPECT_EQ(img.height, 20);
  for (unsigned char p : img.pixels) ASSERT_EQ(p, 255);
}

TEST_F(Cli, SlicePixelsMatchFieldValues) {
  ASSERT_EQ(run_cli({"field", "--grid", walled_grid(), "--light", "1.05", "2.05", "0.45", "--out",
                     path("f.sff")})
                .code,
            0);
  ASSERT_EQ(run_cli({"slice", "--field", path("f.sff"), "--level", "0.45", "--out", path("s.pgm")}).code, 0);
  const ShadowField f = load_field(path("f.sff"));
  const FieldSlice s = f.slice(Axis::Z, 0.45);
  const PgmImage img = read_pgm(path("s.pgm"));
  ASSERT_EQ(img.width, s.width);
  ASSERT_EQ(img.height, s.height);
  int dark = 0;
  int gray = 0;
  for (int i = 0; i < 20; ++i) {
    const int u = 21 + (i * 7) % 19;
    const int v = (i * 13) % s.height;
    const unsigned char p = img.pixels[static_cast<std::size_t>(v) * s.width + u];
    EXPECT_EQ(p, std::lround(255.0 * s.at(u, v))) << u << "," << v;
  }
  for (unsigned char p : img.pixels) {
    dark += p == 0;
    gray += p > 0 && p < 255;
  }
  EXPECT_GT(dark, 0);
  EXPECT_GT(gray, 0);
}

TEST_F(Cli, SliceLevelOutOfRange) {
  ASSERT_EQ(run_cli({"field", "--grid", free_grid(), "--light", "1.0", "1.0", "0.25", "--out", path("f.sff")}).code,
            0);
  const Result r =
      run_cli({"slice", "--field", path("f.sff"), "--axis", "z", "--level", "7.0", "--out", path("s.pgm")});
  EXPECT_NE(r.code, 0);
}

TEST_F(Cli, CompareFreeSceneRowsAreLit) {
  const Result r = run_cli({"compare", "--grid", free_grid(), "--light", "0.55", "0.55", "0.25", "--along", "y",
                            "--through", "1.55", "0", "0.25", "--out", path("p.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("p.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "coord,soft,hard");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto comma = line.find(',');
    EXPECT_EQ(line.substr(comma), ",1.0,1") << line;
  }
  EXPECT_EQ(rows, 20);
}

TEST_F(Cli, CompareMissingGrid) {
  const Result r = run_cli({"compare", "--grid", path("none.sfg"), "--light", "0.5", "0.5", "0.5", "--through", "1",
                            "1", "0.5", "--out", path("p.csv")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(path("p.csv")));
}

TEST_F(Cli, BenchRowPerSize) {
  const Result r = run_cli({"bench", "--sizes", "8,10x12x6,16", "--repetitions", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cells,mean_seconds,cells_per_sec");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].substr(0, 4), "512,");
  EXPECT_EQ(rows[1].substr(0, 4), "720,");
}

TEST_F(Cli, BenchScalesLinearly) {
  // Eight times the cells should cost about eight times as long. Timing noise
  // on shared hosts gets up to three attempts.
  double ratio = 0.0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const Result r = run_cli({"bench", "--sizes", "50,100", "--repetitions", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    std::vector<double> means;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string cells, mean;
      std::getline(row, cells, ',');
      std::getline(row, mean, ',');
      means.push_back(std::stod(mean));
    }
    ASSERT_EQ(means.size(), 2u);
    ratio = means[1] / means[0];
    if (ratio >= 5.5 && ratio <= 10.5) break;
  }
  EXPECT_GE(ratio, 5.5);
  EXPECT_LE(ratio, 10.5);
}

TEST_F(Cli, BenchRejectsZeroRepetitions) {
  EXPECT_NE(run_cli({"bench", "--sizes", "8", "--repetitions", "0"}).code, 0);
  EXPECT_NE(run_cli({"bench", "--sizes", "8x8"}).code, 0);
}

TEST_F(Cli, PlanReportsOffendingKey) {
  const std::string bad = write("bad.json", R"({"scene": [], "light": [1,1,0.5], "start": {"position": [2,2,0.5]},
                                               "horizon": {"dt": -0.1}})");
  const Result r = run_cli({"plan", "--scenario", bad, "--out-prefix", path("run")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("horizon.dt"), std::string::npos) << r.err;
}

TEST_F(Cli, PlanWritesArtifacts) {
  const std::string sc = write("lit.json", R"({
    "grid": {"size": [3, 3, 1], "resolution": 10},
    "scene": [],
    "light": [0.25, 1.55, 0.55],
    "start": {"position": [2.05, 1.55, 0.55], "yaw": 3.141592653589793},
    "rh_steps": 5
  })");
  const Result r = run_cli({"plan", "--scenario", sc, "--out-prefix", path("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(stat(r.out, "steps"), 5.0);
  EXPECT_EQ(stat(r.out, "final_F"), 1.0);
  EXPECT_LT(stat(r.out, "total_cost"), 1e-6);
  for (const char* suffix : {"_trajectory.csv", "_log.csv", "_slice.pgm"}) {
    EXPECT_TRUE(fs::exists(path(std::string("run") + suffix))) << suffix;
  }
  const std::string pgm = read_all(path("run_slice.pgm"));
  EXPECT_NE(pgm.find("# path "), std::string::npos);
}

}  // namespace
