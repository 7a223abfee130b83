#include <doctest.h>

#include "core/runner.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace td;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "td_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("config parsing: defaults, overrides, and strictness") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.U0 == 16.0);
  CHECK(cfg.a2 == 1.4);
  CHECK(cfg.initial_state == InitialStateKind::BoundGround);
  CHECK(!cfg.closing_time);

  const auto cfg2 = parse_config(R"({
    "potential": {"U0": 10.0, "a2": 1.63},
    "initial_state": "infinite_well",
    "closing_time": 5.5,
    "probes": {"detector_positions": [60.0, 90.0], "detector_dt": 0.02},
    "threads": 3
  })");
  CHECK(cfg2.U0 == 10.0);
  CHECK(cfg2.a2 == 1.63);
  CHECK(cfg2.initial_state == InitialStateKind::InfiniteWell);
  CHECK(cfg2.closing_time == doctest::Approx(5.5));
  CHECK(cfg2.detector_positions.size() == 2);
  CHECK(cfg2.threads == 3);

  // "inf" disables the closing time
  const auto cfg3 = parse_config(R"({"closing_time": "inf"})");
  CHECK(!cfg3.closing_time);

  CHECK_THROWS_AS((void)parse_config("{nope"), Error);
  CHECK_THROWS_AS((void)parse_config(R"({"unknown_key": 1})"), Error);
  CHECK_THROWS_AS((void)parse_config(R"({"potential": {"U0": -4}})"), Error);
  CHECK_THROWS_AS((void)parse_config(R"({"potential": {"a2": 0.5}})"), Error);
  CHECK_THROWS_AS((void)parse_config(R"({"closing_time": -2})"), Error);
  CHECK_THROWS_AS((void)parse_config(R"({"probes": {"detector_positions": [1.0]}})"),
                  Error);
  CHECK_THROWS_AS((void)parse_config(R"({"initial_state": "plane_wave"})"),
                  Error);
}

TEST_CASE("value formatting round-trips through 17 significant digits") {
  for (const double v : {1.0 / 3.0, 17.5, 2.6533119, 1e-300, 0.0, -4.25e17}) {
    const double back = std::strtod(format_value(v).c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("eigen experiment writes its artifact set deterministically") {
  const auto dir_a = fresh_dir("eigen_a");
  const auto dir_b = fresh_dir("eigen_b");
  SimConfig cfg;
  cfg.threads = 2;
  cfg.output_dir = dir_a.string();
  const auto res_a = run_eigen(cfg);
  cfg.output_dir = dir_b.string();
  cfg.threads = 7; // thread count must not leak into the artifacts
  const auto res_b = run_eigen(cfg);

  REQUIRE(res_a.files.size() == 3);
  for (std::size_t i = 0; i < res_a.files.size(); ++i) {
    CHECK(slurp(res_a.files[i]) == slurp(res_b.files[i]));
  }
  // bound_states.csv holds exactly the two flagship states
  const auto text = slurp(dir_a / "bound_states.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') >= 4);
}

TEST_CASE("unknown figures are rejected; the known list is complete") {
  CHECK_THROWS_AS((void)reproduce_figure("fig11", ".", 1), Error);
  CHECK(known_figures().size() == 9);
}

TEST_CASE("report serialization writes every extracted scale") {
  const auto dir = fresh_dir("report");
  TimescaleReport rep;
  rep.t_l = 17.5;
  rep.t_l_method = "first_crossing";
  rep.t_bl = 0.08;
  SimConfig cfg;
  cfg.output_dir = dir.string();
  RunResult result;
  write_report(rep, cfg, dir, result);
  const auto text = slurp(dir / "report.txt");
  CHECK(text.find("t_l = 17.5") != std::string::npos);
  CHECK(text.find("t_l_method = first_crossing") != std::string::npos);
  CHECK(text.find("t_BL") != std::string::npos);
  CHECK(fs::exists(dir / "report.csv"));
}
