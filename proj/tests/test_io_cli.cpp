#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "json.hpp"
#include "ringchaos/errors.hpp"
#include "ringchaos/io.hpp"

using namespace ringchaos;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ringchaos_test_" + std::to_string(::getpid())) / name;
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(RINGCHAOS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* kRoute = R"({"circumference_m": 27000,
  "stops": [{"arc_position_m": 0, "mean_stop_time_s": 60, "max_stop_time_s": 120},
            {"arc_position_m": 9000, "mean_stop_time_s": 60, "max_stop_time_s": 120},
            {"arc_position_m": 18000, "mean_stop_time_s": 60, "max_stop_time_s": 120}],
  "segment_velocities_mps": [10, 10, 10]})";

std::string uniform_snapshot(int n) {
  json j{{"time_s", 0}, {"buses", json::array()}};
  for (int i = 0; i < n; ++i) j["buses"].push_back({{"id", "b" + std::to_string(i)}, {"position_m", 27000.0 * i / n}});
  return j.dump();
}

}  // namespace

TEST_CASE("route and snapshot json") {
  const RingRoute r = io::route_from_json(json::parse(kRoute));
  CHECK(r.circumference() == 27000.0);
  CHECK(r.stops().size() == 3);
  CHECK(r.stops()[1].min_stop_time == 0.0);
  const RingRoute back = io::route_from_json(io::to_json(r));
  CHECK(back.stops()[2].arc_position == 18000.0);

  CHECK_THROWS_AS(io::route_from_json(json::parse(R"({"stops": []})")), Error);
  const auto snap = io::snapshot_from_json(json::parse(uniform_snapshot(4)));
  CHECK(snap.buses[3].position == 20250.0);
  CHECK(io::snapshot_from_json(io::to_json(snap)).positions() == snap.positions());
}

TEST_CASE("schedule serialization") {
  Schedule s;
  s.entries.push_back({"b0", 2, 120.0, -600.0, -1200.0, -600.0});
  const json j = io::schedule_to_json(s, "2024-01-01T00:00:00.000Z");
  CHECK(j["generated_at"] == "2024-01-01T00:00:00.000Z");
  CHECK(j["entries"][0]["stop_duration_s"] == 120.0);
  CHECK(j["entries"][0]["carryover_m"] == -600.0);
  CHECK(io::schedule_to_csv(s) == "bus_id,stop_index,stop_duration_s,carryover_m\nb0,2,120,-600\n");
}

#ifdef RINGCHAOS_CLI
TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(run("--help") == 0);
  CHECK(run("sample --seed 1 --out " + (dir / "a").string()) == 2);
  CHECK(run("sample --kind cue --seed 1 --out " + (dir / "a").string()) == 2);
  CHECK(run("gas --sweeps 0 --seed 1 --out " + (dir / "b").string()) == 2);
  CHECK(run("bogus") == 2);

  write(dir / "route.json", kRoute);
  write(dir / "bad.csv", "timestamp_iso8601,bus_id,lat,lon\n2024-03-01T02:45:00Z,a,95,88\n");
  write(dir / "poly.json", R"({"vertices": [[0,0],[0,0.1],[0.1,0.1],[0.1,0],[0,0]]})");
  CHECK(run("diagnose --route " + (dir / "route.json").string() + " --gps " + (dir / "bad.csv").string() +
            " --polyline " + (dir / "poly.json").string() + " --time 2024-03-01T02:45:00Z --strict --out " +
            (dir / "c").string()) == 2);
}

TEST_CASE("cli sample") {
  const fs::path dir = scratch("sample");
  REQUIRE(run("sample --kind poisson --n 100000 --seed 1 --out " + (dir / "p").string()) == 0);
  REQUIRE(run("sample --kind brody --q 0 --n 100000 --seed 1 --out " + (dir / "b").string()) == 0);
  const json hp = io::read_json_file(dir / "p" / "histogram.json");
  const json rp = io::read_json_file(dir / "p" / "report.json");
  CHECK(rp["ks"].get<double>() <= 0.01);
  CHECK(fs::exists(dir / "p" / "curve.csv"));
  CHECK(fs::exists(dir / "p" / "meta.json"));

  // Brody(0) and Poisson histograms are statistically indistinguishable.
  const json hb = io::read_json_file(dir / "b" / "histogram.json");
  const auto cp = hp["counts"].get<std::vector<double>>();
  const auto cb = hb["counts"].get<std::vector<double>>();
  REQUIRE(cp.size() == cb.size());
  const double tp = hp["total"].get<double>(), tb = hb["total"].get<double>();
  double fp = 0.0, fb = 0.0, ks = 0.0;
  for (std::size_t i = 0; i < cp.size(); ++i) {
    fp += cp[i] / tp;
    fb += cb[i] / tb;
    ks = std::max(ks, std::abs(fp - fb));
  }
  CHECK(ks <= 0.02);
}

TEST_CASE("cli config file") {
  const fs::path dir = scratch("config");
  write(dir / "cfg.json", R"({"kind": "gue", "n": 2000, "seed": 4})");
  REQUIRE(run("--config " + (dir / "cfg.json").string() + " sample --out " + (dir / "a").string()) == 0);
  CHECK(io::read_json_file(dir / "a" / "report.json")["n"] == 2000);
  REQUIRE(run("--config " + (dir / "cfg.json").string() + " sample --n 500 --out " + (dir / "b").string()) == 0);
  CHECK(io::read_json_file(dir / "b" / "report.json")["n"] == 500);
  write(dir / "bad.json", R"({"kind": "gue", "seed": 4, "bogus": 1})");
  CHECK(run("--config " + (dir / "bad.json").string() + " sample --out " + (dir / "c").string()) == 2);
}

TEST_CASE("cli diagnose and optimize") {
  const fs::path dir = scratch("diag");
  write(dir / "route.json", kRoute);
  write(dir / "uniform.json", uniform_snapshot(20));
  REQUIRE(run("diagnose --route " + (dir / "route.json").string() + " --snapshot " + (dir / "uniform.json").string() +
              " --quantum --seed 3 --out " + (dir / "u").string()) == 0);
  const json rep = io::read_json_file(dir / "u" / "report.json");
  CHECK(rep["spacing"]["ks_poisson"].get<double>() >= 0.5);
  CHECK(rep["spacing"]["mean_r"].get<double>() == 1.0);
  bool degenerate = false;
  for (const auto& f : rep["flags"]) degenerate |= f.get<std::string>().starts_with("DegenerateSpacings");
  CHECK(degenerate);
  CHECK(rep["quantum"]["sp_curve"][0][1].get<double>() == 1.0);

  json clustered{{"time_s", 1.7e9}, {"buses", json::array()}};
  for (int i = 0; i < 30; ++i) clustered["buses"].push_back({{"id", "c" + std::to_string(i)}, {"position_m", 30.0 * i + 7}});
  write(dir / "clustered.json", clustered.dump());
  REQUIRE(run("optimize --route " + (dir / "route.json").string() + " --snapshot " + (dir / "clustered.json").string() +
              " --method match --seed 5 --out " + (dir / "o").string()) == 0);
  const json sched = io::read_json_file(dir / "o" / "schedule.json");
  const RingRoute route = io::route_from_json(json::parse(kRoute));
  CHECK(sched["entries"].size() == 30);
  for (const auto& e : sched["entries"]) {
    const auto& stop = route.stops()[e["stop_index"].get<std::size_t>()];
    CHECK(e["stop_duration_s"].get<double>() >= stop.min_stop_time);
    CHECK(e["stop_duration_s"].get<double>() <= stop.max_stop_time);
  }
  CHECK(fs::exists(dir / "o" / "schedule.csv"));
  CHECK(fs::exists(dir / "o" / "plan.json"));
}
#endif
