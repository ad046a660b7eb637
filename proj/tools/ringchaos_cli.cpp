// ringchaos: spacing statistics, log-gas sampling, fleet diagnostics and
// stop-time scheduling for buses on a ring route.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ringchaos/dyson_gas.hpp"
#include "ringchaos/errors.hpp"
#include "ringchaos/hermitian.hpp"
#include "ringchaos/ingestion.hpp"
#include "ringchaos/io.hpp"
#include "ringchaos/optimizer.hpp"
#include "ringchaos/quantum_emulation.hpp"
#include "ringchaos/rng.hpp"
#include "ringchaos/spectral_statistics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ringchaos;

namespace {

constexpr const char* kVersion = "0.1.0";

// Flat JSON object -> CLI11 items for the active subcommand. Keys may use
// '_' or '-'.
class JsonConfig : public CLI::Config {
 public:
  std::string section;

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->results().size() == 1 ? json(opt->results().front()) : json(opt->results());
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::ConfigError, std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      if (!section.empty()) item.parents = {section};
      item.name = key;
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (value.is_array()) {
        for (const json& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const double secs = std::chrono::duration<double>(now.time_since_epoch()).count();
  return format_iso8601(std::floor(secs * 1000.0) / 1000.0);
}

struct Output {
  fs::path dir;
  std::vector<std::string> argv;

  void write(const std::string& name, const std::string& content) const { io::write_text_file(dir / name, content); }
  void write_json(const std::string& name, const json& j) const { write(name, io::dump(j)); }
  // Wall-clock data lives here only, so the other files stay byte-identical.
  void write_meta(const std::string& command) const {
    write_json("meta.json", {{"command", command}, {"argv", argv}, {"created_at", utc_now()}, {"version", kVersion}});
  }
};

json spacing_stats(std::span<const double> s) {
  json j;
  j["ks_poisson"] = ks_distance(s, EnsembleKind::poisson());
  j["ks_gue"] = ks_distance(s, EnsembleKind::gue());
  j["mean_r"] = mean_r(s);
  if (s.size() >= 10) {
    j["brody"] = io::to_json(fit_brody(s));
  } else {
    j["brody"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string kind;
  double q = 0.5;
  std::size_t n = 100000;
  std::uint64_t seed = 0;
  std::size_t bins = 100;
  double s_max = 5.0;
  std::size_t curve_points = 501;
  std::string out = "out";
};

int run_sample(const SampleArgs& a, Output& o) {
  const EnsembleKind kind = EnsembleKind::parse(a.kind, a.q);
  if (a.n == 0) throw Error(ErrorKind::UsageError, "--n must be positive");
  if (a.bins == 0 || !(a.s_max > 0.0)) throw Error(ErrorKind::UsageError, "--bins and --s-max must be positive");
  const std::vector<double> s = sample_spacings(kind, a.n, a.seed);
  const Histogram hist = make_histogram(s, uniform_edges(0.0, a.s_max, a.bins));

  const double ks = ks_distance(s, kind);
  const double l1 = l1_histogram_distance(hist, kind);
  const double r = mean_r(s);
  const BrodyFit fit = fit_brody(s);
  double mean = 0.0;
  for (double x : s) mean += x;
  mean /= static_cast<double>(s.size());

  json h = io::to_json(hist);
  h["kind"] = kind.name();
  h["ks"] = ks;
  h["l1"] = l1;
  h["q_hat"] = fit.q_hat;
  h["mean_r"] = r;
  o.write_json("histogram.json", h);

  json report = {{"command", "sample"},
                 {"config",
                  {{"kind", a.kind}, {"q", a.q}, {"n", a.n}, {"seed", a.seed}, {"bins", a.bins}, {"s_max", a.s_max}}},
                 {"kind", kind.name()},
                 {"n", a.n},
                 {"sample_mean", mean},
                 {"ks", ks},
                 {"l1", l1},
                 {"mean_r", r},
                 {"brody", io::to_json(fit)}};
  o.write_json("report.json", report);

  const EnsembleKind brody = EnsembleKind::brody(kind.family() == EnsembleKind::Family::Brody ? kind.q() : a.q);
  std::string csv = "s,poisson,wd1,wd2,wd4,brody\n";
  for (std::size_t i = 0; i < a.curve_points; ++i) {
    const double x = a.s_max * static_cast<double>(i) / static_cast<double>(a.curve_points - 1);
    json row = json::array({x, pdf(EnsembleKind::poisson(), x), pdf(EnsembleKind::goe(), x),
                            pdf(EnsembleKind::gue(), x), pdf(EnsembleKind::gse(), x), pdf(brody, x)});
    for (std::size_t k = 0; k < row.size(); ++k) csv += (k ? "," : "") + row[k].dump();
    csv += '\n';
  }
  o.write("curve.csv", csv);
  o.write_meta("sample");
  return 0;
}

// ---------------------------------------------------------------- gas

struct GasArgs {
  std::size_t n = 55;
  double circumference = 27000.0;
  double beta = 2.0;
  std::size_t sweeps = 2000;
  std::uint64_t seed = 0;
  std::size_t chains = 1;
  std::size_t threads = 0;
  std::string distance = "chord";
  std::size_t bins = 50;
  std::string out = "out";
};

DistanceMode parse_distance(const std::string& s) {
  if (s == "chord") return DistanceMode::Chord;
  if (s == "arc") return DistanceMode::Arc;
  throw Error(ErrorKind::UsageError, "unknown distance mode '" + s + "' (chord|arc)");
}

int run_gas(const GasArgs& a, Output& o) {
  if (a.sweeps == 0) throw Error(ErrorKind::UsageError, "--sweeps must be at least 1");
  if (a.chains == 0) throw Error(ErrorKind::UsageError, "--chains must be at least 1");
  const DistanceMode mode = parse_distance(a.distance);

  std::vector<std::optional<GasSample>> samples(a.chains);
  std::vector<std::exception_ptr> failures(a.chains);
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(a.chains, a.threads ? a.threads : hw);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < a.chains; c += workers) {
        try {
          samples[c] = sample_circular_gas(a.n, a.circumference, a.beta, a.sweeps,
                                           derive_seed(a.seed, "cli.gas.chain", c), mode);
        } catch (...) {
          failures[c] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  json chains = json::array();
  json configurations = json::array();
  std::vector<double> pooled;
  double r_sum = 0.0, r_sq = 0.0;
  for (std::size_t c = 0; c < a.chains; ++c) {
    const GasSample& g = *samples[c];
    const SpacingSample sp = spacings(g.configuration.positions, a.circumference);
    const double r = mean_r(sp.normalized);
    r_sum += r;
    r_sq += r * r;
    pooled.insert(pooled.end(), sp.normalized.begin(), sp.normalized.end());
    chains.push_back({{"chain", c}, {"step_m", g.step}, {"acceptance_rate", g.acceptance_rate}, {"mean_r", r}});
    configurations.push_back(g.configuration.positions);
  }
  const double k = static_cast<double>(a.chains);
  const double r_mean = r_sum / k;
  const double r_sd = a.chains > 1 ? std::sqrt(std::max(0.0, (r_sq - k * r_mean * r_mean) / (k - 1.0))) : 0.0;

  json report = {{"command", "gas"},
                 {"config",
                  {{"n", a.n},
                   {"circumference", a.circumference},
                   {"beta", a.beta},
                   {"sweeps", a.sweeps},
                   {"seed", a.seed},
                   {"chains", a.chains},
                   {"distance", a.distance}}},
                 {"mean_r", r_mean},
                 {"mean_r_stderr", r_sd / std::sqrt(k)},
                 {"pooled", spacing_stats(pooled)},
                 {"chains", chains}};
  o.write_json("report.json", report);
  json h = io::to_json(make_histogram(pooled, uniform_edges(0.0, 4.0, a.bins)));
  h["kind"] = "circular_log_gas";
  h["mean_r"] = r_mean;
  o.write_json("histogram.json", h);
  o.write_json("configuration.json", {{"circumference", a.circumference}, {"chains", configurations}});
  o.write_meta("gas");
  return 0;
}

// ---------------------------------------------------------------- fleet input

struct FleetArgs {
  std::string route;
  std::string snapshot;
  std::string gps;
  std::string time;
  std::string polyline;
  double staleness = kDefaultStaleness;
  bool strict = false;
};

struct SpecArgs {
  std::string kernel = "inverse_power";
  double exponent = 2.0;
  std::vector<double> mass;
  std::vector<double> velocity;
  std::vector<double> length;
  double coupling = 1.0;
  std::string distance = "chord";
  bool neighbor_only = false;
};

void add_fleet_options(CLI::App* sub, FleetArgs& f) {
  sub->add_option("--route", f.route, "Route JSON")->required();
  sub->add_option("--snapshot", f.snapshot, "Fleet snapshot JSON");
  sub->add_option("--gps", f.gps, "GPS export (.csv or .json)");
  sub->add_option("--time", f.time, "Snapshot time (ISO-8601 with offset), with --gps");
  sub->add_option("--polyline", f.polyline, "Route polyline JSON, with --gps");
  sub->add_option("--staleness", f.staleness, "Max fix age in seconds")->capture_default_str();
  sub->add_flag("--strict", f.strict, "Fail on any malformed GPS row");
}

void add_spec_options(CLI::App* sub, SpecArgs& s) {
  sub->add_option("--kernel", s.kernel, "inverse_power | log")->capture_default_str();
  sub->add_option("--exponent", s.exponent, "Inverse-power exponent")->capture_default_str();
  sub->add_option("--mass", s.mass, "Bus masses (one value or one per bus)");
  sub->add_option("--velocity", s.velocity, "Bus velocities (one value or one per bus)");
  sub->add_option("--length", s.length, "Bus lengths (one value or one per bus)");
  sub->add_option("--coupling", s.coupling, "Pair coupling scale")->capture_default_str();
  sub->add_option("--hamiltonian-distance", s.distance, "chord | arc")->capture_default_str();
  sub->add_flag("--neighbor-only", s.neighbor_only, "Couple ring neighbors only");
}

HamiltonianSpec to_spec(const SpecArgs& s) {
  HamiltonianSpec spec;
  if (s.kernel == "inverse_power") {
    spec.potential = InversePower{s.exponent};
  } else if (s.kernel == "log") {
    spec.potential = LogGas{};
  } else {
    throw Error(ErrorKind::UsageError, "unknown kernel '" + s.kernel + "' (inverse_power|log)");
  }
  spec.masses = s.mass;
  spec.velocities = s.velocity;
  spec.lengths = s.length;
  spec.coupling = s.coupling;
  spec.distance_mode = parse_distance(s.distance);
  spec.neighbor_only = s.neighbor_only;
  return spec;
}

json spec_config(const SpecArgs& s) {
  return {{"kernel", s.kernel},     {"exponent", s.exponent}, {"mass", s.mass},
          {"velocity", s.velocity}, {"length", s.length},     {"coupling", s.coupling},
          {"hamiltonian_distance", s.distance}, {"neighbor_only", s.neighbor_only}};
}

struct Fleet {
  RingRoute route;
  FleetSnapshot snapshot;
  json ingestion;
};

Fleet load_fleet(const FleetArgs& f) {
  RingRoute route = io::load_route(f.route);
  const bool from_snapshot = !f.snapshot.empty();
  const bool from_gps = !f.gps.empty();
  if (from_snapshot == from_gps) throw Error(ErrorKind::UsageError, "give exactly one of --snapshot or --gps");
  if (from_snapshot) {
    FleetSnapshot snap = io::load_snapshot(f.snapshot);
    validate(snap, route);
    return {std::move(route), std::move(snap), {{"source", "snapshot"}}};
  }
  if (f.time.empty() || f.polyline.empty()) throw Error(ErrorKind::UsageError, "--gps needs --time and --polyline");
  const GpsParseResult parsed = read_gps_file(f.gps, f.strict);
  const RoutePolyline polyline = io::load_polyline(f.polyline);
  const SnapshotReport rep = snapshot_at(parsed.records, parse_iso8601(f.time), polyline, f.staleness, &route);
  json errors = json::array();
  for (const auto& e : parsed.errors) errors.push_back({{"row", e.row}, {"reason", e.reason}});
  json ing = {{"source", "gps"},
              {"records", parsed.records.size()},
              {"row_errors", errors},
              {"warnings", parsed.warnings},
              {"stale", rep.stale},
              {"off_route", rep.off_route},
              {"polyline_length_m", polyline.total_length()}};
  validate(rep.snapshot, route);
  return {std::move(route), rep.snapshot, ing};
}

json fleet_config(const FleetArgs& f) {
  return {{"route", f.route},   {"snapshot", f.snapshot}, {"gps", f.gps},       {"time", f.time},
          {"polyline", f.polyline}, {"staleness", f.staleness}, {"strict", f.strict}};
}

// ---------------------------------------------------------------- diagnose

struct QuantumArgs {
  bool enabled = false;
  std::string state = "uniform";
  std::size_t state_index = 0;
  std::optional<double> t_max;
  std::size_t t_steps = 50;
  std::optional<double> qpe_time;
  int ancilla = 8;
  std::uint64_t shots = 1024;
  std::optional<std::uint64_t> seed;
};

json spectrum_stats(const Spectrum& spectrum) {
  json j;
  j["eigenvalues"] = spectrum.eigenvalues;
  j["mean_r"] = spectrum.size() >= 3 ? json(mean_r_levels(spectrum.eigenvalues)) : json(nullptr);
  if (spectrum.size() >= 3) {
    const UnfoldMethod method = spectrum.size() >= 7 ? UnfoldMethod::polynomial(5) : UnfoldMethod::global_mean();
    const Spectrum u = unfold(spectrum, method);
    j["unfolding"] = method.kind == UnfoldMethod::Kind::Polynomial ? "polynomial(5)" : "global_mean";
    j["unfolded"] = spacing_stats(*u.unfolded_spacings);
  }
  return j;
}

json quantum_report(const Spectrum& spectrum, const QuantumArgs& q) {
  const std::size_t n = spectrum.size();
  StateVector psi = StateVector::uniform(n);
  if (q.state == "basis") {
    psi = StateVector::basis(n, q.state_index);
  } else if (q.state != "uniform") {
    throw Error(ErrorKind::UsageError, "unknown --state '" + q.state + "' (uniform|basis)");
  }
  const Propagator prop(spectrum);
  const auto [lo, hi] = std::minmax_element(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end());
  const double spread = *hi - *lo > 0.0 ? *hi - *lo : 1.0;
  const double t_max = q.t_max.value_or(20.0 * std::numbers::pi / spread);
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  const double t_qpe = q.qpe_time.value_or(scale > 0.0 ? std::numbers::pi / scale : 1.0);

  json curve = json::array();
  for (std::size_t i = 0; i <= q.t_steps; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(q.t_steps, 1));
    curve.push_back(json::array({t, prop.survival_probability(t, psi)}));
  }
  const QpeResult r = prop.qpe(t_qpe, psi, q.ancilla, q.shots, *q.seed);
  json qpe = json::array();
  for (const auto& e : r.estimates) qpe.push_back({{"phase", e.phase}, {"probability", e.probability}});

  // IPR of the initial state in the eigenbasis.
  std::vector<Complex> coeffs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = spectrum.vector(k);
    Complex c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += std::conj(v[i]) * psi[i];
    coeffs[k] = c;
  }
  const double ipr_value = ipr(StateVector::normalized(coeffs));
  return {{"state", q.state},       {"t_max", t_max},       {"sp_curve", curve}, {"qpe_time", t_qpe},
          {"n_ancilla", q.ancilla}, {"shots", q.shots},     {"qpe", qpe},        {"phase_wraps", r.phase_wraps},
          {"ipr", ipr_value}};
}

int run_diagnose(const FleetArgs& f, const SpecArgs& s, const QuantumArgs& q, Output& o) {
  if (q.enabled && !q.seed) throw Error(ErrorKind::UsageError, "--quantum needs --seed");
  const Fleet fleet = load_fleet(f);
  const SpacingSample sp = spacings(fleet.snapshot, fleet.route);

  json flags = json::array();
  const auto [mn, mx] = std::minmax_element(sp.normalized.begin(), sp.normalized.end());
  if (*mx - *mn <= 1e-9) flags.push_back("DegenerateSpacings: all spacings equal, mean r is 1 by construction");
  if (fleet.snapshot.size() < 10) flags.push_back("SmallFleet: fewer than 10 buses, statistics are noisy");

  Warnings warnings;
  const HermitianMatrix h = build_hamiltonian(fleet.snapshot, fleet.route, to_spec(s), &warnings);
  const Spectrum spectrum = eigenvalues(h);

  json config = fleet_config(f);
  config.update(spec_config(s));
  if (q.enabled) {
    config["quantum"] = true;
    config["seed"] = *q.seed;
  }
  json report = {{"command", "diagnose"},
                 {"config", config},
                 {"ingestion", fleet.ingestion},
                 {"n_buses", fleet.snapshot.size()},
                 {"spacing", spacing_stats(sp.normalized)},
                 {"spectrum", spectrum_stats(spectrum)},
                 {"flags", flags},
                 {"warnings", warnings}};
  if (q.enabled) report["quantum"] = quantum_report(spectrum, q);
  o.write_json("report.json", report);
  json hist = io::to_json(make_histogram(sp.normalized, uniform_edges(0.0, 4.0, 40)));
  hist["kind"] = "fleet_spacing";
  o.write_json("histogram.json", hist);
  o.write_meta("diagnose");
  return 0;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::string target = "gue";
  double q = 0.5;
  std::string method = "anneal";
  std::string objective = "spacing_ks";
  std::size_t budget = 20000;
  std::optional<double> max_shift;
  double epsilon = 0.1;
  double ratio = 0.995;
  std::size_t gas_sweeps = 2000;
  std::optional<double> horizon;
  std::uint64_t seed = 0;
};

double lap_time(const RingRoute& route) {
  double t = 0.0;
  const auto& stops = route.stops();
  const auto& v = route.segment_velocities();
  if (stops.empty()) return route.circumference() / v[0];
  for (std::size_t k = 0; k < stops.size(); ++k) {
    const double to = stops[(k + 1) % stops.size()].arc_position;
    double d = route.forward_distance(stops[k].arc_position, to);
    if (stops.size() == 1) d = route.circumference();
    t += d / v[k] + stops[k].mean_stop_time;
  }
  return t;
}

int run_optimize(const FleetArgs& f, const SpecArgs& s, const OptimizeArgs& a, Output& o) {
  const Fleet fleet = load_fleet(f);
  const EnsembleKind target = EnsembleKind::parse(a.target, a.q);
  const double max_shift = a.max_shift.value_or(fleet.route.circumference() / 2.0);

  Objective objective;
  objective.epsilon = a.epsilon;
  if (a.objective == "spacing_ks") {
    objective.criterion = SpacingKS{target};
  } else if (a.objective == "r_ratio") {
    objective.criterion = RRatio{r_reference(target)};
  } else if (a.objective == "spectral_ks") {
    objective.criterion = SpectralKS{to_spec(s), target};
  } else {
    throw Error(ErrorKind::UsageError, "unknown objective '" + a.objective + "' (spacing_ks|r_ratio|spectral_ks)");
  }
  validate(objective);

  DisplacementPlan plan;
  if (a.method == "match") {
    plan = plan_by_matching(fleet.snapshot, fleet.route, objective, target, max_shift, a.seed, a.gas_sweeps);
  } else if (a.method == "anneal") {
    if (a.budget == 0) throw Error(ErrorKind::UsageError, "--budget must be at least 1");
    plan = local_search_optimize(fleet.snapshot, fleet.route, objective, max_shift, a.budget,
                                 TemperatureSchedule{std::nullopt, a.ratio}, a.seed);
  } else {
    throw Error(ErrorKind::UsageError, "unknown method '" + a.method + "' (match|anneal)");
  }

  const Schedule schedule = schedule_from_displacements(plan, fleet.snapshot, fleet.route);
  const double horizon = a.horizon.value_or(lap_time(fleet.route));
  const FleetSnapshot simulated = simulate_round(fleet.snapshot, fleet.route, schedule, horizon);
  // Reference run without the schedule, so the comparison isolates its effect.
  const FleetSnapshot baseline = simulate_round(fleet.snapshot, fleet.route, Schedule{}, horizon);

  auto diag = [&](const FleetSnapshot& snap) {
    const SpacingSample sp = spacings(snap, fleet.route);
    return json{{"objective", evaluate_objective(objective, snap, fleet.route)},
                {"ks_target", ks_distance(sp.normalized, target)},
                {"mean_r", mean_r(sp.normalized)}};
  };
  const FleetSnapshot planned = advance(fleet.snapshot, fleet.route, plan.deltas);

  json config = fleet_config(f);
  config.update({{"target", a.target},
                 {"q", a.q},
                 {"method", a.method},
                 {"objective", a.objective},
                 {"budget", a.budget},
                 {"max_shift", max_shift},
                 {"epsilon", a.epsilon},
                 {"ratio", a.ratio},
                 {"gas_sweeps", a.gas_sweeps},
                 {"horizon", horizon},
                 {"seed", a.seed}});
  if (a.objective == "spectral_ks") config.update(spec_config(s));

  json entries = json::array();
  for (const auto& e : schedule.entries) {
    entries.push_back({{"bus_id", e.bus_id}, {"requested_m", e.requested}, {"achieved_m", e.achieved}});
  }
  json report = {{"command", "optimize"},
                 {"config", config},
                 {"ingestion", fleet.ingestion},
                 {"target", target.name()},
                 {"plan", io::to_json(plan, fleet.snapshot)},
                 {"before", diag(fleet.snapshot)},
                 {"planned", diag(planned)},
                 {"simulated", diag(simulated)},
                 {"unscheduled", diag(baseline)},
                 {"reconciliation", entries},
                 {"converged", plan.objective_after <= a.epsilon}};
  o.write_json("report.json", report);
  o.write_json("plan.json", io::to_json(plan, fleet.snapshot));
  const std::string generated_at = format_iso8601(fleet.snapshot.time);
  o.write_json("schedule.json", io::schedule_to_json(schedule, generated_at));
  o.write("schedule.csv", io::schedule_to_csv(schedule));
  json hist = io::to_json(make_histogram(spacings(planned, fleet.route).normalized, uniform_edges(0.0, 4.0, 40)));
  hist["kind"] = "planned_spacing";
  o.write_json("histogram.json", hist);
  o.write_meta("optimize");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spacing statistics and stop-time scheduling for ring bus routes", "ringchaos"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  auto config = std::make_shared<JsonConfig>();
  app.config_formatter(config);
  app.set_config("--config", "", "JSON file supplying any flag of the subcommand; flags on the command line win");

  Output out;
  for (int i = 0; i < argc; ++i) out.argv.emplace_back(argv[i]);
  std::string out_dir = "out";

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "Sample spacings from a reference law");
  sample->add_option("--kind", sample_args.kind, "poisson | goe | gue | gse | wd1 | wd2 | wd4 | brody")->required();
  sample->add_option("--q", sample_args.q, "Brody parameter in [0, 1]")->capture_default_str();
  sample->add_option("--n", sample_args.n, "Number of spacings")->capture_default_str();
  sample->add_option("--seed", sample_args.seed, "Random seed")->required();
  sample->add_option("--bins", sample_args.bins, "Histogram bins")->capture_default_str();
  sample->add_option("--s-max", sample_args.s_max, "Histogram upper edge")->capture_default_str();
  sample->add_option("--out", out_dir, "Output directory")->capture_default_str();

  GasArgs gas_args;
  CLI::App* gas = app.add_subcommand("gas", "Run the circular log-gas sampler");
  gas->add_option("--n", gas_args.n, "Particles")->capture_default_str();
  gas->add_option("--circumference", gas_args.circumference, "Ring length in meters")->capture_default_str();
  gas->add_option("--beta", gas_args.beta, "Inverse temperature")->capture_default_str();
  gas->add_option("--sweeps", gas_args.sweeps, "Metropolis sweeps per chain")->capture_default_str();
  gas->add_option("--seed", gas_args.seed, "Random seed")->required();
  gas->add_option("--chains", gas_args.chains, "Independent chains")->capture_default_str();
  gas->add_option("--threads", gas_args.threads, "Worker threads (0 = hardware)")->capture_default_str();
  gas->add_option("--distance", gas_args.distance, "chord | arc")->capture_default_str();
  gas->add_option("--out", out_dir, "Output directory")->capture_default_str();

  FleetArgs diag_fleet;
  SpecArgs diag_spec;
  QuantumArgs quantum;
  CLI::App* diagnose = app.add_subcommand("diagnose", "Spacing and spectral diagnostics of a fleet");
  add_fleet_options(diagnose, diag_fleet);
  add_spec_options(diagnose, diag_spec);
  diagnose->add_flag("--quantum", quantum.enabled, "Add survival probability, QPE and IPR");
  diagnose->add_option("--state", quantum.state, "uniform | basis")->capture_default_str();
  diagnose->add_option("--state-index", quantum.state_index, "Bus index for --state basis");
  diagnose->add_option("--t-max", quantum.t_max, "Survival curve end time");
  diagnose->add_option("--t-steps", quantum.t_steps, "Survival curve steps")->capture_default_str();
  diagnose->add_option("--qpe-time", quantum.qpe_time, "Evolution time for QPE");
  diagnose->add_option("--ancilla", quantum.ancilla, "QPE ancilla qubits")->capture_default_str();
  diagnose->add_option("--shots", quantum.shots, "QPE shots")->capture_default_str();
  diagnose->add_option("--seed", quantum.seed, "Random seed (required with --quantum)");
  diagnose->add_option("--out", out_dir, "Output directory")->capture_default_str();

  FleetArgs opt_fleet;
  SpecArgs opt_spec;
  OptimizeArgs opt_args;
  CLI::App* optimize = app.add_subcommand("optimize", "Plan displacements and stop-time schedules");
  add_fleet_options(optimize, opt_fleet);
  add_spec_options(optimize, opt_spec);
  optimize->add_option("--target", opt_args.target, "Target law")->capture_default_str();
  optimize->add_option("--q", opt_args.q, "Brody parameter for --target brody")->capture_default_str();
  optimize->add_option("--method", opt_args.method, "match | anneal")->capture_default_str();
  optimize->add_option("--objective", opt_args.objective, "spacing_ks | r_ratio | spectral_ks")
      ->capture_default_str();
  optimize->add_option("--budget", opt_args.budget, "Annealing iterations")->capture_default_str();
  optimize->add_option("--max-shift", opt_args.max_shift, "Max |delta| in meters (default L/2)");
  optimize->add_option("--epsilon", opt_args.epsilon, "Convergence threshold")->capture_default_str();
  optimize->add_option("--ratio", opt_args.ratio, "Temperature ratio per iteration")->capture_default_str();
  optimize->add_option("--gas-sweeps", opt_args.gas_sweeps, "Sweeps for sampled targets")->capture_default_str();
  optimize->add_option("--horizon", opt_args.horizon, "Simulation horizon in seconds (default one lap)");
  optimize->add_option("--seed", opt_args.seed, "Random seed")->required();
  optimize->add_option("--out", out_dir, "Output directory")->capture_default_str();

  for (int i = 1; i < argc; ++i) {
    if (app.get_subcommand_no_throw(argv[i])) {
      config->section = argv[i];
      break;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "UsageError: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_input_error(e.kind()) ? 2 : 1;
  }

  out.dir = out_dir;
  try {
    if (*sample) return run_sample(sample_args, out);
    if (*gas) return run_gas(gas_args, out);
    if (*diagnose) return run_diagnose(diag_fleet, diag_spec, quantum, out);
    if (*optimize) return run_optimize(opt_fleet, opt_spec, opt_args, out);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_input_error(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
