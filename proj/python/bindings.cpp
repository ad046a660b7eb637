#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ringchaos/dyson_gas.hpp"
#include "ringchaos/errors.hpp"
#include "ringchaos/hermitian.hpp"
#include "ringchaos/ingestion.hpp"
#include "ringchaos/optimizer.hpp"
#include "ringchaos/quantum_emulation.hpp"
#include "ringchaos/ring_model.hpp"
#include "ringchaos/spectral_statistics.hpp"

namespace py = pybind11;
using namespace ringchaos;

namespace {

using Vec = std::vector<double>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

HermitianMatrix to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw Error(ErrorKind::DimensionMismatch, "expected a square 2-D array");
  }
  const auto n = static_cast<std::size_t>(a.shape(0));
  std::vector<Complex> entries(a.data(), a.data() + n * n);
  return HermitianMatrix::from_row_major(n, entries);
}

py::array_t<Complex> to_array(const HermitianMatrix& h) {
  const std::size_t n = h.dimension();
  py::array_t<Complex> out({n, n});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = h(i, j);
  return out;
}

// Columns are eigenvectors, matching numpy.linalg.eigh.
py::array_t<Complex> vectors_to_array(const Spectrum& s) {
  const std::size_t n = s.size();
  py::array_t<Complex> out({n, n});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = s.vector(k);
    for (std::size_t i = 0; i < n; ++i) m(i, k) = v[i];
  }
  return out;
}

FleetSnapshot make_snapshot(const std::vector<double>& positions, double time) {
  FleetSnapshot s;
  s.time = time;
  for (std::size_t i = 0; i < positions.size(); ++i) s.buses.push_back({"bus" + std::to_string(i), positions[i]});
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Level spacing statistics, log-gas sampling and bus schedule optimization on a ring.";

  py::register_exception<Error>(m, "RingChaosError", PyExc_ValueError);

  // -- spectral statistics
  py::class_<EnsembleKind>(m, "EnsembleKind")
      .def_static("poisson", &EnsembleKind::poisson)
      .def_static("goe", &EnsembleKind::goe)
      .def_static("gue", &EnsembleKind::gue)
      .def_static("gse", &EnsembleKind::gse)
      .def_static("wigner_dyson", &EnsembleKind::wigner_dyson, py::arg("beta"))
      .def_static("brody", &EnsembleKind::brody, py::arg("q"))
      .def_static("parse", &EnsembleKind::parse, py::arg("name"), py::arg("q") = 0.0)
      .def_property_readonly("name", &EnsembleKind::name)
      .def_property_readonly("beta", &EnsembleKind::beta)
      .def_property_readonly("q", &EnsembleKind::q)
      .def(py::self == py::self)
      .def("__repr__", [](const EnsembleKind& k) { return "EnsembleKind('" + k.name() + "')"; });

  for (const char* name : {"pdf", "cdf"}) {
    const bool is_pdf = std::string(name) == "pdf";
    m.def(name, [is_pdf](const EnsembleKind& k, double s) { return is_pdf ? pdf(k, s) : cdf(k, s); },
          py::arg("kind"), py::arg("s"));
    m.def(
        name,
        [is_pdf](const EnsembleKind& k, const Vec& s) {
          Vec out(s.size());
          for (std::size_t i = 0; i < s.size(); ++i) out[i] = is_pdf ? pdf(k, s[i]) : cdf(k, s[i]);
          return out;
        },
        py::arg("kind"), py::arg("s"));
  }
  m.def("quantile", &quantile, py::arg("kind"), py::arg("u"));
  m.def("wigner_dyson_constants", [](int beta) {
    const auto c = wigner_dyson_constants(beta);
    return py::make_tuple(c.b, c.a);
  }, py::arg("beta"), "(b, a) of b s^beta exp(-a s^2).");
  m.def("brody_b", &brody_b, py::arg("q"));

  m.def("sample_spacings", py::overload_cast<const EnsembleKind&, std::size_t, std::uint64_t>(&sample_spacings),
        py::arg("kind"), py::arg("n"), py::arg("seed"));
  m.def("ks_distance", [](const Vec& s, const EnsembleKind& k) { return ks_distance(s, k); }, py::arg("samples"),
        py::arg("kind"));
  m.def("ks_two_sample", [](const Vec& a, const Vec& b) { return ks_distance(std::span<const double>(a), b); },
        py::arg("a"), py::arg("b"));
  m.def("mean_r", [](const Vec& s) { return mean_r(s); }, py::arg("spacings"));
  m.def("mean_r_levels", [](const Vec& s) { return mean_r_levels(s); }, py::arg("sorted_levels"));
  m.def("r_reference", &r_reference, py::arg("kind"));
  m.attr("POISSON_MEAN_R") = kPoissonMeanR;
  m.attr("GUE_MEAN_R") = kGueMeanR;

  py::class_<BrodyFit>(m, "BrodyFit")
      .def_readonly("q_hat", &BrodyFit::q_hat)
      .def_readonly("log_likelihood", &BrodyFit::log_likelihood)
      .def_readonly("warnings", &BrodyFit::warnings);
  m.def("fit_brody", [](const Vec& s) { return fit_brody(s); }, py::arg("samples"));

  py::class_<Histogram>(m, "Histogram")
      .def_readonly("bin_edges", &Histogram::bin_edges)
      .def_readonly("counts", &Histogram::counts)
      .def_readonly("total", &Histogram::total);
  m.def(
      "make_histogram",
      [](const std::vector<double>& samples, double lo, double hi, std::size_t bins) {
        return make_histogram(samples, uniform_edges(lo, hi, bins));
      },
      py::arg("samples"), py::arg("lo") = 0.0, py::arg("hi") = 5.0, py::arg("bins") = 100);
  m.def("l1_histogram_distance", &l1_histogram_distance, py::arg("hist"), py::arg("kind"));

  // -- ring model
  py::class_<Stop>(m, "Stop")
      .def(py::init([](double arc, double mean, double max, double min) { return Stop{arc, mean, max, min}; }),
           py::arg("arc_position"), py::arg("mean_stop_time"), py::arg("max_stop_time"),
           py::arg("min_stop_time") = 0.0)
      .def_readwrite("arc_position", &Stop::arc_position)
      .def_readwrite("mean_stop_time", &Stop::mean_stop_time)
      .def_readwrite("max_stop_time", &Stop::max_stop_time)
      .def_readwrite("min_stop_time", &Stop::min_stop_time);

  py::class_<RingRoute>(m, "RingRoute")
      .def(py::init<double, std::vector<Stop>, std::vector<double>>(), py::arg("circumference"),
           py::arg("stops"), py::arg("segment_velocities"))
      .def_property_readonly("circumference", &RingRoute::circumference)
      .def_property_readonly("stops", &RingRoute::stops)
      .def_property_readonly("segment_velocities", &RingRoute::segment_velocities)
      .def("next_stop", &RingRoute::next_stop, py::arg("position"))
      .def("velocity_at", &RingRoute::velocity_at, py::arg("position"));

  py::class_<BusPosition>(m, "BusPosition")
      .def(py::init([](std::string id, double x) { return BusPosition{std::move(id), x}; }), py::arg("bus_id"),
           py::arg("position"))
      .def_readwrite("bus_id", &BusPosition::bus_id)
      .def_readwrite("position", &BusPosition::position);

  py::class_<FleetSnapshot>(m, "FleetSnapshot")
      .def(py::init([](std::vector<BusPosition> buses, double time) { return FleetSnapshot{time, std::move(buses)}; }),
           py::arg("buses"), py::arg("time") = 0.0)
      .def_static("from_positions", &make_snapshot, py::arg("positions"), py::arg("time") = 0.0,
                  "Snapshot with ids bus0, bus1, ...")
      .def_readwrite("time", &FleetSnapshot::time)
      .def_readwrite("buses", &FleetSnapshot::buses)
      .def("positions", &FleetSnapshot::positions)
      .def("__len__", &FleetSnapshot::size);

  py::class_<SpacingSample>(m, "SpacingSample")
      .def_readonly("raw", &SpacingSample::raw)
      .def_readonly("normalized", &SpacingSample::normalized)
      .def_readonly("mean_spacing", &SpacingSample::mean_spacing)
      .def_readonly("order", &SpacingSample::order);
  m.def("spacings", py::overload_cast<const FleetSnapshot&, const RingRoute&>(&spacings), py::arg("snapshot"),
        py::arg("route"));
  m.def("ring_spacings", [](const Vec& x, double L) { return spacings(x, L); }, py::arg("positions"),
        py::arg("circumference"));
  m.def(
      "advance", [](const FleetSnapshot& s, const RingRoute& r, const Vec& d) { return advance(s, r, d); },
      py::arg("snapshot"), py::arg("route"), py::arg("displacements"));

  // -- dyson gas
  py::enum_<DistanceMode>(m, "DistanceMode").value("CHORD", DistanceMode::Chord).value("ARC", DistanceMode::Arc);

  py::class_<GasSample>(m, "GasSample")
      .def_property_readonly("positions", [](const GasSample& g) { return g.configuration.positions; })
      .def_readonly("step", &GasSample::step)
      .def_readonly("acceptance_rate", &GasSample::acceptance_rate);
  m.def("sample_circular_gas", &sample_circular_gas, py::arg("n"), py::arg("circumference"), py::arg("beta"),
        py::arg("sweeps"), py::arg("seed"), py::arg("mode") = DistanceMode::Chord);
  m.def(
      "circular_log_gas_energy",
      [](std::vector<double> x, double L, DistanceMode mode) {
        return circular_log_gas_energy(GasConfiguration{std::move(x), L}, mode);
      },
      py::arg("positions"), py::arg("circumference"), py::arg("mode") = DistanceMode::Chord);
  m.def(
      "confined_log_gas_energy",
      [](std::vector<double> x) { return confined_log_gas_energy(GasConfiguration{std::move(x), std::nullopt}); },
      py::arg("positions"));

  py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
      .def(py::init([](const std::string& kernel, double exponent, std::vector<double> masses,
                       std::vector<double> velocities, std::vector<double> lengths, double coupling,
                       DistanceMode mode, bool neighbor_only) {
             HamiltonianSpec s;
             if (kernel == "log") {
               s.potential = LogGas{};
             } else if (kernel == "inverse_power") {
               s.potential = InversePower{exponent};
             } else {
               throw Error(ErrorKind::UsageError, "unknown kernel '" + kernel + "'");
             }
             s.masses = std::move(masses);
             s.velocities = std::move(velocities);
             s.lengths = std::move(lengths);
             s.coupling = coupling;
             s.distance_mode = mode;
             s.neighbor_only = neighbor_only;
             return s;
           }),
           py::arg("kernel") = "inverse_power", py::arg("exponent") = 2.0, py::arg("masses") = std::vector<double>{},
           py::arg("velocities") = std::vector<double>{}, py::arg("lengths") = std::vector<double>{},
           py::arg("coupling") = 1.0, py::arg("distance_mode") = DistanceMode::Chord,
           py::arg("neighbor_only") = false);
  m.def(
      "build_hamiltonian",
      [](const FleetSnapshot& snap, const RingRoute& route, const HamiltonianSpec& spec) {
        Warnings w;
        auto h = build_hamiltonian(snap, route, spec, &w);
        return py::make_tuple(to_array(h), w);
      },
      py::arg("snapshot"), py::arg("route"), py::arg("spec"), "Returns (matrix, warnings).");

  // -- eigensolver
  m.def(
      "eigh",
      [](const ComplexArray& a) {
        const Spectrum s = eigenvalues(to_matrix(a));
        return py::make_tuple(s.eigenvalues, vectors_to_array(s));
      },
      py::arg("matrix"), "Eigenvalues ascending and eigenvectors as columns.");
  m.def(
      "unfolded_spacings",
      [](const std::vector<double>& levels, const std::string& method, int degree) {
        Spectrum s;
        s.eigenvalues = levels;
        std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
        const UnfoldMethod u = method == "global_mean" ? UnfoldMethod::global_mean() : UnfoldMethod::polynomial(degree);
        if (method != "global_mean" && method != "polynomial") {
          throw Error(ErrorKind::UsageError, "unknown unfolding '" + method + "'");
        }
        return *unfold(s, u).unfolded_spacings;
      },
      py::arg("levels"), py::arg("method") = "polynomial", py::arg("degree") = 5);

  // -- quantum emulation
  py::class_<StateVector>(m, "StateVector")
      .def(py::init<std::vector<Complex>>(), py::arg("amplitudes"))
      .def_static("basis", &StateVector::basis, py::arg("dimension"), py::arg("index"))
      .def_static("uniform", &StateVector::uniform, py::arg("dimension"))
      .def_static("normalized", &StateVector::normalized, py::arg("amplitudes"))
      .def_property_readonly("amplitudes", &StateVector::amplitudes)
      .def("__len__", &StateVector::dimension);

  py::class_<HadamardEstimate>(m, "HadamardEstimate")
      .def_readonly("re", &HadamardEstimate::re)
      .def_readonly("im", &HadamardEstimate::im);
  py::class_<PhaseEstimate>(m, "PhaseEstimate")
      .def_readonly("phase", &PhaseEstimate::phase)
      .def_readonly("probability", &PhaseEstimate::probability)
      .def_readonly("n_ancilla", &PhaseEstimate::n_ancilla);
  py::class_<QpeResult>(m, "QpeResult")
      .def_readonly("estimates", &QpeResult::estimates)
      .def_readonly("phase_wraps", &QpeResult::phase_wraps);

  py::class_<Propagator>(m, "Propagator")
      .def(py::init([](const ComplexArray& a) { return Propagator(to_matrix(a)); }), py::arg("hamiltonian"))
      .def_property_readonly("eigenvalues", [](const Propagator& p) { return p.spectrum().eigenvalues; })
      .def("evolve", &Propagator::evolve, py::arg("t"), py::arg("psi"))
      .def("overlap", &Propagator::overlap, py::arg("t"), py::arg("psi"))
      .def("survival_probability", &Propagator::survival_probability, py::arg("t"), py::arg("psi"))
      .def(
          "survival_curve", [](const Propagator& p, const Vec& t, const StateVector& psi) { return p.survival_curve(t, psi); },
          py::arg("times"), py::arg("psi"))
      .def("hadamard_test", &Propagator::hadamard_test, py::arg("t"), py::arg("psi"), py::arg("shots"),
           py::arg("seed"))
      .def("qpe_distribution", &Propagator::qpe_distribution, py::arg("t"), py::arg("psi"), py::arg("n_ancilla"))
      .def("qpe", &Propagator::qpe, py::arg("t"), py::arg("psi"), py::arg("n_ancilla"), py::arg("shots"),
           py::arg("seed"));
  m.def("ipr", &ipr, py::arg("psi"));

  // -- optimizer
  py::class_<Objective>(m, "Objective")
      .def_static(
          "spacing_ks",
          [](const EnsembleKind& target, double eps) { return Objective{SpacingKS{target}, eps}; },
          py::arg("target") = EnsembleKind::gue(), py::arg("epsilon") = 0.1)
      .def_static(
          "r_ratio", [](double r, double eps) { return Objective{RRatio{r}, eps}; }, py::arg("target_r") = kGueMeanR,
          py::arg("epsilon") = 0.1)
      .def_static(
          "spectral_ks",
          [](const HamiltonianSpec& spec, const EnsembleKind& target, double eps) {
            return Objective{SpectralKS{spec, target}, eps};
          },
          py::arg("spec"), py::arg("target") = EnsembleKind::gue(), py::arg("epsilon") = 0.1)
      .def_readwrite("epsilon", &Objective::epsilon);
  m.def("evaluate_objective", &evaluate_objective, py::arg("objective"), py::arg("snapshot"), py::arg("route"));

  py::class_<DisplacementPlan>(m, "DisplacementPlan")
      .def(py::init([](std::vector<double> deltas) {
             DisplacementPlan p;
             p.deltas = std::move(deltas);
             return p;
           }),
           py::arg("deltas"))
      .def_readonly("deltas", &DisplacementPlan::deltas)
      .def_readonly("objective_before", &DisplacementPlan::objective_before)
      .def_readonly("objective_after", &DisplacementPlan::objective_after)
      .def_readonly("iterations_used", &DisplacementPlan::iterations_used)
      .def_readonly("clamped", &DisplacementPlan::clamped)
      .def_readonly("rotation", &DisplacementPlan::rotation);

  m.def("target_configuration", &target_configuration, py::arg("snapshot"), py::arg("route"), py::arg("target"),
        py::arg("seed"), py::arg("gas_sweeps") = 2000);
  m.def(
      "displacement_plan_matching",
      [](const Vec& current, const Vec& target, double L, double max_shift) {
        return displacement_plan_matching(current, target, L, max_shift);
      },
      py::arg("current"), py::arg("target"), py::arg("circumference"), py::arg("max_shift"));
  m.def("plan_by_matching", &plan_by_matching, py::arg("snapshot"), py::arg("route"), py::arg("objective"),
        py::arg("target"), py::arg("max_shift"), py::arg("seed"), py::arg("gas_sweeps") = 2000);
  m.def(
      "local_search_optimize",
      [](const FleetSnapshot& snap, const RingRoute& route, const Objective& obj, double max_shift,
         std::size_t iterations, std::uint64_t seed, std::optional<double> t0, double ratio,
         std::optional<double> step) {
        return local_search_optimize(snap, route, obj, max_shift, iterations, TemperatureSchedule{t0, ratio}, seed,
                                     step);
      },
      py::arg("snapshot"), py::arg("route"), py::arg("objective"), py::arg("max_shift"), py::arg("iterations"),
      py::arg("seed"), py::arg("initial_temperature") = py::none(), py::arg("ratio") = 0.995,
      py::arg("step") = py::none());

  py::class_<ScheduleEntry>(m, "ScheduleEntry")
      .def_readonly("bus_id", &ScheduleEntry::bus_id)
      .def_readonly("stop_index", &ScheduleEntry::stop_index)
      .def_readonly("stop_duration", &ScheduleEntry::stop_duration)
      .def_readonly("carryover", &ScheduleEntry::carryover)
      .def_readonly("requested", &ScheduleEntry::requested)
      .def_readonly("achieved", &ScheduleEntry::achieved);
  py::class_<Schedule>(m, "Schedule")
      .def(py::init<>())
      .def_readonly("entries", &Schedule::entries);
  py::class_<DwellDecision>(m, "DwellDecision")
      .def_readonly("duration", &DwellDecision::duration)
      .def_readonly("achieved", &DwellDecision::achieved)
      .def_readonly("carryover", &DwellDecision::carryover);
  m.def("dwell_for_shift", &dwell_for_shift, py::arg("delta"), py::arg("stop"), py::arg("velocity"));
  m.def("schedule_from_displacements", &schedule_from_displacements, py::arg("plan"), py::arg("snapshot"),
        py::arg("route"));
  m.def("simulate_round", &simulate_round, py::arg("snapshot"), py::arg("route"), py::arg("schedule"),
        py::arg("horizon"));

  // -- ingestion
  py::class_<GpsRecord>(m, "GpsRecord")
      .def(py::init([](double t, std::string id, double lat, double lon) { return GpsRecord{t, std::move(id), lat, lon}; }),
           py::arg("timestamp"), py::arg("bus_id"), py::arg("latitude"), py::arg("longitude"))
      .def_readwrite("timestamp", &GpsRecord::timestamp)
      .def_readwrite("bus_id", &GpsRecord::bus_id)
      .def_readwrite("latitude", &GpsRecord::latitude)
      .def_readwrite("longitude", &GpsRecord::longitude)
      .def(py::self == py::self);
  py::class_<RowError>(m, "RowError").def_readonly("row", &RowError::row).def_readonly("reason", &RowError::reason);
  py::class_<GpsParseResult>(m, "GpsParseResult")
      .def_readonly("records", &GpsParseResult::records)
      .def_readonly("errors", &GpsParseResult::errors)
      .def_readonly("warnings", &GpsParseResult::warnings);

  auto format_of = [](const std::string& f) {
    if (f == "csv") return GpsFormat::Csv;
    if (f == "json") return GpsFormat::Json;
    throw Error(ErrorKind::UsageError, "format must be 'csv' or 'json'");
  };
  m.def(
      "parse_gps",
      [format_of](const std::string& text, const std::string& format, bool strict) {
        return parse_gps(std::string_view(text), format_of(format), strict);
      },
      py::arg("text"), py::arg("format") = "csv", py::arg("strict") = false);
  m.def(
      "serialize_gps",
      [format_of](const std::vector<GpsRecord>& r, const std::string& format) {
        return serialize_gps(r, format_of(format));
      },
      py::arg("records"), py::arg("format") = "csv");
  m.def("parse_iso8601", &parse_iso8601, py::arg("text"));
  m.def("format_iso8601", &format_iso8601, py::arg("timestamp"));

  py::class_<RoutePolyline>(m, "RoutePolyline")
      .def(py::init([](const std::vector<std::pair<double, double>>& v) {
             std::vector<LatLon> pts;
             for (const auto& [lat, lon] : v) pts.push_back({lat, lon});
             return RoutePolyline(std::move(pts));
           }),
           py::arg("vertices"))
      .def_property_readonly("cumulative_arc", &RoutePolyline::cumulative_arc)
      .def_property_readonly("total_length", &RoutePolyline::total_length)
      .def("point_at", [](const RoutePolyline& p, double arc) {
        const LatLon q = p.point_at(arc);
        return py::make_tuple(q.lat, q.lon);
      }, py::arg("arc"));

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("arc", &MatchResult::arc)
      .def_readonly("cross_track_error", &MatchResult::cross_track_error)
      .def_readonly("off_route", &MatchResult::off_route);
  m.def(
      "map_match",
      [](double lat, double lon, const RoutePolyline& p, double threshold) {
        return map_match(LatLon{lat, lon}, p, threshold);
      },
      py::arg("lat"), py::arg("lon"), py::arg("polyline"), py::arg("threshold") = kOffRouteThreshold);

  py::class_<SnapshotReport>(m, "SnapshotReport")
      .def_readonly("snapshot", &SnapshotReport::snapshot)
      .def_readonly("stale", &SnapshotReport::stale)
      .def_readonly("off_route", &SnapshotReport::off_route);
  m.def(
      "snapshot_at",
      [](const std::vector<GpsRecord>& records, double t, const RoutePolyline& p, double staleness,
         const RingRoute* route) { return snapshot_at(records, t, p, staleness, route); },
      py::arg("records"), py::arg("t"), py::arg("polyline"), py::arg("staleness") = kDefaultStaleness,
      py::arg("route") = nullptr);
}
