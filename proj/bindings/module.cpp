// Python bindings for the DR-LSSV core library.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drlssv/hartley.hpp"
#include "drlssv/pipeline.hpp"
#include "drlssv/synth.hpp"

namespace py = pybind11;
using namespace drlssv;

namespace {

AqiBreakpoints& breakpoints() {
  static AqiBreakpoints bp = AqiBreakpoints::load_default();
  return bp;
}

KernelSpec make_kernel(const std::string& kind, double sigma) {
  if (kind == "linear") return {KernelKind::Linear, 1.0};
  if (kind == "rbf") return {KernelKind::Rbf, sigma};
  throw ConfigError("kernel must be 'rbf' or 'linear'");
}

Stage stage_from_name(const std::string& name) {
  if (name == "ingest") return Stage::Ingest;
  if (name == "preprocess") return Stage::Preprocess;
  if (name == "select") return Stage::Select;
  if (name == "train") return Stage::Train;
  if (name == "evaluate") return Stage::Evaluate;
  if (name == "report" || name == "run") return Stage::Report;
  throw ConfigError("unknown stage: " + name);
}

py::dict report_to_dict(const EvalReport& r) {
  py::dict d;
  d["method"] = r.method_name;
  d["n"] = r.n_samples;
  d["accuracy"] = r.accuracy;
  d["fpr"] = r.fpr;
  d["mae_aqi"] = r.mae_aqi;
  d["forecast_time_ms"] = r.forecast_time_ms;
  d["tau"] = r.tau_verdict.tau;
  d["tau_band"] = band_name(r.tau_verdict.band);
  return d;
}

}  // namespace

PYBIND11_MODULE(_drlssv, m) {
  m.doc() = "DR-LSSV air-quality forecasting core";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.attr("POLLUTANTS") = std::vector<std::string>(kPollutantNames.begin(),
                                                  kPollutantNames.end());

  // --- Hartley ---
  m.def(
      "dht_forward",
      [](const Eigen::MatrixXd& x) { return dht_forward(x).coefficients; },
      py::arg("grid"), "2-D discrete Hartley transform coefficients.");
  m.def(
      "dht_inverse",
      [](const Eigen::MatrixXd& h) {
        return dht_inverse(HartleySpectrum{h});
      },
      py::arg("spectrum"), "Inverse 2-D discrete Hartley transform.");
  m.def(
      "denoise",
      [](const Eigen::MatrixXd& x, double keep_fraction) {
        return denoise(x, DenoiseConfig{keep_fraction});
      },
      py::arg("grid"), py::arg("keep_fraction") = 0.95,
      "Hartley-domain hard-threshold denoising.");

  // --- AQI ---
  m.def(
      "compute_aqi",
      [](const Eigen::Matrix<double, kNumPollutants, 1>& conc) {
        AqiResult r = compute_aqi(conc, breakpoints());
        return py::make_tuple(r.aqi, std::string(band_name(r.band)));
      },
      py::arg("concentrations"),
      "AQI and band for 7 pollutant concentrations (canonical order).");
  m.def(
      "sub_index",
      [](const std::string& pollutant, double conc) {
        int p = pollutant_index(pollutant);
        if (p < 0) throw ConfigError("unknown pollutant: " + pollutant);
        return breakpoints().sub_index(p, conc);
      },
      py::arg("pollutant"), py::arg("concentration"));

  // --- Kendall ---
  m.def("kendall_tau", &kendall_tau, py::arg("u"), py::arg("v"),
        "Kendall tau-a rank correlation.");
  m.def(
      "tau_band", [](double tau) { return std::string(band_name(tau_band(tau))); },
      py::arg("tau"), "Concordance verdict band for a tau value.");

  // --- feature selection ---
  m.def(
      "select_features",
      [](const Eigen::MatrixXd& hourly, const Eigen::MatrixXd& daily, int k) {
        auto samples = homogenize(hourly, daily);
        LogisticConfig lc;
        lc.tol = std::max(lc.tol, 1e-9 * static_cast<double>(samples.size()));
        FeatureSelection sel = select_features(fit_logistic(samples, lc), k);
        py::list out;
        for (std::size_t i = 0; i < sel.ranked.size(); ++i)
          out.append(py::make_tuple(sel.ranked[i], sel.scores[i]));
        return out;
      },
      py::arg("hourly"), py::arg("daily"), py::arg("k") = 3,
      "Rank pollutants by pooled-logistic coefficient magnitude; returns "
      "all 7 (name, score) pairs, best first.");

  // --- LSSVM ---
  py::class_<LssvModel>(m, "LssvModel")
      .def_property_readonly("bias", [](const LssvModel& mo) { return mo.bias; })
      .def_property_readonly("gamma",
                             [](const LssvModel& mo) { return mo.gamma; })
      .def_property_readonly("dual",
                             [](const LssvModel& mo) { return mo.dual; })
      .def("predict",
           [](const LssvModel& mo, const Eigen::VectorXd& x) {
             return predict(mo, x);
           },
           py::arg("x"), "Raw regression output for one feature vector.")
      .def("classify",
           [](const LssvModel& mo, const Eigen::VectorXd& x) {
             AqiResult r = classify_aqi(mo, x, breakpoints());
             return py::make_tuple(r.aqi, std::string(band_name(r.band)));
           },
           py::arg("x"), "Clamped AQI prediction plus its band.")
      .def("save", [](const LssvModel& mo) { return save_model(mo); },
           "Versioned text serialization.");
  m.def(
      "train_lssv",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double gamma,
         const std::string& kernel, double sigma) {
        KernelSpec ker = make_kernel(kernel, sigma);
        if (ker.kind == KernelKind::Rbf && !(sigma > 0))
          ker.sigma = median_pairwise_distance(X);
        return train_lssv(X, y, gamma, ker);
      },
      py::arg("X"), py::arg("y"), py::arg("gamma") = 10.0,
      py::arg("kernel") = "rbf", py::arg("sigma") = 0.0,
      "Train a least-squares SVM; sigma <= 0 uses the median-distance "
      "heuristic.");
  m.def("load_model", &load_model, py::arg("text"));

  // --- synth + pipeline ---
  m.def(
      "write_synth",
      [](const std::string& out_dir, int n_stations, int days,
         std::uint64_t seed, double noise_sd, double spike_rate) {
        SynthSpec spec;
        spec.n_stations = n_stations;
        spec.days = days;
        spec.seed = seed;
        spec.noise_sd = noise_sd;
        spec.spike_rate = spike_rate;
        write_synth_files(generate_synth(spec, breakpoints()), out_dir);
      },
      py::arg("out_dir"), py::arg("n_stations") = 5, py::arg("days") = 120,
      py::arg("seed") = 42, py::arg("noise_sd") = 0.05,
      py::arg("spike_rate") = 0.01,
      "Write hourly.csv / daily.csv / clean.csv under out_dir.");
  m.def(
      "run_pipeline",
      [](const std::string& config_path,
         const std::vector<std::string>& overrides, const std::string& until,
         bool verbose) {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
        for (const auto& ov : overrides) apply_override(cfg, ov);
        cfg.validate();
        PipelineArtifacts art =
            run_pipeline(cfg, stage_from_name(until), verbose);
        py::dict d;
        d["selected"] = art.selection.selected;
        d["ranked"] = art.selection.ranked;
        d["scores"] = art.selection.scores;
        d["n_samples"] = art.features.rows();
        py::list reports;
        for (const auto& r : art.reports) reports.append(report_to_dict(r));
        d["reports"] = reports;
        return d;
      },
      py::arg("config_path") = "",
      py::arg("overrides") = std::vector<std::string>{},
      py::arg("until") = "report", py::arg("verbose") = false,
      "Run the pipeline; returns selection and evaluation summaries.");
}
