#include "cli.hpp"
#include "mgcnn/metrics.hpp"
#include "mgcnn/pipeline.hpp"
#include "mgcnn/spectral.hpp"
#include "mgcnn/synth.hpp"
#include "mgcnn/topology.hpp"

#include <pybind11/eigen.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace mgcnn;

namespace {

py::dict metrics_dict(const MetricsReport& r) {
  py::dict d;
  d["mse"] = r.mse;
  d["rmse"] = r.rmse;
  d["mae"] = r.mae;
  d["mape"] = r.mape_defined ? py::object(py::float_(r.mape)) : py::object(py::none());
  d["samples"] = r.sample_count;
  d["excluded_zero"] = r.excluded_zero_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral graph operators, metrics, synthetic data and the command-line driver";
  m.attr("__version__") = "0.1.0";
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def("edge_weight", &edge_weight, py::arg("length_miles"), py::arg("speed_mph"), py::arg("speed_floor_mph") = 1.0,
        "Travel time in seconds over a link.");

  m.def(
      "normalized_laplacian", [](const Matrix& w) { return Matrix(normalized_laplacian(w).matrix); }, py::arg("weights"));

  m.def(
      "largest_eigenvalue",
      [](const Matrix& w, double tolerance, int max_iterations) {
        Warnings warnings;
        return largest_eigenvalue(normalized_laplacian(w), tolerance, max_iterations, &warnings);
      },
      py::arg("weights"), py::arg("tolerance") = 1e-8, py::arg("max_iterations") = 5000);

  m.def(
      "scaled_laplacian", [](const Matrix& w) { return Matrix(scaled_laplacian_from_weights(w, 0).matrix); },
      py::arg("weights"), "2L/lambda_max - I for a weighted adjacency.");

  m.def(
      "chebyshev_basis",
      [](const Matrix& w, const Matrix& x, int order) {
        return chebyshev_basis(scaled_laplacian_from_weights(w, 0), x, order);
      },
      py::arg("weights"), py::arg("x"), py::arg("order"), "[T_0(L~) x, ..., T_{order-1}(L~) x]");

  m.def(
      "compute_metrics",
      [](const std::vector<double>& predicted, const std::vector<double>& truth) {
        return metrics_dict(compute_metrics(predicted, truth));
      },
      py::arg("predicted"), py::arg("truth"));

  m.def(
      "iqr_outlier_replace",
      [](const std::vector<double>& series, long fit_count) {
        int replaced = 0;
        auto out = iqr_outlier_replace(series, &replaced, fit_count);
        return py::make_tuple(out, replaced);
      },
      py::arg("series"), py::arg("fit_count") = -1, "Returns (cleaned series, number of replaced values).");

  m.def(
      "synth",
      [](const std::filesystem::path& out_dir, std::uint64_t seed, int nodes, int days) {
        SynthConfig c;
        c.seed = seed;
        c.n_intersections = nodes;
        c.days = days;
        c.validate();
        py::gil_scoped_release release;
        write_dataset(generate(c), out_dir);
      },
      py::arg("out_dir"), py::arg("seed") = 7, py::arg("nodes") = 10, py::arg("days") = 20,
      "Write a synthetic corridor (topology plus one CSV per intersection).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"mgcnn"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command-line invocation in process; returns (exit code, stdout, stderr).");
}
