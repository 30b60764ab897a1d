#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arsgs/adapt.hpp"
#include "arsgs/diagnostics.hpp"
#include "arsgs/experiment.hpp"
#include "arsgs/gapcore.hpp"
#include "arsgs/targets.hpp"

namespace py = pybind11;
using namespace arsgs;

namespace {

using Rows = std::vector<std::vector<double>>;

SymMatrix to_sym(const Rows& rows) {
  const int d = static_cast<int>(rows.size());
  Vec entries;
  entries.reserve(static_cast<std::size_t>(d) * d);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != d)
      throw std::invalid_argument("matrix must be square");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return SymMatrix::from_entries(d, std::move(entries));
}

Rows from_sym(const SymMatrix& m) {
  Rows rows(m.dim(), std::vector<double>(m.dim()));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) rows[i][j] = m(i, j);
  return rows;
}

BlockPartition to_partition(const std::vector<int>& sizes, int d) {
  if (sizes.empty()) return BlockPartition::coordinatewise(d);
  return BlockPartition::from_sizes(sizes);
}

py::dict run_from_json(const std::string& config_json) {
  const ExperimentConfig cfg = parse_experiment_config(config_json, "", false);
  const ExperimentResult res = run_experiment_in_memory(cfg);

  py::dict out;
  Rows chain;
  std::vector<long> steps;
  Rows regimes;
  for (const ChainRecord& rec : res.run.chain) {
    steps.push_back(rec.step);
    chain.push_back(rec.x);
    if (!rec.regimes.empty())
      regimes.push_back(std::vector<double>(rec.regimes.begin(), rec.regimes.end()));
  }
  out["steps"] = steps;
  out["chain"] = chain;
  if (!regimes.empty()) out["regimes"] = regimes;

  Rows trace_w, trace_p;
  std::vector<double> trace_pg;
  for (const TraceRow& row : res.run.trace) {
    trace_w.push_back(row.w);
    trace_p.push_back(row.p);
    trace_pg.push_back(row.pg);
  }
  out["trace_w"] = trace_w;
  out["trace_p"] = trace_p;
  out["trace_pg"] = trace_pg;
  out["final_p"] = res.run.final_p;
  out["pg_estimate"] = res.run.final_pg;
  out["total_steps"] = res.run.total_steps;
  out["skipped_epochs"] = res.run.skipped_epochs;
  if (!res.run.final_beta.empty()) out["final_beta"] = res.run.final_beta;
  return out;
}

}  // namespace

PYBIND11_MODULE(_arsgs, m) {
  m.doc() = "Adaptive random scan Gibbs sampling toolkit";
  m.attr("__version__") = kVersion;

  m.def(
      "pseudo_gap",
      [](const Rows& q, const std::vector<int>& partition, const Vec& p) {
        const SymMatrix qm = to_sym(q);
        const BlockPartition part = to_partition(partition, qm.dim());
        return pseudo_gap(qm, part, SelectionProbabilities(p));
      },
      py::arg("q"), py::arg("partition") = std::vector<int>{}, py::arg("p"),
      "lambda_min(D_p Q) for a precision matrix Q");

  m.def(
      "gaussian_gap",
      [](const Rows& q, const std::vector<int>& partition, const Vec& p) {
        const SymMatrix qm = to_sym(q);
        const BlockPartition part = to_partition(partition, qm.dim());
        return gaussian_gap(qm, part, SelectionProbabilities(p));
      },
      py::arg("q"), py::arg("partition") = std::vector<int>{}, py::arg("p"),
      "1 - lambda_max(F_1) for a Gaussian target");

  m.def(
      "pseudo_optimal",
      [](const Rows& sigma, const std::vector<int>& partition, double eps,
         double tol, int max_iter) {
        const SymMatrix sm = to_sym(sigma);
        const BlockPartition part = to_partition(partition, sm.dim());
        if (eps <= 0.0) eps = 1.0 / (static_cast<double>(sm.dim()) * sm.dim());
        const GapReport rep = pseudo_optimal_exact(sm, part, eps, tol, max_iter);
        py::dict out;
        out["p_opt"] = rep.weights.values();
        out["pg_opt"] = rep.gap_value;
        out["iterations"] = rep.iterations;
        out["converged"] = rep.converged;
        return out;
      },
      py::arg("sigma"), py::arg("partition") = std::vector<int>{},
      py::arg("eps") = 0.0, py::arg("tol") = 1e-5, py::arg("max_iter") = 100000,
      "Subgradient ascent for the pseudo-optimal selection probabilities");

  m.def("closed_form_pairs", [](const Vec& rho) {
    const auto [p, pg] = closed_form_pairs(rho);
    return py::make_tuple(p.values(), pg);
  });

  m.def(
      "project_simplex_eps",
      [](const Vec& v, double eps) { return project_simplex_eps(v, eps).values(); },
      py::arg("v"), py::arg("eps"));

  m.def("make_example1", [](const Vec& rho) { return from_sym(make_example1(rho)); });
  m.def("make_example2",
        [](int d, double c) { return from_sym(make_example2(d, c)); });
  m.def("make_tmvn_sigma", [](int d, int variant, std::uint64_t seed) {
    return from_sym(make_tmvn_sigma(d, variant, seed));
  });

  m.def(
      "acf",
      [](const Vec& series, int max_lag) { return acf(series, max_lag).values; },
      py::arg("series"), py::arg("max_lag"));
  m.def("batch_means_asvar", &batch_means_asvar);
  m.def("worst_linear_asvar", [](const Rows& columns) {
    const AsvarReport rep = worst_linear_asvar(columns);
    py::dict out;
    out["per_coordinate"] = rep.per_coordinate;
    out["max_value"] = rep.max_value;
    out["max_index"] = rep.max_index;
    out["excluded"] = rep.excluded;
    return out;
  });

  m.def("run_sampler", &run_from_json, py::arg("config_json"),
        "Run a sampler from an experiment-config JSON string (in memory)");
}
