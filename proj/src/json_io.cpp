#include "kw/json_io.hpp"

#include <cstdio>

namespace kw {

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("matrix: expected a non-empty array of rows");
  }
  const auto n_rows = static_cast<Index>(j.size());
  Index n_cols = -1;
  Matrix m;
  for (Index i = 0; i < n_rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.empty()) {
      throw ValidationError("matrix: row " + std::to_string(i) +
                            " is not a non-empty array");
    }
    if (n_cols < 0) {
      n_cols = static_cast<Index>(row.size());
      m.resize(n_rows, n_cols);
    } else if (static_cast<Index>(row.size()) != n_cols) {
      throw ValidationError("matrix: row " + std::to_string(i) +
                            " has inconsistent length");
    }
    for (Index k = 0; k < n_cols; ++k) {
      const auto& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
          !cell[1].is_number()) {
        throw ValidationError("matrix: entry (" + std::to_string(i) + ", " +
                              std::to_string(k) +
                              ") must be a [re, im] number pair");
      }
      m(i, k) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back({v(i).real(), v(i).imag()});
  }
  return out;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("vector: expected a non-empty array of [re, im] pairs");
  }
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) {
    const auto& cell = j[static_cast<std::size_t>(i)];
    if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
        !cell[1].is_number()) {
      throw ValidationError("vector: entry " + std::to_string(i) +
                            " must be a [re, im] number pair");
    }
    v(i) = Complex(cell[0].get<double>(), cell[1].get<double>());
  }
  return v;
}

nlohmann::json report_to_json(const ExperimentReport& r, bool include_timings) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["dim"] = r.dim;
  j["t1"] = r.t1;
  j["t"] = r.t;
  j["seed"] = r.seed;
  j["time_convention"] = "left_limit_at_joints";
  j["path_breakpoints"] = r.path_breakpoints;

  nlohmann::json rows = nlohmann::json::array();
  for (const SeriesRow& row : r.rows) {
    nlohmann::json jr;
    jr["n"] = row.n;
    jr["p_discrete"] = row.p_discrete;
    jr["op_error"] = row.op_error;
    jr["p_closed_form"] = row.p_closed_form;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);

  if (r.closed_form_probability) {
    j["closed_form_probability"] = *r.closed_form_probability;
  }
  if (r.convergence) {
    nlohmann::json fit;
    fit["slope"] = r.convergence->slope;
    fit["intercept"] = r.convergence->intercept;
    fit["residual"] = r.convergence->residual;
    fit["degenerate"] = r.convergence->degenerate;
    j["convergence"] = std::move(fit);
  }
  if (r.w_unitarity_residual) {
    j["w_unitarity_residual"] = *r.w_unitarity_residual;
  }
  if (r.ode_residual) j["ode_residual"] = *r.ode_residual;
  if (r.survival_deficit_coefficient) {
    j["survival_deficit_coefficient"] = *r.survival_deficit_coefficient;
  }
  if (r.final_state) j["final_state"] = matrix_to_json(*r.final_state);
  if (r.final_state_deviation) {
    j["final_state_deviation"] = *r.final_state_deviation;
  }
  if (include_timings) {
    nlohmann::json t;
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = std::move(t);
  }
  return j;
}

std::string report_csv(const ExperimentReport& r) {
  std::string out = "n,p_discrete,op_error,p_closed_form\n";
  for (const SeriesRow& row : r.rows) {
    out += std::to_string(row.n);
    out += ',';
    out += format_g17(row.p_discrete);
    out += ',';
    out += format_g17(row.op_error);
    out += ',';
    out += format_g17(row.p_closed_form);
    out += '\n';
  }
  return out;
}

}  // namespace kw
