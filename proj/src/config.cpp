#include "kw/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>

#include "kw/json_io.hpp"
#include "kw/random_matrices.hpp"

namespace kw {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  throw ConfigError(ptr, msg);
}

const json& member(const json& obj, const std::string& ptr, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ptr + "/" + key, "required key is missing");
  return *it;
}

void reject_unknown(const json& obj, const std::string& ptr,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(ptr + "/" + it.key(), "unknown key");
  }
}

double number_at(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(ptr, "expected a finite number");
  return v;
}

std::int64_t integer_at(const json& j, const std::string& ptr) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    fail(ptr, "expected an integer");
  }
  return j.get<std::int64_t>();
}

Matrix matrix_at(const json& j, const std::string& ptr, Index dim) {
  Matrix m;
  try {
    m = matrix_from_json(j);
  } catch (const ValidationError& e) {
    fail(ptr, e.what());
  }
  if (m.rows() != dim || m.cols() != dim) {
    fail(ptr, "expected a " + std::to_string(dim) + " x " +
                  std::to_string(dim) + " matrix, got " +
                  std::to_string(m.rows()) + " x " + std::to_string(m.cols()));
  }
  return m;
}

Operator generator_at(const json& j, const std::string& ptr, Index dim,
                      Rng& rng) {
  if (j.is_string()) {
    if (j.get<std::string>() != "random") {
      fail(ptr, "expected a [re, im] matrix or the string \"random\"");
    }
    return random_anti_hermitian(rng, dim);
  }
  return Operator(matrix_at(j, ptr, dim));
}

Hamiltonian parse_hamiltonian(const json& j, Index dim, Rng& rng) {
  const std::string ptr = "/hamiltonian";
  try {
    if (j.is_object()) {
      reject_unknown(j, ptr, {"type"});
      const auto& type = member(j, ptr, "type");
      if (!type.is_string() || type.get<std::string>() != "random") {
        fail(ptr + "/type", "the only object form is {\"type\": \"random\"}");
      }
      return Hamiltonian(random_hermitian(rng, dim));
    }
    return Hamiltonian(Operator(matrix_at(j, ptr, dim)));
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(ptr, e.what());
  }
}

Projector parse_projector(const json& j, Index dim) {
  const std::string ptr = "/projector";
  if (!j.is_object()) fail(ptr, "expected an object with a \"type\" key");
  const auto& type = member(j, ptr, "type");
  if (!type.is_string()) fail(ptr + "/type", "expected a string");
  const std::string t = type.get<std::string>();
  try {
    if (t == "matrix") {
      reject_unknown(j, ptr, {"type", "value"});
      return validate_projector(
          Operator(matrix_at(member(j, ptr, "value"), ptr + "/value", dim)));
    }
    if (t == "basis") {
      reject_unknown(j, ptr, {"type", "rank"});
      const std::int64_t rank =
          integer_at(member(j, ptr, "rank"), ptr + "/rank");
      if (rank < 0 || rank > dim) {
        fail(ptr + "/rank", "rank must lie in [0, " + std::to_string(dim) +
                                "], got " + std::to_string(rank));
      }
      return basis_projector(dim, static_cast<Index>(rank));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(ptr, e.what());
  }
  fail(ptr + "/type", "expected \"matrix\" or \"basis\", got \"" + t + "\"");
}

void check_identity_start(const json& j, const std::string& ptr, Index dim) {
  const Matrix u0 = matrix_at(j, ptr, dim);
  const double res =
      frobenius_distance(u0, Matrix::Identity(dim, dim));
  if (res > kTolUnit) {
    fail(ptr, "the watching path must start at the identity (U(0) = 1), "
              "residual " +
                  format_residual(res));
  }
}

UnitaryPath parse_path(const json& j, Index dim, Rng& rng) {
  const std::string ptr = "/path";
  if (!j.is_object()) fail(ptr, "expected an object with a \"type\" key");
  const auto& type = member(j, ptr, "type");
  if (!type.is_string()) fail(ptr + "/type", "expected a string");
  const std::string t = type.get<std::string>();
  try {
    if (t == "identity") {
      reject_unknown(j, ptr, {"type"});
      return UnitaryPath::identity(dim);
    }
    if (t == "exp") {
      reject_unknown(j, ptr, {"type", "G", "U0"});
      Operator g = generator_at(member(j, ptr, "G"), ptr + "/G", dim, rng);
      if (j.contains("U0")) check_identity_start(j["U0"], ptr + "/U0", dim);
      return UnitaryPath::constant(std::move(g));
    }
    if (t == "piecewise") {
      reject_unknown(j, ptr, {"type", "pieces", "U0"});
      const auto& jp = member(j, ptr, "pieces");
      if (!jp.is_array() || jp.empty()) {
        fail(ptr + "/pieces", "expected a non-empty array of pieces");
      }
      std::vector<UnitaryPath::Piece> pieces;
      for (std::size_t i = 0; i < jp.size(); ++i) {
        const std::string pptr = ptr + "/pieces/" + std::to_string(i);
        const auto& piece = jp[i];
        if (!piece.is_object()) fail(pptr, "expected an object");
        reject_unknown(piece, pptr, {"t_end", "G"});
        const double t_end =
            number_at(member(piece, pptr, "t_end"), pptr + "/t_end");
        Operator g =
            generator_at(member(piece, pptr, "G"), pptr + "/G", dim, rng);
        pieces.push_back(UnitaryPath::Piece{t_end, std::move(g)});
      }
      if (j.contains("U0")) check_identity_start(j["U0"], ptr + "/U0", dim);
      return UnitaryPath::piecewise(std::move(pieces));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(ptr, e.what());
  }
  fail(ptr + "/type",
       "expected \"identity\", \"exp\" or \"piecewise\", got \"" + t + "\"");
}

DensityOp parse_rho0(const json& j, Index dim, const Projector& e,
                     std::optional<Vector>& psi0_out) {
  const std::string ptr = "/rho0";
  if (!j.is_object()) fail(ptr, "expected an object with a \"type\" key");
  const auto& type = member(j, ptr, "type");
  if (!type.is_string()) fail(ptr + "/type", "expected a string");
  const std::string t = type.get<std::string>();
  try {
    if (t == "projector") {
      reject_unknown(j, ptr, {"type"});
      const Index rank = e.rank();
      if (rank == 0) {
        fail(ptr, "the watched projector has rank 0 and cannot be "
                  "normalized into a state");
      }
      return validate_density(
          Operator(e.mat() / static_cast<double>(rank)));
    }
    if (t == "pure") {
      reject_unknown(j, ptr, {"type", "state"});
      Vector psi;
      try {
        psi = vector_from_json(member(j, ptr, "state"));
      } catch (const ValidationError& e2) {
        fail(ptr + "/state", e2.what());
      }
      if (psi.size() != dim) {
        fail(ptr + "/state", "expected " + std::to_string(dim) +
                                 " entries, got " + std::to_string(psi.size()));
      }
      const double norm = psi.norm();
      if (std::abs(norm - 1.0) > 1e-10) {
        fail(ptr + "/state",
             "state must be normalized, |psi| deviates by " +
                 format_residual(std::abs(norm - 1.0)));
      }
      psi /= norm;
      psi0_out = psi;
      return validate_density(Operator(Matrix(psi * psi.adjoint())));
    }
    if (t == "density") {
      reject_unknown(j, ptr, {"type", "value"});
      return validate_density(
          Operator(matrix_at(member(j, ptr, "value"), ptr + "/value", dim)));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e2) {
    fail(ptr, e2.what());
  }
  fail(ptr + "/type",
       "expected \"projector\", \"pure\" or \"density\", got \"" + t + "\"");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out.good()) {
    throw ValidationError("failed writing " + path.string());
  }
}

}  // namespace

ConfigError::ConfigError(std::string pointer, const std::string& message)
    : ValidationError("config " + pointer + ": " + message),
      pointer_(std::move(pointer)) {}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("/", "config root must be a JSON object");
  reject_unknown(j, "", {"dim", "seed", "hamiltonian", "projector", "path",
                         "rho0", "t1", "t", "n_list", "ode_step"});

  const std::int64_t dim_raw = integer_at(member(j, "", "dim"), "/dim");
  if (dim_raw < 1 || dim_raw > 64) {
    fail("/dim", "supported dimensions are 1..64, got " +
                     std::to_string(dim_raw));
  }
  const Index dim = static_cast<Index>(dim_raw);

  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    const auto& js = j["seed"];
    if (!js.is_number_unsigned() &&
        !(js.is_number_integer() && js.get<std::int64_t>() >= 0)) {
      fail("/seed", "expected a non-negative integer");
    }
    seed = js.get<std::uint64_t>();
  }
  Rng rng(seed);

  // Draw order is fixed so seeded runs are reproducible: the Hamiltonian
  // first, then path generators in piece order.
  Hamiltonian ham = parse_hamiltonian(member(j, "", "hamiltonian"), dim, rng);
  Projector proj = parse_projector(member(j, "", "projector"), dim);
  UnitaryPath path = j.contains("path") ? parse_path(j["path"], dim, rng)
                                        : UnitaryPath::identity(dim);

  std::optional<Vector> psi0;
  DensityOp rho0 =
      j.contains("rho0")
          ? parse_rho0(j["rho0"], dim, proj, psi0)
          : parse_rho0(json{{"type", "projector"}}, dim, proj, psi0);

  const double t1 = j.contains("t1") ? number_at(j["t1"], "/t1") : 0.0;
  const double t = number_at(member(j, "", "t"), "/t");
  if (!(t > t1)) {
    fail("/t", "t must exceed t1, got t = " + format_g17(t) +
                   ", t1 = " + format_g17(t1));
  }

  std::vector<std::int64_t> n_list = {100, 1000, 10000};
  if (j.contains("n_list")) {
    const auto& jn = j["n_list"];
    if (!jn.is_array() || jn.empty()) {
      fail("/n_list", "expected a non-empty array of integers");
    }
    n_list.clear();
    for (std::size_t i = 0; i < jn.size(); ++i) {
      const std::string ptr = "/n_list/" + std::to_string(i);
      const std::int64_t n = integer_at(jn[i], ptr);
      if (n < 1) fail(ptr, "chain lengths must be >= 1");
      n_list.push_back(n);
    }
  }

  double ode_step = 0.0;
  if (j.contains("ode_step")) {
    ode_step = number_at(j["ode_step"], "/ode_step");
    if (ode_step < 0) fail("/ode_step", "expected a step >= 0 (0 = default)");
  }

  return ExperimentConfig{std::move(ham),  std::move(proj), std::move(path),
                          std::move(rho0), std::move(psi0), t1,
                          t,               std::move(n_list), ode_step,
                          seed};
}

nlohmann::json apply_overrides(nlohmann::json j,
                               const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("/", "override must look like key=value, got \"" + s +
                                 "\"");
    }
    std::string key = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    for (char& c : key) {
      if (c == '.') c = '/';
    }
    json parsed;
    try {
      parsed = json::parse(value);
    } catch (const json::parse_error&) {
      parsed = value;  // bare words are taken as strings
    }
    try {
      j[json::json_pointer("/" + key)] = std::move(parsed);
    } catch (const json::exception& e) {
      throw ConfigError("/" + key,
                        std::string("override cannot be applied: ") + e.what());
    }
  }
  return j;
}

int dispatch(const RunManifest& manifest) {
  try {
    std::ifstream in(manifest.config_path);
    if (!in) {
      throw ConfigError("/", "cannot read config file: " +
                                 manifest.config_path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();

    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    j = apply_overrides(std::move(j), manifest.overrides);
    if (manifest.seed) j["seed"] = *manifest.seed;
    const ExperimentConfig cfg = config_from_json(j);

    std::error_code ec;
    std::filesystem::create_directories(manifest.out_dir, ec);
    if (ec) {
      throw ValidationError("output directory " + manifest.out_dir.string() +
                            " cannot be created: " + ec.message());
    }
    const auto report_path = manifest.out_dir / "report.json";
    {
      // Fail before the heavy part if the directory is not writable.
      std::ofstream probe(report_path, std::ios::binary);
      if (!probe) {
        throw ValidationError("output directory " + manifest.out_dir.string() +
                              " is not writable");
      }
    }

    ExperimentReport report;
    if (manifest.scenario == "zeno") {
      report = run_zeno(cfg);
    } else if (manifest.scenario == "anti-zeno") {
      report = run_anti_zeno(cfg);
    } else if (manifest.scenario == "converge") {
      report = convergence_study(cfg);
    } else if (manifest.scenario == "residual") {
      report = residual_certify(cfg);
    } else {
      throw ValidationError("unknown scenario: " + manifest.scenario);
    }

    write_text(report_path, report_to_json(report, false).dump(2) + "\n");
    write_text(manifest.out_dir / "series.csv", report_csv(report));
    json jt;
    jt["scenario"] = report.scenario;
    json phases;
    for (const auto& [k, v] : report.timings) phases[k] = v;
    jt["timings"] = std::move(phases);
    write_text(manifest.out_dir / "timings.json", jt.dump(2) + "\n");

    std::cout << "scenario " << report.scenario << " finished in "
              << format_g17(report.timings.at("total")) << " s\n";
    if (report.closed_form_probability) {
      std::cout << "closed-form survival probability: "
                << format_g17(*report.closed_form_probability) << "\n";
    }
    if (report.convergence) {
      if (report.convergence->degenerate) {
        std::cout << "convergence fit degenerate: chain errors are at "
                     "roundoff level\n";
      } else {
        std::cout << "log-log convergence slope: "
                  << format_g17(report.convergence->slope) << "\n";
      }
    }
    if (report.ode_residual) {
      std::cout << "chain-equation residual: "
                << format_g17(*report.ode_residual) << "\n";
    }
    if (report.w_unitarity_residual) {
      std::cout << "drag propagator unitarity residual: "
                << format_g17(*report.w_unitarity_residual) << "\n";
    }
    std::cout << "outputs written to " << manifest.out_dir.string() << "\n";
    return 0;
  } catch (const NumericalQualityError& e) {
    std::cerr << "ERROR: numerical-quality: " << e.what() << "\n";
    std::cerr << "The run aborted on a numerical quality bound; the message "
                 "above names the knob to adjust.\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "ERROR: validation: " << e.what() << "\n";
    std::cerr << "Fix the config or flags and rerun.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR: unexpected: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kw
