#include "sparsact/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sparsact {

namespace {

using nlohmann::json;

json complex_matrix_to_json(const CMatrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      row.push_back({M(i, j).real(), M(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json mask_to_json(const RMatrix& E) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < E.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < E.cols(); ++j) {
      row.push_back(static_cast<int>(E(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double finite_number(const json& v, const std::string& field) {
  if (!v.is_number()) {
    throw ProblemFormatError("field '" + field + "' contains a non-number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ProblemFormatError("field '" + field + "' contains NaN or Inf");
  }
  return x;
}

CMatrix json_to_complex_matrix(const json& j, Eigen::Index rows,
                               Eigen::Index cols, const std::string& field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ProblemFormatError("field '" + field + "' must be an array of " +
                             std::to_string(rows) + " rows");
  }
  CMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ProblemFormatError("field '" + field + "' row " +
                               std::to_string(i) + " must have " +
                               std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& entry = row[c];
      if (!entry.is_array() || entry.size() != 2) {
        throw ProblemFormatError("field '" + field +
                                 "' entries must be [re, im] pairs");
      }
      M(i, c) = Complex(finite_number(entry[0], field),
                        finite_number(entry[1], field));
    }
  }
  return M;
}

RMatrix json_to_mask(const json& j, Eigen::Index p, const std::string& field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != p) {
    throw ProblemFormatError("field '" + field + "' must be a " +
                             std::to_string(p) + " x " + std::to_string(p) +
                             " 0/1 array");
  }
  RMatrix E(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != p) {
      throw ProblemFormatError("field '" + field + "' row " +
                               std::to_string(i) + " has wrong length");
    }
    for (Eigen::Index c = 0; c < p; ++c) {
      const double v = finite_number(row[c], field);
      if (v != 0.0 && v != 1.0) {
        throw ProblemFormatError("field '" + field +
                                 "' entries must be 0 or 1");
      }
      E(i, c) = v;
    }
  }
  return E;
}

void check_finite(const CMatrix& M, const std::string& field) {
  if (!M.allFinite()) {
    throw ProblemFormatError("field '" + field + "' contains NaN or Inf");
  }
}

const json& require_key(const json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw ProblemFormatError("missing required field '" + key + "'");
  }
  return *it;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string serialize_problem(const ProblemFile& problem) {
  check_finite(problem.model.A, "A");
  check_finite(problem.model.B, "B");
  check_finite(problem.model.C, "C");
  check_finite(problem.model.V, "V");
  check_finite(problem.model.Q, "Q");
  check_finite(problem.model.R, "R");
  json doc;
  doc["kind"] = problem.kind;
  doc["n"] = problem.model.n();
  doc["m"] = problem.model.m();
  doc["p"] = problem.model.p();
  doc["A"] = complex_matrix_to_json(problem.model.A);
  doc["B"] = complex_matrix_to_json(problem.model.B);
  doc["C"] = complex_matrix_to_json(problem.model.C);
  doc["V"] = complex_matrix_to_json(problem.model.V);
  doc["Q"] = complex_matrix_to_json(problem.model.Q);
  doc["R"] = complex_matrix_to_json(problem.model.R);
  if (problem.data) {
    check_finite(problem.data->G, "G");
    doc["E"] = mask_to_json(problem.data->E);
    doc["G"] = complex_matrix_to_json(problem.data->G);
  }
  return doc.dump(2) + "\n";
}

ProblemFile parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ProblemFormatError("top level must be an object");

  ProblemFile out;
  const json& kind = require_key(doc, "kind");
  if (!kind.is_string()) throw ProblemFormatError("field 'kind' must be a string");
  out.kind = kind.get<std::string>();
  if (out.kind != "actuator" && out.kind != "completion" &&
      out.kind != "sensor") {
    throw ProblemFormatError("field 'kind' must be actuator, completion, or sensor");
  }

  auto dim = [&](const char* key) {
    const json& v = require_key(doc, key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ProblemFormatError(std::string("field '") + key +
                               "' must be a positive integer");
    }
    return static_cast<Eigen::Index>(v.get<long long>());
  };
  const Eigen::Index n = dim("n");
  const Eigen::Index m = dim("m");
  const Eigen::Index p = dim("p");

  out.model.A = json_to_complex_matrix(require_key(doc, "A"), n, n, "A");
  out.model.B = json_to_complex_matrix(require_key(doc, "B"), n, m, "B");
  out.model.C = json_to_complex_matrix(require_key(doc, "C"), p, n, "C");
  out.model.V = json_to_complex_matrix(require_key(doc, "V"), n, n, "V");
  out.model.Q = json_to_complex_matrix(require_key(doc, "Q"), n, n, "Q");
  out.model.R = json_to_complex_matrix(require_key(doc, "R"), m, m, "R");

  if (out.kind == "completion") {
    CompletionData data;
    data.E = json_to_mask(require_key(doc, "E"), p, "E");
    data.G = json_to_complex_matrix(require_key(doc, "G"), p, p, "G");
    try {
      data.validate(p);
    } catch (const std::exception& e) {
      throw ProblemFormatError(std::string("field 'E': ") + e.what());
    }
    out.data = std::move(data);
  }

  // Sensor files carry the dual ingredients (A_s in A, V_d in V, V_eta
  // in R) and are validated after the dual mapping, not here.
  if (out.kind != "sensor") {
    try {
      out.model.validate();
    } catch (const std::exception& e) {
      throw ProblemFormatError(e.what());
    }
  }
  return out;
}

ProblemFile read_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ProblemFormatError("cannot open problem file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

void write_problem(const std::filesystem::path& path,
                   const ProblemFile& problem) {
  atomic_write(path, serialize_problem(problem));
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string sweep_csv(const std::vector<SelectionResult>& results) {
  std::ostringstream os;
  os << "gamma,nnz,J,J_c,degradation_pct,pg_iters,status,error\n";
  for (const auto& r : results) {
    os << format_double(r.gamma) << ',' << r.support.size() << ','
       << format_double(r.J) << ',' << format_double(r.J_c) << ','
       << format_double(r.degradation_pct) << ',' << r.pg_iters << ','
       << to_string(r.status) << ',' << (r.error.empty() ? "" : r.error)
       << '\n';
  }
  return os.str();
}

std::string iteration_csv(const std::vector<IterationRecord>& history) {
  std::ostringstream os;
  os << "iter,objective,f,g,alpha,r_r,r_n,backtracks,nnz_rows\n";
  for (const auto& rec : history) {
    os << rec.iter << ',' << format_double(rec.objective) << ','
       << format_double(rec.f) << ',' << format_double(rec.g) << ','
       << format_double(rec.alpha) << ',' << format_double(rec.r_r) << ','
       << format_double(rec.r_n) << ',' << rec.backtracks << ','
       << rec.nnz_rows << '\n';
  }
  return os.str();
}

std::string outer_csv(const std::vector<MmOuterRecord>& history) {
  std::ostringstream os;
  os << "outer_iter,delta_p,delta_p_normalized,delta_d,rho,inner_iters,"
        "objective\n";
  for (const auto& rec : history) {
    os << rec.outer_iter << ',' << format_double(rec.delta_p) << ','
       << format_double(rec.delta_p_normalized) << ','
       << format_double(rec.delta_d) << ',' << format_double(rec.rho) << ','
       << rec.inner_iters << ',' << format_double(rec.objective) << '\n';
  }
  return os.str();
}

std::string greedy_csv(const GreedyTrace& trace) {
  std::ostringstream os;
  os << "step,removed,cost\n";
  for (std::size_t i = 0; i < trace.removal_order.size(); ++i) {
    os << i + 1 << ',' << trace.removal_order[i] << ','
       << format_double(trace.costs[i]) << '\n';
  }
  return os.str();
}

std::string solution_json(const CMatrix& X, const CMatrix& Y,
                          const CMatrix& K) {
  json doc;
  doc["X"] = complex_matrix_to_json(X);
  doc["Y"] = complex_matrix_to_json(Y);
  doc["K"] = complex_matrix_to_json(K);
  return doc.dump(2) + "\n";
}

}  // namespace sparsact
