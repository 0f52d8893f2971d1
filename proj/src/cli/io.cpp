#include "nij/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nij/common/error.hpp"

namespace nij::io {

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::Schema, path + ": " + msg);
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string dot(const std::string& path, const char* key) { return path + "." + key; }

const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) schema(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema(dot(path, key), "missing field");
  return *it;
}

const Json& array(const Json& j, const std::string& path, int size = -1) {
  if (!j.is_array()) schema(path, "expected an array");
  if (size >= 0 && static_cast<int>(j.size()) != size)
    schema(path, "expected " + std::to_string(size) + " entries, found " + std::to_string(j.size()));
  return j;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema(path, "number is not finite");
  return v;
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) schema(path, "expected an integer");
  return j.get<int>();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<field::PolyExpr> poly_list(const Json& j, int count, int num_vars, const std::string& path) {
  array(j, path, count);
  std::vector<field::PolyExpr> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(poly_from_json(j[i], num_vars, at(path, i)));
  return out;
}

int dim_field(const Json& j) {
  const int m = integer(field(j, "$", "dim"), "$.dim");
  if (m <= 0) schema("$.dim", "must be positive");
  return m;
}

}  // namespace

double rounded(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

Json num(double v) { return std::isfinite(v) ? Json(rounded(v)) : Json(nullptr); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    // Keep only the reason after nlohmann's "[json.exception...] parse error at ...: " prefix.
    if (const auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

Json read_json_file(const std::string& path) { return parse_json(read_file(path), path); }

VectorXd vector_from_json(const Json& j, const std::string& path, int size) {
  array(j, path, size);
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], at(path, i));
  return v;
}

Json vector_to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

MatrixXd matrix_from_json(const Json& j, const std::string& path, int rows, int cols) {
  array(j, path, rows);
  if (j.empty()) schema(path, "matrix has no rows");
  const int c = cols >= 0 ? cols : (j[0].is_array() ? static_cast<int>(j[0].size()) : -1);
  MatrixXd m(static_cast<Eigen::Index>(j.size()), std::max(c, 0));
  for (std::size_t r = 0; r < j.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)) = vector_from_json(j[r], at(path, r), c).transpose();
  return m;
}

Json matrix_to_json(const MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

field::PolyExpr poly_from_json(const Json& j, int num_vars, const std::string& path) {
  array(j, path);
  std::vector<field::PolyExpr::Term> terms;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string tp = at(path, t);
    const double c = number(field(j[t], tp, "coef"), dot(tp, "coef"));
    const Json& pw = array(field(j[t], tp, "powers"), dot(tp, "powers"), num_vars);
    field::PolyExpr::Exponents e(static_cast<std::size_t>(num_vars));
    for (std::size_t v = 0; v < pw.size(); ++v) {
      const std::string pp = at(dot(tp, "powers"), v);
      e[v] = integer(pw[v], pp);
      if (e[v] < 0) schema(pp, "powers must be non-negative");
    }
    terms.push_back({c, e});
  }
  return field::PolyExpr(num_vars, terms);
}

Json poly_to_json(const field::PolyExpr& p) {
  Json out = Json::array();
  for (const auto& [e, c] : p.coefficients()) {
    Json t;
    t["coef"] = num(c);
    t["powers"] = e;
    out.push_back(t);
  }
  return out;
}

field::Box box_from_json(const Json& j, int dim, const std::string& path) {
  field::Box b{vector_from_json(field(j, path, "min"), dot(path, "min"), dim),
               vector_from_json(field(j, path, "max"), dot(path, "max"), dim)};
  for (int i = 0; i < dim; ++i)
    if (!(b.min(i) <= b.max(i))) schema(path, "min exceeds max on axis " + std::to_string(i));
  return b;
}

Json box_to_json(const field::Box& b) {
  Json out;
  out["min"] = vector_to_json(b.min);
  out["max"] = vector_to_json(b.max);
  return out;
}

field::ChartedStructure structure_from_json(const Json& j, const Tolerances& tol, int max_degree) {
  const int m = dim_field(j);
  if (m % 2 != 0) schema("$.dim", "must be even");
  field::Box box = box_from_json(field(j, "$", "domain"), m, "$.domain");
  const Json& jj = array(field(j, "$", "J"), "$.J", m);
  field::PolyMatrix entries;
  for (std::size_t r = 0; r < jj.size(); ++r) {
    const std::string rp = at("$.J", r);
    entries.push_back(poly_list(jj[r], m, m, rp));
    for (std::size_t c = 0; c < entries.back().size(); ++c) {
      const int d = entries.back()[c].degree();
      if (d > max_degree)
        schema(at(rp, c), "degree " + std::to_string(d) + " exceeds the cap " + std::to_string(max_degree));
    }
  }
  return field::ChartedStructure(std::move(box), std::move(entries), tol);
}

Json structure_to_json(const field::ChartedStructure& s) {
  Json out;
  out["dim"] = s.dim();
  out["domain"] = box_to_json(s.domain());
  Json jj = Json::array();
  for (int r = 0; r < s.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < s.dim(); ++c) row.push_back(poly_to_json(s.entry(r, c)));
    jj.push_back(row);
  }
  out["J"] = jj;
  return out;
}

field::DiffeoPair diffeo_from_json(const Json& j, const Tolerances& tol) {
  const int m = dim_field(j);
  field::DiffeoPair d;
  d.forward = poly_list(field(j, "$", "forward"), m, m, "$.forward");
  d.inverse = poly_list(field(j, "$", "inverse"), m, m, "$.inverse");
  d.forward_domain = box_from_json(field(j, "$", "forward_domain"), m, "$.forward_domain");
  d.inverse_domain = box_from_json(field(j, "$", "inverse_domain"), m, "$.inverse_domain");
  field::validate_diffeo(d, tol);
  return d;
}

Json diffeo_to_json(const field::DiffeoPair& d) {
  Json out;
  out["dim"] = d.dim();
  Json f = Json::array(), g = Json::array();
  for (const auto& p : d.forward) f.push_back(poly_to_json(p));
  for (const auto& p : d.inverse) g.push_back(poly_to_json(p));
  out["forward"] = f;
  out["inverse"] = g;
  out["forward_domain"] = box_to_json(d.forward_domain);
  out["inverse_domain"] = box_to_json(d.inverse_domain);
  return out;
}

model::NTensor tensor_from_json(const Json& j, const Tolerances& tol) {
  const MatrixXd jm = matrix_from_json(field(j, "$", "J"), "$.J");
  const int m = static_cast<int>(jm.rows());
  if (jm.cols() != m || m % 2 != 0) schema("$.J", "expected an even square matrix");
  if (!model::check_acs(jm, tol.alg)) throw Error(ErrorKind::InvalidStructure, "$.J: J^2 = -I fails");
  const Json& nj = array(field(j, "$", "N"), "$.N", m);
  std::vector<double> full;
  full.reserve(static_cast<std::size_t>(m) * m * m);
  for (std::size_t k = 0; k < nj.size(); ++k) {
    const MatrixXd slab = matrix_from_json(nj[k], at("$.N", k), m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) full.push_back(slab(a, b));
  }
  model::NTensor n(model::CSMatrix(jm, tol.alg), full);
  const auto res = model::identity_residuals(n);
  if (res.max() > tol.alg * std::max(1.0, n.max_abs()))
    throw Error(ErrorKind::Argument, "$.N: not a skew antilinear tensor (residual " + std::to_string(res.max()) + ")");
  return n;
}

Json tensor_to_json(const model::NTensor& n) {
  const int m = n.dim();
  Json out;
  out["J"] = matrix_to_json(n.structure().matrix());
  Json nj = Json::array();
  for (int k = 0; k < m; ++k) {
    MatrixXd slab(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) slab(a, b) = n(k, a, b);
    nj.push_back(matrix_to_json(slab));
  }
  out["N"] = nj;
  return out;
}

webs::PlaneWeb4 web_from_json(const Json& j) {
  const Json& pl = array(field(j, "$", "planes"), "$.planes", 4);
  webs::PlaneWeb4 w;
  for (std::size_t p = 0; p < 4; ++p) {
    const std::string pp = at("$.planes", p);
    w.planes[p] = matrix_from_json(pl[p], pp, 2, 4).transpose();
  }
  return w;
}

Json web_to_json(const webs::PlaneWeb4& w) {
  Json pl = Json::array();
  for (const MatrixXd& b : w.planes) pl.push_back(matrix_to_json(b.transpose()));
  Json out;
  out["planes"] = pl;
  return out;
}

std::vector<VectorXd> points_from_json(const Json& j, int dim) {
  const Json& pts = array(field(j, "$", "points"), "$.points");
  std::vector<VectorXd> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(vector_from_json(pts[i], at("$.points", i), dim));
  return out;
}

std::vector<quadrics::GrChartPoint> chart_points_from_json(const Json& j) {
  const Json& pts = array(field(j, "$", "points"), "$.points");
  std::vector<quadrics::GrChartPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string p = at("$.points", i);
    quadrics::GrChartPoint g;
    g.chart_index = integer(field(pts[i], p, "chart"), dot(p, "chart"));
    if (g.chart_index < 0 || g.chart_index > 2) schema(dot(p, "chart"), "must be 0, 1 or 2");
    g.coords = vector_from_json(field(pts[i], p, "coords"), dot(p, "coords"), 4);
    out.push_back(g);
  }
  return out;
}

Json chart_points_to_json(const std::vector<quadrics::GrChartPoint>& pts) {
  Json arr = Json::array();
  for (const auto& g : pts) {
    Json p;
    p["chart"] = g.chart_index;
    p["coords"] = vector_to_json(g.coords);
    arr.push_back(p);
  }
  Json out;
  out["points"] = arr;
  return out;
}

std::vector<MatrixXd> planes_from_json(const Json& j, int dim) {
  const Json& pl = array(field(j, "$", "planes"), "$.planes");
  std::vector<MatrixXd> out;
  for (std::size_t p = 0; p < pl.size(); ++p) out.push_back(matrix_from_json(pl[p], at("$.planes", p), 4, dim).transpose());
  return out;
}

}  // namespace nij::io
