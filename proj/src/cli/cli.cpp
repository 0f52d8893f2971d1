#include "nij/cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#ifdef NIJ_HAVE_OPENSSL
#include <openssl/evp.h>
#endif

#include <CLI11.hpp>

#include "nij/common/error.hpp"
#include "nij/common/random.hpp"
#include "nij/dim4/dim4.hpp"
#include "nij/field/structure.hpp"
#include "nij/model/model.hpp"
#include "nij/pencils/pencils.hpp"
#include "nij/quadrics/quadrics.hpp"
#include "nij/webs/webs.hpp"

namespace nij::cli {

using io::Json;
using io::num;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Relative agreement required between the analytic and finite-difference Nijenhuis paths.
constexpr double kOracleRel = 1e-6;

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::Argument, msg); }

bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::Schema:
    case ErrorKind::Io:
    case ErrorKind::Argument:
    case ErrorKind::Dimension:
    case ErrorKind::Domain:
    case ErrorKind::InvalidStructure:
      return true;
    default:
      return false;
  }
}

// Collects named residual checks for the report.
class Checks {
 public:
  void add(const std::string& name, double value, double limit) {
    const bool ok = std::isfinite(value) && value <= limit;
    Json c;
    c["name"] = name;
    c["value"] = num(value);
    c["limit"] = num(limit);
    c["pass"] = ok;
    list_.push_back(c);
    all_ &= ok;
  }
  void flag(const std::string& name, bool ok) {
    Json c;
    c["name"] = name;
    c["pass"] = ok;
    list_.push_back(c);
    all_ &= ok;
  }
  bool all() const { return all_; }
  const Json& json() const { return list_; }

 private:
  Json list_ = Json::array();
  bool all_ = true;
};

struct Outcome {
  Json result = Json::object();
  std::string verdict;
  int exit_code = kExitOk;
  std::string text;
};

const std::string& input(const RunConfig& cfg, std::size_t i, const char* what) {
  if (cfg.inputs.size() <= i) usage(cfg.subcommand + " needs " + what);
  return cfg.inputs[i];
}

field::ChartedStructure load_structure(const RunConfig& cfg, int max_degree) {
  return io::structure_from_json(io::read_json_file(input(cfg, 0, "a structure file")), cfg.tol, max_degree);
}

field::ChartedStructure maybe_pullback(const RunConfig& cfg, field::ChartedStructure s, Json& result) {
  if (cfg.diffeo.empty()) return s;
  const field::DiffeoPair phi = io::diffeo_from_json(io::read_json_file(cfg.diffeo), cfg.tol);
  field::PullbackResult pb = field::pullback(s, phi, cfg.degree, cfg.tol);
  result["pullback"] = {{"degree", pb.degree}, {"fit_residual", num(pb.fit_residual)}};
  return std::move(pb.structure);
}

std::vector<VectorXd> sample_points(const RunConfig& cfg, const field::Box& box) {
  if (cfg.point) {
    VectorXd x = Eigen::Map<const VectorXd>(cfg.point->data(), static_cast<Eigen::Index>(cfg.point->size()));
    if (x.size() != box.dim()) usage("--point needs " + std::to_string(box.dim()) + " coordinates");
    return {x};
  }
  if (cfg.samples < 1) usage("--samples must be positive");
  Rng rng(cfg.seed);
  std::vector<VectorXd> pts;
  for (int i = 0; i < cfg.samples; ++i) pts.push_back(rng.uniform_vector(box.min, box.max));
  return pts;
}

// A tensor file (has "N") or a structure file evaluated at sample points.
struct TensorInputs {
  std::vector<model::NTensor> tensors;
  std::vector<VectorXd> points;
};

TensorInputs load_tensors(const RunConfig& cfg) {
  const Json j = io::read_json_file(input(cfg, 0, "a tensor or structure file"));
  TensorInputs t;
  if (j.is_object() && j.contains("N")) {
    t.tensors.push_back(io::tensor_from_json(j, cfg.tol));
    return t;
  }
  const field::ChartedStructure s = io::structure_from_json(j, cfg.tol, cfg.max_degree);
  t.points = sample_points(cfg, s.domain());
  for (const VectorXd& x : t.points) t.tensors.push_back(field::nijenhuis_at(s, x, cfg.tol));
  return t;
}

Json tensor_components(const model::NTensor& n) { return io::tensor_to_json(n)["N"]; }

Json scan_json(const field::ScanReport& r) {
  Json h = Json::object();
  for (const auto& [k, v] : r.histogram) h[k] = v;
  return {{"points", r.points},
          {"max_norm", num(r.max_norm)},
          {"argmax", io::vector_to_json(r.argmax)},
          {"histogram", h},
          {"unreliable", r.unreliable},
          {"integrable", r.integrable}};
}

Outcome cmd_check(const RunConfig& cfg) {
  Outcome o;
  field::ChartedStructure s = maybe_pullback(cfg, load_structure(cfg, cfg.max_degree), o.result);
  const field::ScanReport r = field::integrability_scan(s, cfg.grid, cfg.tol);
  Checks c;
  c.add("validation J^2+I", s.validation_residual(), cfg.tol.field);
  c.add("max |N|", r.max_norm, cfg.tol.field);
  o.result["dim"] = s.dim();
  o.result["degree"] = s.degree();
  o.result["scan"] = scan_json(r);
  o.result["checks"] = c.json();
  o.verdict = r.integrable ? "integrable" : "non-integrable";
  o.exit_code = r.integrable ? kExitOk : kExitVerdict;
  return o;
}

Outcome cmd_scan(const RunConfig& cfg) {
  Outcome o;
  field::ChartedStructure s = maybe_pullback(cfg, load_structure(cfg, cfg.max_degree), o.result);
  const field::ScanReport r = field::integrability_scan(s, cfg.grid, cfg.tol);
  o.result["dim"] = s.dim();
  o.result["grid"] = cfg.grid;
  o.result["scan"] = scan_json(r);
  o.verdict = r.integrable ? "integrable" : "non-integrable";
  return o;
}

Outcome cmd_nijenhuis(const RunConfig& cfg) {
  Outcome o;
  const field::ChartedStructure s = load_structure(cfg, cfg.max_degree);
  double worst_id = 0.0, worst_oracle = 0.0;
  Json pts = Json::array();
  for (const VectorXd& x : sample_points(cfg, s.domain())) {
    const model::NTensor n = field::nijenhuis_at(s, x, cfg.tol);
    const model::NTensor fd = field::nijenhuis_fd_oracle(s, x);
    double diff = 0.0;
    for (std::size_t i = 0; i < n.data().size(); ++i) diff = std::max(diff, std::abs(n.data()[i] - fd.data()[i]));
    const double scale = std::max(1.0, n.max_abs());
    const double id = model::identity_residuals(n).max() / scale;
    worst_id = std::max(worst_id, id);
    worst_oracle = std::max(worst_oracle, diff / scale);
    pts.push_back({{"x", io::vector_to_json(x)},
                   {"max_abs", num(n.max_abs())},
                   {"identity_residual", num(id)},
                   {"oracle_residual", num(diff / scale)},
                   {"N", tensor_components(n)}});
  }
  Checks c;
  c.add("skew and antilinearity", worst_id, cfg.tol.alg);
  c.add("finite-difference oracle", worst_oracle, kOracleRel);
  o.result["points"] = pts;
  o.result["checks"] = c.json();
  o.verdict = c.all() ? "identities-hold" : "identities-fail";
  o.exit_code = c.all() ? kExitOk : kExitVerdict;
  return o;
}

Outcome cmd_classify(const RunConfig& cfg) {
  Outcome o;
  const TensorInputs in = load_tensors(cfg);
  std::map<std::string, int> hist;
  Json rows = Json::array();
  for (std::size_t i = 0; i < in.tensors.size(); ++i) {
    const model::DegeneracyClass d = model::degeneracy_class(in.tensors[i], cfg.tol);
    ++hist[d.name()];
    Json r;
    if (!in.points.empty()) r["x"] = io::vector_to_json(in.points[i]);
    r["class"] = d.name();
    r["complex_rank"] = d.complex_rank;
    r["unreliable"] = d.unreliable;
    rows.push_back(r);
  }
  Json h = Json::object();
  for (const auto& [k, v] : hist) h[k] = v;
  o.result["samples"] = rows;
  o.result["histogram"] = h;
  o.verdict = hist.size() == 1 ? hist.begin()->first : "mixed";
  return o;
}

Outcome cmd_bryant(const RunConfig& cfg) {
  Outcome o;
  const TensorInputs in = load_tensors(cfg);
  Checks c;
  Json rows = Json::array();
  int degenerate = 0;
  for (std::size_t i = 0; i < in.tensors.size(); ++i) {
    const model::NTensor& n = in.tensors[i];
    const MatrixXd& j = n.structure().matrix();
    const MatrixXd omega = model::bryant_form(n);
    const MatrixXd q = model::quadric_form(n);
    const double scale = std::max(1.0, omega.cwiseAbs().maxCoeff());
    const model::OmegaDegeneracy d = model::omega_degenerate(omega, cfg.tol);
    degenerate += d.degenerate ? 1 : 0;
    const double skew = (omega + omega.transpose()).cwiseAbs().maxCoeff() / scale;
    const double compat = (j.transpose() * omega * j - omega).cwiseAbs().maxCoeff() / scale;
    const double quad = (q - omega * j).cwiseAbs().maxCoeff() / scale;
    c.add("skew #" + std::to_string(i), skew, cfg.tol.alg);
    c.add("J-compatible #" + std::to_string(i), compat, cfg.tol.alg);
    c.add("q = omega(., J .) #" + std::to_string(i), quad, cfg.tol.alg);
    Json r;
    if (!in.points.empty()) r["x"] = io::vector_to_json(in.points[i]);
    r["omega"] = io::matrix_to_json(omega);
    r["degenerate"] = d.degenerate;
    r["unreliable"] = d.unreliable;
    r["kernel_dim"] = static_cast<int>(d.kernel.cols());
    rows.push_back(r);
  }
  o.result["samples"] = rows;
  o.result["checks"] = c.json();
  o.verdict = !c.all() ? "identities-fail" : degenerate == 0 ? "nondegenerate"
                                          : degenerate == static_cast<int>(rows.size()) ? "degenerate"
                                                                                         : "mixed";
  o.exit_code = c.all() ? kExitOk : kExitVerdict;
  return o;
}

Outcome cmd_frame4(const RunConfig& cfg) {
  Outcome o;
  const field::ChartedStructure s = load_structure(cfg, cfg.max_degree);
  if (s.dim() != 4) throw Error(ErrorKind::Dimension, "frame4 needs a 4-dimensional structure");
  const VectorXd x = cfg.point ? sample_points(cfg, s.domain()).front() : s.domain().center();
  const dim4::MaurerCartan mc = dim4::maurer_cartan(s, x, cfg.tol);
  const dim4::Frame4& f = mc.frame;
  Json xi = Json::array();
  for (int k = 0; k < 4; ++k) xi.push_back(io::vector_to_json(f.xi.col(k)));
  Json table = Json::object();
  for (std::size_t p = 0; p < dim4::kFramePairs.size(); ++p) {
    const auto [a, b] = dim4::kFramePairs[p];
    table["c" + std::to_string(a + 1) + std::to_string(b + 1)] = io::vector_to_json(mc.coefficients[p]);
  }
  Checks c;
  c.add("N(xi1, xi3) = xi1", f.n_residual, cfg.tol.frame);
  c.add("[xi1, xi2] = xi3", f.bracket_residual, cfg.tol.frame);
  c.add("xi2 = J xi1, xi4 = J xi3", f.j_residual, cfg.tol.frame);
  c.add("xi1 in characteristic plane", f.pi2_residual, cfg.tol.frame);
  c.add("xi3 in derived distribution", f.pi3_residual, cfg.tol.frame);
  c.add("c12 = (0, 0, 1, 0)", (mc.coefficients[0] - Eigen::Vector4d(0, 0, 1, 0)).cwiseAbs().maxCoeff(), cfg.tol.frame);
  o.result["x"] = io::vector_to_json(x);
  o.result["sign"] = f.sign;
  o.result["xi"] = xi;
  o.result["w"] = {num(f.w.real()), num(f.w.imag())};
  o.result["z"] = {num(f.z.real()), num(f.z.imag())};
  o.result["c"] = table;
  o.result["counts"] = {{"reported", dim4::MaurerCartan::reported},
                        {"pinned_verified", dim4::MaurerCartan::pinned_verified},
                        {"pinned_cited", dim4::MaurerCartan::pinned_cited},
                        {"independent", dim4::MaurerCartan::independent}};
  o.result["checks"] = c.json();
  o.verdict = c.all() ? "frame-ok" : "frame-residuals-exceeded";
  o.exit_code = c.all() ? kExitOk : kExitVerdict;
  return o;
}

Outcome cmd_web(const RunConfig& cfg) {
  Outcome o;
  const webs::PlaneWeb4 w = io::web_from_json(io::read_json_file(input(cfg, 0, "a web file")));
  const webs::WebSolution sol = webs::web_to_J(w, cfg.tol);
  Checks c;
  c.add("web residual", sol.residual, cfg.tol.alg);
  c.flag("verify_web", webs::verify_web(sol.j.matrix(), w, cfg.tol));
  o.result["J"] = io::matrix_to_json(sol.j.matrix());
  o.result["minus_J"] = io::matrix_to_json(sol.minus_j);
  o.result["L"] = io::matrix_to_json(sol.l);
  o.result["lambda"] = num(sol.lambda);
  o.result["beta"] = num(sol.beta);
  o.result["checks"] = c.json();
  o.verdict = c.all() ? "complex-structure" : "verification-failed";
  o.exit_code = c.all() ? kExitOk : kExitVerdict;
  return o;
}

field::ChartedStructure generate_pencil_example(const RunConfig& cfg) {
  if (cfg.example == "1") return pencils::make_example1(cfg.seed, cfg.degree);
  if (cfg.example == "2") return pencils::make_example2(cfg.seed, cfg.degree, cfg.triangular);
  if (cfg.example == "dg2-kernel-v1") return pencils::make_dg2_kernel_v1(cfg.seed, cfg.degree);
  if (cfg.example == "dg2-kernel-transversal") return pencils::make_dg2_kernel_transversal(cfg.seed, cfg.degree);
  usage("unknown --example " + cfg.example);
}

Outcome cmd_pencil(const RunConfig& cfg) {
  Outcome o;
  if (cfg.mode == "generate") {
    const field::ChartedStructure s = generate_pencil_example(cfg);
    const Json sj = io::structure_to_json(s);
    if (!cfg.structure_out.empty()) {
      std::ofstream f(cfg.structure_out);
      if (!(f << dump(sj))) throw Error(ErrorKind::Io, "cannot write " + cfg.structure_out);
      o.result["structure_path"] = cfg.structure_out;
    }
    o.result["example"] = cfg.example;
    o.result["degree"] = s.degree();
    o.result["structure"] = sj;
    o.verdict = "generated";
    return o;
  }
  const field::ChartedStructure s = cfg.inputs.empty()
                                        ? generate_pencil_example(cfg)
                                        : load_structure(cfg, std::max(cfg.max_degree, pencils::kMaxDegree));
  const auto phi = pencils::product_foliations(s, cfg.v_coords, cfg.seed);
  pencils::PencilOptions opt;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  const pencils::PencilReport r = pencils::verify_pencil(s, cfg.v_coords, phi, opt, cfg.tol);
  Checks c;
  c.add("V invariant", r.v_residual, cfg.tol.field);
  c.flag("webs reconstructed", r.webs_reconstructed);
  c.add("shift symmetry", r.shift_residual, cfg.tol.field);
  c.add("block triangular", r.block_residual, cfg.tol.field);
  o.result["v"] = cfg.v_coords;
  o.result["samples"] = r.samples;
  o.result["web_failures"] = r.web_failures;
  o.result["v_invariant"] = r.v_invariant;
  o.result["webs_reconstructed"] = r.webs_reconstructed;
  o.result["shift_symmetric"] = r.shift_symmetric;
  o.result["block_triangular"] = r.block_triangular;
  o.result["checks"] = c.json();
  o.verdict = r.pass() ? "pencil" : "not-a-pencil";
  o.exit_code = r.pass() ? kExitOk : kExitVerdict;
  return o;
}

Json quadric_json(const quadrics::QuadricModel& q) {
  Json co = Json::array();
  for (double v : q.coeffs) co.push_back(num(v));
  return {{"coeffs", co}, {"residual", num(q.residual)}};
}

std::vector<model::ComplexSubspace> planes_for(const model::NTensor& n, const std::vector<quadrics::GrChartPoint>& pts) {
  std::vector<model::ComplexSubspace> out;
  for (const auto& p : pts) out.push_back(quadrics::chart_to_plane(p, n.structure()));
  return out;
}

Outcome cmd_quadric(const RunConfig& cfg) {
  Outcome o;
  const Json j = io::read_json_file(input(cfg, 0, "an input file"));
  o.result["mode"] = cfg.mode;
  if (cfg.mode == "fit" || cfg.mode == "nondegeneracy") {
    const auto pts = io::chart_points_from_json(j);
    o.result["points"] = pts.size();
    o.result["nullity"] = quadrics::quadric_nullity(pts, cfg.tol);
    if (cfg.mode == "fit") {
      const auto q = quadrics::quadric_through(pts, cfg.tol);
      o.result["quadric"] = q ? quadric_json(*q) : Json(nullptr);
      o.verdict = q ? "quadric-found" : "no-quadric";
    } else {
      o.verdict = quadrics::quadratically_nondegenerate(pts, cfg.tol) ? "nondegenerate" : "degenerate";
    }
    return o;
  }
  const model::NTensor n = io::tensor_from_json(j, cfg.tol);
  quadrics::SamplerOptions so;
  so.trials = cfg.trials;
  so.seed = cfg.seed;
  if (cfg.mode == "invariant-planes") {
    const auto pts = quadrics::invariant_plane_sampler(n, so, cfg.tol);
    o.result["trials"] = cfg.trials;
    o.result["found"] = pts.size();
    o.result["points"] = io::chart_points_to_json(pts)["points"];
    o.verdict = pts.empty() ? "none-found" : "found";
    return o;
  }
  std::vector<model::ComplexSubspace> planes;
  if (j.contains("planes")) {
    for (const MatrixXd& b : io::planes_from_json(j, n.dim()))
      planes.push_back(model::ComplexSubspace::span(b, n.structure(), cfg.tol));
    o.result["source"] = "file";
  } else {
    planes = planes_for(n, quadrics::invariant_plane_sampler(n, so, cfg.tol));
    o.result["source"] = "sampler";
    o.result["trials"] = cfg.trials;
  }
  const quadrics::Theorem4Verdict v = quadrics::theorem4_certificate(n, planes, cfg.tol);
  o.result["planes"] = planes.size();
  o.verdict = quadrics::verdict_name(v);
  o.exit_code = v == quadrics::Theorem4Verdict::Contradiction ? kExitVerdict : kExitOk;
  return o;
}

Outcome cmd_jetcount(const RunConfig& cfg) {
  if (cfg.n < 1) usage("--n must be positive");
  Outcome o;
  const jetcount::CountTable t = jetcount::invariant_count_bound(cfg.n);
  Json rows = Json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"order", r.order},
                    {"jet_rank", r.jet_rank},
                    {"structure_rank", r.structure_rank},
                    {"stabilizer", r.stabilizer ? Json(*r.stabilizer) : Json(nullptr)},
                    {"transitive", r.transitive}});
  o.result["n"] = t.n;
  o.result["rows"] = rows;
  o.result["invariant_bound"] = t.invariant_bound;
  o.result["bound_order"] = t.bound_order;
  o.result["first_order_count"] = t.first_order_count ? Json(*t.first_order_count) : Json(nullptr);
  o.result["derivation"] = t.derivation;
  o.verdict = "bound " + std::to_string(t.invariant_bound);
  o.text = format_count_table(t);
  return o;
}

Outcome dispatch(const RunConfig& cfg) {
  static const std::map<std::string, std::function<Outcome(const RunConfig&)>> table{
      {"check", cmd_check},   {"nijenhuis", cmd_nijenhuis}, {"classify", cmd_classify}, {"bryant", cmd_bryant},
      {"frame4", cmd_frame4}, {"web", cmd_web},             {"pencil", cmd_pencil},     {"quadric", cmd_quadric},
      {"jetcount", cmd_jetcount}, {"scan", cmd_scan}};
  return table.at(cfg.subcommand)(cfg);
}

Json config_json(const RunConfig& cfg) {
  Json c;
  c["tolerances"] = {{"alg", num(cfg.tol.alg)},
                     {"rank", num(cfg.tol.rank)},
                     {"field", num(cfg.tol.field)},
                     {"frame", num(cfg.tol.frame)}};
  c["seed"] = cfg.seed;
  c["samples"] = cfg.samples;
  const std::string& s = cfg.subcommand;
  if (s == "jetcount") c["n"] = cfg.n;
  if (s == "pencil" || s == "quadric") c["mode"] = cfg.mode;
  if (s == "pencil") {
    c["example"] = cfg.example;
    c["degree"] = cfg.degree;
    c["triangular"] = cfg.triangular;
    c["v"] = cfg.v_coords;
  }
  if (s == "check" || s == "scan") {
    c["grid"] = cfg.grid;
    if (!cfg.diffeo.empty()) c["pullback_degree"] = cfg.degree;
  }
  if (s == "quadric") c["trials"] = cfg.trials;
  if (cfg.point) c["point"] = *cfg.point;
  c["max_degree"] = cfg.max_degree;
  return c;
}

Json inputs_json(const RunConfig& cfg, const Json& config) {
  std::vector<std::string> paths = cfg.inputs;
  if (!cfg.diffeo.empty()) paths.push_back(cfg.diffeo);
  std::string all = cfg.subcommand + "\n" + config.dump() + "\n";
  Json files = Json::array();
  for (const std::string& p : paths) {
    Json f{{"path", p}};
    try {
      const std::string bytes = io::read_file(p);
      f["bytes"] = bytes.size();
      f["digest"] = digest_hex(bytes);
      all += p + "\n" + bytes;
    } catch (const Error&) {
      f["bytes"] = nullptr;
    }
    files.push_back(f);
  }
  std::string algo;
  const std::string d = digest_hex(all, &algo);
  return {{"files", files}, {"digest", {{"algorithm", algo}, {"value", d}}}};
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), cfg.subcommand) == kSubcommands.end())
    usage("unknown subcommand '" + cfg.subcommand + "'");
  for (const double t : {cfg.tol.alg, cfg.tol.rank, cfg.tol.field, cfg.tol.frame})
    if (!(t > 0.0)) usage("tolerances must be positive");
  if (cfg.samples < 1) usage("--samples must be positive");
  if (cfg.grid < 1) usage("--grid must be positive");
  if (cfg.trials < 1) usage("--trials must be positive");
  if (cfg.subcommand == "pencil" && cfg.mode != "generate" && cfg.mode != "verify")
    usage("pencil --mode must be generate or verify");
  if (cfg.subcommand == "quadric" && cfg.mode != "fit" && cfg.mode != "nondegeneracy" &&
      cfg.mode != "invariant-planes" && cfg.mode != "certificate")
    usage("quadric --mode must be fit, nondegeneracy, invariant-planes or certificate");
}

RunResult run(const RunConfig& cfg) {
  RunResult rr;
  Json& rep = rr.report;
  rep["tool"] = "nijtool";
  rep["subcommand"] = cfg.subcommand;
  Json config = config_json(cfg);
  rep["config"] = config;
  rep["inputs"] = inputs_json(cfg, config);
  try {
    validate(cfg);
    Outcome o = dispatch(cfg);
    rep["result"] = std::move(o.result);
    rep["verdict"] = o.verdict;
    rr.exit_code = o.exit_code;
    rr.text = std::move(o.text);
  } catch (const Error& e) {
    rr.exit_code = is_input_error(e.kind()) ? kExitUsage : kExitVerdict;
    rep["verdict"] = "error";
    rep["error"] = {{"code", std::string(e.code())}, {"message", e.what()}};
  }
  rep["exit_code"] = rr.exit_code;
  if (cfg.timestamp) rep["timestamp"] = utc_now();
  return rr;
}

std::string digest_hex(const std::string& bytes, std::string* algorithm) {
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
#ifdef NIJ_HAVE_OPENSSL
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(md[i]);
  if (algorithm) *algorithm = "sha256";
#else
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  hex << std::setw(16) << h;
  if (algorithm) *algorithm = "fnv1a64";
#endif
  return hex.str();
}

std::string format_count_table(const jetcount::CountTable& t) {
  std::ostringstream os;
  os << "n = " << t.n << "\n";
  os << std::setw(6) << "order" << std::setw(12) << "jet_rank" << std::setw(16) << "structure_rank" << std::setw(12)
     << "stabilizer" << std::setw(12) << "transitive" << "\n";
  for (const auto& r : t.rows) {
    os << std::setw(6) << r.order << std::setw(12) << r.jet_rank << std::setw(16) << r.structure_rank
       << std::setw(12) << (r.stabilizer ? std::to_string(*r.stabilizer) : "-") << std::setw(12)
       << (r.transitive ? "yes" : "no") << "\n";
  }
  os << "bound " << t.invariant_bound << " at order " << t.bound_order;
  if (!t.derivation.empty()) os << " (" << t.derivation << ")";
  os << "\n";
  if (t.first_order_count) os << "first-order invariants " << *t.first_order_count << "\n";
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ParsedArgs parse_args(int argc, const char* const* argv) {
  ParsedArgs pa;
  RunConfig& c = pa.config;
  CLI::App app{"Differential invariants of almost complex structures", "nijtool"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--tol-alg", c.tol.alg, "algebraic identity tolerance");
  app.add_option("--tol-rank", c.tol.rank, "relative rank cut");
  app.add_option("--tol-field", c.tol.field, "field validation and integrability tolerance");
  app.add_option("--tol-frame", c.tol.frame, "dimension-4 frame tolerance");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--samples", c.samples, "sample count");
  app.add_option("--out", c.out, "report path (default stdout)");
  app.add_option("--max-degree", c.max_degree, "degree cap for structure files");
  app.add_flag("!--no-timestamp", c.timestamp, "omit the timestamp field");

  std::vector<double> point;
  auto add_point = [&](CLI::App* s) { s->add_option("--point", point, "evaluation point")->delimiter(',')->expected(1, -1); };
  auto add_inputs = [&](CLI::App* s, const char* what) { s->add_option("inputs", c.inputs, what); };

  auto* check = app.add_subcommand("check", "validate a structure and test integrability on a grid");
  auto* scan = app.add_subcommand("scan", "survey |N| and degeneracy classes on a grid");
  for (CLI::App* s : {check, scan}) {
    add_inputs(s, "structure file");
    s->add_option("--grid", c.grid, "points per axis");
    s->add_option("--diffeo", c.diffeo, "diffeo file; scan the pulled-back structure");
    s->add_option("--degree", c.degree, "pullback refit degree");
  }
  for (const char* name : {"nijenhuis", "classify", "bryant", "frame4"}) {
    auto* s = app.add_subcommand(name, std::string(name) + " at sample points");
    add_inputs(s, "structure or tensor file");
    add_point(s);
  }
  auto* web = app.add_subcommand("web", "recover J from a web of four planes");
  add_inputs(web, "web file");
  auto* pencil = app.add_subcommand("pencil", "generate or verify pencil examples");
  add_inputs(pencil, "structure file (verify)");
  pencil->add_option("--mode", c.mode, "generate | verify")->required();
  pencil->add_option("--example", c.example, "1 | 2 | dg2-kernel-v1 | dg2-kernel-transversal");
  pencil->add_option("--degree", c.degree, "generator degree");
  pencil->add_flag("--triangular", c.triangular, "triangular variant of example 2");
  pencil->add_option("--v", c.v_coords, "coordinates spanning V")->delimiter(',');
  pencil->add_option("--structure-out", c.structure_out, "write the generated structure here");
  auto* quadric = app.add_subcommand("quadric", "quadric fitting and invariant-plane certificates");
  add_inputs(quadric, "points or tensor file");
  quadric->add_option("--mode", c.mode, "fit | nondegeneracy | invariant-planes | certificate")->required();
  quadric->add_option("--trials", c.trials, "sampler restarts");
  auto* jet = app.add_subcommand("jetcount", "jet-dimension bookkeeping");
  jet->add_option("--n", c.n, "complex dimension")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    pa.exit_code = kExitOk;
    pa.message = app.help();
    return pa;
  } catch (const CLI::CallForAllHelp&) {
    pa.exit_code = kExitOk;
    pa.message = app.help("", CLI::AppFormatMode::All);
    return pa;
  } catch (const CLI::ParseError& e) {
    pa.exit_code = kExitUsage;
    pa.message = e.what();
    return pa;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  if (!point.empty()) c.point = point;
  return pa;
}

int main_entry(int argc, const char* const* argv) {
  const ParsedArgs pa = parse_args(argc, argv);
  if (pa.exit_code) {
    (*pa.exit_code == kExitOk ? std::cout : std::cerr) << pa.message << (pa.message.ends_with('\n') ? "" : "\n");
    return *pa.exit_code;
  }
  const RunResult r = run(pa.config);
  std::cout << r.text;
  const std::string body = dump(r.report);
  if (pa.config.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(pa.config.out, std::ios::binary);
    if (!(f << body)) {
      std::cerr << "nijtool: error[io]: cannot write " << pa.config.out << "\n";
      return kExitUsage;
    }
  }
  if (r.report.contains("error")) {
    const Json& e = r.report["error"];
    std::cerr << "nijtool: error[" << e["code"].get<std::string>() << "]: " << e["message"].get<std::string>() << "\n";
  }
  return r.exit_code;
}

}  // namespace nij::cli
