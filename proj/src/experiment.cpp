#include "tmiter/experiment.hpp"

#include "tmiter/csv.hpp"
#include "tmiter/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

namespace tmiter {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------ json helpers

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double as_double(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    // Accept exact fractions such as "1/3".
    const auto s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      if (den == 0.0) field_error(path, "zero denominator");
      return num / den;
    } catch (const std::logic_error&) {
      field_error(path, "expected a number or 'p/q' string, got '" + s + "'");
    }
  }
  field_error(path, "expected a number");
}

Index as_index(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<Index>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<Index>(v.get<std::int64_t>());
  }
  field_error(path, "expected a nonnegative integer");
}

double get_double(const json& obj, const std::string& key,
                  const std::string& path, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : as_double(*it, join(path, key));
}

std::vector<double> as_vector(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec as_vec(const json& v, const std::string& path) {
  const auto xs = as_vector(v, path);
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::string name_of(const json& spec, const std::string& path) {
  const json& n = require(spec, "name", path);
  if (!n.is_string()) field_error(join(path, "name"), "expected a string");
  return n.get<std::string>();
}

RateFn as_rate(const json& v, const std::string& path) {
  if (v.is_number()) return RateFn::constant(as_index(v, path));
  if (v.is_object()) {
    const Index a = v.contains("a") ? as_index(v["a"], join(path, "a")) : 0;
    const Index b = v.contains("b") ? as_index(v["b"], join(path, "b")) : 0;
    return RateFn::affine(a, b);
  }
  field_error(path, "expected an integer or {\"a\": .., \"b\": ..}");
}

RealSeq table_seq(std::vector<double> values, std::string what) {
  return [values = std::move(values), what = std::move(what)](Index n) {
    if (n >= values.size()) {
      throw std::out_of_range(what + "_" + std::to_string(n) +
                              " beyond table length " +
                              std::to_string(values.size()));
    }
    return values[n];
  };
}

ParamSchedule build_table_schedule(const json& spec) {
  const std::string path = "schedule";
  const auto beta = as_vector(require(spec, "beta", path), join(path, "beta"));
  const auto lambda =
      as_vector(require(spec, "lambda", path), join(path, "lambda"));
  if (beta.size() != lambda.size() || beta.size() < 2) {
    field_error(path, "beta and lambda need equal length >= 2");
  }
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(beta[i] >= 0.0 && beta[i] <= 1.0)) {
      field_error(path + ".beta[" + std::to_string(i) + "]", "outside [0, 1]");
    }
    if (!(lambda[i] >= 0.0 && lambda[i] <= 1.0)) {
      field_error(path + ".lambda[" + std::to_string(i) + "]", "outside [0, 1]");
    }
  }
  const json& mod = require(spec, "moduli", path);
  const std::string mp = join(path, "moduli");

  ParamSchedule s;
  s.name = "table";
  s.length = beta.size();
  s.beta = table_seq(beta, "beta");
  s.lambda = table_seq(lambda, "lambda");
  s.sigma_beta = as_rate(require(mod, "sigma_beta", mp), join(mp, "sigma_beta"));
  s.chi_beta = as_rate(require(mod, "chi_beta", mp), join(mp, "chi_beta"));
  s.chi_lambda = as_rate(require(mod, "chi_lambda", mp), join(mp, "chi_lambda"));
  if (mod.contains("sigma")) s.sigma = as_rate(mod["sigma"], join(mp, "sigma"));
  if (mod.contains("Lambda")) {
    s.lambda_cap = as_index(mod["Lambda"], join(mp, "Lambda"));
    if (*s.lambda_cap < 1) field_error(join(mp, "Lambda"), "must be >= 1");
  }
  if (mod.contains("N_Lambda")) {
    s.n_lambda = as_index(mod["N_Lambda"], join(mp, "N_Lambda"));
  }
  if (spec.contains("gamma")) {
    auto gamma = as_vector(spec["gamma"], join(path, "gamma"));
    if (gamma.size() != beta.size()) {
      field_error(join(path, "gamma"), "length differs from beta");
    }
    GammaData g;
    g.gamma = table_seq(std::move(gamma), "gamma");
    g.chi_gamma = as_rate(require(mod, "chi_gamma", mp), join(mp, "chi_gamma"));
    g.gamma_cap = as_index(require(mod, "Gamma", mp), join(mp, "Gamma"));
    if (g.gamma_cap < 1) field_error(join(mp, "Gamma"), "must be >= 1");
    if (mod.contains("N_Gamma")) {
      g.n_gamma = as_index(mod["N_Gamma"], join(mp, "N_Gamma"));
    }
    s.gamma = std::move(g);
  }
  return s;
}

const RealSeq& require_gamma(const ParamSchedule& s, const std::string& who) {
  if (!s.gamma) {
    throw ConfigError("family '" + who + "' needs a schedule with gamma");
  }
  return s.gamma->gamma;
}

// ------------------------------------------------------------ moduli checks

std::string index_list(const std::vector<Index>& ks) {
  std::string out;
  for (Index k : ks) {
    if (!out.empty()) out += ' ';
    out += std::to_string(k);
  }
  return out;
}

CheckResult modulus_check(const std::string& name, const RateFn& declared,
                          const std::vector<ModulusEntry>& oracle) {
  const ModulusValidation v = validate_modulus(declared, oracle);
  CheckResult c{name, v.failing_k.empty(), ""};
  if (!v.failing_k.empty()) c.detail = "declared below minimal at k = " + index_list(v.failing_k);
  if (!v.inconclusive_k.empty()) {
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += "inconclusive at k = " + index_list(v.inconclusive_k);
  }
  if (c.detail.empty()) c.detail = "declared dominates oracle";
  return c;
}

void schedule_checks(const ParamSchedule& s, Index k_max, Index horizon,
                     std::vector<CheckResult>& out) {
  if (s.length) horizon = std::min<Index>(horizon, *s.length - 2);
  const auto& beta = s.beta;
  const auto& lambda = s.lambda;
  out.push_back(modulus_check("modulus:sigma_beta", s.sigma_beta,
                              oracle_product_rate(beta, k_max, horizon)));
  out.push_back(modulus_check(
      "modulus:chi_beta", s.chi_beta,
      oracle_cauchy_modulus(
          [&](Index i) { return std::abs(beta(i + 1) - beta(i)); }, k_max,
          horizon)));
  out.push_back(modulus_check(
      "modulus:chi_lambda", s.chi_lambda,
      oracle_cauchy_modulus(
          [&](Index i) { return std::abs(lambda(i + 1) - lambda(i)); }, k_max,
          horizon)));
  if (s.sigma) {
    out.push_back(modulus_check(
        "modulus:sigma", *s.sigma,
        oracle_convergence_rate([&](Index n) { return 1.0 - beta(n); }, k_max,
                                horizon)));
  }
  if (s.lambda_cap) {
    CheckResult c{"modulus:Lambda", true, "lambda_n >= 1/Lambda"};
    const double floor = 1.0 / static_cast<double>(*s.lambda_cap);
    for (Index n = s.n_lambda; n <= horizon; ++n) {
      if (lambda(n) < floor * (1.0 - 1e-12)) {
        c = {"modulus:Lambda", false, "lambda_" + std::to_string(n) + " < 1/Lambda"};
        break;
      }
    }
    out.push_back(c);
  }
  if (s.gamma) {
    const auto& gamma = s.gamma->gamma;
    out.push_back(modulus_check(
        "modulus:chi_gamma", s.gamma->chi_gamma,
        oracle_cauchy_modulus(
            [&](Index i) { return std::abs(gamma(i + 1) - gamma(i)); }, k_max,
            horizon)));
    CheckResult c{"modulus:Gamma", true, "gamma_n >= 1/Gamma"};
    const double floor = 1.0 / static_cast<double>(s.gamma->gamma_cap);
    for (Index n = s.gamma->n_gamma; n <= horizon; ++n) {
      if (gamma(n) < floor * (1.0 - 1e-12)) {
        c = {"modulus:Gamma", false, "gamma_" + std::to_string(n) + " < 1/Gamma"};
        break;
      }
    }
    out.push_back(c);
  }
}

std::string fmt(double v) { return csv::format_double(v); }

CheckResult lemma_check(const InequalityCheck& c, const std::string& prefix) {
  std::string detail = "max excess " + fmt(c.max_excess) + " over " +
                       std::to_string(c.checked) + " steps";
  if (c.first_violation) {
    detail += "; first violation at n = " + std::to_string(*c.first_violation);
  }
  return {prefix + c.name, c.passed(), detail};
}

Index safe_eval(const RateFn& r, Index k, Index cap) {
  try {
    return std::min(r(k), cap);
  } catch (const std::overflow_error&) {
    return cap;
  } catch (const std::out_of_range&) {
    return cap;
  } catch (const std::domain_error&) {
    return cap;
  }
}

std::optional<Index> try_eval(const RateFn& r, Index k) {
  try {
    return r(k);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  } catch (const std::out_of_range&) {
    return std::nullopt;
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

// ------------------------------------------------------------ output

void write_trace(const fs::path& file, const IterationTrace& tr,
                 const ExperimentConfig& cfg) {
  std::ofstream os(file, std::ios::binary);
  std::vector<std::string> cols{"n", "residual_step", "residual_T", "tfam_gap"};
  const bool points = cfg.trace_points && !tr.x.empty();
  if (points) {
    if (const auto* v = std::get_if<Vec>(&tr.x.front())) {
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        cols.push_back("x_" + std::to_string(i));
      }
    } else {
      cols.emplace_back("ray");
      cols.emplace_back("t");
    }
  }
  csv::write_header(os, cols);
  const Index stride = std::max<Index>(1, cfg.trace_stride);
  for (Index n = 0; n < tr.horizon; n += stride) {
    csv::Row row;
    row.add(n).add(tr.residual_step[n]).add(tr.residual_T[n]).add(tr.tfam_gap[n]);
    if (points) {
      if (const auto* v = std::get_if<Vec>(&tr.x[n])) {
        for (double c : *v) row.add(c);
      } else {
        const auto& t = std::get<TreePoint>(tr.x[n]);
        row.add(static_cast<Index>(t.ray)).add(t.t);
      }
    }
    row.write(os);
  }
}

void write_rates(const fs::path& file, const ExperimentRates& r, Index k_max) {
  std::ofstream os(file, std::ios::binary);
  csv::write_header(os, {"k", "chi_T", "chi", "psi0", "Sigma", "Sigma_T",
                         "Sigma_halpern", "linear_ar", "linear_tn_ar",
                         "linear_tm_ar"});
  for (Index k = 0; k <= k_max; ++k) {
    csv::Row row;
    row.add(k);
    if (r.general) {
      const RateBundle& b = *r.general;
      row.add(try_eval(b.chi_T, k)).add(try_eval(b.chi, k));
      std::optional<Index> p;
      try {
        p = b.psi0(k);
      } catch (const std::exception&) {
      }
      row.add(p).add(try_eval(b.Sigma, k));
      if (b.Sigma_T) row.add(try_eval(*b.Sigma_T, k));
      else row.add_empty();
    } else {
      row.add_empty().add_empty().add_empty().add_empty().add_empty();
    }
    if (r.halpern) row.add(try_eval(*r.halpern, k));
    else row.add_empty();
    if (r.linear) {
      row.add(r.linear->ar(k)).add(r.linear->tn_ar(k)).add(r.linear->tm_ar(k));
    } else {
      row.add_empty().add_empty().add_empty();
    }
    row.write(os);
  }
}

void write_certifications(const fs::path& file,
                          const std::vector<CertificationReport>& reps) {
  std::ofstream os(file, std::ios::binary);
  csv::write_header(os, {"rate", "k", "rate_k", "worst_excess",
                         "minimal_empirical_index", "status"});
  for (const auto& rep : reps) {
    for (const auto& e : rep.entries) {
      csv::Row row;
      row.add(rep.rate_name).add(e.k).add(e.rate_k);
      if (e.status == CertStatus::Inconclusive) row.add_empty();
      else row.add(e.worst_excess);
      row.add(e.minimal_empirical_index).add(cert_status_name(e.status));
      row.write(os);
    }
  }
}

bool is_informational(const CertificationReport& r) {
  return r.rate_name.find("(informational)") != std::string::npos;
}

void write_report(const fs::path& file, const ExperimentConfig& cfg,
                  const ProblemInstance& inst, const ExperimentResult& res) {
  std::ofstream os(file, std::ios::binary);
  os << "experiment: " << cfg.name << '\n';
  os << "space: " << inst.space->name() << '\n';
  os << "family: " << inst.family.name << " ("
     << family_kind_name(inst.family.kind) << ")\n";
  os << "schedule: " << inst.schedule.name << '\n';
  os << "M: " << inst.M << '\n';
  os << "horizon: " << res.horizon << '\n';
  os << "k_max: " << cfg.k_max << '\n';
  os << "tolerance: " << fmt(cfg.tol) << '\n';
  os << "\nchecks:\n";
  for (const auto& c : res.checks) {
    os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << ": "
       << c.detail << '\n';
  }
  os << "\ncertifications:\n";
  for (const auto& r : res.certifications) {
    std::size_t pass = 0, fail = 0, inconclusive = 0;
    for (const auto& e : r.entries) {
      if (e.status == CertStatus::Pass) ++pass;
      else if (e.status == CertStatus::Fail) ++fail;
      else ++inconclusive;
    }
    os << "  [" << (fail == 0 ? "pass" : (is_informational(r) ? "note" : "FAIL"))
       << "] " << r.rate_name << ": " << pass << " pass, " << fail << " fail, "
       << inconclusive << " inconclusive\n";
  }
  os << "\nresult: " << (res.exit_code == 0 ? "PASS" : "FAIL") << '\n';
}

}  // namespace

// ------------------------------------------------------------ config

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ExperimentConfig c;
  c.name = j.value("name", std::string("experiment"));
  c.space = require(j, "space", "");
  c.family = require(j, "family", "");
  c.schedule = require(j, "schedule", "");
  c.u = require(j, "u", "");
  c.x0 = require(j, "x0", "");
  if (j.contains("p")) c.p = j["p"];
  if (j.contains("M")) {
    c.M_override = as_index(j["M"], "M");
    if (*c.M_override < 1) field_error("M", "must be >= 1");
  }
  if (j.contains("horizon")) {
    const json& h = j["horizon"];
    if (!(h.is_string() && h.get<std::string>() == "auto")) {
      c.horizon = as_index(h, "horizon");
      if (*c.horizon < 1) field_error("horizon", "must be >= 1");
    }
  }
  if (j.contains("max_auto_horizon")) {
    c.max_auto_horizon = as_index(j["max_auto_horizon"], "max_auto_horizon");
  }
  if (j.contains("k_max")) c.k_max = as_index(j["k_max"], "k_max");
  if (j.contains("tolerance")) {
    c.tol = as_double(j["tolerance"], "tolerance");
    if (!(c.tol > 0.0)) field_error("tolerance", "must be positive");
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) field_error("output", "expected a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("seed")) c.seed = as_index(j["seed"], "seed");
  if (j.contains("axiom_samples")) {
    c.axiom_samples = as_index(j["axiom_samples"], "axiom_samples");
  }
  if (j.contains("property_samples")) {
    c.property_samples = as_index(j["property_samples"], "property_samples");
  }
  if (j.contains("modulus_horizon")) {
    c.modulus_horizon = as_index(j["modulus_horizon"], "modulus_horizon");
    if (c.modulus_horizon < 4) field_error("modulus_horizon", "must be >= 4");
  }
  if (j.contains("trace_points")) {
    if (!j["trace_points"].is_boolean()) field_error("trace_points", "expected a boolean");
    c.trace_points = j["trace_points"].get<bool>();
  }
  if (j.contains("trace_stride")) {
    c.trace_stride = as_index(j["trace_stride"], "trace_stride");
    if (c.trace_stride < 1) field_error("trace_stride", "must be >= 1");
  }
  // Resolve component names eagerly so typos surface as config errors.
  const SpacePtr space = build_space(c.space);
  const ParamSchedule schedule = build_schedule(c.schedule);
  build_family(c.family, *space, schedule);
  return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ConfigError("syntax error at line " + std::to_string(line) + ": " +
                      e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.filename().string() + ": " + e.what());
  }
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.k_max) cfg.k_max = *o.k_max;
  if (o.seed) cfg.seed = *o.seed;
  if (o.output) cfg.output = *o.output;
}

SpacePtr build_space(const json& spec) {
  const std::string name = name_of(spec, "space");
  try {
    if (name == "euclidean") {
      const Index dim = as_index(require(spec, "dim", "space"), "space.dim");
      return std::make_shared<EuclideanSpace>(dim,
                                              get_double(spec, "box", "space", 10.0));
    }
    if (name == "star_tree") {
      const Index rays = as_index(require(spec, "rays", "space"), "space.rays");
      return std::make_shared<StarTreeSpace>(
          rays, get_double(spec, "radius", "space", 10.0));
    }
    if (name == "broken_line") {
      return std::make_shared<BrokenLineSpace>(get_double(spec, "box", "space", 10.0));
    }
  } catch (const GeometryError& e) {
    field_error("space", e.what());
  }
  field_error("space.name", "unknown space '" + name + "'");
}

ParamSchedule build_schedule(const json& spec) {
  const std::string name = name_of(spec, "schedule");
  ParamSchedule s;
  try {
    if (name == "example" || name == "linear") {
      const double lambda = as_double(require(spec, "lambda", "schedule"),
                                      "schedule.lambda");
      if (!(lambda > 0.0 && lambda < 1.0)) {
        field_error("schedule.lambda", "must lie in (0, 1)");
      }
      s = name == "example" ? builtin_example_schedule(lambda)
                            : builtin_linear_schedule(lambda);
    } else if (name == "table") {
      s = build_table_schedule(spec);
    } else {
      field_error("schedule.name", "unknown schedule '" + name + "'");
    }
  } catch (const std::domain_error& e) {
    field_error("schedule", e.what());
  }
  if (spec.contains("psi0")) {
    const json& p = spec["psi0"];
    const std::string v = p.is_string() ? p.get<std::string>() : "";
    if (v == "minimal") s.psi0_policy = Psi0Policy::MinimalProduct;
    else if (v == "chi") s.psi0_policy = Psi0Policy::ChiAt3kPlus2;
    else field_error("schedule.psi0", "expected \"minimal\" or \"chi\"");
  }
  return s;
}

MappingFamily build_family(const json& spec, const Space& space,
                           const ParamSchedule& schedule) {
  const std::string name = name_of(spec, "family");
  const auto* euclid = dynamic_cast<const EuclideanSpace*>(&space);
  const auto* tree = dynamic_cast<const StarTreeSpace*>(&space);
  auto need_euclid = [&]() -> std::size_t {
    if (euclid) return euclid->dim();
    if (dynamic_cast<const BrokenLineSpace*>(&space)) return 1;
    field_error("family", "'" + name + "' needs a Euclidean space");
  };
  auto need_tree = [&] {
    if (!tree) field_error("family", "'" + name + "' needs a star_tree space");
  };
  auto check_dim = [&](const Vec& v, const std::string& path) {
    if (static_cast<std::size_t>(v.size()) != need_euclid()) {
      field_error(path, "dimension mismatch with space");
    }
  };

  try {
    if (name == "identity") {
      if (tree) return identity_family(TreePoint::origin());
      return identity_family(Vec(Vec::Zero(static_cast<Eigen::Index>(need_euclid()))));
    }
    if (name == "box_projection") {
      const Vec lo = as_vec(require(spec, "lo", "family"), "family.lo");
      const Vec hi = as_vec(require(spec, "hi", "family"), "family.hi");
      check_dim(lo, "family.lo");
      check_dim(hi, "family.hi");
      return box_projection_family(lo, hi);
    }
    if (name == "tree_contraction") {
      need_tree();
      return tree_contraction_family(get_double(spec, "c", "family", 0.5));
    }
    if (name == "tree_radial_resolvent") {
      need_tree();
      return tree_radial_resolvent_family(require_gamma(schedule, name));
    }
    if (name == "resolvent_l1") {
      return resolvent_l1_family(need_euclid(), require_gamma(schedule, name),
                                 get_double(spec, "rho", "family", 1.0));
    }
    if (name == "resolvent_quadratic") {
      const json& q = require(spec, "Q", "family");
      if (!q.is_array()) field_error("family.Q", "expected a matrix (array of rows)");
      const auto n = static_cast<Eigen::Index>(q.size());
      Eigen::MatrixXd Q(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const Vec row = as_vec(q[r], "family.Q[" + std::to_string(r) + "]");
        if (row.size() != n) field_error("family.Q", "matrix must be square");
        Q.row(r) = row.transpose();
      }
      if (static_cast<std::size_t>(n) != need_euclid()) {
        field_error("family.Q", "dimension mismatch with space");
      }
      return resolvent_quadratic_family(Q, require_gamma(schedule, name));
    }
    if (name == "forward_backward") {
      const std::size_t dim = need_euclid();
      const json& a = require(spec, "A", "family");
      const json& b = require(spec, "B", "family");
      const std::string an = name_of(a, "family.A");
      const std::string bn = name_of(b, "family.B");
      const auto zeros = Vec(Vec::Zero(static_cast<Eigen::Index>(dim)));
      MonotoneOp A;
      Vec lo = zeros, hi = zeros;
      double rho = 0.0;
      if (an == "zero") A = zero_monotone();
      else if (an == "l1") {
        rho = get_double(a, "rho", "family.A", 1.0);
        A = l1_monotone(rho);
      } else if (an == "box") {
        lo = as_vec(require(a, "lo", "family.A"), "family.A.lo");
        hi = as_vec(require(a, "hi", "family.A"), "family.A.hi");
        check_dim(lo, "family.A.lo");
        check_dim(hi, "family.A.hi");
        A = box_monotone(lo, hi);
      } else field_error("family.A.name", "unknown operator '" + an + "'");
      CocoerciveOp B;
      Vec diag = zeros, rhs = zeros;
      if (bn == "zero") B = zero_cocoercive();
      else if (bn == "quadratic") {
        diag = as_vec(require(b, "diag", "family.B"), "family.B.diag");
        rhs = as_vec(require(b, "b", "family.B"), "family.B.b");
        check_dim(diag, "family.B.diag");
        check_dim(rhs, "family.B.b");
        B = quadratic_cocoercive(diag, rhs);
      } else field_error("family.B.name", "unknown operator '" + bn + "'");
      const RealSeq& gamma = require_gamma(schedule, name);
      Vec z;
      if (spec.contains("z")) {
        z = as_vec(spec["z"], "family.z");
        check_dim(z, "family.z");
      } else if (bn == "zero") {
        z = an == "box" ? Vec(zeros.cwiseMax(lo).cwiseMin(hi)) : zeros;
      } else if ((diag.array() > 0.0).all()) {
        if (an == "zero") z = rhs.cwiseQuotient(diag);
        else if (an == "l1") z = lasso_diagonal_solution(rho, diag, rhs);
        else z = box_quadratic_solution(lo, hi, diag, rhs);
      } else {
        field_error("family.z", "required when diag has zero entries");
      }
      return forward_backward_family(A, B, gamma, z);
    }
  } catch (const std::invalid_argument& e) {
    field_error("family", e.what());
  }
  field_error("family.name", "unknown family '" + name + "'");
}

Point build_point(const json& spec, const Space& space) {
  Point p;
  if (spec.is_array()) {
    p = as_vec(spec, "point");
  } else if (spec.is_object() && spec.contains("t")) {
    const Index ray = spec.contains("ray") ? as_index(spec["ray"], "point.ray") : 0;
    try {
      p = TreePoint::make(ray, as_double(spec["t"], "point.t"));
    } catch (const GeometryError& e) {
      field_error("point", e.what());
    }
  } else {
    field_error("point", "expected a coordinate array or {\"ray\", \"t\"}");
  }
  try {
    space.validate(p);
  } catch (const GeometryError& e) {
    field_error("point", e.what());
  }
  return p;
}

ProblemInstance assemble_instance(const ExperimentConfig& cfg) {
  SpacePtr space = build_space(cfg.space);
  ParamSchedule schedule = build_schedule(cfg.schedule);
  MappingFamily family = build_family(cfg.family, *space, schedule);
  Point u = build_point(cfg.u, *space);
  Point x0 = build_point(cfg.x0, *space);
  std::optional<Point> p;
  if (cfg.p) p = build_point(*cfg.p, *space);
  try {
    return make_instance(space, std::move(family), std::move(schedule),
                         std::move(u), std::move(x0), std::move(p),
                         cfg.M_override, 1000, cfg.tol);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

std::optional<RateFn> chi_T_for(const ProblemInstance& inst) {
  if (inst.family.chi_T) return inst.family.chi_T;
  const bool certified = inst.family.kind == FamilyKind::Jp2WithGamma ||
                         inst.family.kind == FamilyKind::Resolvent;
  if (certified && inst.schedule.gamma) {
    const GammaData& g = *inst.schedule.gamma;
    return chi_T_from_gamma(inst.M, g.gamma_cap, g.n_gamma, g.chi_gamma);
  }
  return std::nullopt;
}

ExperimentRates compute_rates(const ProblemInstance& inst) {
  ExperimentRates r;
  const ParamSchedule& s = inst.schedule;
  if (const auto chi_T = chi_T_for(inst)) {
    r.general = general_rates(s, *chi_T, inst.M);
    if (s.sigma) r.halpern = halpern_translate(r.general->Sigma, *s.sigma, inst.M);
  }
  if (s.name == "example") {
    r.example_sigma = example_sigma_closed_form(inst.M);
    r.example_sigma_t = example_sigma_t_closed_form(inst.M, *s.lambda_cap);
  }
  if (s.name == "linear" && inst.family.kind != FamilyKind::Custom) {
    r.linear = linear_rates(inst.M, s.lambda(0));
  }
  return r;
}

// ------------------------------------------------------------ run

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  std::optional<ProblemInstance> inst_holder;
  try {
    inst_holder = assemble_instance(cfg);
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  }
  const ProblemInstance& inst = *inst_holder;
  const Space& S = *inst.space;
  const ParamSchedule& sched = inst.schedule;
  res.M = inst.M;
  auto& checks = res.checks;

  // Static checks on the ingredients.
  {
    const AxiomReport ax = check_w_axioms(S, cfg.axiom_samples, cfg.tol, cfg.seed);
    std::string detail;
    for (std::size_t a = 0; a < kAxiomCount; ++a) {
      if (!detail.empty()) detail += ' ';
      detail += std::string(axiom_name(static_cast<Axiom>(a))) + "=" +
                fmt(ax.max_violation[a]);
    }
    checks.push_back({"w_axioms", ax.passed(), detail});
  }
  {
    const auto ne = check_nonexpansive(inst.family, S, cfg.property_samples, 1000,
                                       cfg.tol, cfg.seed + 1);
    checks.push_back({"nonexpansive", ne.passed(),
                      "max excess " + fmt(ne.max_excess)});
  }
  if (inst.family.gamma) {
    const auto jp = check_jp2_consequence(
        inst.family, *inst.family.gamma, S,
        std::max<std::size_t>(1, cfg.property_samples / 10), 10, cfg.tol, 1000,
        cfg.seed + 2);
    checks.push_back({"jp2_consequence", jp.passed(),
                      "max violation " + fmt(jp.max_violation)});
  }
  schedule_checks(sched, cfg.k_max, cfg.modulus_horizon, checks);

  // Rates and horizon.
  const ExperimentRates rates = compute_rates(inst);
  if (!rates.general) {
    checks.push_back({"rates", true,
                      "family has no step-size certificate; rates not composed"});
  }
  if (rates.general && rates.example_sigma &&
      sched.psi0_policy == Psi0Policy::ChiAt3kPlus2) {
    bool same = true;
    for (Index k = 0; k <= cfg.k_max && same; ++k) {
      same = rates.general->Sigma(k) == (*rates.example_sigma)(k);
      if (same && rates.general->Sigma_T) {
        same = (*rates.general->Sigma_T)(k) == (*rates.example_sigma_t)(k);
      }
    }
    checks.push_back({"closed_form_consistency", same,
                      "composed rates vs example closed forms"});
  }

  Index horizon = 0;
  if (cfg.horizon) {
    horizon = *cfg.horizon;
  } else {
    const Index cap = cfg.max_auto_horizon;
    Index need = 10'000;
    auto consider = [&](const std::optional<RateFn>& r) {
      if (r) need = std::max(need, safe_eval(*r, cfg.k_max, cap));
    };
    if (rates.general) {
      consider(rates.general->Sigma);
      consider(rates.general->Sigma_T);
    }
    consider(rates.halpern);
    if (rates.linear) consider(rates.linear->tn_ar);
    horizon = std::min(cap, need + 1000);
  }
  if (sched.length && horizon + 1 > *sched.length) horizon = *sched.length - 1;
  if (horizon < 2) {
    res.exit_code = 2;
    res.error = "horizon must be >= 2";
    return res;
  }
  res.horizon = horizon;

  IterationTrace trace;
  HalpernTrace halpern;
  try {
    RunOptions opts;
    opts.store_points = cfg.trace_points;
    trace = run_tikhonov_mann(inst, horizon, opts);
    halpern = run_modified_halpern(inst, horizon);
  } catch (const std::invalid_argument& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  } catch (const std::out_of_range& e) {
    res.exit_code = 2;
    res.error = e.what();
    return res;
  }

  {
    const Index h = std::min<Index>(horizon, 10'000);
    RunOptions with_points;
    with_points.store_points = true;
    const auto gap = halpern_equivalence_gap(S, run_tikhonov_mann(inst, h, with_points),
                                             run_modified_halpern(inst, h, with_points));
    checks.push_back({"halpern_equivalence", gap.max() <= cfg.tol,
                      "max d(u_n,y_n) " + fmt(gap.max_u_y) + ", max d(x_{n+1},v_n) " +
                          fmt(gap.max_x_v) + " over " + std::to_string(h) + " steps"});
  }

  for (const auto& c : check_basic_bounds(inst, trace, cfg.tol).checks) {
    checks.push_back(lemma_check(c, "basic_bounds:"));
  }
  for (const auto& c : check_recursive_inequalities(inst, trace, cfg.tol).checks) {
    checks.push_back(lemma_check(c, "recursion:"));
  }

  // chi_T against the observed family gaps.
  if (rates.general) {
    const Index kc = std::min<Index>(cfg.k_max, 20);
    const auto oracle = oracle_cauchy_modulus(
        [&](Index i) { return trace.tfam_gap[i]; }, kc, horizon - 1);
    checks.push_back(modulus_check("chi_T_along_trace", rates.general->chi_T, oracle));
  } else {
    const auto oracle = oracle_cauchy_modulus(
        [&](Index i) { return trace.tfam_gap[i]; }, std::min<Index>(cfg.k_max, 20),
        horizon - 1);
    std::string detail = "empirical minimal moduli:";
    for (const auto& e : oracle) {
      detail += ' ';
      detail += e.minimal ? std::to_string(*e.minimal) : "?";
    }
    checks.push_back({"chi_T_along_trace", true, detail});
  }

  // d(x_n, T_m x_n) maximised over m in {0, n/2, 2n}.
  std::vector<double> cross_residual;
  if (rates.linear && horizon <= kMaxStoredHorizon) {
    RunOptions with_points;
    with_points.store_points = true;
    const auto pts = run_tikhonov_mann(inst, horizon, with_points);
    cross_residual.resize(horizon);
    for (Index n = 0; n < horizon; ++n) {
      double worst = 0.0;
      for (Index m : {Index{0}, n / 2, 2 * n}) {
        worst = std::max(worst, S.dist(pts.x[n], inst.family(m, pts.x[n])));
      }
      cross_residual[n] = worst;
    }
  }

  if (rates.linear) {
    const LinearRates& lr = *rates.linear;
    InequalityCheck step("step<=6M/(n+2)");
    InequalityCheck tn("T_residual<=10M/(lambda(n+2))");
    for (Index n = 0; n < horizon; ++n) {
      step.record(n, trace.residual_step[n], lr.step_bound(n), cfg.tol);
      tn.record(n, trace.residual_T[n], lr.tn_bound(n), cfg.tol);
    }
    checks.push_back(lemma_check(step, "linear:"));
    checks.push_back(lemma_check(tn, "linear:"));
    if (cross_residual.empty()) {
      checks.push_back({"linear:cross_index", true,
                        "skipped: horizon exceeds the point-storage limit"});
    } else {
      InequalityCheck cross("T_m_residual<=20M/(lambda(n+2))");
      for (Index n = 0; n < cross_residual.size(); ++n) {
        cross.record(n, cross_residual[n], lr.cross_bound(n), cfg.tol);
      }
      checks.push_back(lemma_check(cross, "linear:"));
    }
    const auto ss = sabach_shtern_check(trace.residual_step,
                                        3.0 * static_cast<double>(inst.M),
                                        horizon - 1, cfg.tol);
    std::string detail = "hypothesis max excess " + fmt(ss.max_hypothesis_excess) +
                         ", conclusion max excess " + fmt(ss.max_conclusion_excess);
    if (ss.hypothesis_failure) detail += "; hypothesis fails at " + std::to_string(*ss.hypothesis_failure);
    if (ss.conclusion_failure) detail += "; conclusion fails at " + std::to_string(*ss.conclusion_failure);
    checks.push_back({"sabach_shtern", ss.hypothesis_holds && ss.conclusion_holds, detail});
  }

  // Certification.
  Index last = horizon - 1;
  auto certify = [&](std::span<const double> residuals, const RateFn& r,
                     const std::string& name) {
    const RateFn capped([r, cap = horizon + 1](Index k) { return safe_eval(r, k, cap); },
                        r.label());
    res.certifications.push_back(
        certify_rate(residuals, capped, cfg.k_max, last, cfg.tol, name));
  };
  if (rates.general) {
    certify(trace.residual_step, rates.general->Sigma, "Sigma");
    if (rates.general->Sigma_T) {
      certify(trace.residual_T, *rates.general->Sigma_T, "Sigma_T");
    }
    certify(trace.residual_T, rates.general->Sigma,
            "Sigma_on_T_residual (informational)");
  }
  if (rates.example_sigma) {
    certify(trace.residual_step, *rates.example_sigma, "Sigma_closed_form");
    certify(trace.residual_T, *rates.example_sigma_t, "Sigma_T_closed_form");
  }
  if (rates.halpern) {
    certify(halpern.residual_step, *rates.halpern, "Sigma_halpern");
    if (rates.general->Sigma_T) {
      certify(halpern.residual_T,
              halpern_translate(*rates.general->Sigma_T, *sched.sigma, inst.M),
              "Sigma_T_halpern");
    }
  }
  if (rates.linear) {
    certify(trace.residual_step, rates.linear->ar, "linear_ar");
    certify(trace.residual_T, rates.linear->tn_ar, "linear_tn_ar");
    if (!cross_residual.empty()) {
      const Index saved = last;
      last = cross_residual.size() - 1;
      certify(cross_residual, rates.linear->tm_ar, "linear_tm_ar");
      last = saved;
    }
  }

  const bool checks_ok = std::all_of(checks.begin(), checks.end(),
                                     [](const CheckResult& c) { return c.passed; });
  const bool certs_ok = std::none_of(
      res.certifications.begin(), res.certifications.end(),
      [](const CertificationReport& r) { return !is_informational(r) && r.any_failure(); });
  res.exit_code = checks_ok && certs_ok ? 0 : 1;

  fs::create_directories(cfg.output);
  write_trace(cfg.output / "trace.csv", trace, cfg);
  write_rates(cfg.output / "rates.csv", rates, cfg.k_max);
  write_certifications(cfg.output / "certification.csv", res.certifications);
  write_report(cfg.output / "report.txt", cfg, inst, res);
  return res;
}

SuiteResult run_suite(const fs::path& dir, const fs::path& out_root,
                      const Overrides& overrides) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      configs.push_back(e.path());
    }
  }
  if (configs.empty()) throw ConfigError("no *.json configs in " + dir.string());
  std::sort(configs.begin(), configs.end());

  auto run_one = [&](const fs::path& path) {
    SuiteEntry entry;
    entry.config = path.filename().string();
    try {
      ExperimentConfig cfg = load_config(path);
      apply_overrides(cfg, overrides);
      cfg.output = out_root / path.stem();
      const ExperimentResult r = run_experiment(cfg);
      entry.exit_code = r.exit_code;
      entry.message = r.error;
      for (const auto& c : r.checks) entry.failures += c.passed ? 0 : 1;
      for (const auto& c : r.certifications) {
        if (!is_informational(c) && c.any_failure()) ++entry.failures;
      }
    } catch (const ConfigError& e) {
      entry.exit_code = 2;
      entry.message = e.what();
    } catch (const std::exception& e) {
      entry.exit_code = 1;
      entry.message = e.what();
    }
    return entry;
  };

  SuiteResult result;
  result.entries.resize(configs.size());
  const std::size_t width =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < configs.size(); start += width) {
    std::vector<std::future<SuiteEntry>> batch;
    const std::size_t stop = std::min(configs.size(), start + width);
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, run_one, configs[i]));
    }
    for (std::size_t i = start; i < stop; ++i) {
      result.entries[i] = batch[i - start].get();
    }
  }

  bool any_config_error = false;
  bool any_failure = false;
  for (const auto& e : result.entries) {
    any_config_error |= e.exit_code == 2;
    any_failure |= e.exit_code != 0;
  }
  result.exit_code = any_config_error ? 2 : (any_failure ? 1 : 0);

  fs::create_directories(out_root);
  std::ofstream os(out_root / "suite_summary.csv", std::ios::binary);
  csv::write_header(os, {"config", "exit_code", "status", "failures", "message"});
  for (const auto& e : result.entries) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    csv::Row row;
    row.add(e.config)
        .add(e.exit_code)
        .add(e.exit_code == 0 ? "pass" : (e.exit_code == 2 ? "config_error" : "fail"))
        .add(static_cast<Index>(e.failures))
        .add(msg)
        .write(os);
  }
  return result;
}

}  // namespace tmiter
