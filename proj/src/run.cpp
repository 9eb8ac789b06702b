#include "bosegas/run.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bosegas/bethe_oracle.hpp"
#include "bosegas/fredholm.hpp"
#include "bosegas/nls_system.hpp"
#include "bosegas/validation.hpp"

namespace bosegas {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::vector<std::pair<Command, std::string>> kCommands{
    {Command::Correlate, "correlate"}, {Command::Static, "static"},          {Command::Boundary, "boundary"},
    {Command::Density, "density"},     {Command::KernelDump, "kernel-dump"}, {Command::Oracle, "oracle"},
    {Command::LaxCheck, "lax-check"},  {Command::Validate, "validate"}};

double round_sig(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  return std::strtod(buf, nullptr);
}

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

ThermalParams thermal_of(double T, double h) { return ThermalParams{h, T}; }

RegularizationPolicy policy_of(const std::vector<double>& damping) {
  RegularizationPolicy p;
  p.damping = damping.front();
  p.extrapolation_orders = static_cast<int>(damping.size());
  return p;
}

NumericsPolicy numerics_of(const RunConfig& cfg) {
  NumericsPolicy num;
  num.n = cfg.n;
  num.truncation_tol = cfg.truncation_tol;
  num.node_doubling = cfg.node_doubling;
  return num;
}

struct Point {
  double x1, x2, t, T, h, D, L;
};

// lexicographic in (x1, x2, t, T, h, D, L); L is scanned by the oracle only
std::vector<Point> scan(const RunConfig& c) {
  std::vector<double> Ls = c.command == Command::Oracle ? c.L.values() : std::vector<double>{0.0};
  std::vector<Point> pts;
  for (double x1 : c.x1.values())
    for (double x2 : c.x2.values())
      for (double t : c.t.values())
        for (double T : c.T.values())
          for (double h : c.h.values())
            for (double D : c.D.values())
              for (double L : Ls) pts.push_back({x1, x2, t, T, h, D, L});
  return pts;
}

int oracle_N(const Point& p) { return static_cast<int>(std::lround(p.D * p.L)); }

std::vector<std::pair<std::string, double>> echo(const RunConfig& c, const Point& p) {
  double e = eps(c.boundary);
  switch (c.command) {
    case Command::Static:
      if (c.static_path == "sine") return {{"eps", e}, {"x1", p.x1}, {"x2", p.x2}, {"D", p.D}};
      return {{"eps", e}, {"x1", p.x1}, {"x2", p.x2}, {"T", p.T}, {"h", p.h}};
    case Command::Boundary:
      return {{"x", p.x2}, {"t", p.t}, {"T", p.T}, {"h", p.h}, {"D", p.D}};
    case Command::Density:
      return {{"T", p.T}, {"h", p.h}};
    case Command::Oracle:
      return {{"eps", e}, {"x1", p.x1}, {"x2", p.x2}, {"t", p.t}, {"h", p.h},
              {"D", p.D}, {"L", p.L},   {"N", static_cast<double>(oracle_N(p))}};
    default:
      return {{"eps", e}, {"x1", p.x1}, {"x2", p.x2}, {"t", p.t}, {"T", p.T}, {"h", p.h}, {"D", p.D}};
  }
}

void numerics_metadata(ResultRecord& r, const RunConfig& c, bool thermal) {
  r.metadata.push_back({"n", static_cast<double>(c.n)});
  r.metadata.push_back({"node_doubling", c.node_doubling ? 1.0 : 0.0});
  if (thermal) r.metadata.push_back({"truncation_tol", c.truncation_tol});
}

ResultRecord correlate_point(const RunConfig& c, const Point& p) {
  ResultRecord r;
  r.point = echo(c, p);
  PhysicalPoint pt{p.x1, p.x2, p.t, c.boundary, thermal_of(p.T, p.h), p.D};
  auto res = correlation(pt, numerics_of(c));
  r.value = res.value;
  r.parts = {{"det", res.det_part}, {"derivative", res.derivative_part}, {"g", res.g_part}};
  r.error_estimate = res.error_estimate;
  numerics_metadata(r, c, p.T > 0.0);
  r.metadata.push_back({"grid_size", static_cast<double>(res.grid_size)});
  r.metadata.push_back({"cutoff", res.truncation});
  if (c.boundary == BoundaryKind::Dirichlet && p.x1 == 0.0) r.flags.push_back("dirichlet-null");
  return r;
}

ResultRecord static_point(const RunConfig& c, const Point& p) {
  ResultRecord r;
  NumericsPolicy num = numerics_of(c);
  StaticResult s;
  r.point = echo(c, p);
  if (c.static_path == "sine") {
    s = static_ground_K(p.x1, p.x2, c.boundary, p.D, num);
  } else {
    auto path = c.static_path == "step" ? StaticPath::StepWeight : StaticPath::Interval;
    s = correlation_static(p.x1, p.x2, c.boundary, thermal_of(p.T, p.h), path, num);
  }
  r.value = s.value;
  r.parts = {{"det", s.det}, {"minor", s.minor}};
  r.error_estimate = s.error_estimate;
  numerics_metadata(r, c, false);
  r.metadata.push_back({"grid_size", static_cast<double>(s.grid_size)});
  if (c.boundary == BoundaryKind::Dirichlet && p.x1 == 0.0) r.flags.push_back("dirichlet-null");
  return r;
}

ResultRecord boundary_point(const RunConfig& c, const Point& p) {
  ResultRecord r;
  r.point = echo(c, p);
  PhysicalPoint pt{0.0, p.x2, p.t, BoundaryKind::Neumann, thermal_of(p.T, p.h), p.D};
  auto b = correlation_boundary_neumann(pt, numerics_of(c));
  r.value = b.value;
  r.parts = {{"det", b.det_W}, {"b14", b.b14}};
  r.error_estimate = b.error_estimate;
  numerics_metadata(r, c, false);
  r.metadata.push_back({"grid_size", static_cast<double>(b.grid_size)});
  return r;
}

ResultRecord density_point(const RunConfig& c, const Point& p) {
  ResultRecord r;
  r.point = echo(c, p);
  r.value = density_of_temperature(thermal_of(p.T, p.h));
  return r;
}

cplx oracle_value(const FiniteSystem& sys, const Point& p, const std::vector<double>& damping, cplx& det,
                  cplx& derivative) {
  auto parts = proposition_determinant(sys, p.x1, p.x2, p.t, p.h, policy_of(damping));
  det = parts.det;
  derivative = parts.alpha_derivative;
  return parts.value;
}

ResultRecord oracle_point(const RunConfig& c, const Point& p) {
  ResultRecord r;
  r.point = echo(c, p);
  FiniteSystem sys = ground_state(p.L, oracle_N(p), c.boundary);
  cplx det, der;
  r.value = oracle_value(sys, p, c.damping, det, der);
  r.parts = {{"det", det}, {"derivative", der}};
  if (c.damping.size() > 1) {
    std::vector<double> shorter(c.damping.begin(), c.damping.end() - 1);
    cplx d2, der2;
    r.error_estimate = std::abs(oracle_value(sys, p, shorter, d2, der2) - r.value);
  }
  r.damping = c.damping;
  if (c.boundary == BoundaryKind::Dirichlet && p.x1 == 0.0) r.flags.push_back("dirichlet-null");
  return r;
}

std::vector<ResultRecord> kernel_dump(const RunConfig& c) {
  Point p = scan(c).front();
  GeometryParams g{p.x1, p.x2, p.t};
  ThermalParams th = thermal_of(p.T, p.h);
  BoundaryKind b = c.boundary;
  Quadrature q;
  std::function<cplx(double, double)> k;
  double spectral_end = p.T > 0.0 ? build_thermal_grid(th, c.n, c.truncation_tol).b : kPi * p.D;
  if (c.kernel == "L") {
    q = mirror_grid(build_grid(0.0, spectral_end, c.n));
    k = [&](double l, double m) { return kernel_L(l, m, g); };
  } else if (c.kernel == "V") {
    q = build_grid(0.0, spectral_end, c.n);
    k = [&](double l, double m) { return kernel_V(l, m, b, g); };
  } else if (c.kernel == "W") {
    q = build_grid(0.0, spectral_end, c.n);
    k = [&](double l, double m) { return cplx(kernel_W(l, m, p.x2)); };
  } else if (c.kernel == "theta") {
    q = build_grid(-p.x1, p.x2, c.n);
    k = [&](double x, double y) { return cplx(kernel_theta(x, y, b, th)); };
  } else {
    q = build_grid(-p.x1, p.x2, c.n);
    k = [&](double x, double y) { return cplx(kernel_K_static(x, y, b, p.D)); };
  }
  bool spectral = c.kernel == "L" || c.kernel == "V" || c.kernel == "W";
  std::vector<ResultRecord> out;
  for (int i = 0; i < q.size(); ++i)
    for (int j = 0; j < q.size(); ++j) {
      ResultRecord r;
      r.point = {{"eps", eps(b)}, {"x1", p.x1}, {"x2", p.x2}, {"t", p.t},         {"T", p.T},
                 {"h", p.h},      {"D", p.D},   {"i", 1.0 * i}, {"j", 1.0 * j}, {"u", q.nodes[i]},
                 {"v", q.nodes[j]}};
      r.value = k(q.nodes[i], q.nodes[j]);
      r.metadata.push_back({"n", static_cast<double>(c.n)});
      if (spectral && p.T > 0.0) r.metadata.push_back({"truncation_tol", c.truncation_tol});
      out.push_back(std::move(r));
    }
  return out;
}

std::vector<ResultRecord> lax_check(const RunConfig& c) {
  Point p = scan(c).front();
  FourPointConfig cfg;
  for (int k = 0; k < 4; ++k) {
    cfg.y[k] = c.y[k];
    cfg.t[k] = c.times[k];
  }
  NlsEnsemble ens;
  ens.thermal = thermal_of(p.T, p.h);
  ens.D = p.D;
  ens.n = c.n;
  auto meta = [&](ResultRecord& r) { r.metadata.push_back({"n", static_cast<double>(c.n)}); };
  std::vector<ResultRecord> out;
  std::vector<double> coarse;
  for (int s = 0; s < 2; ++s) {
    double step = s == 0 ? c.step : c.step / 2;
    auto res = lax_compatibility_residual(cfg, step, ens);
    int idx = 0;
    for (int j = 1; j <= 4; ++j)
      for (int k = j + 1; k <= 4; ++k, ++idx) {
        ResultRecord r;
        r.point = {{"step", step}, {"j", 1.0 * j}, {"k", 1.0 * k}};
        r.value = res.pair(j, k);
        const auto& co = res.coefficient[j - 1][k - 1];
        r.parts = {{"mu0", co[0]}, {"mu1", co[1]}, {"mu2", co[2]}};
        if (s == 0)
          coarse.push_back(res.pair(j, k));
        else
          r.parts.push_back({"ratio", res.pair(j, k) > 0.0 ? coarse[idx] / res.pair(j, k) : 0.0});
        r.flags.push_back("residual");
        meta(r);
        out.push_back(std::move(r));
      }
  }
  auto nb = build_b(cfg, ens);
  for (int j = 1; j <= 4; ++j)
    for (int k = 1; k <= 4; ++k) {
      ResultRecord r;
      r.point = {{"step", 0.0}, {"j", 1.0 * j}, {"k", 1.0 * k}};
      r.value = nb.b(j - 1, k - 1);
      r.parts = {{"B", nb.B(j - 1, k - 1)}, {"Q", nb.Q(j - 1, k - 1)}};
      r.flags.push_back("b");
      meta(r);
      out.push_back(std::move(r));
    }
  return out;
}

std::string render_report(const std::vector<CheckResult>& checks, Format f, int precision, bool timing) {
  std::ostringstream os;
  if (f == Format::Json) {
    ojson arr = ojson::array();
    for (const auto& c : checks) {
      ojson o;
      o["key"] = c.key;
      o["criterion"] = c.criterion;
      o["module"] = c.module;
      o["name"] = c.name;
      o["pass"] = c.pass;
      o["measured"] = round_sig(c.measured, precision);
      o["threshold"] = round_sig(c.threshold, precision);
      o["detail"] = c.detail;
      if (timing) o["runtime_ms"] = round_sig(c.runtime_ms, precision);
      arr.push_back(o);
    }
    os << arr.dump(2) << "\n";
  } else {
    os << "key,criterion,module,pass,measured,threshold\n";
    for (const auto& c : checks)
      os << c.key << "," << c.criterion << "," << c.module << "," << (c.pass ? "pass" : "fail") << ","
         << fmt(c.measured, precision) << "," << fmt(c.threshold, precision) << "\n";
  }
  return os.str();
}

void check_range(const Range& r, const char* opt, bool nonneg, bool positive) {
  for (double v : r.values()) {
    if (!std::isfinite(v)) throw ConfigError(opt, std::string(opt) + ": values must be finite");
    if (nonneg && v < 0.0) throw ConfigError(opt, std::string(opt) + ": values must be >= 0");
    if (positive && !(v > 0.0)) throw ConfigError(opt, std::string(opt) + ": values must be > 0");
  }
}

void require_scalar(const Range& r, const char* opt, const std::string& cmd) {
  if (r.count != 1) throw ConfigError(opt, std::string(opt) + ": " + cmd + " takes a scalar");
}

}  // namespace

Command parse_command(const std::string& s) {
  for (auto& [c, n] : kCommands)
    if (n == s) return c;
  throw ConfigError("command", "unknown command '" + s + "'");
}

std::string command_name(Command c) {
  for (auto& [k, n] : kCommands)
    if (k == c) return n;
  return "?";
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ConfigError("format", "format: expected csv or json, got '" + s + "'");
}

Range Range::parse(const std::string& s) {
  auto num = [&](const std::string& part) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw ConfigError("", "cannot read '" + s + "' as a number or start:stop:count");
    return v;
  };
  auto c1 = s.find(':');
  if (c1 == std::string::npos) return scalar(num(s));
  auto c2 = s.find(':', c1 + 1);
  if (c2 == std::string::npos || s.find(':', c2 + 1) != std::string::npos)
    throw ConfigError("", "a range is start:stop:count, got '" + s + "'");
  Range r{num(s.substr(0, c1)), num(s.substr(c1 + 1, c2 - c1 - 1)), 0};
  double cnt = num(s.substr(c2 + 1));
  if (cnt < 1 || cnt != std::floor(cnt) || cnt > 1e6) throw ConfigError("", "range count must be a positive integer in '" + s + "'");
  r.count = static_cast<int>(cnt);
  if (r.count == 1 && r.start != r.stop) throw ConfigError("", "a one-point range needs start == stop in '" + s + "'");
  return r;
}

std::vector<double> Range::values() const {
  std::vector<double> v;
  for (int i = 0; i < count; ++i)
    v.push_back(count == 1 ? start : (i == count - 1 ? stop : start + (stop - start) * i / (count - 1)));
  return v;
}

std::string Range::str() const {
  if (count == 1) return fmt(start, 17);
  return fmt(start, 17) + ":" + fmt(stop, 17) + ":" + std::to_string(count);
}

void RunConfig::validate() const {
  std::string cmd = command_name(command);
  if (precision < 1 || precision > 17) throw ConfigError("precision", "precision: must lie in 1..17");
  bool production = command != Command::Density && command != Command::Validate;
  if (production && n < 8) throw ConfigError("n", "n: must be >= 8");
  if (damping.empty()) throw ConfigError("damping", "damping: schedule must be nonempty");
  for (size_t k = 0; k < damping.size(); ++k) {
    if (!(damping[k] > 0.0)) throw ConfigError("damping", "damping: values must be > 0");
    if (k > 0 && std::abs(damping[k] - 0.5 * damping[k - 1]) > 1e-12 * damping[k - 1])
      throw ConfigError("damping", "damping: each value must halve the previous one");
  }
  if (!(truncation_tol > 0.0 && truncation_tol < 1.0)) throw ConfigError("tol", "tol: must lie in (0, 1)");
  check_range(x1, "x1", true, false);
  check_range(x2, "x2", true, false);
  check_range(t, "t", false, false);
  check_range(T, "T", true, false);
  check_range(h, "h", false, false);
  check_range(D, "D", false, true);
  for (double v : h.values())
    if (!(v > 0.0) && (command == Command::Static || command == Command::Density))
      throw ConfigError("h", "h: must be > 0");
  switch (command) {
    case Command::Correlate:
      for (double x1v : x1.values())
        for (double x2v : x2.values())
          for (double tv : t.values())
            if (tv == 0.0 && x1v == x2v)
              throw ConfigError("t", "t: t = 0 with x1 = x2 is the delta-function corner");
      break;
    case Command::Static:
      if (static_path != "interval" && static_path != "step" && static_path != "sine")
        throw ConfigError("path", "path: expected interval, step or sine");
      break;
    case Command::Boundary:
      if (boundary != BoundaryKind::Neumann) throw ConfigError("eps", "eps: boundary is Neumann only");
      for (double v : x1.values())
        if (v != 0.0) throw ConfigError("x1", "x1: boundary requires x1 = 0");
      break;
    case Command::Density:
      break;
    case Command::KernelDump:
      for (auto [r, o] : {std::pair{&x1, "x1"}, {&x2, "x2"}, {&t, "t"}, {&T, "T"}, {&h, "h"}, {&D, "D"}})
        require_scalar(*r, o, cmd);
      if (kernel != "L" && kernel != "V" && kernel != "W" && kernel != "theta" && kernel != "K")
        throw ConfigError("kernel", "kernel: expected L, V, W, theta or K");
      if ((kernel == "theta" || kernel == "K") && x1.start + x2.start == 0.0)
        throw ConfigError("x2", "x2: the interval [-x1, x2] is empty");
      break;
    case Command::Oracle:
      for (double v : T.values())
        if (v != 0.0) throw ConfigError("T", "T: oracle is a ground-state evaluator");
      check_range(L, "L", false, true);
      break;
    case Command::LaxCheck:
      for (auto [r, o] : {std::pair{&T, "T"}, {&h, "h"}, {&D, "D"}}) require_scalar(*r, o, cmd);
      if (y.size() != 4) throw ConfigError("y", "y: expected four comma-separated values");
      if (times.size() != 4) throw ConfigError("times", "times: expected four comma-separated values");
      if (!(step > 0.0)) throw ConfigError("step", "step: must be > 0");
      break;
    case Command::Validate:
      parse_suite(suite);
      break;
  }
}

bool ResultRecord::failed() const {
  for (const auto& f : flags)
    if (f == "convergence-failure" || f == "numerical-failure") return true;
  return false;
}

bool operator==(const ResultRecord& a, const ResultRecord& b) {
  return a.point == b.point && a.value == b.value && a.parts == b.parts && a.error_estimate == b.error_estimate &&
         a.flags == b.flags && a.metadata == b.metadata && a.damping == b.damping && a.runtime_ms == b.runtime_ms;
}

ResultRecord rounded(const ResultRecord& r, int precision) {
  auto rc = [&](cplx z) { return cplx(round_sig(z.real(), precision), round_sig(z.imag(), precision)); };
  ResultRecord o = r;
  for (auto& [k, v] : o.point) v = round_sig(v, precision);
  o.value = rc(o.value);
  for (auto& [k, v] : o.parts) v = rc(v);
  o.error_estimate = round_sig(o.error_estimate, precision);
  for (auto& [k, v] : o.metadata) v = round_sig(v, precision);
  for (auto& d : o.damping) d = round_sig(d, precision);
  o.runtime_ms = round_sig(o.runtime_ms, precision);
  return o;
}

std::string render(const std::vector<ResultRecord>& records, Format format, int precision) {
  std::ostringstream os;
  if (format == Format::Json) {
    ojson arr = ojson::array();
    for (const auto& raw : records) {
      ResultRecord r = rounded(raw, precision);
      ojson o;
      o["point"] = ojson::object();
      for (auto& [k, v] : r.point) o["point"][k] = v;
      o["value"] = {{"re", r.value.real()}, {"im", r.value.imag()}};
      o["parts"] = ojson::object();
      for (auto& [k, v] : r.parts) o["parts"][k] = {{"re", v.real()}, {"im", v.imag()}};
      o["error_estimate"] = r.error_estimate;
      o["flags"] = r.flags;
      o["metadata"] = ojson::object();
      for (auto& [k, v] : r.metadata) o["metadata"][k] = v;
      if (!r.damping.empty()) o["metadata"]["damping"] = r.damping;
      o["runtime_ms"] = r.runtime_ms;
      arr.push_back(o);
    }
    os << arr.dump(2) << "\n";
    return os.str();
  }
  const auto& first = records.front();
  for (const auto& [k, v] : first.point) os << k << ",";
  os << "value_re,value_im,err,n,runtime_ms,flags\n";
  for (const auto& r : records) {
    for (const auto& [k, v] : r.point) os << fmt(v, precision) << ",";
    double n = 0.0;
    for (const auto& [k, v] : r.metadata)
      if (k == "n") n = v;
    os << fmt(r.value.real(), precision) << "," << fmt(r.value.imag(), precision) << ","
       << fmt(r.error_estimate, precision) << "," << fmt(n, precision) << "," << fmt(r.runtime_ms, precision) << ",";
    for (size_t i = 0; i < r.flags.size(); ++i) os << (i ? ";" : "") << r.flags[i];
    os << "\n";
  }
  return os.str();
}

std::vector<ResultRecord> parse_json_records(const std::string& text) {
  ojson arr = ojson::parse(text);
  std::vector<ResultRecord> out;
  for (const auto& o : arr) {
    ResultRecord r;
    for (auto it = o.at("point").begin(); it != o.at("point").end(); ++it)
      r.point.push_back({it.key(), it.value().get<double>()});
    r.value = cplx(o.at("value").at("re").get<double>(), o.at("value").at("im").get<double>());
    for (auto it = o.at("parts").begin(); it != o.at("parts").end(); ++it)
      r.parts.push_back({it.key(), cplx(it.value().at("re").get<double>(), it.value().at("im").get<double>())});
    r.error_estimate = o.at("error_estimate").get<double>();
    r.flags = o.at("flags").get<std::vector<std::string>>();
    for (auto it = o.at("metadata").begin(); it != o.at("metadata").end(); ++it) {
      if (it.key() == "damping")
        r.damping = it.value().get<std::vector<double>>();
      else
        r.metadata.push_back({it.key(), it.value().get<double>()});
    }
    r.runtime_ms = o.at("runtime_ms").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void apply_thread_cap() {
#ifdef _OPENMP
  if (const char* s = std::getenv("BF_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) omp_set_num_threads(std::min(n, omp_get_num_procs()));
  }
#endif
}

RunOutput execute(const RunConfig& cfg) {
  cfg.validate();
  RunOutput out;
  using clock = std::chrono::steady_clock;

  if (cfg.command == Command::Validate) {
    auto checks = run_suite(parse_suite(cfg.suite));
    out.report = render_report(checks, cfg.format, cfg.precision, cfg.timing);
    return out;
  }

  std::function<ResultRecord(const RunConfig&, const Point&)> one;
  switch (cfg.command) {
    case Command::Correlate: one = correlate_point; break;
    case Command::Static: one = static_point; break;
    case Command::Boundary: one = boundary_point; break;
    case Command::Density: one = density_point; break;
    case Command::Oracle: one = oracle_point; break;
    default: break;
  }

  if (!one) {
    auto t0 = clock::now();
    try {
      out.records = cfg.command == Command::KernelDump ? kernel_dump(cfg) : lax_check(cfg);
    } catch (const ConvergenceFailure& e) {
      out.exit_code = 2;
      out.message = e.what();
    } catch (const NumericalError& e) {
      out.exit_code = 2;
      out.message = e.what();
    }
    if (cfg.timing) {
      double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      for (auto& r : out.records) r.runtime_ms = ms;
    }
    return out;
  }

  std::vector<Point> pts = scan(cfg);
  long npts = static_cast<long>(pts.size());
  std::vector<ResultRecord> slots(npts);
  std::vector<std::string> errors(npts);
  std::vector<int> codes(npts, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long i = 0; i < npts; ++i) {
    auto t0 = clock::now();
    auto fail = [&](const char* flag, const std::exception& e, int code) {
      slots[i] = ResultRecord{};
      slots[i].point = echo(cfg, pts[i]);
      slots[i].flags.push_back(flag);
      errors[i] = e.what();
      codes[i] = code;
    };
    try {
      slots[i] = one(cfg, pts[i]);
      if (!finite(slots[i].value)) throw NumericalFailure("non-finite value");
    } catch (const ConvergenceFailure& e) {
      fail("convergence-failure", e, 2);
    } catch (const NumericalError& e) {
      fail("numerical-failure", e, 2);
    } catch (const InvalidConfig& e) {
      fail("invalid-point", e, 1);
    }
    if (cfg.timing) slots[i].runtime_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  }
  for (long i = 0; i < npts; ++i) {
    out.records.push_back(std::move(slots[i]));
    if (codes[i] != 0) {
      if (out.exit_code != 1) out.exit_code = codes[i];
      if (out.message.empty()) out.message = "point " + std::to_string(i + 1) + ": " + errors[i];
    }
  }
  return out;
}

int emit(const std::vector<ResultRecord>& records, const RunConfig& cfg, std::ostream& out) {
  if (records.empty()) return 1;
  std::string text = render(records, cfg.format, cfg.precision);
  if (cfg.output.empty()) {
    out << text;
    return out ? 0 : 3;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) return 3;
  f << text;
  f.close();
  return f ? 0 : 3;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  apply_thread_cap();
  RunOutput res;
  try {
    res = execute(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidConfig& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  if (cfg.command == Command::Validate) {
    if (cfg.output.empty()) {
      out << res.report;
      return out ? 0 : 3;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) {
      err << "cannot write " << cfg.output << "\n";
      return 3;
    }
    f << res.report;
    f.close();
    return f ? 0 : 3;
  }
  if (res.exit_code == 1) {
    err << "config error: " << res.message << "\n";
    return 1;
  }
  if (res.records.empty()) {
    err << "no records to emit\n";
    return 1;
  }
  int code = emit(res.records, cfg, out);
  if (code == 3) {
    err << "cannot write " << (cfg.output.empty() ? "standard output" : cfg.output) << "\n";
    return 3;
  }
  if (res.exit_code == 2) {
    err << "numerical failure: " << res.message << "\n";
    return 2;
  }
  return code;
}

}  // namespace bosegas
