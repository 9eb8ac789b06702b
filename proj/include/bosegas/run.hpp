#pragma once
#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bosegas/correlators.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/kernels.hpp"

namespace bosegas {

enum class Command { Correlate, Static, Boundary, Density, KernelDump, Oracle, LaxCheck, Validate };
enum class Format { Csv, Json };

Command parse_command(const std::string& s);
std::string command_name(Command c);
Format parse_format(const std::string& s);

// A scalar "v" or a linspace triple "start:stop:count".
struct Range {
  double start = 0.0, stop = 0.0;
  int count = 1;
  static Range scalar(double v) { return {v, v, 1}; }
  static Range parse(const std::string& s);
  std::vector<double> values() const;
  std::string str() const;
};

// A config error tied to the option that caused it.
class ConfigError : public InvalidConfig {
 public:
  ConfigError(std::string option, const std::string& what) : InvalidConfig(what), option(std::move(option)) {}
  std::string option;
};

struct RunConfig {
  Command command = Command::Correlate;
  BoundaryKind boundary = BoundaryKind::Neumann;
  Range x1, x2, t, T, h = Range::scalar(1.0), D = Range::scalar(1.0);
  int n = 64;
  std::vector<double> damping{1e-3, 5e-4, 2.5e-4};  // halving schedule
  double truncation_tol = 1e-14;
  bool node_doubling = true;
  std::string output;  // empty: standard output
  Format format = Format::Json;
  int precision = 15;
  bool timing = false;  // runtime_ms is 0 unless set, so reruns are byte-identical

  std::string static_path = "interval";  // interval, step, sine
  std::string kernel = "V";              // L, V, W, theta, K
  Range L = Range::scalar(8.0);          // oracle box length; N = round(D L)
  std::vector<double> y{0.2, -0.5, 0.4, 1.1}, times{0.1, -0.2, 0.6, 0.9};
  double step = 2e-2;
  std::string suite = "all";

  void validate() const;  // throws ConfigError
};

struct ResultRecord {
  std::vector<std::pair<std::string, double>> point;
  cplx value = 0.0;
  std::vector<std::pair<std::string, cplx>> parts;
  double error_estimate = 0.0;
  std::vector<std::string> flags;
  // numerics metadata; only knobs the command actually uses appear
  std::vector<std::pair<std::string, double>> metadata;
  std::vector<double> damping;
  double runtime_ms = 0.0;
  bool failed() const;
};

bool operator==(const ResultRecord& a, const ResultRecord& b);

struct RunOutput {
  std::vector<ResultRecord> records;
  std::string report;  // validate: the rendered report
  int exit_code = 0;
  std::string message;
};

// Evaluates the configuration; records are in lexicographic input-grid order.
RunOutput execute(const RunConfig& cfg);

// Rounds every number to the output precision, as written by emit.
ResultRecord rounded(const ResultRecord& r, int precision);

std::string render(const std::vector<ResultRecord>& records, Format format, int precision);
std::vector<ResultRecord> parse_json_records(const std::string& text);

// Writes to cfg.output or standard output; returns 0, or 1 for an empty list, or 3 on I/O failure.
int emit(const std::vector<ResultRecord>& records, const RunConfig& cfg, std::ostream& out);

// execute + emit with the exit code contract 0/1/2/3.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Caps OpenMP threads from BF_THREADS when set.
void apply_thread_cap();

}  // namespace bosegas
