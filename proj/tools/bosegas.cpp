#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "bosegas/run.hpp"

using namespace bosegas;

namespace {

std::vector<double> parse_list(const std::string& s, const char* opt) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(opt, std::string(opt) + ": cannot read '" + s + "' as a comma-separated list");
    }
  }
  return v;
}

// "line N" of the config file that sets the option, else the command line.
std::string locate(const std::string& option, const std::string& config_path, int argc, char** argv) {
  std::string name = option;
  while (!name.empty() && name.front() == '-') name.erase(0, 1);
  if (!config_path.empty() && !name.empty()) {
    std::ifstream f(config_path);
    std::regex key("^\\s*" + name + "\\s*=");
    std::string line;
    for (int n = 1; std::getline(f, line); ++n)
      if (std::regex_search(line, key)) return config_path + ":" + std::to_string(n);
  }
  for (int i = 1; i < argc; ++i)
    if (!name.empty() && std::string(argv[i]) == "--" + name) return "command line:" + std::to_string(i);
  return "command line:1";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation functions of the impenetrable Bose gas in a box"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Read options from a file (key = value per line)");
  app.allow_config_extras(false);

  std::string command, eps = "+", x1 = "0", x2 = "0", t = "0", T = "0", h = "1", D = "1", L = "8";
  std::string damping = "0.001,0.0005,0.00025", format = "json", y = "0.2,-0.5,0.4,1.1", times = "0.1,-0.2,0.6,0.9";
  RunConfig cfg;
  bool no_doubling = false;

  app.add_option("command", command, "correlate | static | boundary | density | kernel-dump | oracle | lax-check | validate")
      ->required();
  app.add_option("--eps", eps, "Boundary: + (Neumann) or - (Dirichlet)");
  app.add_option("--x1", x1, "x1, a value or start:stop:count");
  app.add_option("--x2", x2, "x2, a value or start:stop:count");
  app.add_option("--t", t, "time, a value or start:stop:count");
  app.add_option("--T", T, "temperature; 0 selects the ground state");
  app.add_option("--h", h, "chemical potential");
  app.add_option("--D", D, "ground-state density");
  app.add_option("--L", L, "box length for the finite-size oracle");
  app.add_option("--n", cfg.n, "quadrature nodes");
  app.add_option("--damping", damping, "damping schedule, each value half the previous");
  app.add_option("--tol", cfg.truncation_tol, "thermal truncation tolerance");
  app.add_flag("--no-doubling", no_doubling, "skip the node-doubling error estimate");
  app.add_option("--format", format, "csv or json");
  app.add_option("--output,-o", cfg.output, "output file; standard output when absent");
  app.add_option("--precision", cfg.precision, "significant digits in the output");
  app.add_flag("--timing", cfg.timing, "record wall time per point");
  app.add_option("--path", cfg.static_path, "static: interval, step or sine");
  app.add_option("--kernel", cfg.kernel, "kernel-dump: L, V, W, theta or K");
  app.add_option("--y", y, "lax-check: y1,y2,y3,y4");
  app.add_option("--times", times, "lax-check: t1,t2,t3,t4");
  app.add_option("--step", cfg.step, "lax-check: finite-difference step");
  app.add_option("--suite", cfg.suite, "validate: acceptance, properties or all");

  std::string config_path;
  try {
    app.parse(argc, argv);
    if (auto* c = app.get_config_ptr(); c && c->count() > 0) config_path = c->as<std::string>();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string where = "command line:1";
    for (int i = 1; i < argc; ++i)
      if (std::string(argv[i]) == "--config" && i + 1 < argc) where = std::string(argv[i + 1]) + ":1";
    std::cerr << where << ": config error: " << e.what() << "\n";
    return 1;
  }

  try {
    cfg.command = parse_command(command);
    if (eps == "+" || eps == "+1" || eps == "1")
      cfg.boundary = BoundaryKind::Neumann;
    else if (eps == "-" || eps == "-1")
      cfg.boundary = BoundaryKind::Dirichlet;
    else
      throw ConfigError("eps", "eps: expected + or -");
    for (auto [dst, src, name] : {std::tuple{&cfg.x1, &x1, "x1"}, {&cfg.x2, &x2, "x2"}, {&cfg.t, &t, "t"},
                                  {&cfg.T, &T, "T"}, {&cfg.h, &h, "h"}, {&cfg.D, &D, "D"}, {&cfg.L, &L, "L"}}) {
      try {
        *dst = Range::parse(*src);
      } catch (const ConfigError& e) {
        throw ConfigError(name, std::string(name) + ": " + e.what());
      }
    }
    cfg.damping = parse_list(damping, "damping");
    cfg.y = parse_list(y, "y");
    cfg.times = parse_list(times, "times");
    cfg.format = parse_format(format);
    cfg.node_doubling = !no_doubling;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << locate(e.option, config_path, argc, argv) << ": config error: " << e.what() << "\n";
    return 1;
  }
  return run(cfg, std::cout, std::cerr);
}
