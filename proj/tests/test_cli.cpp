#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "bosegas/correlators.hpp"
#include "bosegas/run.hpp"
#include "bosegas/validation.hpp"

using namespace bosegas;

static RunConfig correlate(double x1, double x2, double t) {
  RunConfig c;
  c.x1 = Range::scalar(x1);
  c.x2 = Range::scalar(x2);
  c.t = Range::scalar(t);
  return c;
}

static int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

TEST_CASE("Range parsing") {
  auto r = Range::parse("0.25");
  CHECK(r.count == 1);
  CHECK(r.values() == std::vector<double>{0.25});
  auto g = Range::parse("0:1:5");
  CHECK(g.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(Range::parse(g.str()).values() == g.values());
  for (const char* bad : {"", "a", "0:1", "0:1:0", "0:1:2.5", "0:1:2:3", "1:2:1", "1e"})
    CHECK_THROWS_AS(Range::parse(bad), ConfigError);
}

TEST_CASE("command and format names") {
  for (auto c : {Command::Correlate, Command::Static, Command::Boundary, Command::Density, Command::KernelDump,
                 Command::Oracle, Command::LaxCheck, Command::Validate})
    CHECK(parse_command(command_name(c)) == c);
  CHECK_THROWS_AS(parse_command("plot"), ConfigError);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("config validation names the offending option") {
  auto option_of = [](RunConfig c) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      return e.option;
    }
    return std::string();
  };
  RunConfig c = correlate(0.5, 1.0, 0.3);
  CHECK(option_of(c).empty());
  RunConfig bad = c;
  bad.n = 4;
  CHECK(option_of(bad) == "n");
  bad = c;
  bad.damping = {1e-3, 4e-4};
  CHECK(option_of(bad) == "damping");
  bad = c;
  bad.D = Range::scalar(0.0);
  CHECK(option_of(bad) == "D");
  bad = c;
  bad.x2 = Range{-1.0, 1.0, 3};
  CHECK(option_of(bad) == "x2");
  bad = correlate(0.5, 0.5, 0.0);
  CHECK(option_of(bad) == "t");
  bad = c;
  bad.command = Command::Boundary;
  CHECK(option_of(bad) == "x1");
  bad = c;
  bad.command = Command::KernelDump;
  bad.t = Range{0.0, 1.0, 2};
  CHECK(option_of(bad) == "t");
  bad = c;
  bad.command = Command::Validate;
  bad.suite = "everything";
  CHECK(option_of(bad) == "suite");
}

TEST_CASE("correlate evaluates the correlation of the grid point") {
  RunConfig c = correlate(0.5, 1.0, 0.3);
  auto out = execute(c);
  REQUIRE(out.records.size() == 1);
  CHECK(out.exit_code == 0);
  auto ref = correlation(PhysicalPoint{0.5, 1.0, 0.3, BoundaryKind::Neumann, ThermalParams{1.0, 0.0}, 1.0});
  CHECK(out.records[0].value == ref.value);
  CHECK(out.records[0].error_estimate == ref.error_estimate);
  CHECK(out.records[0].flags.empty());
}

TEST_CASE("Dirichlet origin is flagged and vanishes") {
  RunConfig c = correlate(0.0, 1.0, 0.5);
  c.boundary = BoundaryKind::Dirichlet;
  c.T = Range::scalar(0.2);
  auto out = execute(c);
  REQUIRE(out.records.size() == 1);
  CHECK(std::abs(out.records[0].value) <= 1e-12);
  CHECK(out.records[0].flags == std::vector<std::string>{"dirichlet-null"});
}

TEST_CASE("scan order is lexicographic in the input grid") {
  RunConfig c = correlate(0.0, 1.0, 0.3);
  c.x1 = Range{0.1, 0.3, 3};
  c.t = Range{0.2, 0.4, 2};
  c.n = 16;
  auto out = execute(c);
  REQUIRE(out.records.size() == 6);
  std::vector<std::pair<double, double>> seen;
  for (auto& r : out.records) seen.push_back({r.point[1].second, r.point[3].second});
  CHECK(std::is_sorted(seen.begin(), seen.end()));
}

TEST_CASE("JSON output parses back to the emitted records") {
  RunConfig c = correlate(0.4, 1.1, 0.35);
  c.T = Range{0.0, 0.5, 2};
  c.n = 16;
  auto out = execute(c);
  for (int precision : {15, 6}) {
    auto back = parse_json_records(render(out.records, Format::Json, precision));
    REQUIRE(back.size() == out.records.size());
    for (size_t i = 0; i < back.size(); ++i) {
      ResultRecord want = rounded(out.records[i], precision);
      CHECK(back[i].point == want.point);
      CHECK(back[i].value == want.value);
      CHECK(back[i].parts == want.parts);
      CHECK(back[i].error_estimate == want.error_estimate);
      CHECK(back[i].metadata == want.metadata);
      CHECK(back[i] == want);
    }
  }
  RunConfig o;
  o.command = Command::Oracle;
  o.x1 = Range::scalar(0.3);
  o.x2 = Range::scalar(0.9);
  o.L = Range::scalar(3.0);
  auto orc = execute(o);
  auto back = parse_json_records(render(orc.records, Format::Json, 15));
  CHECK(back[0].damping == o.damping);
  CHECK(back[0] == rounded(orc.records[0], 15));
}

TEST_CASE("CSV layout") {
  RunConfig c = correlate(0.5, 1.0, 0.3);
  c.format = Format::Csv;
  std::ostringstream os;
  CHECK(emit(execute(c).records, c, os) == 0);
  std::string s = os.str();
  CHECK(count_lines(s) == 2);
  CHECK(s.rfind("eps,x1,x2,t,T,h,D,value_re,value_im,err,n,runtime_ms,flags\n", 0) == 0);
  c.x2 = Range{1.0, 2.0, 3};
  std::ostringstream os3;
  emit(execute(c).records, c, os3);
  CHECK(count_lines(os3.str()) == 4);
}

TEST_CASE("empty record list is a precondition failure") {
  RunConfig c;
  std::ostringstream os;
  CHECK(emit({}, c, os) == 1);
  CHECK(os.str().empty());
}

TEST_CASE("reruns are byte-identical") {
  RunConfig c = correlate(0.2, 1.0, 0.3);
  c.x1 = Range{0.2, 0.8, 3};
  c.T = Range{0.0, 0.3, 2};
  c.n = 16;
  for (Format f : {Format::Json, Format::Csv}) {
    c.format = f;
    std::ostringstream a, b;
    CHECK(run(c, a, a) == 0);
    CHECK(run(c, b, b) == 0);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("every numeric knob in the metadata affects the output") {
  auto r = run_check("cli-knobs");
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("exit codes") {
  std::ostringstream out, err;
  RunConfig bad = correlate(0.5, 1.0, 0.3);
  bad.n = 2;
  CHECK(run(bad, out, err) == 1);
  CHECK(err.str().find("n: must be >= 8") != std::string::npos);

  RunConfig unwritable = correlate(0.5, 1.0, 0.3);
  unwritable.output = "/nonexistent-dir/out.json";
  CHECK(run(unwritable, out, err) == 3);

  // chirp lattice sums have no damping limit at finite size: a convergence
  // failure, with the records still written and flagged
  RunConfig o;
  o.command = Command::Oracle;
  o.x1 = Range::scalar(0.3);
  o.x2 = Range::scalar(0.9);
  o.t = Range{0.0, 0.3, 2};
  o.L = Range::scalar(3.0);
  o.format = Format::Csv;
  std::ostringstream partial;
  CHECK(run(o, partial, err) == 2);
  std::string s = partial.str();
  CHECK(count_lines(s) == 3);
  CHECK(s.find("convergence-failure") != std::string::npos);

  RunConfig file = correlate(0.5, 1.0, 0.3);
  file.output = "test_cli_out.json";
  CHECK(run(file, out, err) == 0);
  std::remove("test_cli_out.json");
}

TEST_CASE("commands produce records") {
  RunConfig s;
  s.command = Command::Static;
  s.x1 = Range::scalar(0.3);
  s.x2 = Range::scalar(0.9);
  s.T = Range::scalar(0.3);
  CHECK(execute(s).records.size() == 1);
  s.static_path = "sine";
  CHECK(execute(s).records[0].point.back().first == "D");

  RunConfig d;
  d.command = Command::Density;
  d.T = Range{0.0, 1.0, 3};
  auto dens = execute(d).records;
  REQUIRE(dens.size() == 3);
  CHECK(dens[0].value.real() == doctest::Approx(1.0 / 3.14159265358979323846).epsilon(1e-15));

  RunConfig k;
  k.command = Command::KernelDump;
  k.kernel = "L";
  k.x1 = Range::scalar(0.3);
  k.x2 = Range::scalar(0.9);
  k.t = Range::scalar(0.2);
  k.n = 8;
  CHECK(execute(k).records.size() == 256);

  RunConfig b;
  b.command = Command::Boundary;
  b.x2 = Range::scalar(0.7);
  b.t = Range::scalar(0.4);
  b.n = 16;
  auto br = execute(b).records;
  RunConfig g = correlate(0.0, 0.7, 0.4);
  g.n = 16;
  CHECK(std::abs(br[0].value - execute(g).records[0].value) < 1e-10);

  RunConfig l;
  l.command = Command::LaxCheck;
  l.n = 12;
  auto lr = execute(l).records;
  CHECK(lr.size() == 6 + 6 + 16);
}

TEST_CASE("validation suites") {
  CHECK(suite_keys(Suite::Acceptance).size() == 12);
  auto all = suite_keys(Suite::All);
  CHECK(std::set<std::string>(all.begin(), all.end()).size() == all.size());
  CHECK(all.size() == suite_keys(Suite::Acceptance).size() + suite_keys(Suite::Properties).size());
  auto r = run_check("pv-conjugation");
  CHECK(r.pass);
  CHECK(r.criterion == 0);
  CHECK_THROWS_AS(run_check("no-such-check"), ConfigError);
}
