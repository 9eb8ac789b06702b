#pragma once
#include <string>
#include <vector>

namespace bosegas {

struct CheckResult {
  std::string key;
  int criterion = 0;  // acceptance criterion number, 0 for module properties
  std::string module;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double runtime_ms = 0.0;
};

enum class Suite { Acceptance, Properties, All };
Suite parse_suite(const std::string& s);

std::vector<std::string> suite_keys(Suite s);
CheckResult run_check(const std::string& key);
std::vector<CheckResult> run_suite(Suite s);

}  // namespace bosegas
