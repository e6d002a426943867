#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace subspde::tools {

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;  // first few failures
};

// Oracle suites behind `subspde verify`:
//   envelope  closed-form F^{-1} against scan-and-bisect inversion
//   gamma     fixed-point oracle against 2 F^{-1}(k) + 2b on random inputs
//   h         quadrature of h(t) against the library closed forms
//   noise     Monte Carlo covariance of sampled noise slices
std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

}  // namespace subspde::tools
