#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "document.hpp"
#include "linevo/symmetry.hpp"

namespace linevo::cli {

struct GlobalOptions {
  int ansatz_degree = 3;
  std::string exp_rates = "0,1,-1";
  double tolerance = 1e-6;
  int jobs = 1;

  AnsatzSpace ansatz() const;
};

struct SolveOptions {
  std::string method;  // D1, P1I, poly-t, nonlocal, gen-reduction, act
  int N = 0;
  std::string top;     // poly-t: prescribed v^N
  std::string k;       // P1I: integration constant, symbolic if empty
  std::string family = "D";
  bool complex_pair = false;
  std::string lambda = "0", mu = "0", nu = "1", phi_shift = "0";
  bool numeric_fallback = false;
  std::string seed;    // nonlocal / act
  std::string field;   // act
  double x0 = 0, t0 = 0, v0 = 0;
  std::string grid;    // JSON text
};

json cmd_classify(const EquationDoc& doc, const GlobalOptions& g);
json cmd_symmetry_check(const EquationDoc& doc, const json& field);
json cmd_transform(const EquationDoc& doc, const json& transformation);
json cmd_gauge(const EquationDoc& doc, const std::string& target, const std::string& particular);
json cmd_solve(const EquationDoc& doc, const SolveOptions& o, const GlobalOptions& g);
json cmd_verify(const EquationDoc& doc, const json& solutions, const std::string& grid, const GlobalOptions& g);

/// Exit codes: 0 ok, 2 input, 3 unsupported, 4 internal.
int exit_code_of(const std::exception_ptr& e, std::string* message);

/// Full command line; returns the exit code. Reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace linevo::cli
