#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "linevo/errors.hpp"
#include "linevo/symmetry.hpp"

namespace linevo::cli {

AnsatzSpace GlobalOptions::ansatz() const {
  if (ansatz_degree < 0) throw InputError("--ansatz-degree must be nonnegative");
  AnsatzSpace a;
  a.kmax = ansatz_degree;
  a.rates.clear();
  std::stringstream ss(exp_rates);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) a.rates.push_back(read_rational(json(item)));
  return a;
}

namespace {

std::string verdict_name(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::Zero: return "zero";
    case ZeroVerdict::NonZero: return "nonzero";
    case ZeroVerdict::Unknown: return "unknown";
  }
  return "?";
}

json gauge_json(const GaugeReport& rep) {
  json out;
  out["target"] = target_form_name(rep.target);
  out["steps"] = rep.steps;
  json chain = json::array();
  for (const auto& tr : rep.chain) chain.push_back(write_transformation(tr));
  out["chain"] = chain;
  json checks = json::array();
  for (auto v : rep.residual_checks) checks.push_back(verdict_name(v));
  out["residual_checks"] = checks;
  return out;
}

void append(GaugeReport& a, const GaugeReport& b) {
  a.chain.insert(a.chain.end(), b.chain.begin(), b.chain.end());
  a.steps.insert(a.steps.end(), b.steps.begin(), b.steps.end());
  a.residual_checks.insert(a.residual_checks.end(), b.residual_checks.begin(), b.residual_checks.end());
  a.target = b.target;
}

Expr opt_expr(const std::string& s, const EquationDoc& doc) { return read_expr(json(s), doc.symbols, doc.values); }

json solutions_json(const std::vector<Solution>& sols, const GridSpec& grid) {
  json arr = json::array();
  for (const auto& s : sols) arr.push_back(write_solution(s, grid));
  return arr;
}

}  // namespace

json cmd_classify(const EquationDoc& doc, const GlobalOptions& g) {
  json out;
  ReducedEquation eq;
  if (doc.reduced) {
    eq = *doc.reduced;
  } else {
    auto [red, rep] = gauge_to_reduced(doc.general);
    eq = red;
    out["gauge"] = gauge_json(rep);
  }
  Classification c = classify(eq, g.ansatz());
  const auto& alg = c.algebra;
  out["case"] = alg.case_label;
  out["dim"] = alg.dim();
  out["signature"] = {alg.signature.k0, alg.signature.k1, alg.signature.k2};
  json basis = json::array();
  std::string names;
  for (const auto& q : alg.basis) {
    basis.push_back(q.str());
    names += (names.empty() ? "" : ",") + q.str();
  }
  out["basis"] = basis;
  out["ansatz"] = c.space.str();
  out["caveats"] = c.caveats;
  BoundsVerdict b = signature_bounds_check(alg);
  out["bounds"] = {{"ok", b.ok}, {"violations", b.violations}};
  out["summary"] = "case " + alg.case_label + "; dim " + std::to_string(alg.dim()) + "; basis " + names;
  out["equation"] = write_reduced(eq, doc);
  return out;
}

json cmd_symmetry_check(const EquationDoc& doc, const json& field) {
  const ReducedEquation& eq = doc.need_reduced("symmetry-check");
  VectorField q = read_field(field, doc);
  SymmetryCheck chk = verify_symmetry(eq, q);
  json out;
  out["field"] = write_field(q);
  out["holds"] = holds_name(chk.holds);
  json res = json::array();
  for (const auto& r : chk.residuals.R) res.push_back(r.str());
  out["residuals"] = res;
  if (chk.residuals.lin) out["linear_residual"] = chk.residuals.lin->str();
  return out;
}

json cmd_transform(const EquationDoc& doc, const json& transformation) {
  EquivTransformation tr = read_transformation(transformation, doc);
  EvolutionEquation img = pushforward_equation(doc.general, tr);
  return write_equation(img, doc);
}

json cmd_gauge(const EquationDoc& doc, const std::string& target, const std::string& particular) {
  json out;
  std::optional<Expr> w;
  if (!particular.empty()) w = opt_expr(particular, doc);
  if (target == "leading") {
    auto [eq, rep] = gauge_leading(doc.general);
    out["equation"] = write_equation(eq, doc);
    out["report"] = gauge_json(rep);
  } else if (target == "reduced-inhomogeneous") {
    auto [e1, rep] = gauge_leading(doc.general);
    auto [e2, rep2] = gauge_subleading(e1);
    append(rep, rep2);
    out["equation"] = write_equation(e2, doc);
    out["report"] = gauge_json(rep);
  } else if (target == "reduced") {
    auto [eq, rep] = gauge_to_reduced(doc.general, w);
    out["equation"] = write_reduced(eq, doc);
    out["report"] = gauge_json(rep);
  } else {
    throw InputError("unknown gauge target \"" + target + "\" (leading, reduced-inhomogeneous, reduced)");
  }
  return out;
}

json cmd_solve(const EquationDoc& doc, const SolveOptions& o, const GlobalOptions&) {
  const ReducedEquation& eq = doc.need_reduced("solve");
  GridSpec grid = doc.default_grid();
  if (!o.grid.empty()) grid = read_grid(json::parse(o.grid), grid);
  json out;
  out["equation"] = write_reduced(eq, doc);
  out["method"] = o.method;
  std::vector<Solution> sols;
  if (o.method == "D1") {
    LieReduction lr = lie_reduction(eq, VectorField::D(Expr(1)));
    out["ansatz"] = lr.ansatz;
    out["ode"] = lr.ode.str();
    if (!lr.ode.constant_coefficients()) out["note"] = "the reduced ODE has nonconstant coefficients and is returned unsolved";
    sols = lr.solutions;
  } else if (o.method == "P1I") {
    std::optional<Rational> k;
    if (!o.k.empty()) k = read_rational(json(o.k));
    sols.push_back(reduce_P1Iphi(eq, k));
    out["ansatz"] = "u = exp(phi x) v(t)";
  } else if (o.method == "poly-t") {
    out["ansatz"] = "u = sum_{s<=" + std::to_string(o.N) + "} v^s(x) t^s";
    if (!o.top.empty()) {
      sols.push_back(polynomial_t_solution(eq, o.N, opt_expr(o.top, doc)));
    } else {
      SolutionFamily fam = polynomial_t_solutions(eq, o.N, o.numeric_fallback);
      sols = fam.basis;
      if (fam.general) {
        out["general"] = write_solution(*fam.general, grid);
        out["constants"] = fam.constants;
      }
    }
  } else if (o.method == "nonlocal") {
    NonlocalOptions nl;
    nl.x0 = o.x0;
    nl.t0 = o.t0;
    nl.v0 = o.v0;
    nl.phi_shift = read_rational(json(o.phi_shift));
    if (!o.grid.empty()) nl.grid = read_grid(json::parse(o.grid), nl.grid);
    Solution seed;
    seed.expr = o.seed.empty() ? Expr() : opt_expr(o.seed, doc);
    seed.fn = as_function(seed.expr);
    certify(seed, eq);
    sols.push_back(generate_nonlocal(eq, seed, nl));
  } else if (o.method == "gen-reduction") {
    ReductionSpec sp;
    if (o.family == "D")
      sp.family = ReductionSpec::Family::D;
    else if (o.family == "P")
      sp.family = ReductionSpec::Family::P;
    else
      throw InputError("--family must be D or P");
    sp.complex_pair = o.complex_pair;
    sp.lambda = read_rational(json(o.lambda));
    sp.mu = read_rational(json(o.mu));
    sp.nu = read_rational(json(o.nu));
    sp.phi_shift = read_rational(json(o.phi_shift));
    sp.N = o.N;
    sp.numeric_fallback = o.numeric_fallback;
    sp.base_point = sp.family == ReductionSpec::Family::D ? grid.x0 : grid.t0;
    GeneralizedReduction gr = generalized_reduction(eq, sp);
    out["field"] = gr.field.str();
    out["recursion_operator"] = gr.recursion_operator;
    out["condition"] = gr.condition;
    out["ansatz"] = gr.ansatz;
    json sys = json::array();
    for (const auto& c : gr.system) sys.push_back(c.str());
    out["system"] = sys;
    sols = gr.solutions;
  } else if (o.method == "act") {
    if (o.field.empty() || o.seed.empty()) throw InputError("--method act needs --field and --seed");
    VectorField q = read_field(json(o.field), doc);
    Solution seed;
    seed.expr = opt_expr(o.seed, doc);
    seed.fn = as_function(seed.expr);
    certify(seed, eq);
    if (!seed.exact) throw InputError("the seed " + seed.expr.str() + " is not a solution");
    sols.push_back(act_symmetry(q, seed, eq));
  } else {
    throw InputError("unknown method \"" + o.method + "\" (D1, P1I, poly-t, nonlocal, gen-reduction, act)");
  }
  out["solutions"] = solutions_json(sols, grid);
  return out;
}

namespace {

// Grid values as a function; only lattice points are accepted.
RealFn lattice_fn(const json& s, GridSpec* coarse) {
  if (!s.contains("grid") || !s.contains("values")) throw InputError("numeric solution without grid or values");
  GridSpec g = read_grid(s["grid"], GridSpec{});
  int refine = s["grid"].value("refinement", kRefinement);
  if (refine <= 0) throw InputError("refinement must be positive");
  auto vals = std::make_shared<std::vector<std::vector<double>>>();
  for (const auto& row : s["values"]) vals->push_back(row.get<std::vector<double>>());
  if (vals->empty()) throw InputError("empty value table");
  *coarse = g;
  const long double ht = g.ht / refine, hx = g.hx / refine, t0 = g.t0, x0 = g.x0;
  return [vals, ht, hx, t0, x0](long double t, long double x) {
    long double fi = (t - t0) / ht, fk = (x - x0) / hx;
    long double ri = std::round(fi), rk = std::round(fk);
    if (std::fabs(fi - ri) > 1e-6L || std::fabs(fk - rk) > 1e-6L)
      throw InputError("the verification grid does not match the sampled lattice");
    auto i = static_cast<long>(ri), k = static_cast<long>(rk);
    if (i < 0 || k < 0 || i >= static_cast<long>(vals->size()) || k >= static_cast<long>((*vals)[i].size()))
      throw InputError("the verification grid leaves the sampled box");
    return static_cast<long double>((*vals)[i][k]);
  };
}

json residual_json(const NumericResidual& r) {
  json out;
  out["max_residual"] = r.max_residual;
  if (std::isfinite(r.slope)) out["slope"] = r.slope;
  out["at_roundoff"] = r.at_roundoff;
  out["levels"] = r.levels;
  return out;
}

void collect(const json& j, std::vector<json>& out) {
  if (j.is_array()) {
    for (const auto& e : j) collect(e, out);
  } else if (j.is_object() && j.contains("solutions")) {
    collect(j["solutions"], out);
  } else if (j.is_object()) {
    out.push_back(j);
  } else {
    throw InputError("a solution document must be an object or an array");
  }
}

}  // namespace

json cmd_verify(const EquationDoc& doc, const json& solutions, const std::string& grid_text, const GlobalOptions& g) {
  std::vector<json> items;
  collect(solutions, items);
  GridSpec grid = doc.default_grid();
  if (!grid_text.empty()) grid = read_grid(json::parse(grid_text), grid);
  json reports = json::array();
  for (const auto& s : items) {
    json rep;
    if (s.contains("expr")) {
      SymbolTable syms = doc.symbols;
      Bindings unit = doc.values;
      if (s.contains("parameters")) {
        const json& p = s["parameters"];
        if (p.is_array()) {
          for (const auto& n : p) {
            syms.declare(n.get<std::string>());
            unit[n.get<std::string>()] = Expr(1);
          }
        } else if (p.is_object()) {
          for (const auto& [n, v] : p.items()) {
            syms.declare(n);
            unit[n] = v.is_string() && v.get<std::string>() == "symbolic" ? Expr(1) : Expr(read_rational(v));
          }
        }
      }
      Expr u = parse_expr(s["expr"].get<std::string>(), syms);
      Expr res = residual_symbolic(doc.general, substitute(u, doc.values));
      ZeroVerdict v = is_zero(res);
      rep["expr"] = u.str();
      rep["symbolic_residual"] = v == ZeroVerdict::Zero ? std::string("zero") : res.str();
      rep["verdict"] = verdict_name(v);
      bool ok = v == ZeroVerdict::Zero;
      std::string summary = "symbolic residual: " + rep["symbolic_residual"].get<std::string>();
      if (v != ZeroVerdict::Zero) {
        NumericResidual nr = residual_numeric(doc.general, substitute(u, unit), grid);
        rep["numeric"] = residual_json(nr);
        ok = v == ZeroVerdict::Unknown && nr.max_residual <= g.tolerance;
      }
      rep["ok"] = ok;
      rep["summary"] = summary;
    } else {
      GridSpec coarse;
      RealFn fn = lattice_fn(s, &coarse);
      if (!grid_text.empty()) coarse = read_grid(json::parse(grid_text), coarse);
      coarse.value_eps = std::numeric_limits<double>::epsilon();
      NumericResidual nr = residual_numeric(doc.general, fn, coarse);
      rep["numeric"] = residual_json(nr);
      bool slope_ok = !std::isfinite(nr.slope) || std::fabs(nr.slope - coarse.order) <= 0.5;
      rep["ok"] = nr.max_residual <= g.tolerance && slope_ok;
      std::ostringstream ss;
      ss << "numeric residual: " << nr.max_residual;
      if (std::isfinite(nr.slope)) ss << ", slope " << nr.slope;
      rep["summary"] = ss.str();
    }
    reports.push_back(rep);
  }
  json out;
  out["tolerance"] = g.tolerance;
  out["reports"] = reports;
  return out;
}

int exit_code_of(const std::exception_ptr& e, std::string* message) {
  try {
    std::rethrow_exception(e);
  } catch (const ParseError& x) {
    *message = std::string("parse error: ") + x.what();
    return 2;
  } catch (const InputError& x) {
    *message = std::string("input error: ") + x.what();
    return 2;
  } catch (const DomainError& x) {
    *message = std::string("domain error: ") + x.what();
    return 2;
  } catch (const nlohmann::json::exception& x) {
    *message = std::string("document error: ") + x.what();
    return 2;
  } catch (const std::invalid_argument& x) {
    *message = std::string("input error: ") + x.what();
    return 2;
  } catch (const UnsupportedError& x) {
    *message = std::string("unsupported: ") + x.what();
    return 3;
  } catch (const std::exception& x) {
    *message = std::string("internal error: ") + x.what();
    return 4;
  } catch (...) {
    *message = "internal error";
    return 4;
  }
}

namespace {

std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline JSON, a file, or (when raw_ok) the text itself as a JSON string.
json load_json_arg(const std::string& arg, std::istream& in, bool raw_ok) {
  if (arg == "-") return json::parse(slurp(in));
  auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return json::parse(arg);
  std::ifstream f(arg);
  if (f) return json::parse(slurp(f));
  if (raw_ok) return json(arg);
  throw InputError("cannot open " + arg);
}

using Job = std::function<json(const EquationDoc&)>;

// One document or a batch; failures are isolated per entry.
int run_batch(const json& input, const Job& job, int jobs, json* result, std::ostream& err) {
  if (!input.is_array()) {
    *result = job(read_equation(input));
    return 0;
  }
  const std::size_t n = input.size();
  std::vector<json> out(n);
  std::vector<int> codes(n, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        out[i] = job(read_equation(input[i]));
      } catch (...) {
        std::string msg;
        codes[i] = exit_code_of(std::current_exception(), &msg);
        out[i] = {{"error", {{"exit_code", codes[i]}, {"message", msg}}}};
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  *result = json::array();
  int code = 0;
  for (std::size_t i = 0; i < n; ++i) {
    result->push_back(out[i]);
    if (codes[i]) err << "entry " << i << ": " << out[i]["error"]["message"].get<std::string>() << "\n";
    code = std::max(code, codes[i]);
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"group classification and exact solutions of linear evolution equations", "linevo"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::string output;
  app.add_option("--ansatz-degree", g.ansatz_degree, "largest power of t in the symmetry ansatz")->capture_default_str();
  app.add_option("--exp-rates", g.exp_rates, "comma-separated exponential rates of the ansatz")->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "numeric residual tolerance")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads for batch documents")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("-o,--output", output, "write the report to a file instead of stdout");

  std::string doc_arg = "-";
  auto add_doc = [&](CLI::App* c) { c->add_option("document", doc_arg, "equation document (file, inline JSON or -)"); };

  auto* classify_c = app.add_subcommand("classify", "symmetry classification of an equation");
  add_doc(classify_c);

  std::string field;
  auto* sym_c = app.add_subcommand("symmetry-check", "check a vector field against the classifying conditions");
  add_doc(sym_c);
  sym_c->add_option("--field", field, "vector field: \"D(1) + P(t)\", a JSON object or a file")->required();

  std::string transformation;
  auto* tr_c = app.add_subcommand("transform", "apply an equivalence transformation");
  add_doc(tr_c);
  tr_c->add_option("--transformation,-t", transformation, "transformation document")->required();

  std::string target = "reduced", particular;
  auto* gauge_c = app.add_subcommand("gauge", "gauge to a normalized form");
  add_doc(gauge_c);
  gauge_c->add_option("--target", target, "leading, reduced-inhomogeneous or reduced")->capture_default_str();
  gauge_c->add_option("--particular", particular, "particular solution used to remove B");

  SolveOptions so;
  auto* solve_c = app.add_subcommand("solve", "exact and numeric solutions");
  add_doc(solve_c);
  solve_c->add_option("--method", so.method, "D1, P1I, poly-t, nonlocal, gen-reduction or act")->required();
  solve_c->add_option("--N", so.N, "polynomial degree in t (poly-t) or multiplicity minus one")->capture_default_str();
  solve_c->add_option("--top", so.top, "prescribed top layer v^N (poly-t)");
  solve_c->add_option("--k", so.k, "integration constant of phi (P1I); symbolic when omitted");
  solve_c->add_option("--family", so.family, "D or P (gen-reduction)")->capture_default_str();
  solve_c->add_flag("--complex", so.complex_pair, "complex pair mu +- i nu");
  solve_c->add_option("--lambda", so.lambda, "real root")->capture_default_str();
  solve_c->add_option("--mu", so.mu, "real part of the complex pair")->capture_default_str();
  solve_c->add_option("--nu", so.nu, "imaginary part, positive")->capture_default_str();
  solve_c->add_option("--phi-shift", so.phi_shift, "constant added to phi")->capture_default_str();
  solve_c->add_flag("--numeric-fallback", so.numeric_fallback, "integrate nonconstant systems with RK4");
  solve_c->add_option("--seed", so.seed, "known solution (nonlocal, act)");
  solve_c->add_option("--field", so.field, "symmetry (act)");
  solve_c->add_option("--x0", so.x0, "base point in x (nonlocal)");
  solve_c->add_option("--t0", so.t0, "base point in t (nonlocal)");
  solve_c->add_option("--v0", so.v0, "homogeneous amplitude (nonlocal)");
  solve_c->add_option("--grid", so.grid, "grid JSON for numeric output");

  std::string solution, grid_text;
  auto* verify_c = app.add_subcommand("verify", "residual of a solution");
  add_doc(verify_c);
  verify_c->add_option("--solution,-s", solution, "solution document, solve output, or array")->required();
  verify_c->add_option("--grid", grid_text, "grid JSON for numeric residuals");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  json result;
  int code = 0;
  try {
    if (doc_arg == "-" && (sym_c->parsed() || tr_c->parsed() || verify_c->parsed()) &&
        (field == "-" || transformation == "-" || solution == "-"))
      throw InputError("stdin can carry only one document");
    json input = load_json_arg(doc_arg, in, false);
    Job job;
    if (classify_c->parsed()) {
      job = [&](const EquationDoc& d) { return cmd_classify(d, g); };
    } else if (sym_c->parsed()) {
      json f = load_json_arg(field, in, true);
      job = [f](const EquationDoc& d) { return cmd_symmetry_check(d, f); };
    } else if (tr_c->parsed()) {
      json t = load_json_arg(transformation, in, false);
      job = [t](const EquationDoc& d) { return cmd_transform(d, t); };
    } else if (gauge_c->parsed()) {
      job = [&](const EquationDoc& d) { return cmd_gauge(d, target, particular); };
    } else if (solve_c->parsed()) {
      job = [&](const EquationDoc& d) { return cmd_solve(d, so, g); };
    } else {
      json s = load_json_arg(solution, in, false);
      job = [&, s](const EquationDoc& d) { return cmd_verify(d, s, grid_text, g); };
    }
    code = run_batch(input, job, g.jobs, &result, err);
  } catch (...) {
    std::string msg;
    code = exit_code_of(std::current_exception(), &msg);
    err << msg << "\n";
    return code;
  }
  if (output.empty()) {
    out << result.dump(2) << "\n";
  } else {
    std::ofstream f(output);
    if (!f) {
      err << "input error: cannot write " << output << "\n";
      return 2;
    }
    f << result.dump(2) << "\n";
  }
  return code;
}

}  // namespace linevo::cli
