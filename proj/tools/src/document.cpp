#include "document.hpp"

#include <cctype>
#include <cmath>

#include "linevo/errors.hpp"

namespace linevo::cli {

std::string form_name(Form f) {
  switch (f) {
    case Form::General: return "general";
    case Form::ReducedInhomogeneous: return "reduced-inhomogeneous";
    case Form::Reduced: return "reduced";
  }
  return "?";
}

Rational read_rational(const json& j) {
  if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>())));
  if (j.is_number_float()) throw InputError("exact numbers must be integers or strings such as \"1/3\"");
  if (!j.is_string()) throw InputError("expected a rational, got " + j.dump());
  std::string s = j.get<std::string>();
  Rational q;
  try {
    std::string t;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty() || q.set_str(t, 10) != 0) throw InputError("");
    if (q.get_den() == 0) throw DomainError("zero denominator in " + s);
    q.canonicalize();
  } catch (const DomainError&) {
    throw;
  } catch (...) {
    throw InputError("not a rational number: \"" + s + "\"");
  }
  return q;
}

std::string rational_json(const Rational& q) { return rational_str(q); }

namespace {

double read_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  return read_rational(j).get_d();
}

std::string expr_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw InputError("expected an expression string, got " + j.dump());
}

void read_parameters(const json& j, SymbolTable& syms, Bindings& values, json& echo) {
  if (j.is_null()) return;
  if (!j.is_object()) throw InputError("\"parameters\" must be an object");
  for (const auto& [name, v] : j.items()) {
    if (name == "t" || name == "x") throw InputError("t and x are reserved and cannot be parameters");
    syms.declare(name);
    echo[name] = v;
    if (v.is_string() && v.get<std::string>() == "symbolic") continue;
    values[name] = Expr(read_rational(v));
  }
}

}  // namespace

Expr read_expr(const json& j, const SymbolTable& syms, const Bindings& values) {
  Expr e = parse_expr(expr_text(j), syms);
  return values.empty() ? e : substitute(e, values);
}

const ReducedEquation& EquationDoc::need_reduced(const std::string& cmd) const {
  if (!reduced) throw InputError(cmd + " needs a reduced equation (u_t = u_r + A^l u_l); run gauge first");
  return *reduced;
}

GridSpec EquationDoc::default_grid() const {
  GridSpec g;
  if (domain.is_object()) g = read_grid(domain, g);
  return g;
}

EquationDoc read_equation(const json& j) {
  if (!j.is_object()) throw InputError("an equation document must be a JSON object");
  EquationDoc d;
  if (!j.contains("order")) throw InputError("equation document without \"order\"");
  const json& o = j["order"];
  int r = o.is_string() ? std::stoi(o.get<std::string>()) : o.get<int>();
  std::string form = j.value("form", "reduced");
  if (form == "general")
    d.form = Form::General;
  else if (form == "reduced-inhomogeneous")
    d.form = Form::ReducedInhomogeneous;
  else if (form == "reduced")
    d.form = Form::Reduced;
  else
    throw InputError("unknown form \"" + form + "\"");
  if (r < 3) throw InputError("order must be at least 3");
  read_parameters(j.contains("parameters") ? j["parameters"] : json(), d.symbols, d.values, d.parameters);
  if (j.contains("domain")) d.domain = j["domain"];

  const int top = d.form == Form::General ? r : r - 2;
  const bool has_b = d.form != Form::Reduced;
  std::vector<Expr> A(top + 1);
  Expr B;
  const json coeffs = j.value("coefficients", json::object());
  if (!coeffs.is_object()) throw InputError("\"coefficients\" must be an object");
  for (const auto& [name, v] : coeffs.items()) {
    if (name == "B") {
      if (!has_b) throw InputError("B is not a coefficient of the reduced form; use form reduced-inhomogeneous");
      B = read_expr(v, d.symbols, d.values);
      continue;
    }
    int l = -1;
    if (name.size() > 1 && name[0] == 'A' && std::all_of(name.begin() + 1, name.end(), ::isdigit)) l = std::stoi(name.substr(1));
    if (l < 0 || l > top)
      throw InputError("coefficient " + name + " does not belong to the " + form + " form of order " + std::to_string(r));
    A[l] = read_expr(v, d.symbols, d.values);
  }
  d.general.r = r;
  if (d.form == Form::General) {
    d.general.A = A;
    d.general.B = B;
  } else {
    ReducedEquation red{r, A};
    d.general = embed_reduced(red);
    d.general.B = B;
    if (d.form == Form::Reduced) d.reduced = red;
  }
  d.general.validate();
  if (d.form == Form::General) d.reduced = as_reduced(d.general);
  return d;
}

namespace {

json params_echo(const EquationDoc& like) {
  json p = json::object();
  for (const auto& [k, v] : like.parameters.items())
    if (v.is_string() && v.get<std::string>() == "symbolic") p[k] = v;
  return p;
}

}  // namespace

json write_reduced(const ReducedEquation& eq, const EquationDoc& like) {
  json out;
  out["order"] = eq.r;
  out["form"] = "reduced";
  json c = json::object();
  for (int l = 0; l <= eq.r - 2; ++l) c["A" + std::to_string(l)] = eq.A[l].str();
  out["coefficients"] = c;
  json p = params_echo(like);
  if (!p.empty()) out["parameters"] = p;
  return out;
}

json write_equation(const EvolutionEquation& eq, const EquationDoc& like) {
  if (auto red = as_reduced(eq)) return write_reduced(*red, like);
  json out;
  out["order"] = eq.r;
  const bool inhom = eq.A[eq.r].is_one() && eq.A[eq.r - 1].is_zero();
  out["form"] = inhom ? "reduced-inhomogeneous" : "general";
  json c = json::object();
  const int top = inhom ? eq.r - 2 : eq.r;
  for (int l = 0; l <= top; ++l) c["A" + std::to_string(l)] = eq.A[l].str();
  c["B"] = eq.B.str();
  out["coefficients"] = c;
  json p = params_echo(like);
  if (!p.empty()) out["parameters"] = p;
  return out;
}

EquivTransformation read_transformation(const json& j, const EquationDoc& doc) {
  if (!j.is_object()) throw InputError("a transformation document must be a JSON object");
  SymbolTable syms = doc.symbols;
  Bindings values = doc.values;
  json echo;
  read_parameters(j.contains("parameters") ? j["parameters"] : json(), syms, values, echo);
  for (const auto& [k, v] : j.items())
    if (k != "T" && k != "X0" && k != "U1" && k != "U0" && k != "eps" && k != "parameters")
      throw InputError("unknown transformation field " + k);
  EquivTransformation tr;
  if (j.contains("T")) tr.T = read_expr(j["T"], syms, values);
  if (j.contains("X0")) tr.X0 = read_expr(j["X0"], syms, values);
  if (j.contains("U1")) tr.U1 = read_expr(j["U1"], syms, values);
  if (j.contains("U0")) tr.U0 = read_expr(j["U0"], syms, values);
  if (j.contains("eps")) {
    int e = j["eps"].is_string() ? std::stoi(j["eps"].get<std::string>()) : j["eps"].get<int>();
    if (e != 1 && e != -1) throw InputError("eps must be 1 or -1");
    tr.eps = e;
  }
  return tr;
}

json write_transformation(const GeneralTransformation& tr) {
  json out;
  out["T"] = tr.T.str();
  out["X"] = tr.X.str();
  out["U1"] = tr.U1.str();
  out["U0"] = tr.U0.str();
  return out;
}

namespace {

VectorField parse_compact(const std::string& s, const EquationDoc& doc) {
  VectorField q;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == '+')) ++i;
  };
  skip();
  if (i == s.size()) throw InputError("empty vector field");
  while (i < s.size()) {
    char tag = s[i++];
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (std::string("DPIZ").find(tag) == std::string::npos || i >= s.size() || s[i] != '(')
      throw ParseError("expected D(..), P(..), I(..) or Z(..) in vector field", i);
    std::size_t start = ++i;
    int depth = 1;
    while (i < s.size() && depth > 0) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      ++i;
    }
    if (depth != 0) throw ParseError("unbalanced parenthesis in vector field", start);
    Expr e = read_expr(json(s.substr(start, i - 1 - start)), doc.symbols, doc.values);
    switch (tag) {
      case 'D': q.tau += e; break;
      case 'P': q.chi += e; break;
      case 'I': q.phi += e; break;
      default: q.eta0 = q.eta0 ? *q.eta0 + e : e;
    }
    skip();
  }
  return q;
}

}  // namespace

VectorField read_field(const json& j, const EquationDoc& doc) {
  if (j.is_string()) return parse_compact(j.get<std::string>(), doc);
  if (!j.is_object()) throw InputError("a vector field is a string such as \"D(1) + P(t)\" or an object");
  VectorField q;
  for (const auto& [k, v] : j.items()) {
    Expr e = read_expr(v, doc.symbols, doc.values);
    if (k == "tau")
      q.tau = e;
    else if (k == "chi")
      q.chi = e;
    else if (k == "phi")
      q.phi = e;
    else if (k == "eta0")
      q.eta0 = e;
    else
      throw InputError("unknown vector field component " + k);
  }
  return q;
}

json write_field(const VectorField& q) {
  json out;
  out["text"] = q.str();
  out["tau"] = q.tau.str();
  out["chi"] = q.chi.str();
  out["phi"] = q.phi.str();
  if (q.eta0) out["eta0"] = q.eta0->str();
  return out;
}

GridSpec read_grid(const json& j, GridSpec g) {
  if (!j.is_object()) throw InputError("a grid must be a JSON object");
  auto range = [&](const char* key, double& a, double& b) {
    if (!j.contains(key)) return;
    const json& v = j[key];
    if (!v.is_array() || v.size() != 2) throw InputError(std::string("grid \"") + key + "\" must be [a, b]");
    a = read_real(v[0]);
    b = read_real(v[1]);
  };
  range("t", g.t0, g.t1);
  range("x", g.x0, g.x1);
  if (j.contains("ht")) g.ht = read_real(j["ht"]);
  if (j.contains("hx")) g.hx = read_real(j["hx"]);
  if (j.contains("h")) g.ht = g.hx = read_real(j["h"]);
  if (j.contains("order")) g.order = j["order"].get<int>();
  if (j.contains("max_samples")) g.max_samples = j["max_samples"].get<int>();
  if (j.contains("singular_x")) {
    g.singular_x.clear();
    for (const auto& v : j["singular_x"]) g.singular_x.push_back(read_real(v));
  }
  return g;
}

json write_grid(const GridSpec& g) {
  json out;
  out["t"] = {g.t0, g.t1};
  out["x"] = {g.x0, g.x1};
  out["ht"] = g.ht;
  out["hx"] = g.hx;
  out["order"] = g.order;
  if (!g.singular_x.empty()) out["singular_x"] = g.singular_x;
  return out;
}

json write_solution(const Solution& s, const GridSpec& grid) {
  json out;
  out["kind"] = s.kind == Solution::Kind::Symbolic ? "symbolic" : "numeric";
  out["method"] = s.method;
  json cert;
  cert["type"] = s.certificate();
  if (!s.exact) {
    cert["max_residual"] = s.max_residual;
    if (std::isfinite(s.slope)) cert["slope"] = s.slope;
  }
  if (s.kind == Solution::Kind::Symbolic) {
    out["expr"] = s.expr.str();
    out["parameters"] = s.parameters;
    out["certificate"] = cert;
    return out;
  }
  if (!s.expr.is_zero()) out["approximation"] = s.expr.str();
  GridSpec g = s.grid ? *s.grid : grid;
  json gj = write_grid(g);
  gj["refinement"] = kRefinement;
  out["grid"] = gj;
  const long double ht = g.ht / kRefinement, hx = g.hx / kRefinement;
  const int nt = static_cast<int>(std::lround((g.t1 - g.t0) / ht)), nx = static_cast<int>(std::lround((g.x1 - g.x0) / hx));
  json rows = json::array();
  for (int i = 0; i <= nt; ++i) {
    json row = json::array();
    for (int k = 0; k <= nx; ++k) row.push_back(static_cast<double>(s.fn(g.t0 + i * ht, g.x0 + k * hx)));
    rows.push_back(row);
  }
  out["values"] = rows;
  out["certificate"] = cert;
  return out;
}

}  // namespace linevo::cli
