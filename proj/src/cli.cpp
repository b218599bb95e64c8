#include "mockplectic/cli.hpp"

#include "mockplectic/checks.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace mockplectic {

using nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "mockplectic/1";

std::string base_p_digits(mpz_class u, long p, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    mpz_class d = u % p;
    if (d < 0) d += p;
    u = (u - d) / p;
    if (i) s += ' ';
    s += d.get_str();
  }
  return s;
}

ordered_json padic_json(const PadicNumber& x) {
  if (x.is_zero()) return {{"valuation", x.absolute_precision()}, {"digits", ""}, {"precision", 0}};
  return {{"valuation", x.valuation()},
          {"digits", base_p_digits(x.unit(), x.prime(), x.precision())},
          {"precision", x.precision()}};
}

// p^v (a + b s): digit strings of a and b
ordered_json quad_json(const QuadExtNumber& x) {
  if (x.is_zero())
    return {{"valuation", x.absolute_precision()}, {"digits_a", ""}, {"digits_b", ""}, {"precision", 0}};
  return {{"valuation", x.valuation()},
          {"digits_a", base_p_digits(x.unit_a(), x.prime(), x.precision())},
          {"digits_b", base_p_digits(x.unit_b(), x.prime(), x.precision())},
          {"precision", x.precision()}};
}

ordered_json complex_json(const Complex& z, double error) { return {{"re", z.real()}, {"im", z.imag()}, {"error", error}}; }

ordered_json symbol_json(const SymbolValue& v) { return {{"plus", v.plus.get_str()}, {"minus", v.minus.get_str()}}; }

ordered_json quad_rational_json(const QuadRational& x) {
  return {{"a", x.a.get_str()}, {"b", x.b.get_str()}, {"D", x.D.get_str()}};
}

ordered_json gamma_json(const GammaElement& g) {
  return {g.a().get_str(), g.b().get_str(), g.c().get_str(), g.d().get_str()};
}

ordered_json check_json(const CheckResult& c) { return {{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}}; }

ordered_json config_json(const RunConfig& c) {
  ordered_json j{{"command", c.command}, {"curve", c.curve}, {"p", c.p}};
  if (c.command == "lp" || c.command == "mtt" || c.command == "sh-point") j["depth"] = c.depth;
  if (c.command == "tate-q" || c.command == "sh-point") j["prec"] = c.prec;
  if (c.command == "sh-point") {
    j["form"] = c.form;
    j["recognize"] = c.recognize;
  }
  if (c.command == "cm-invariant") {
    j["disc"] = c.disc;
    j["level"] = c.level;
  }
  return j;
}

ordered_json conventions_json(const CurveData& E) {
  return {{"nonresidue", smallest_nonresidue(E.p)},
          {"extension", "K_p = Q_p(s), s^2 = nonresidue"},
          {"digits", "base p, least significant first, of the unit part"},
          {"log_branch", "log_q with log_q(q) = 0"},
          {"symbol_signs", "primitive integral eigensymbols; m+ has m+(0,inf) > 0 when nonzero, otherwise (and for m-) the first nonzero Manin-symbol coordinate is positive"},
          {"torsion_scale", E.torsion},
          {"ap", E.ap}};
}

IntegrationOptions options(const RunConfig& c) {
  IntegrationOptions o;
  o.threads = c.threads;
  return o;
}

ordered_json run_lp(const RunConfig& c, const CurveData& E) {
  auto S = make_symbol(E);
  HarmonicMeasure mu(S, Cusp::rational(0), Cusp::infinity());
  auto iv = interpolation(mu);
  auto lv = lp_value_and_derivative(mu, c.depth, options(c));
  return {{"mu_Zp", symbol_json(iv.total)},
          {"mu_units", symbol_json(iv.units)},
          {"L_p", symbol_json(lv.value)},
          {"L_p_derivative",
           {{"plus", quad_json(lv.derivative.plus)},
            {"minus", quad_json(lv.derivative.minus)},
            {"depth", lv.derivative.depth},
            {"balls", lv.derivative.balls}}}};
}

ordered_json run_tate(const RunConfig& c, const CurveData& E) {
  auto T = tate_period(E, c.prec);
  return {{"q", padic_json(T.q)}, {"ord", T.ord}, {"j_agreement", T.agreement}};
}

ordered_json run_mtt(const RunConfig& c, const CurveData& E) {
  auto S = make_symbol(E);
  auto m = mtt_check(E, S, c.depth, options(c));
  return {{"q", padic_json(m.tate.q)},
          {"J",
           {{"ord", symbol_json(m.J.ord)},
            {"log_plus", quad_json(m.J.log_plus)},
            {"log_minus", quad_json(m.J.log_minus)},
            {"gamma", gamma_json(m.J.gamma)},
            {"base_point_agreement", m.J.base_point_agreement}}},
          {"residuals",
           {{"mtt", m.residual}, {"control", m.control}, {"derivative", m.derivative_residual}}},
          {"expected_ord_factor", m.expected_ord_factor}};
}

RMPoint parse_form(const RunConfig& c) {
  auto f = parse_integers(c.form, 3, "E_FORM");
  try {
    return RMPoint::make(f[0], f[1], f[2], c.p, c.prec);
  } catch (const std::exception& e) {
    throw CliError("E_FORM", e.what());
  }
}

ordered_json kpoint_json(const KPoint& P) { return {{"x", quad_rational_json(P.x)}, {"y", quad_rational_json(P.y)}}; }

ordered_json run_sh(const RunConfig& c, const CurveData& E) {
  auto tau = parse_form(c);
  if (c.depth < 2) throw CliError("E_CONFIG", "sh-point needs depth >= 2");
  auto S = make_symbol(E);
  auto P = stark_heegner(S, tau, c.depth, Cusp::rational(0), options(c));
  auto eps = order_and_gamma(tau);
  ordered_json r{{"form", {tau.A.get_str(), tau.B.get_str(), tau.C.get_str()}},
                 {"D", tau.D.get_str()},
                 {"tau", quad_json(tau.tau)},
                 {"fundamental_unit", {{"x", eps.x.get_str()}, {"y", eps.y.get_str()}, {"form", "(x + y sqrt D) / 2"}}},
                 {"gamma", gamma_json(P.gamma)},
                 {"u_plus", quad_json(P.u_plus)},
                 {"u_minus", quad_json(P.u_minus)},
                 {"log_plus", quad_json(P.log_plus)},
                 {"log_minus", quad_json(P.log_minus)},
                 {"ord", {{"plus", P.ord_plus}, {"minus", P.ord_minus}}},
                 {"self_convergence", P.agreement}};
  if (c.recognize > 0) {
    auto T = tate_period(E, c.prec + 4);
    auto R = recognize_stark_heegner(E, P, T, tau.D, {c.recognize}, 2 * E.torsion, 15);
    ordered_json rec{{"recognized", R.recognized},
                     {"height_bound", R.height_bound.get_str()},
                     {"digits", R.precision}};
    if (R.recognized) {
      rec["point"] = kpoint_json(R.point);
      rec["multiplier"] = R.multiplier;
      rec["component"] = R.component == 0 ? "plus" : "minus";
    }
    ordered_json oracle = ordered_json::array();
    for (const auto& k : R.oracle) oracle.push_back(kpoint_json(k));
    rec["oracle"] = oracle;
    rec["log_ratio_to_oracle"] = R.log_ratio ? ordered_json(R.log_ratio->get_str()) : ordered_json(nullptr);
    r["recognition"] = rec;
  }
  return r;
}

ordered_json run_cm(const RunConfig& c, const CurveData& E) {
  long D = c.disc ? c.disc : default_cm_discriminant(E.p);
  if (c.level < 1) throw CliError("E_CONFIG", "level must be >= 1");
  CMPoint tau;
  try {
    tau = CMPoint::principal(D, E.p, c.prec);
  } catch (const std::exception& e) {
    throw CliError("E_CONFIG", e.what());
  }
  auto ctx = CMContext::make(E, c.threads);
  auto Q = plectic_invariant(ctx, tau, c.level);
  std::vector<Ball> balls;
  for (const auto& t : Q.terms) balls.push_back(t.edge);
  auto vals = edge_values(ctx, tau.tau_inf, balls);
  double scale = ctx.lattice.scale();
  ordered_json edges = ordered_json::array();
  for (size_t i = 0; i < Q.terms.size(); ++i) {
    const auto& t = Q.terms[i];
    edges.push_back({{"edge", t.edge.str()},
                     {"label", quad_json(t.alpha)},
                     {"coefficient", quad_json(t.coefficient)},
                     {"value", complex_json(t.value, vals[i].error_bound)},
                     {"fricke", vals[i].fricke},
                     {"terms", vals[i].terms}});
  }
  auto push = pushforward_check(tau, c.level);
  auto harm = check_cm_harmonicity(ctx, tau);
  double shadow = Q.shadow_distance / scale;
  return {{"disc", D},
          {"form", {tau.A.get_str(), tau.B.get_str(), tau.C.get_str()}},
          {"lattice",
           {{"omega1", complex_json(ctx.lattice.omega1, 0)},
            {"omega2", complex_json(ctx.lattice.omega2, 0)},
            {"fricke_sign", ctx.fricke_sign}}},
          {"level", c.level},
          {"edges", edges},
          {"shadow", complex_json(Q.shadow, 0)},
          {"verdicts",
           {{"pushforward", push.ok},
            {"shadow_in_lattice", shadow < 1e-6},
            {"shadow_distance", shadow},
            {"harmonicity", harm.pass}}}};
}

ordered_json run_check(const RunConfig&, const CurveData& E, bool& all) {
  auto S = make_symbol(E);
  std::vector<CheckResult> rs{check_modsym(E, S), check_harmonicity(S), check_interpolation(E, S), check_tate(E)};
  ordered_json arr = ordered_json::array();
  all = true;
  for (auto& r : rs) {
    all = all && r.pass;
    arr.push_back(check_json(r));
  }
  return {{"checks", arr}, {"pass", all}};
}

}  // namespace

std::vector<long> parse_integers(const std::string& text, size_t count, const std::string& code) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw CliError(code, "not an integer: '" + item + "'");
    }
    if (used != item.size()) throw CliError(code, "not an integer: '" + item + "'");
    out.push_back(v);
  }
  if (out.size() != count || (!text.empty() && text.back() == ','))
    throw CliError(code, "expected " + std::to_string(count) + " comma-separated integers, got '" + text + "'");
  return out;
}

int run(const RunConfig& config, std::string& json) {
  ordered_json doc{{"schema", kSchema}, {"config", config_json(config)}};
  int status = 0;
  try {
    static const std::vector<std::string> commands{"lp", "tate-q", "mtt", "sh-point", "cm-invariant", "check"};
    if (std::find(commands.begin(), commands.end(), config.command) == commands.end())
      throw CliError("E_CONFIG", "unknown subcommand '" + config.command + "'");
    if (config.threads < 1) throw CliError("E_CONFIG", "threads must be >= 1");
    if (config.prec < 4) throw CliError("E_CONFIG", "prec must be >= 4");
    if (config.depth < 1) throw CliError("E_CONFIG", "depth must be >= 1");
    auto coeffs = parse_integers(config.curve, 5, "E_CURVE");
    CurveData E;
    try {
      E = CurveData::make(coeffs, config.p);
    } catch (const CurveError& e) {
      throw CliError("E_CURVE", e.what());
    }
    doc["conventions"] = conventions_json(E);
    const auto& cmd = config.command;
    if (cmd == "lp") doc["result"] = run_lp(config, E);
    else if (cmd == "tate-q") doc["result"] = run_tate(config, E);
    else if (cmd == "mtt") doc["result"] = run_mtt(config, E);
    else if (cmd == "sh-point") doc["result"] = run_sh(config, E);
    else if (cmd == "cm-invariant") doc["result"] = run_cm(config, E);
    else {
      bool all = false;
      doc["result"] = run_check(config, E, all);
      status = all ? 0 : 1;
    }
  } catch (const CliError& e) {
    doc.erase("conventions");
    doc["error"] = {{"code", e.code}, {"message", e.what()}};
    status = 2;
  } catch (const std::exception& e) {
    doc.erase("conventions");
    doc.erase("result");
    doc["error"] = {{"code", "E_RUNTIME"}, {"message", e.what()}};
    status = 3;
  }
  json = doc.dump(2) + "\n";
  return status;
}

}  // namespace mockplectic
