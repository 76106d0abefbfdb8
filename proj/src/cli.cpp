#include "qcyc/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

namespace qcyc::cli {

namespace fs = std::filesystem;

json RunConfig::to_json() const {
  return {{"prec", prec},           {"order", order},   {"tol", tol},       {"theta_tol", theta_tol},
          {"den_bound", den_bound}, {"format", format}, {"cache_dir", cache_dir}, {"threads", threads},
          {"seed", seed},           {"pv", pv}};
}

// ---- cache

fs::path Cache::path(const std::string& kind, const std::string& key) const {
  std::ostringstream os;
  os << kind << "-" << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(kind + "|" + key)
     << ".json";
  return fs::path(dir_) / os.str();
}

std::optional<json> Cache::get(const std::string& kind, const std::string& key) const {
  if (!enabled()) return std::nullopt;
  std::ifstream in(path(kind, key));
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    if (j.at("kind") != kind || j.at("key") != key) return std::nullopt;
    return j.at("value");
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void Cache::put(const std::string& kind, const std::string& key, const json& value) const {
  if (!enabled()) return;
  fs::create_directories(dir_);
  const fs::path target = path(kind, key);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    out << json{{"kind", kind}, {"key", key}, {"value", value}}.dump();
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

// ---- serialization

json to_json(const Rat& x) { return to_string(x); }
json to_json(const Real& x) { return to_string(x, static_cast<int>(precision_bits() * 0.30103) + 5); }
json to_json(const Complex& z) { return json::array({to_json(z.re), to_json(z.im)}); }
json to_json(const QForm& Q) { return json::array({Q.a, Q.b, Q.c}); }
json to_json(const Mat2& g) { return json::array({json::array({g.a, g.b}), json::array({g.c, g.d})}); }

json to_json(const Key& k) {
  json j = json::array();
  for (const auto& x : k) j.push_back(to_string(x));
  return j;
}

json to_json(const Vec3& X) { return to_json(Key(X.begin(), X.end())); }

namespace {

template <class C>
json series_json(const VVQSeries<C>& f) {
  json comps = json::array(), group = json::array();
  for (const auto& [k, s] : f.comp) {
    json terms = json::array();
    for (const auto& [e, c] : s.terms) terms.push_back({{"exp", to_string(e)}, {"coeff", to_json(c)}});
    comps.push_back({{"gamma", to_json(k)}, {"terms", terms}});
    group.push_back(to_json(k));
  }
  return {{"group", group}, {"weight", to_string(f.weight)}, {"order", to_string(f.order)}, {"components", comps}};
}

Key key_from_json(const json& j) {
  Key k;
  for (const auto& x : j) k.push_back(parse_rat(x.get<std::string>()));
  return k;
}

template <class C, class Parse>
VVQSeries<C> series_parse(const json& j, Parse parse) {
  VVQSeries<C> f{parse_rat(j.at("weight").get<std::string>()), parse_rat(j.at("order").get<std::string>()), {}};
  for (const auto& c : j.at("components")) {
    auto& s = f.comp[key_from_json(c.at("gamma"))];
    for (const auto& t : c.at("terms")) s.terms.emplace(parse_rat(t.at("exp").get<std::string>()), parse(t.at("coeff")));
  }
  return f;
}

Real real_from_json(const json& j) { return Real(j.get<std::string>()); }

}  // namespace

json to_json(const VVQSeries<Rat>& f) { return series_json(f); }
json to_json(const VVQSeries<Real>& f) { return series_json(f); }

VVQSeries<Rat> series_from_json(const json& j) {
  return series_parse<Rat>(j, [](const json& x) { return parse_rat(x.get<std::string>()); });
}

VVQSeries<Real> real_series_from_json(const json& j) { return series_parse<Real>(j, real_from_json); }

json to_json(const MockPart& mp) {
  json un = json::array();
  for (const auto& [k, e] : mp.unrecognized) un.push_back({{"key", to_json(k)}, {"exponent", to_string(e)}});
  return {{"holo", to_json(mp.holo)},
          {"holo_numeric", to_json(mp.holo_numeric)},
          {"shadow", to_json(mp.shadow)},
          {"scale", to_json(mp.scale)},
          {"residual", to_json(mp.residual)},
          {"exact_residual", to_json(mp.exact_residual)},
          {"den_bound_used", mp.den_bound_used.get_str()},
          {"points", mp.points},
          {"columns", mp.columns},
          {"dropped", mp.dropped},
          {"config",
           {{"order", mp.config.order},
            {"principal_depth", mp.config.principal_depth},
            {"points", mp.config.points},
            {"den_bound", mp.config.den_bound.get_str()}}},
          {"unrecognized", un}};
}

MockPart mock_from_json(const json& j) {
  MockPart mp;
  mp.holo = series_from_json(j.at("holo"));
  mp.holo_numeric = real_series_from_json(j.at("holo_numeric"));
  mp.shadow = series_from_json(j.at("shadow"));
  mp.scale = real_from_json(j.at("scale"));
  mp.residual = real_from_json(j.at("residual"));
  mp.exact_residual = real_from_json(j.at("exact_residual"));
  mp.den_bound_used = Int(j.at("den_bound_used").get<std::string>(), 10);
  mp.points = j.at("points");
  mp.columns = j.at("columns");
  mp.dropped = j.at("dropped");
  const json& c = j.at("config");
  mp.config.order = c.at("order");
  mp.config.principal_depth = c.at("principal_depth");
  mp.config.points = c.at("points");
  mp.config.den_bound = Int(c.at("den_bound").get<std::string>(), 10);
  for (const auto& u : j.at("unrecognized"))
    mp.unrecognized.emplace_back(key_from_json(u.at("key")), parse_rat(u.at("exponent").get<std::string>()));
  return mp;
}

// ---- parsing

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

namespace {

Rat checked_rat(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789+-./") != std::string::npos)
    throw DomainError("not a rational number: '" + s + "'");
  try {
    return parse_rat(s);
  } catch (const std::exception&) {
    throw DomainError("not a rational number: '" + s + "'");
  }
}

long checked_long(const std::string& s) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("not an integer: '" + s + "'");
  }
}

}  // namespace

QForm parse_form(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (ch != '[' && ch != ']') t += ch;
  auto parts = split_list(t, ',');
  if (parts.size() != 3) throw DomainError("a form is written a,b,c: '" + s + "'");
  return {checked_long(parts[0]), checked_long(parts[1]), checked_long(parts[2])};
}

std::pair<Rat, Rat> parse_tau(const std::string& s0) {
  std::string s;
  for (char ch : s0)
    if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '*') s += ch;
  if (s.empty()) throw DomainError("empty tau");
  std::vector<std::string> terms;
  size_t start = 0;
  for (size_t i = 1; i < s.size(); ++i)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e') {
      terms.push_back(s.substr(start, i - start));
      start = i;
    }
  terms.push_back(s.substr(start));
  Rat re = 0, im = 0;
  for (auto t : terms) {
    auto pos = t.find('i');
    if (pos == std::string::npos) {
      re += checked_rat(t[0] == '+' ? t.substr(1) : t);
      continue;
    }
    t.erase(pos, 1);
    std::string sign;
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
      sign = t[0] == '-' ? "-" : "";
      t = t.substr(1);
    }
    if (t.empty() || t[0] == '/') t = "1" + t;
    im += checked_rat(sign + t);
  }
  if (im <= 0) throw DomainError("tau must lie in the upper half plane: '" + s0 + "'");
  return {re, im};
}

Complex tau_value(const std::pair<Rat, Rat>& t) { return Complex(to_real(t.first), to_real(t.second)); }

namespace {

std::string tau_str(const std::pair<Rat, Rat>& t) { return to_string(t.first) + "+" + to_string(t.second) + "*i"; }

std::string prec_tag() { return "P" + std::to_string(precision_bits()); }

QForm form_of_disc(long D) {
  if (D <= 0) throw DomainError("D must be positive");
  if (is_square(Int(D))) throw SquareDiscriminant("D = " + std::to_string(D) + " is a square");
  if (!valid_disc(D)) throw DomainError("no forms of discriminant " + std::to_string(D));
  for (const auto& A : class_reps(D))
    if (A.a > 0) return A;
  throw DomainError("no form with a > 0 of discriminant " + std::to_string(D));
}

Real real_tol(const std::string& s) {
  try {
    return Real(s);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + s + "'");
  }
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json header(const std::string& command, const RunConfig& cfg) {
  return {{"command", command}, {"config", cfg.to_json()}, {"timestamp", timestamp()}};
}

json component_json(const std::map<Key, Complex>& m) {
  json j = json::array();
  for (const auto& [k, v] : m) j.push_back({{"key", to_json(k)}, {"value", to_json(v)}});
  return j;
}

}  // namespace

// ---- cached expansions

VVQSeries<Rat> cached_hecke(const Cache& c, const QForm& A, const Rat& order) {
  const std::string key = A.str() + "|" + to_string(order);
  if (auto j = c.get("hecke", key)) return series_from_json(*j);
  auto f = hecke_theta_series(split(A), order);
  c.put("hecke", key, to_json(f));
  return f;
}

VVQSeries<Rat> cached_unary(const Cache& c, const QForm& A, int twice_weight, const Rat& order) {
  const std::string key = A.str() + "|" + std::to_string(twice_weight) + "|" + to_string(order);
  if (auto j = c.get("unary", key)) return series_from_json(*j);
  auto f = unary_theta_series(split(A), twice_weight, order);
  c.put("unary", key, to_json(f));
  return f;
}

MockPart cached_mock(const Cache& c, const QForm& A, const MockConfig& cfg) {
  const std::string key = A.str() + "|" + std::to_string(cfg.order) + "|" + std::to_string(cfg.principal_depth) +
                          "|" + std::to_string(cfg.points) + "|" + cfg.den_bound.get_str() + "|" + prec_tag();
  if (auto j = c.get("mock", key)) return mock_from_json(*j);
  auto mp = solve_mock(split(A), cfg);
  c.put("mock", key, to_json(mp));
  return mp;
}

VVQSeries<Rat> cached_g(const Cache& c, long k, const std::string& gspec, const Rat& order) {
  const std::string key = std::to_string(k) + "|" + gspec + "|" + to_string(order);
  if (auto j = c.get("g", key)) return series_from_json(*j);
  VVQSeries<Rat> g;
  if (gspec.rfind("plus:", 0) == 0) {
    long M = checked_long(gspec.substr(5));
    if (M < 1) throw DomainError("plus basis depth must be positive");
    g = plus_basis(k, -4 * M, order).back();
  } else {
    g = g_recipe(gspec, order);
  }
  if (g.weight != Rat(3, 2) - k)
    throw DomainError("g has weight " + to_string(g.weight) + ", expected " + to_string(Rat(3, 2) - k));
  c.put("g", key, to_json(g));
  return g;
}

// ---- drivers

Report cmd_verify_thm32(const std::vector<long>& Ds, const std::vector<std::string>& taus, const RunConfig& cfg) {
  Report r;
  r.body = header("verify-thm32", cfg);
  const Real tol_identity("1e-20"), tol_istar("1e-18");
  const Real theta_tol = real_tol(cfg.theta_tol);
  QuadConfig qc;
  qc.tol = real_tol(cfg.tol);
  Cache cache(cfg.cache_dir);
  std::vector<std::pair<Rat, Rat>> tv;
  for (const auto& t : taus) tv.push_back(parse_tau(t));
  std::vector<QForm> forms;
  for (long D : Ds) forms.push_back(form_of_disc(D));
  r.body["tolerances"] = {{"identity_abs", "1e-20"}, {"theta_I_star_abs", "1e-18"}};
  r.body["constants"] = {{"rhs", "-(4 pi / sqrt D) v^(3/2) (theta_I (x) conj Theta_{3/2,N})^L (tau)"},
                         {"lhs", "C_A(R_0 Theta_L(tau, .)) = -int_0^{2 log eps} R_0 Theta_L(tau, z(s)) z'(s) ds"}};
  json cells = json::array();
  bool all = true;
  for (size_t i = 0; i < Ds.size(); ++i) {
    const QForm& A = forms[i];
    Split sp = split(A);
    const Rat order(cfg.order);
    auto hecke = cached_hecke(cache, A, order);
    auto unary = cached_unary(cache, A, 3, order);
    for (const auto& t : tv) {
      const Complex tau = tau_value(t);
      Real qerr, serr;
      auto lhs = cycle_siegel(A, tau, theta_tol, qc, &qerr);
      auto rhs = thm32_rhs(sp, tau, hecke, unary);
      auto istar = cycle_theta_I_star(A, tau, theta_tol, qc, &serr);
      Real dev = 0, imax = 0;
      json comps = json::array();
      for (const auto& [k, v] : lhs) {
        Real d = abs(v - rhs[k]);
        dev = std::max(dev, d);
        comps.push_back({{"key", to_json(k)}, {"lhs", to_json(v)}, {"rhs", to_json(rhs[k])}, {"abs_dev", to_json(d)}});
      }
      for (const auto& [k, v] : istar) imax = std::max(imax, abs(v));
      const bool ok = dev < tol_identity && imax < tol_istar;
      all = all && ok;
      cells.push_back({{"D", sp.D},
                       {"A", to_json(A)},
                       {"tau", tau_str(t)},
                       {"prefactor", to_json(-4 * pi() / boost::multiprecision::sqrt(Real(sp.D)))},
                       {"components", comps},
                       {"max_abs_dev", to_json(dev)},
                       {"quadrature_error", to_json(qerr)},
                       {"theta_I_star", component_json(istar)},
                       {"theta_I_star_max_abs", to_json(imax)},
                       {"theta_I_star_quadrature_error", to_json(serr)},
                       {"pass", ok}});
    }
  }
  r.body["cells"] = cells;
  r.body["pass"] = all;
  r.exit_code = all ? kPass : kVerifyFail;
  return r;
}

Report cmd_verify_rationality(long k, const std::vector<long>& Ds, const std::string& gspec, const RunConfig& cfg) {
  if (k < 3 || k % 2 == 0) throw DomainError("k must be odd and >= 3");
  Report r;
  r.body = header("verify-rationality", cfg);
  Cache cache(cfg.cache_dir);
  std::vector<QForm> reps;
  std::vector<long> dvals;
  for (long D : Ds) {
    form_of_disc(D);
    for (const auto& A : class_reps(D)) {
      reps.push_back(A);
      dvals.push_back(D);
    }
  }
  auto g = cached_g(cache, k, gspec, Rat(cfg.order));
  auto coeffs = principal_coefficients(g);
  json cj = json::object();
  for (const auto& [d, c] : coeffs) cj[std::to_string(d)] = to_string(c);
  r.body["g"] = {{"recipe", gspec}, {"weight", to_string(g.weight)}, {"principal_coefficients", cj}};
  r.body["constants"] = {{"closed_form", "-(4D)^((k-1)/2) CT(g_{I+N} [theta_I, F^+]_{(k-1)/2})"},
                         {"cycle", "C_A(f) = int_{Gamma_A \\ S_A} f(z) Q_A(z,1)^{k-1} dz"}};
  r.body["tolerances"] = {{"recognition_rel", "1e-12"}, {"agreement_rel", "1e-10"}, {"den_bound", cfg.den_bound}};
  CycleConfig cc;
  cc.quad.tol = real_tol(cfg.tol);
  cc.pv = true;
  cc.den_bound = cfg.den_bound;
  cc.rel_tol = 1e-12;
  MockConfig mc;
  mc.order = std::max<long>(cfg.order, 40);
  json rows = json::array();
  bool all = true;
  for (size_t i = 0; i < reps.size(); ++i) {
    const QForm& A = reps[i];
    CycleResult res = cfg.pv ? pv_cycle(A, k, coeffs, {}, cc) : cycle_merom(A, k, coeffs, cc);
    MockPart mp = cached_mock(cache, A.a > 0 ? A : -A, mc);
    Rat closed = closed_form_thm41(A, k, g, mp);
    const Real cl = to_real(closed);
    const Real budget = Real("1e-10") * std::max(Real(1), boost::multiprecision::abs(cl));
    const bool close = abs(res.value - Complex(cl)) <= budget;
    const bool agree = res.recognized && *res.recognized == closed && close;
    all = all && agree;
    json poles = json::array();
    for (const auto& p : res.poles)
      poles.push_back({{"s", to_json(p.s)}, {"form", to_json(p.form)}, {"d", p.d}});
    long Dpow = 1;
    for (long j = 0; j < (k - 1) / 2; ++j) Dpow *= 4 * dvals[i];
    rows.push_back({{"D", dvals[i]},
                    {"A", to_json(A)},
                    {"k", k},
                    {"value", to_json(res.value)},
                    {"quadrature_error", to_json(res.error)},
                    {"nodes", res.nodes},
                    {"mode", res.mode},
                    {"experimental", res.experimental},
                    {"poles", poles},
                    {"recognized", res.recognized ? json(to_string(*res.recognized)) : json("no rational found")},
                    {"ambiguous", res.ambiguous},
                    {"closed_form", to_string(closed)},
                    {"prefactor", "-" + std::to_string(Dpow)},
                    {"mock_residual", to_json(mp.residual)},
                    {"within_budget", close},
                    {"agree", agree}});
  }
  r.body["rows"] = rows;
  r.body["pass"] = all;
  r.exit_code = all ? kPass : kVerifyFail;
  return r;
}

namespace {

const std::string& need(const std::map<std::string, std::string>& args, const std::string& name) {
  auto it = args.find(name);
  if (it == args.end() || it->second.empty()) throw DomainError("missing argument -" + name);
  return it->second;
}

json theta_value_json(const ThetaValue& v) {
  return {{"components", component_json(v.comp)}, {"tail_bound", to_json(v.tail_bound)}, {"terms", v.terms}};
}

json sublattice_json(const Sublattice& M) {
  json basis = json::array(), dual = json::array(), gram = json::array();
  for (const auto& b : M.basis()) basis.push_back(to_json(b));
  for (const auto& b : M.dual_basis()) dual.push_back(to_json(b));
  for (const auto& row : M.gram()) gram.push_back(to_json(Key(row.begin(), row.end())));
  json group = json::array();
  for (const auto& k : M.disc_group()) group.push_back({{"key", to_json(k)}, {"q_mod_1", to_string(M.q_mod1(k))}});
  return {{"basis", basis}, {"dual_basis", dual}, {"gram", gram}, {"det", to_string(M.det())}, {"discriminant_group", group}};
}

}  // namespace

Report cmd_objects(const std::vector<std::string>& path, const std::map<std::string, std::string>& args,
                   const RunConfig& cfg) {
  if (path.size() != 2) throw DomainError("object commands take two words, e.g. 'forms classes'");
  const std::string& what = path[0];
  const std::string& sub = path[1];
  Report r;
  r.body = header(what + " " + sub, cfg);
  Cache cache(cfg.cache_dir);
  const Rat order(cfg.order);
  json out;
  if (what == "forms" && sub == "reduce") {
    QForm Q = parse_form(need(args, "Q"));
    const long d = Q.disc();
    if (d < 0) {
      if (Q.a <= 0) throw DomainError("negative definite form");
      auto red = reduce_posdef(Q);
      out = {{"form", to_json(red.form)}, {"transform", to_json(red.transform)}};
    } else {
      if (d == 0 || is_square(Int(d))) throw SquareDiscriminant("square discriminant");
      auto red = reduce_indef(Q);
      json cyc = json::array();
      for (const auto& P : reduced_cycle(red.form)) cyc.push_back(to_json(P));
      out = {{"form", to_json(red.form)}, {"transform", to_json(red.transform)}, {"cycle", cyc}};
    }
  } else if (what == "forms" && sub == "classes") {
    const long d = checked_long(need(args, "d"));
    if (!valid_disc(d) || d == 0) throw DomainError("no forms of discriminant " + std::to_string(d));
    if (d > 0 && is_square(Int(d))) throw SquareDiscriminant("square discriminant");
    out = json::array();
    for (const auto& Q : class_reps(d)) out.push_back(to_json(Q));
  } else if (what == "forms" && sub == "automorph") {
    QForm A = parse_form(need(args, "A"));
    auto au = automorph(A);
    out = {{"M", to_json(au.M)},
           {"t", au.t.get_str()},
           {"u", au.u.get_str()},
           {"eps", {{"x", to_string(au.eps.x())}, {"y", to_string(au.eps.y())}, {"sqrt", au.eps.D().get_str()}}}};
  } else if (what == "geodesic" && sub == "info") {
    QForm A = parse_form(need(args, "A"));
    Geodesic G = geodesic(A);
    out = {{"A", to_json(A)},
           {"D", G.D},
           {"w", to_json(G.w)},
           {"w_prime", to_json(G.wp)},
           {"eps",
            {{"x", to_string(G.aut.eps.x())},
             {"y", to_string(G.aut.eps.y())},
             {"sqrt", G.aut.eps.D().get_str()},
             {"value", to_json(G.aut.eps.value())}}},
           {"t", G.aut.t.get_str()},
           {"u", G.aut.u.get_str()},
           {"sigma", json::array({json::array({to_json(G.sigma[0]), to_json(G.sigma[1])}),
                                  json::array({to_json(G.sigma[2]), to_json(G.sigma[3])})})},
           {"M_A", to_json(G.aut.M)},
           {"log_eps", to_json(G.log_eps)}};
  } else if (what == "lattice" && sub == "split") {
    QForm A = parse_form(need(args, "A"));
    Split s = split(A);
    out = {{"A", to_json(A)},
           {"D", s.D},
           {"I", sublattice_json(s.I)},
           {"N", sublattice_json(s.N)},
           {"n0", to_json(s.n0)},
           {"m", to_string(s.m)},
           {"index", s.index}};
  } else if (what == "series" && sub == "hecke") {
    out = to_json(cached_hecke(cache, parse_form(need(args, "A")), order));
  } else if (what == "series" && sub == "unary") {
    auto it = args.find("weight");
    const std::string w = it == args.end() || it->second.empty() ? "3/2" : it->second;
    if (w != "3/2" && w != "1/2") throw DomainError("unary theta weight is 3/2 or 1/2");
    out = to_json(cached_unary(cache, parse_form(need(args, "A")), w == "3/2" ? 3 : 1, order));
  } else if (what == "series" && sub == "plus-basis") {
    const long k = checked_long(need(args, "k"));
    const long d = checked_long(need(args, "d"));
    out = json::array();
    for (const auto& f : plus_basis(k, d, order)) out.push_back(to_json(f));
  } else if (what == "series" && sub == "mock") {
    QForm A = parse_form(need(args, "A"));
    if (A.a <= 0) throw DomainError("mock: a must be positive");
    MockConfig mc;
    mc.order = std::max<long>(cfg.order, 40);
    mc.den_bound = cfg.den_bound;
    out = to_json(cached_mock(cache, A, mc));
  } else if (what == "eval" && sub == "f") {
    const long k = checked_long(need(args, "k"));
    auto z = parse_tau(need(args, "z"));
    const Complex zv = tau_value(z);
    Complex v;
    if (args.count("P") && !args.at("P").empty()) {
      v = f_class_eval(k, parse_form(args.at("P")), zv);
    } else {
      v = f_eval(k, checked_long(need(args, "d")), zv);
    }
    out = {{"k", k}, {"z", tau_str(z)}, {"value", to_json(v)}};
  } else if (what == "eval" && sub == "siegel") {
    auto tau = parse_tau(need(args, "tau"));
    auto z = parse_tau(need(args, "z"));
    auto v = siegel_eval(tau_value(tau), tau_value(z), real_tol(cfg.theta_tol));
    out = theta_value_json(v);
    out["tau"] = tau_str(tau);
    out["z"] = tau_str(z);
  } else {
    throw DomainError("unknown object command '" + what + " " + sub + "'");
  }
  r.body["result"] = out;
  return r;
}

// ---- output

namespace {

std::string csv_field(const json& j) {
  std::string s = j.is_string() ? j.get<std::string>() : j.dump();
  if (s.find_first_of(",\"") != std::string::npos) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return s;
}

std::string form_str(const json& A) {
  return "[" + std::to_string(A[0].get<long>()) + "," + std::to_string(A[1].get<long>()) + "," +
         std::to_string(A[2].get<long>()) + "]";
}

}  // namespace

std::string csv_help() {
  return "csv columns:\n"
         "  verify-thm32:       D,A,tau,component,lhs_re,lhs_im,rhs_re,rhs_im,abs_dev,theta_I_star_max_abs,pass\n"
         "  verify-rationality: D,A,k,value_re,value_im,quadrature_error,recognized,closed_form,agree,mode,poles\n"
         "  object commands print json; --format text prints the bare result\n";
}

std::string render(const Report& r, const std::string& format) {
  const json& b = r.body;
  const std::string cmd = b.value("command", "");
  std::ostringstream os;
  if (format == "json" || b.contains("error")) {
    os << b.dump(2) << "\n";
    return os.str();
  }
  if (cmd != "verify-thm32" && cmd != "verify-rationality") {
    os << (format == "text" ? b.at("result").dump() : b.dump(2)) << "\n";
    return os.str();
  }
  if (format == "csv") {
    if (cmd == "verify-thm32") {
      os << "D,A,tau,component,lhs_re,lhs_im,rhs_re,rhs_im,abs_dev,theta_I_star_max_abs,pass\n";
      for (const auto& c : b.at("cells"))
        for (const auto& p : c.at("components")) {
          std::string key;
          for (const auto& x : p.at("key")) key += (key.empty() ? "" : " ") + x.get<std::string>();
          os << c.at("D") << "," << csv_field(form_str(c.at("A"))) << "," << csv_field(c.at("tau")) << "," << key << ","
             << csv_field(p.at("lhs")[0]) << "," << csv_field(p.at("lhs")[1]) << "," << csv_field(p.at("rhs")[0]) << ","
             << csv_field(p.at("rhs")[1]) << "," << csv_field(p.at("abs_dev")) << ","
             << csv_field(c.at("theta_I_star_max_abs")) << "," << (c.at("pass").get<bool>() ? "pass" : "fail") << "\n";
        }
    } else {
      os << "D,A,k,value_re,value_im,quadrature_error,recognized,closed_form,agree,mode,poles\n";
      for (const auto& row : b.at("rows"))
        os << row.at("D") << "," << csv_field(form_str(row.at("A"))) << "," << row.at("k") << ","
           << csv_field(row.at("value")[0]) << "," << csv_field(row.at("value")[1]) << ","
           << csv_field(row.at("quadrature_error")) << "," << csv_field(row.at("recognized")) << ","
           << csv_field(row.at("closed_form")) << "," << (row.at("agree").get<bool>() ? "yes" : "no") << ","
           << csv_field(row.at("mode")) << "," << row.at("poles").size() << "\n";
    }
    return os.str();
  }
  // text
  if (cmd == "verify-thm32") {
    for (const auto& c : b.at("cells"))
      os << "D=" << c.at("D") << " A=" << form_str(c.at("A")) << " tau=" << c.at("tau").get<std::string>()
         << "  max|lhs-rhs|=" << to_string(Real(c.at("max_abs_dev").get<std::string>()), 6)
         << "  max|C_A(theta*_I)|=" << to_string(Real(c.at("theta_I_star_max_abs").get<std::string>()), 6) << "  "
         << (c.at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
  } else {
    for (const auto& row : b.at("rows"))
      os << "D=" << row.at("D") << " A=" << form_str(row.at("A")) << " k=" << row.at("k")
         << "  C_A=" << to_string(Real(row.at("value")[0].get<std::string>()), 20)
         << "  recognized=" << row.at("recognized").get<std::string>()
         << "  closed=" << row.at("closed_form").get<std::string>() << "  " << (row.at("agree").get<bool>() ? "pass" : "FAIL")
         << "\n";
  }
  os << (b.at("pass").get<bool>() ? "all checks passed" : "some checks FAILED") << "\n";
  return os.str();
}

Report guarded(const std::string& command, const RunConfig& cfg, const std::function<Report()>& run) {
  auto fail = [&](int code, const std::string& type, const std::string& msg) {
    Report r;
    r.body = header(command, cfg);
    r.body["error"] = {{"type", type}, {"message", msg}};
    r.body["pass"] = false;
    r.exit_code = code;
    return r;
  };
  try {
    return run();
  } catch (const PoleError& e) {
    return fail(kInvalidInput, "pole", e.what());
  } catch (const DomainError& e) {
    return fail(kInvalidInput, "invalid input", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInvalidInput, "invalid input", e.what());
  } catch (const InsufficientOrder& e) {
    return fail(kPrecision, "order insufficient", e.what());
  } catch (const QuadratureError& e) {
    return fail(kPrecision, "precision insufficient", e.what());
  } catch (const std::runtime_error& e) {
    const std::string m = e.what();
    if (m.find("solver failed") != std::string::npos || m.find("residual") != std::string::npos)
      return fail(kPrecision, "precision insufficient", m);
    return fail(kVerifyFail, "failure", m);
  } catch (const std::exception& e) {
    return fail(kVerifyFail, "failure", e.what());
  }
}

}  // namespace qcyc::cli
