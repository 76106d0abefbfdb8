#include "qcyc/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace qcyc;
using namespace qcyc::cli;

namespace {

std::vector<long> parse_longs(const std::string& s) {
  std::vector<long> out;
  for (const auto& t : split_list(s, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stol(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw DomainError("not an integer: '" + t + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cycle integrals of meromorphic modular forms and theta lifts"};
  app.require_subcommand(1);
  app.footer(csv_help() +
             "exit codes: 0 pass, 2 verification failure, 3 invalid input, 4 precision or order insufficient");
  RunConfig cfg;
  app.add_option("--prec", cfg.prec, "working precision in bits")->capture_default_str();
  app.add_option("--order", cfg.order, "q-series order in exponent units")->capture_default_str();
  app.add_option("--den-bound", cfg.den_bound, "denominator bound for rational recognition")->capture_default_str();
  app.add_option("--tol", cfg.tol, "quadrature tolerance (0 = 2^(-P/3))")->capture_default_str();
  app.add_option("--theta-tol", cfg.theta_tol, "theta tail tolerance")->capture_default_str();
  app.add_option("--format", cfg.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  app.add_option("--cache-dir", cfg.cache_dir, "directory for cached expansions (empty disables)");
  app.add_option("--threads", cfg.threads, "worker threads (cells run sequentially; kept for compatibility)")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed recorded in reports")->capture_default_str();
  app.add_flag("--pv", cfg.pv, "experimental symmetric-exclusion principal value");

  std::string Ds = "5,8,13", taus = "i,1/5+i/2,-1/3+2i";
  auto* thm32 = app.add_subcommand("verify-thm32", "compare the Siegel cycle integral with the theta product");
  thm32->add_option("--D", Ds, "comma-separated discriminants")->capture_default_str();
  thm32->add_option("--tau", taus, "comma-separated points, e.g. i,1/5+i/2")->capture_default_str();

  long k = 3;
  std::string gspec = "theta*E4*E6/Delta", Dr = "5,8";
  auto* rat = app.add_subcommand("verify-rationality", "cycle integrals against the closed form");
  rat->add_option("-k", k, "odd weight parameter k >= 3")->capture_default_str();
  rat->add_option("--D", Dr, "comma-separated discriminants")->capture_default_str();
  rat->add_option("-g", gspec, "plus:M or a product recipe such as theta*E4*E6/Delta")->capture_default_str();

  std::map<std::string, std::string> args;
  std::vector<std::string> path;
  struct Group {
    const char* name;
    std::vector<std::pair<const char*, std::vector<const char*>>> subs;
  };
  const std::vector<Group> groups = {
      {"forms", {{"reduce", {"Q"}}, {"classes", {"d"}}, {"automorph", {"A"}}}},
      {"geodesic", {{"info", {"A"}}}},
      {"lattice", {{"split", {"A"}}}},
      {"series", {{"hecke", {"A"}}, {"unary", {"A", "weight"}}, {"plus-basis", {"k", "d"}}, {"mock", {"A"}}}},
      {"eval", {{"f", {"k", "d", "P", "z"}}, {"siegel", {"tau", "z"}}}},
  };
  std::map<std::string, std::string> store;
  for (const auto& g : groups) {
    auto* gc = app.add_subcommand(g.name, std::string("object commands: ") + g.name);
    gc->require_subcommand(1);
    for (const auto& [sname, names] : g.subs) {
      auto* sc = gc->add_subcommand(sname);
      for (const char* n : names) {
        std::string flag = std::string(n).size() == 1 ? std::string("-") + n : std::string("--") + n;
        sc->add_option(flag, store[std::string(g.name) + "/" + sname + "/" + n]);
      }
      sc->callback([&path, &args, &store, gname = std::string(g.name), sname = std::string(sname), names]() {
        path = {gname, sname};
        for (const char* n : names) args[n] = store[gname + "/" + sname + "/" + n];
      });
    }
  }

  // accept -d=-20 as well as -d -20, and --tau= for an empty value
  std::vector<std::string> argv_s;
  for (int i = argc - 1; i >= 1; --i) {
    std::string a = argv[i];
    if (a.size() > 3 && a[0] == '-' && a[1] != '-' && a[2] == '=') {
      argv_s.push_back(a.substr(3));
      argv_s.push_back(a.substr(0, 2));
    } else if (a.size() > 3 && a.rfind("--", 0) == 0 && a.back() == '=') {
      argv_s.push_back("");
      argv_s.push_back(a.substr(0, a.size() - 1));
    } else {
      argv_s.push_back(a);
    }
  }
  try {
    app.parse(argv_s);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  Report rep;
  std::string command = thm32->parsed() ? "verify-thm32" : rat->parsed() ? "verify-rationality" : "";
  if (command.empty()) command = path.empty() ? "?" : path[0] + " " + path[1];
  rep = guarded(command, cfg, [&]() {
    if (cfg.prec < 64) throw DomainError("--prec must be at least 64");
    set_precision(cfg.prec);
    if (thm32->parsed()) return cmd_verify_thm32(parse_longs(Ds), split_list(taus, ','), cfg);
    if (rat->parsed()) return cmd_verify_rationality(k, parse_longs(Dr), gspec, cfg);
    return cmd_objects(path, args, cfg);
  });
  std::cout << render(rep, cfg.format);
  return rep.exit_code;
}
