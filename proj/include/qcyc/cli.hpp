#pragma once

#include "qcyc/cycles.hpp"
#include "qcyc/maass.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qcyc::cli {

using nlohmann::json;

enum ExitCode { kPass = 0, kVerifyFail = 2, kInvalidInput = 3, kPrecision = 4 };

struct RunConfig {
  unsigned prec = 256;
  /// series order in exponent units
  long order = 40;
  /// quadrature tolerance; 0 selects 2^(-P/3)
  std::string tol = "0";
  /// theta tail tolerance
  std::string theta_tol = "1e-30";
  long den_bound = 1000000;
  std::string format = "json";
  /// empty disables the cache
  std::string cache_dir;
  long threads = 1;
  unsigned long seed = 20240601;
  /// experimental symmetric-exclusion principal value instead of the contour average
  bool pv = false;

  json to_json() const;
};

/// Content-addressed store of exact expansions; writes are atomic.
class Cache {
 public:
  explicit Cache(std::string dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }
  std::optional<json> get(const std::string& kind, const std::string& key) const;
  void put(const std::string& kind, const std::string& key, const json& value) const;
  std::filesystem::path path(const std::string& kind, const std::string& key) const;

 private:
  std::string dir_;
};

json to_json(const Rat& x);
json to_json(const Real& x);
json to_json(const Complex& z);
json to_json(const QForm& Q);
json to_json(const Mat2& g);
json to_json(const Key& k);
json to_json(const Vec3& X);
json to_json(const VVQSeries<Rat>& f);
json to_json(const VVQSeries<Real>& f);
json to_json(const MockPart& mp);
VVQSeries<Rat> series_from_json(const json& j);
VVQSeries<Real> real_series_from_json(const json& j);
MockPart mock_from_json(const json& j);

/// "a,b,c"
QForm parse_form(const std::string& s);
/// Rational real and imaginary parts: "i", "1/5+i/2", "-1/3+2i", "0.1+1.5*i".
std::pair<Rat, Rat> parse_tau(const std::string& s);
Complex tau_value(const std::pair<Rat, Rat>& t);
std::vector<std::string> split_list(const std::string& s, char sep);

/// Cached expansions.
VVQSeries<Rat> cached_hecke(const Cache& c, const QForm& A, const Rat& order);
VVQSeries<Rat> cached_unary(const Cache& c, const QForm& A, int twice_weight, const Rat& order);
MockPart cached_mock(const Cache& c, const QForm& A, const MockConfig& cfg);
/// "plus:M" (plus_basis element of depth M) or a product recipe.
VVQSeries<Rat> cached_g(const Cache& c, long k, const std::string& gspec, const Rat& order);

struct Report {
  json body;
  int exit_code = kPass;
};

Report cmd_verify_thm32(const std::vector<long>& Ds, const std::vector<std::string>& taus, const RunConfig& cfg);
Report cmd_verify_rationality(long k, const std::vector<long>& Ds, const std::string& gspec, const RunConfig& cfg);
/// path = {"forms", "classes"} etc.; args holds named string arguments.
Report cmd_objects(const std::vector<std::string>& path, const std::map<std::string, std::string>& args,
                   const RunConfig& cfg);

/// Render a report as json, csv or text.
std::string render(const Report& r, const std::string& format);
/// Column headers of the csv output per command.
std::string csv_help();

/// Run a command with exceptions mapped to exit codes and error reports.
Report guarded(const std::string& command, const RunConfig& cfg, const std::function<Report()>& run);

}  // namespace qcyc::cli
