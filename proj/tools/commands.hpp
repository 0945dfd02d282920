#pragma once

// Subcommands of the polyprime tool. run() is the whole program; main() only
// forwards argv and the standard streams.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "polyprime/polyprime.hpp"

namespace polyprime::cli {

enum class Format { csv, json };

struct RunConfig {
  std::string command;
  IntPolynomial poly{std::vector<std::int64_t>{0, 1}};
  LinearForm form;
  std::vector<std::uint64_t> n_values;
  std::uint64_t truncation_prime = kDefaultTruncationPrime;
  std::uint64_t truncation_q = kDefaultTruncationQ;
  std::string output;  // empty means the caller's stream
  Format format = Format::csv;
  unsigned threads = 0;  // 0 is auto
  CountPath path = CountPath::automatic;
  std::uint64_t max_p = 13;
  bool timing = false;
};

// ---- value parsing -------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::uint64_t parse_digits(const std::string& s, std::string_view key) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ArgumentError(fmt::format("{}: expected a non-negative integer, got '{}'", key, s));
  }
  std::uint64_t v = 0;
  for (char c : s) {
    const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) {
      throw ArgumentError(fmt::format("{}: '{}' is too large", key, s));
    }
    v = v * 10 + d;
  }
  return v;
}

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::string_view key) {
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && v > std::numeric_limits<std::uint64_t>::max() / base) {
      throw ArgumentError(fmt::format("{}: {}^{} is too large", key, base, exp));
    }
    v *= base;
  }
  return v;
}

// 1000, 1e6, 5E5 or 10^6.
inline std::uint64_t parse_count(const std::string& text, std::string_view key) {
  const std::string s = trim(text);
  if (auto caret = s.find('^'); caret != std::string::npos) {
    return checked_pow(parse_digits(s.substr(0, caret), key), parse_digits(s.substr(caret + 1), key), key);
  }
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    const auto mantissa = parse_digits(s.substr(0, e), key);
    const auto scale = checked_pow(10, parse_digits(s.substr(e + 1), key), key);
    if (mantissa != 0 && scale > std::numeric_limits<std::uint64_t>::max() / mantissa) {
      throw ArgumentError(fmt::format("{}: '{}' is too large", key, s));
    }
    return mantissa * scale;
  }
  return parse_digits(s, key);
}

inline std::int64_t parse_signed(const std::string& text, std::string_view key) {
  std::string s = trim(text);
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  const auto v = parse_digits(s, key);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ArgumentError(fmt::format("{}: '{}' is out of range", key, text));
  }
  return negative ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
}

// Comma separated items, each a single N or lo:hi:factor.
inline std::vector<std::uint64_t> parse_n_values(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_count(parts[0], "n"));
    } else if (parts.size() == 3) {
      const auto lo = parse_count(parts[0], "n");
      const auto hi = parse_count(parts[1], "n");
      const auto factor = parse_count(parts[2], "n");
      if (lo < 1 || factor < 2 || hi < lo) {
        throw ArgumentError(fmt::format("n: range '{}' needs 1 <= lo <= hi and factor >= 2", item));
      }
      for (std::uint64_t v = lo; v <= hi; v *= factor) {
        out.push_back(v);
        if (v > hi / factor) break;
      }
    } else {
      throw ArgumentError(fmt::format("n: cannot parse '{}'", item));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline LinearForm parse_form(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ArgumentError(fmt::format("form: expected a1,a2, got '{}'", text));
  return LinearForm(parse_signed(parts[0], "form"), parse_signed(parts[1], "form"));
}

}  // namespace detail

// Flat key=value lines; '#' starts a comment. Keys mirror the long flags.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError(fmt::format("{}:{}: expected key=value", path, lineno));
    }
    auto key = detail::trim(text.substr(0, eq));
    auto value = detail::trim(text.substr(eq + 1));
    if (key == "n" && values.count("n")) {
      values["n"] += "," + value;
    } else {
      values[key] = value;
    }
  }
  return values;
}

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"poly",   "form",    "n",         "trunc-p", "trunc-q", "format",
                                                "out",    "threads", "fast-path", "max-p",   "timing"};
  return keys;
}

inline RunConfig build_config(const std::string& command, const std::map<std::string, std::string>& values) {
  RunConfig cfg;
  cfg.command = command;
  for (const auto& [key, value] : values) {
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ArgumentError("unknown configuration key '" + key + "'");
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("format")) {
    if (*v == "csv") cfg.format = Format::csv;
    else if (*v == "json") cfg.format = Format::json;
    else throw ArgumentError("format must be csv or json, got '" + *v + "'");
  }
  if (auto v = get("out")) cfg.output = *v;
  auto poly = get("poly");
  if (!poly || poly->empty()) throw ArgumentError("--poly is required");
  cfg.poly = normalize(parse_polynomial(*poly));
  if (auto v = get("form")) cfg.form = detail::parse_form(*v);
  if (auto v = get("n")) cfg.n_values = detail::parse_n_values(*v);
  if (auto v = get("trunc-p")) cfg.truncation_prime = detail::parse_count(*v, "trunc-p");
  if (auto v = get("trunc-q")) cfg.truncation_q = detail::parse_count(*v, "trunc-q");
  if (cfg.truncation_prime < 2 || cfg.truncation_q < 2) throw ArgumentError("trunc-p and trunc-q must be >= 2");
  if (auto v = get("threads")) {
    cfg.threads = *v == "auto" ? 0u : static_cast<unsigned>(detail::parse_count(*v, "threads"));
    if (*v != "auto" && cfg.threads == 0) throw ArgumentError("threads must be positive or auto");
  }
  if (auto v = get("fast-path")) {
    if (*v == "auto") cfg.path = CountPath::automatic;
    else if (*v == "direct") cfg.path = CountPath::direct;
    else if (*v == "spectral") cfg.path = CountPath::spectral;
    else throw ArgumentError("fast-path must be auto, direct or spectral, got '" + *v + "'");
  }
  if (auto v = get("max-p")) cfg.max_p = detail::parse_count(*v, "max-p");
  if (auto v = get("timing")) {
    if (*v == "true" || *v == "1") cfg.timing = true;
    else if (*v == "false" || *v == "0") cfg.timing = false;
    else throw ArgumentError("timing must be true or false");
  }
  if (command == "verify" && cfg.n_values.empty()) cfg.n_values = {100, 500, 2000};
  if (cfg.n_values.empty() && command != "series") throw ArgumentError("at least one --n value is required");
  return cfg;
}

// ---- records and writers -------------------------------------------------

using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string>;
using Record = std::vector<Cell>;

inline Cell optional_ratio(double num, double den) {
  if (den == 0.0) return std::monostate{};
  return num / den;
}

struct Failure {
  std::string kind;
  std::string message;
};

class Writer {
 public:
  virtual ~Writer() = default;
  virtual void begin(const std::vector<std::string>& columns) = 0;
  virtual void row(const Record& r) = 0;
  // status is ok, fail or error.
  virtual void finish(const std::string& status, const std::optional<Failure>& failure) = 0;
};

class CsvWriter final : public Writer {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void begin(const std::vector<std::string>& columns) override {
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const Record& r) override {
    for (std::size_t i = 0; i < r.size(); ++i) out_ << (i ? "," : "") << cell(r[i]);
    out_ << '\n';
    out_.flush();
  }

  void finish(const std::string& status, const std::optional<Failure>& failure) override {
    if (failure) {
      out_ << "#error," << failure->kind << "," << quote(failure->message) << '\n';
    } else if (status != "ok") {
      out_ << "#status," << status << '\n';
    }
    out_.flush();
  }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }

  static std::string cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) return "";
          else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
          else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? fmt::format("{}", v) : "";
          else if constexpr (std::is_same_v<T, std::string>) return quote(v);
          else return std::to_string(v);
        },
        c);
  }

  std::ostream& out_;
};

class JsonWriter final : public Writer {
 public:
  JsonWriter(std::ostream& out, std::string command) : out_(out), command_(std::move(command)) {}

  void begin(const std::vector<std::string>& columns) override { columns_ = columns; }

  void row(const Record& r) override {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.size(); ++i) {
      rec[columns_[i]] = std::visit(
          [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<T, double>) {
              if (!std::isfinite(v)) return nullptr;
              return v;
            } else return v;
          },
          r[i]);
    }
    records_.push_back(std::move(rec));
  }

  void finish(const std::string& status, const std::optional<Failure>& failure) override {
    nlohmann::ordered_json doc;
    doc["command"] = command_;
    doc["status"] = status;
    doc["records"] = records_;
    if (failure) {
      doc["error"] = {{"kind", failure->kind}, {"message", failure->message}};
    } else {
      doc["error"] = nullptr;
    }
    out_ << doc.dump(2) << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  std::string command_;
  std::vector<std::string> columns_;
  nlohmann::ordered_json records_ = nlohmann::ordered_json::array();
};

// ---- commands ------------------------------------------------------------

namespace detail {

class Stopwatch {
 public:
  Cell elapsed(bool enabled) const {
    if (!enabled) return std::monostate{};
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline CountOptions count_options(const RunConfig& cfg) {
  CountOptions o;
  o.path = cfg.path;
  o.threads = cfg.threads;
  return o;
}

inline SieveOptions sieve_options(const RunConfig& cfg) { return {kDefaultSegmentSize, cfg.threads}; }

struct CountPoint {
  std::uint64_t n = 0;
  std::uint64_t exact = 0;
  double weighted = 0.0;
  double main_weighted = 0.0;
  double main_unweighted = 0.0;
};

inline CountPoint count_point(const RunConfig& cfg, std::uint64_t n, double series_value) {
  CountPoint pt;
  pt.n = n;
  const auto table = build_prime_table(n, sieve_options(cfg));
  pt.exact = count_pairs_linear_form(table, cfg.poly, cfg.form, count_options(cfg));
  const LambdaWeights lambda(table);
  pt.weighted = weighted_count_linear_form(lambda, cfg.poly, cfg.form, count_options(cfg));
  pt.main_weighted = main_term_weighted(cfg.poly, cfg.form, static_cast<double>(n), series_value);
  pt.main_unweighted = main_term_unweighted(cfg.poly, cfg.form, static_cast<double>(n), series_value);
  return pt;
}

inline std::vector<Cell> head(const RunConfig& cfg) {
  return {cfg.poly.to_string(), cfg.form.a1, cfg.form.a2};
}

inline Record concat(std::vector<Cell> a, std::initializer_list<Cell> b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace detail

struct Command {
  std::vector<std::string> columns;
  // Returns true when every check it ran was within tolerance.
  std::function<bool(const RunConfig&, Writer&)> body;
};

inline bool cmd_count(const RunConfig& cfg, Writer& w) {
  const auto series = generalized_singular_series(cfg.poly, cfg.form, cfg.truncation_prime);
  for (auto n : cfg.n_values) {
    detail::Stopwatch clock;
    const auto pt = detail::count_point(cfg, n, series.value);
    w.row(detail::concat(detail::head(cfg),
                         {pt.n, pt.exact, pt.weighted, pt.main_weighted, pt.main_unweighted,
                          optional_ratio(pt.weighted, pt.main_weighted),
                          optional_ratio(static_cast<double>(pt.exact), pt.main_unweighted), series.value,
                          series.tail_bound, clock.elapsed(cfg.timing)}));
  }
  return true;
}

inline bool cmd_predict(const RunConfig& cfg, Writer& w) {
  const auto series = generalized_singular_series(cfg.poly, cfg.form, cfg.truncation_prime);
  const double c = c_factor(cfg.poly.degree(), cfg.form);
  for (auto n : cfg.n_values) {
    const double x = static_cast<double>(n);
    w.row(detail::concat(detail::head(cfg),
                         {n, weighted_cutoff(cfg.poly, cfg.form, n), series.value, series.tail_bound, c,
                          main_term_weighted(cfg.poly, cfg.form, x, series.value),
                          main_term_unweighted(cfg.poly, cfg.form, x, series.value)}));
  }
  return true;
}

inline bool cmd_series(const RunConfig& cfg, Writer& w) {
  detail::Stopwatch clock;
  const auto euler = generalized_singular_series(cfg.poly, cfg.form, cfg.truncation_prime);
  Cell qsum = std::monostate{}, delta = std::monostate{};
  if (cfg.form.is_difference()) {
    const double q = singular_series_qsum(cfg.poly, cfg.truncation_q);
    qsum = q;
    delta = std::fabs(q - euler.value);
  }
  w.row(detail::concat(detail::head(cfg),
                       {euler.value, euler.truncation_prime, euler.tail_bound,
                        static_cast<std::uint64_t>(euler.factors.size()), qsum, cfg.truncation_q, delta,
                        clock.elapsed(cfg.timing)}));
  return true;
}

inline bool cmd_bias(const RunConfig& cfg, Writer& w) {
  if (cfg.max_p < 2) throw ArgumentError("max-p must be at least 2");
  const auto primes = build_prime_table(std::max<std::uint64_t>(cfg.max_p, 2)).primes();
  for (auto n : cfg.n_values) {
    const auto table = build_prime_table(n, detail::sieve_options(cfg));
    for (auto p : primes) {
      const double theory = bias_factor_linear_form(cfg.poly, cfg.form, p);
      const double measured = empirical_bias_factor(table, cfg.poly, cfg.form, p);
      w.row(detail::concat(detail::head(cfg), {n, p, std::string(to_string(partition_prime(cfg.form, p))), theory,
                                               measured, measured - theory}));
    }
  }
  return true;
}

namespace detail {

struct Check {
  std::string name;
  Cell n;
  double value;
  double tolerance;
  bool pass() const { return value < tolerance; }  // NaN fails
};

inline double gauss_identity_error(const IntPolynomial& f, std::uint64_t max_p) {
  double worst = 0.0;
  for (auto p : build_prime_table(max_p).primes()) {
    std::complex<double> s = 0.0;
    for (std::uint64_t a = 1; a < p; ++a) s += gauss_sum(f, a, p);
    const double z = static_cast<double>(count_roots_mod(f, p));
    worst = std::max(worst, std::abs(s - static_cast<double>(p) * (z - 1.0)));
  }
  return worst;
}

inline double multiplicativity_error(const IntPolynomial& f, std::uint64_t max_q) {
  std::vector<std::uint64_t> squarefree;
  std::vector<double> term(max_q + 1, 0.0);
  for (std::uint64_t q = 2; q <= max_q; ++q) {
    if (arith::moebius(q) == 0) continue;
    squarefree.push_back(q);
    term[q] = series_term(f, q);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < squarefree.size(); ++i)
    for (std::size_t j = i + 1; j < squarefree.size(); ++j) {
      const auto q1 = squarefree[i], q2 = squarefree[j];
      if (std::gcd(q1, q2) != 1) continue;
      worst = std::max(worst, std::fabs(series_term(f, q1 * q2) - term[q1] * term[q2]));
    }
  return worst;
}

inline double euler_match_error(const IntPolynomial& f, std::uint64_t max_p) {
  double worst = 0.0;
  for (auto p : build_prime_table(max_p).primes()) {
    worst = std::max(worst, std::fabs(1.0 + series_term(f, p) - euler_factor(f, p)));
  }
  return worst;
}

inline double bias_euler_error(const IntPolynomial& f, std::uint64_t max_p) {
  double worst = 0.0;
  for (auto p : build_prime_table(max_p).primes()) {
    worst = std::max(worst, std::fabs(bias_factor(f, p) - euler_factor(f, p)));
  }
  return worst;
}

inline double nu_error(std::uint64_t n) {
  double worst = 0.0;
  for (double beta : {0.5, 0.1, -0.37, 1e-7, 0.999, 1.0 / 3.0}) {
    std::complex<double> direct = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) direct += polyprime::detail::unit(-static_cast<long double>(k) * beta);
    worst = std::max(worst, std::abs(nu(n, beta) - direct) / static_cast<double>(n));
  }
  return worst;
}

inline double symmetry_error(const LambdaWeights& lambda, const IntPolynomial& f, std::int64_t m) {
  double worst = 0.0;
  for (int j = 1; j < 16; ++j) {
    const double a = j / 16.0 + 0.003;
    worst = std::max(worst, std::abs(lambda_hat(lambda, a) - std::conj(lambda_hat(lambda, 1.0 - a))) /
                                std::max(lambda.psi(), 1.0));
    worst = std::max(worst, std::abs(weyl_sum(f, m, a) - std::conj(weyl_sum(f, m, 1.0 - a))) /
                                std::max<double>(static_cast<double>(m), 1.0));
  }
  return worst;
}

}  // namespace detail

inline bool cmd_verify(const RunConfig& cfg, Writer& w) {
  bool all = true;
  const auto& f = cfg.poly;
  auto emit = [&](const detail::Check& c) {
    all = all && c.pass();
    w.row({c.name, f.to_string(), c.n, c.value, c.tolerance, c.pass()});
  };
  emit({"gauss_root_identity", std::monostate{}, detail::gauss_identity_error(f, 500), 1e-6});
  emit({"series_multiplicativity", std::monostate{}, detail::multiplicativity_error(f, 100), 1e-9});
  emit({"euler_factor_match", std::monostate{}, detail::euler_match_error(f, 1000), 1e-9});
  emit({"bias_equals_euler", std::monostate{}, detail::bias_euler_error(f, 1000), 1e-15});
  for (auto n : cfg.n_values) {
    const auto table = build_prime_table(n, detail::sieve_options(cfg));
    const LambdaWeights lambda(table);
    const auto report = verify_orthogonality(lambda, f);
    emit({"orthogonality", n, report.relative_error, 1e-8});
    CountOptions direct{CountPath::direct, 0, cfg.threads};
    CountOptions spectral{CountPath::spectral, 0, cfg.threads};
    const auto cd = count_pairs_linear_form(table, f, cfg.form, direct);
    const auto cs = count_pairs_linear_form(table, f, cfg.form, spectral);
    emit({"count_paths_agree", n, cd == cs ? 0.0 : std::fabs(static_cast<double>(cd) - static_cast<double>(cs)),
          0.5});
    const double wd = weighted_count_linear_form(lambda, f, cfg.form, direct);
    const double ws = weighted_count_linear_form(lambda, f, cfg.form, spectral);
    emit({"weighted_paths_agree", n, std::fabs(wd - ws) / std::max(std::fabs(wd), 1.0), 1e-6});
    emit({"nu_closed_form", n, detail::nu_error(n), 1e-8});
    emit({"conjugate_symmetry", n, detail::symmetry_error(lambda, f, weighted_cutoff(f, LinearForm{}, n)), 1e-9});
  }
  return all;
}

inline bool cmd_sweep(const RunConfig& cfg, Writer& w) {
  const auto series = generalized_singular_series(cfg.poly, cfg.form, cfg.truncation_prime);
  std::optional<double> previous;
  for (auto n : cfg.n_values) {
    const auto pt = detail::count_point(cfg, n, series.value);
    const Cell rw = optional_ratio(pt.weighted, pt.main_weighted);
    const Cell ru = optional_ratio(static_cast<double>(pt.exact), pt.main_unweighted);
    Cell dw = std::monostate{}, du = std::monostate{}, improved = std::monostate{};
    if (auto* r = std::get_if<double>(&rw)) {
      const double dev = std::fabs(*r - 1.0);
      dw = dev;
      if (previous) improved = dev < *previous;
      previous = dev;
    }
    if (auto* r = std::get_if<double>(&ru)) du = std::fabs(*r - 1.0);
    w.row(detail::concat(detail::head(cfg), {pt.n, pt.exact, pt.weighted, pt.main_weighted, pt.main_unweighted, rw,
                                             dw, ru, du, improved}));
  }
  return true;
}

inline const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"count",
       {{"poly", "a1", "a2", "N", "exact", "weighted", "main_weighted", "main_unweighted", "ratio_weighted",
         "ratio_unweighted", "series_value", "series_tail_bound", "elapsed_s"},
        cmd_count}},
      {"predict",
       {{"poly", "a1", "a2", "N", "cutoff_m", "series_value", "series_tail_bound", "c_factor", "main_weighted",
         "main_unweighted"},
        cmd_predict}},
      {"series",
       {{"poly", "a1", "a2", "euler_value", "truncation_prime", "tail_bound", "factor_count", "qsum_value",
         "truncation_q", "delta", "elapsed_s"},
        cmd_series}},
      {"bias", {{"poly", "a1", "a2", "N", "p", "class", "theoretical", "empirical", "deviation"}, cmd_bias}},
      {"verify", {{"check", "poly", "N", "value", "tolerance", "pass"}, cmd_verify}},
      {"sweep",
       {{"poly", "a1", "a2", "N", "exact", "weighted", "main_weighted", "main_unweighted", "ratio_weighted",
         "deviation_weighted", "ratio_unweighted", "deviation_unweighted", "improved"},
        cmd_sweep}},
  };
  return table;
}

// ---- entry point ---------------------------------------------------------

inline int exit_code_for(std::string_view kind) { return kind == "argument" || kind == "parse" ? 2 : 1; }

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prime pairs with differences in a polynomial image"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> n_items;
  bool timing = false;
  std::map<std::string, std::string> flag_values;
  for (const auto& [name, entry] : commands()) {
    auto* sub = app.add_subcommand(name, "");
    sub->add_option("--config", config_path, "flat key=value file; flags override it");
    auto add = [&](const std::string& key, const std::string& help) {
      options[name + "/" + key] = sub->add_option("--" + key, flag_values[key], help);
    };
    add("poly", "polynomial, e.g. \"x^2+1\" or [1,0,1]");
    add("form", "linear form a1,a2 (default 1,-1)");
    options[name + "/n"] = sub->add_option("--n", n_items, "N value or lo:hi:factor range; repeatable");
    add("trunc-p", "Euler product truncation prime");
    add("trunc-q", "q-sum truncation");
    add("format", "csv or json");
    add("out", "output file");
    add("threads", "worker count or auto");
    add("fast-path", "auto, direct or spectral");
    if (name == "bias") add("max-p", "largest prime in the table");
    options[name + "/timing"] = sub->add_flag("--timing", timing, "report elapsed_s");
  }
  app.get_subcommand("count")->description("exact and weighted counts against the main terms");
  app.get_subcommand("predict")->description("main terms only");
  app.get_subcommand("series")->description("singular series as Euler product and q-sum");
  app.get_subcommand("bias")->description("theoretical and empirical bias factors per prime");
  app.get_subcommand("verify")->description("identity and orthogonality checks");
  app.get_subcommand("sweep")->description("ratio convergence across N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::unique_ptr<Writer> writer;
  std::ofstream file;
  const auto& entry = commands().at(command);
  try {
    std::map<std::string, std::string> values;
    if (!config_path.empty()) values = read_config_file(config_path);
    for (const auto& key : config_keys()) {
      auto it = options.find(command + "/" + key);
      if (it == options.end() || it->second->count() == 0) continue;
      if (key == "n") {
        std::string joined;
        for (const auto& s : n_items) joined += (joined.empty() ? "" : ",") + s;
        values["n"] = joined;
      } else if (key == "timing") {
        values["timing"] = timing ? "true" : "false";
      } else {
        values[key] = flag_values[key];
      }
    }
    // The writer exists before validation so usage errors are reported in the requested format.
    Format format = Format::csv;
    if (auto it = values.find("format"); it != values.end() && it->second == "json") format = Format::json;
    std::ostream* sink = &out;
    if (auto it = values.find("out"); it != values.end() && !it->second.empty()) {
      file.open(it->second, std::ios::binary);
      if (!file) {
        err << "error: cannot open output file '" << it->second << "'\n";
        return 2;
      }
      sink = &file;
    }
    if (format == Format::json) writer = std::make_unique<JsonWriter>(*sink, command);
    else writer = std::make_unique<CsvWriter>(*sink);
    writer->begin(entry.columns);

    const RunConfig cfg = build_config(command, values);
    const bool ok = entry.body(cfg, *writer);
    writer->finish(ok ? "ok" : "fail", std::nullopt);
    if (!ok) err << "verification failed\n";
    return ok ? 0 : 1;
  } catch (const Error& e) {
    err << "error (" << e.kind() << "): " << e.what() << '\n';
    if (writer) writer->finish("error", Failure{std::string(e.kind()), e.what()});
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error (resource): out of memory\n";
    if (writer) writer->finish("error", Failure{"resource", "out of memory"});
    return 1;
  } catch (const std::exception& e) {
    err << "error (internal): " << e.what() << '\n';
    if (writer) writer->finish("error", Failure{"internal", e.what()});
    return 1;
  }
}

}  // namespace polyprime::cli
