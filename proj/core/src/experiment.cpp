// Config parser and pipeline orchestration. The parser is line-based
// `key = value` with dotted keys, bracketed lists, quoted strings, and `#`
// comments; it collects every violation with line and column instead of
// stopping at the first. The pipeline runs check -> bound -> tail ->
// ldp-scan sequentially, writes one CSV per stage, and finishes with a JSON
// manifest; a stage failure aborts later stages but still writes a partial
// manifest naming the failed stage.

#include "utail/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "token_detail.hpp"
#include "utail/errors.hpp"
#include "utail/ldp.hpp"
#include "utail/mc_engine.hpp"
#include "utail/rng.hpp"
#include "utail/special.hpp"
#include "utail/version.hpp"

namespace utail {

namespace fs = std::filesystem;

const char* const kCheckCsvHeader = "name,ok,evidence";
const char* const kBoundCsvHeader =
    "n,m,k,t,beta,v_used,c_factor,gauss,mid,union,total,region,"
    "log_gauss,log_mid,log_union,log_total";
const char* const kTailCsvHeader =
    "n,t,exceedances,trials,p_hat,ci_low,ci_high,"
    "log_p_hat,log_ci_low,log_ci_high";
const char* const kLdpScanCsvHeader =
    "n,k,t,I_kt,exceedances,trials,p_hat,neg_log_phat,ratio,"
    "lower_bound,bound_total,censored,log_lower_bound,log_bound_total";

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  int col = 0;  // 1-based column where the value starts
};

using EntryMap = std::map<std::string, RawValue>;

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment_id", "model",        "kernel",         "n_values",
      "t_grid",        "beta",         "v_mode",         "mc.replications",
      "mc.seed",       "mc.ci_level",  "outputs.dir",    "outputs.check",
      "outputs.bound", "outputs.tail", "outputs.ldp_scan",
      "outputs.manifest"};
  return keys;
}

bool valid_key_chars(std::string_view key) {
  if (key.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(key[0])) && key[0] != '_')
    return false;
  for (char c : key)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
      return false;
  return true;
}

std::string strip_quotes(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

void scan_line(std::string_view raw, int lineno, EntryMap& entries,
               std::vector<ConfigViolation>& viol) {
  if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
  bool quoted = false;
  std::size_t cut = raw.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '"') quoted = !quoted;
    else if (raw[i] == '#' && !quoted) {
      cut = i;
      break;
    }
  }
  std::string_view line = raw.substr(0, cut);
  std::size_t first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos) return;
  std::size_t eq = line.find('=');
  if (eq == std::string_view::npos) {
    viol.push_back({lineno, static_cast<int>(first) + 1,
                    "expected `key = value`"});
    return;
  }
  std::string key(detail::trim(line.substr(0, eq)));
  std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
  std::string value;
  int vcol = static_cast<int>(eq) + 2;
  if (vstart != std::string_view::npos) {
    value = std::string(detail::trim(line.substr(vstart)));
    vcol = static_cast<int>(vstart) + 1;
  }
  int kcol = static_cast<int>(first) + 1;
  if (!valid_key_chars(key)) {
    viol.push_back({lineno, kcol, "malformed key '" + key + "'"});
    return;
  }
  const auto& known = known_keys();
  if (std::find(known.begin(), known.end(), key) == known.end()) {
    viol.push_back({lineno, kcol,
                    detail::with_suggestions("unknown key '" + key + "'", key,
                                             known)});
    return;
  }
  if (auto it = entries.find(key); it != entries.end()) {
    viol.push_back({lineno, kcol,
                    "duplicate key '" + key + "' (already set on line " +
                        std::to_string(it->second.line) + ")"});
    return;
  }
  if (value.empty()) {
    viol.push_back({lineno, vcol, "key '" + key + "' has no value"});
    return;
  }
  entries.emplace(std::move(key), RawValue{std::move(value), lineno, vcol});
}

EntryMap scan_entries(const std::string& text,
                      std::vector<ConfigViolation>& viol) {
  EntryMap entries;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t end = (nl == std::string::npos) ? text.size() : nl;
    scan_line(std::string_view(text.data() + pos, end - pos), ++lineno,
              entries, viol);
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return entries;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  s = detail::trim(s);
  std::uint64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

// Splits "[a, b, c]" into items with the 1-based column of each item.
std::optional<std::vector<std::pair<std::string, int>>> split_list(
    const RawValue& rv, const std::string& key,
    std::vector<ConfigViolation>& viol) {
  std::string_view v = rv.text;
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    viol.push_back(
        {rv.line, rv.col, key + ": expected a bracketed list like [1, 2, 4]"});
    return std::nullopt;
  }
  std::string_view body = v.substr(1, v.size() - 2);
  std::vector<std::pair<std::string, int>> items;
  std::size_t start = 0;
  bool saw_comma = false;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::size_t end = (comma == std::string_view::npos) ? body.size() : comma;
    std::string_view item = body.substr(start, end - start);
    std::size_t lead = item.find_first_not_of(" \t");
    if (lead == std::string_view::npos) {
      if (saw_comma || comma != std::string_view::npos)
        viol.push_back({rv.line, rv.col + 1 + static_cast<int>(start),
                        key + ": empty list element"});
    } else {
      items.emplace_back(std::string(detail::trim(item)),
                         rv.col + 1 + static_cast<int>(start + lead));
    }
    if (comma == std::string_view::npos) break;
    saw_comma = true;
    start = comma + 1;
  }
  return items;
}

const std::vector<std::string>& v_mode_names() {
  static const std::vector<std::string> names = {
      "auto", "subweibull_cap", "polynomial_cap", "mc_estimate", "fixed"};
  return names;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_config("cannot open '" + path.string() + "' for writing");
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw_config("failed writing '" + path.string() + "'");
}

// Comma-joined CSV row accumulator.
struct Row {
  std::string s;
  void raw(const std::string& f) {
    if (!s.empty()) s += ',';
    s += f;
  }
  void add(const std::string& f) { raw(f); }
  void add(const char* f) { raw(f); }
  void add(double x) { raw(to_shortest_string(x)); }
  void add(std::uint64_t x) { raw(std::to_string(x)); }
  void add(int x) { raw(std::to_string(x)); }
};

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", ms);
  return buf;
}

}  // namespace

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  return fnv1a64(bytes);
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(checksum));
  return buf;
}

std::string format_violations(const std::vector<ConfigViolation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (v.line > 0)
      out += "line " + std::to_string(v.line) + ", col " +
             std::to_string(v.column) + ": ";
    out += v.message + "\n";
  }
  return out;
}

double default_beta(const KernelSpec& kernel, const DistributionModel& model) {
  if (model.polynomial_gamma()) {
    double g = kernel_polynomial_gamma(kernel, model);
    double b = 1.0 - 1.0 / g - 0.05;
    if (b > 0.0) return std::min(0.9, b);
  }
  return 0.9;
}

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  auto& viol = result.violations;
  EntryMap entries = scan_entries(text, viol);
  ExperimentConfig cfg;

  auto find = [&](const char* key) -> const RawValue* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto fail = [&](const RawValue& rv, std::string msg) {
    viol.push_back({rv.line, rv.col, std::move(msg)});
  };

  for (const char* req :
       {"experiment_id", "model", "kernel", "n_values", "t_grid"})
    if (!find(req))
      viol.push_back(
          {0, 0, std::string("missing required key '") + req + "'"});

  if (const RawValue* rv = find("experiment_id")) {
    cfg.experiment_id = strip_quotes(rv->text);
    bool ok = !cfg.experiment_id.empty();
    for (char c : cfg.experiment_id)
      ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                  c == '-' || c == '.');
    if (!ok)
      fail(*rv,
           "experiment_id: use letters, digits, '_', '-', '.' only (it names "
           "files and random streams)");
  }

  auto keyed_message = [](const char* key, const char* what) {
    std::string msg(what);
    if (msg.rfind(key, 0) != 0) msg = std::string(key) + ": " + msg;
    return msg;
  };

  if (const RawValue* rv = find("model")) {
    cfg.model_token = strip_quotes(rv->text);
    try {
      cfg.model = DistributionModel::parse(cfg.model_token);
    } catch (const std::exception& e) {
      fail(*rv, keyed_message("model", e.what()));
    }
  }

  if (const RawValue* rv = find("kernel")) {
    cfg.kernel_token = strip_quotes(rv->text);
    try {
      cfg.kernel = KernelSpec::parse(cfg.kernel_token);
    } catch (const std::exception& e) {
      fail(*rv, keyed_message("kernel", e.what()));
    }
  }

  const RawValue* rv_n = find("n_values");
  if (rv_n) {
    if (auto items = split_list(*rv_n, "n_values", viol)) {
      if (items->empty())
        fail(*rv_n, "n_values: list must be nonempty");
      for (const auto& [text, col] : *items) {
        try {
          long long n = detail::parse_int_exact(text, "n_values");
          if (n < 1 || n > 100000000)
            viol.push_back({rv_n->line, col,
                            "n_values: " + text + " out of range [1, 1e8]"});
          else
            cfg.n_values.push_back(static_cast<int>(n));
        } catch (const std::exception& e) {
          viol.push_back({rv_n->line, col, e.what()});
        }
      }
    }
  }

  const RawValue* rv_t = find("t_grid");
  if (rv_t) {
    if (auto items = split_list(*rv_t, "t_grid", viol)) {
      if (items->empty())
        fail(*rv_t, "t_grid: list must be nonempty");
      for (const auto& [text, col] : *items) {
        try {
          double t = detail::parse_double_exact(text, "t_grid");
          if (!std::isfinite(t) || t <= 0.0)
            viol.push_back({rv_t->line, col,
                            "t_grid: entries must be positive and finite"});
          else
            cfg.t_grid.push_back(t);
        } catch (const std::exception& e) {
          viol.push_back({rv_t->line, col, e.what()});
        }
      }
      for (std::size_t i = 1; i < cfg.t_grid.size(); ++i)
        if (cfg.t_grid[i] <= cfg.t_grid[i - 1])
          fail(*rv_t, "t_grid: must be strictly increasing (" +
                          to_shortest_string(cfg.t_grid[i]) + " after " +
                          to_shortest_string(cfg.t_grid[i - 1]) + ")");
    }
  }

  bool beta_given = false;
  if (const RawValue* rv = find("beta")) {
    try {
      cfg.beta = detail::parse_double_exact(rv->text, "beta");
      beta_given = true;
      if (!(cfg.beta > 0.0) || cfg.beta > 1.0)
        fail(*rv, "beta: must lie in (0, 1], got " + rv->text);
    } catch (const std::exception& e) {
      fail(*rv, e.what());
    }
  }

  const RawValue* rv_vmode = find("v_mode");
  if (rv_vmode) {
    cfg.v_mode_token = strip_quotes(rv_vmode->text);
    try {
      auto braced = detail::split_braced(cfg.v_mode_token, "v_mode");
      const std::string& name = braced.name;
      bool known = std::find(v_mode_names().begin(), v_mode_names().end(),
                             name) != v_mode_names().end();
      if (!known) {
        fail(*rv_vmode,
             detail::with_suggestions("v_mode: unknown mode '" + name + "'",
                                      name, v_mode_names()));
      } else if (name == "fixed") {
        if (!braced.has_braces) {
          fail(*rv_vmode, "v_mode: fixed needs a value, e.g. fixed{2.5}");
        } else {
          double v = detail::parse_double_exact(braced.body, "v_mode fixed");
          if (!std::isfinite(v) || v <= 0.0)
            fail(*rv_vmode, "v_mode: fixed value must be positive and finite");
          cfg.v_choice.mode = VMode::fixed;
          cfg.v_choice.fixed_value = v;
        }
      } else {
        if (braced.has_braces)
          fail(*rv_vmode, "v_mode: '" + name + "' takes no parameters");
        if (name == "auto") cfg.v_choice.mode = VMode::automatic;
        if (name == "subweibull_cap") cfg.v_choice.mode = VMode::subweibull_cap;
        if (name == "polynomial_cap") cfg.v_choice.mode = VMode::polynomial_cap;
        if (name == "mc_estimate") cfg.v_choice.mode = VMode::mc_estimate;
      }
    } catch (const std::exception& e) {
      fail(*rv_vmode, e.what());
    }
  }

  if (const RawValue* rv = find("mc.replications")) {
    try {
      long long r = detail::parse_int_exact(rv->text, "mc.replications");
      if (r < 1000)
        fail(*rv, "mc.replications: need at least 1000, got " + rv->text);
      else
        cfg.mc.replications = static_cast<std::uint64_t>(r);
    } catch (const std::exception& e) {
      fail(*rv, e.what());
    }
  }

  if (const RawValue* rv = find("mc.seed")) {
    if (auto s = parse_u64(rv->text))
      cfg.mc.seed = *s;
    else
      fail(*rv, "mc.seed: '" + rv->text +
                    "' is not an unsigned 64-bit integer");
  }

  if (const RawValue* rv = find("mc.ci_level")) {
    try {
      cfg.mc.ci_level = detail::parse_double_exact(rv->text, "mc.ci_level");
      if (!(cfg.mc.ci_level > 0.0) || !(cfg.mc.ci_level < 1.0))
        fail(*rv, "mc.ci_level: must lie in (0, 1), got " + rv->text);
    } catch (const std::exception& e) {
      fail(*rv, e.what());
    }
  }

  auto get_path = [&](const char* key, std::string& dest) {
    if (const RawValue* rv = find(key)) {
      dest = strip_quotes(rv->text);
      if (dest.empty()) fail(*rv, std::string(key) + ": empty path");
    }
  };
  get_path("outputs.dir", cfg.outputs.dir);
  get_path("outputs.check", cfg.outputs.check);
  get_path("outputs.bound", cfg.outputs.bound);
  get_path("outputs.tail", cfg.outputs.tail);
  get_path("outputs.ldp_scan", cfg.outputs.ldp_scan);
  get_path("outputs.manifest", cfg.outputs.manifest);

  // Cross-field semantics, checked only for pieces that parsed.
  if (cfg.kernel && rv_n) {
    for (int n : cfg.n_values)
      if (n < cfg.kernel->order)
        fail(*rv_n, "n_values: n = " + std::to_string(n) +
                        " is below the kernel order m = " +
                        std::to_string(cfg.kernel->order));
  }
  if (cfg.kernel && cfg.model) {
    if (cfg.kernel->family == KernelFamily::omegasq && cfg.model->is_signed())
      viol.push_back(
          {find("kernel")->line, find("kernel")->col,
           "kernel: omegasq has no tail certificate for signed models, so "
           "the bound stage cannot run"});
    if (!beta_given) cfg.beta = default_beta(*cfg.kernel, *cfg.model);
    if (cfg.v_choice.mode == VMode::polynomial_cap && rv_vmode) {
      if (!cfg.model->polynomial_gamma()) {
        fail(*rv_vmode,
             "v_mode: polynomial_cap needs a polynomially tailed model; '" +
                 cfg.model_token + "' is not one");
      } else {
        double g = kernel_polynomial_gamma(*cfg.kernel, *cfg.model);
        if (!(g > 1.0) || !(cfg.beta < 1.0 - 1.0 / g))
          fail(*rv_vmode,
               "v_mode: polynomial_cap needs gamma > 1 and beta < 1 - "
               "1/gamma (gamma = " +
                   to_shortest_string(g) +
                   ", beta = " + to_shortest_string(cfg.beta) + ")");
      }
    }
  }

  cfg.v_choice.reps = std::max<std::uint64_t>(100000, cfg.mc.replications);

  std::stable_sort(viol.begin(), viol.end(),
                   [](const ConfigViolation& a, const ConfigViolation& b) {
                     return a.line < b.line;
                   });
  if (viol.empty()) result.config = std::move(cfg);
  return result;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ParseResult res = parse_config(ss.str());
  if (!res.ok())
    throw_config("config '" + path + "':\n" +
                 format_violations(res.violations));
  return std::move(*res.config);
}

RunReport run_experiment(const ExperimentConfig& config,
                         const RunOptions& options) {
  if (!config.model || !config.kernel)
    throw_config("run_experiment needs a fully parsed config");
  const DistributionModel& model = *config.model;

  RunReport report;
  std::uint64_t seed = config.mc.seed;
  if (const char* env = std::getenv("UTAIL_SEED")) {
    auto s = parse_u64(env);
    if (!s)
      throw_config(std::string("UTAIL_SEED: '") + env +
                   "' is not an unsigned 64-bit integer");
    seed = *s;
  }
  if (options.seed) seed = *options.seed;
  report.seed = seed;
  const int threads = std::max(1, options.threads);

  const fs::path dir = options.out_dir.empty() ? fs::path(config.outputs.dir)
                                               : fs::path(options.out_dir);
  auto artifact_path = [&](const std::string& name_override,
                           const std::string& fallback) {
    fs::path p = name_override.empty() ? fs::path(fallback)
                                       : fs::path(name_override);
    return p.is_absolute() ? p : dir / p;
  };
  const fs::path check_path =
      artifact_path(config.outputs.check, config.experiment_id + "_check.csv");
  const fs::path bound_path =
      artifact_path(config.outputs.bound, config.experiment_id + "_bound.csv");
  const fs::path tail_path =
      artifact_path(config.outputs.tail, config.experiment_id + "_tail.csv");
  const fs::path ldp_path = artifact_path(
      config.outputs.ldp_scan, config.experiment_id + "_ldp_scan.csv");
  const fs::path manifest_path = artifact_path(
      config.outputs.manifest, config.experiment_id + "_manifest.json");

  auto note = [&](const std::string& s) {
    if (options.log) (*options.log) << s << std::endl;
  };

  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0)
        .count();
  };

  std::vector<std::pair<std::string, std::string>> skipped;
  auto enabled = [&](const char* name) {
    return options.stages.empty() ||
           std::find(options.stages.begin(), options.stages.end(), name) !=
               options.stages.end();
  };

  // Pipeline setup: the centering constant is computed once per
  // (kernel, model) and recorded in the manifest.
  KernelSpec kernel = *config.kernel;
  CenteringResult centering;
  bool setup_ok = true;
  try {
    centering = centering_constant(kernel, model);
    kernel = kernel.with_centering(centering.value);
  } catch (const std::exception& e) {
    setup_ok = false;
    report.exit_code = 3;
    report.failed_stage = "setup";
    report.error = e.what();
    note(std::string("setup failed: ") + e.what());
  }

  auto stage = [&](const char* name, const fs::path& path,
                   auto&& body) -> bool {
    if (report.exit_code == 3) return false;
    const auto t0 = clock::now();
    std::string csv;
    try {
      csv = body();
      write_file(path, csv);
    } catch (const std::exception& e) {
      report.exit_code = 3;
      report.failed_stage = name;
      report.error = e.what();
      note(std::string("stage ") + name + " failed: " + e.what());
      return false;
    }
    const double ms = ms_since(t0);
    report.artifacts.push_back(
        {name, path.string(), checksum_hex(file_checksum(path.string())), ms});
    note(std::string("stage ") + name + ": wrote " + path.string() + " (" +
         format_ms(ms) + " ms)");
    return true;
  };

  if (setup_ok && enabled("check"))
    stage("check", check_path, [&] {
      const std::size_t n_check = static_cast<std::size_t>(
          *std::max_element(config.n_values.begin(), config.n_values.end()));
      AssumptionReport rep =
          check_assumptions(kernel, model, n_check, config.t_grid.back());
      std::string csv = std::string(kCheckCsvHeader) + "\n";
      for (const auto& c : rep.checks) {
        Row row;
        row.add(c.name);
        row.add(c.ok ? "1" : "0");
        row.add(csv_quote(c.evidence));
        csv += row.s + "\n";
      }
      return csv;
    });

  std::vector<BoundBreakdown> bound_rows;
  if (setup_ok && enabled("bound"))
    stage("bound", bound_path, [&] {
      KernelTail tail(kernel, model);
      std::string csv = std::string(kBoundCsvHeader) + "\n";
      for (int n : config.n_values) {
        for (double t : config.t_grid) {
          ResolvedV rv = resolve_v(tail, static_cast<std::size_t>(n), t,
                                   config.beta, config.v_choice, seed);
          BoundBreakdown b = evaluate_upper_bound(
              tail, static_cast<std::size_t>(n), t, config.beta, rv.value);
          bound_rows.push_back(b);
          Row row;
          row.add(static_cast<std::uint64_t>(b.n));
          row.add(b.m);
          row.add(b.k);
          row.add(b.t);
          row.add(b.beta);
          row.add(b.v_used);
          row.add(b.c_factor);
          row.add(b.gaussian);
          row.add(b.intermediate);
          row.add(b.union_term);
          row.add(b.total);
          row.add(b.region);
          row.add(b.log_gaussian);
          row.add(b.log_intermediate);
          row.add(b.log_union);
          row.add(b.log_total);
          csv += row.s + "\n";
        }
      }
      return csv;
    });

  std::vector<TailPoint> tail_rows;
  std::vector<std::size_t> tail_row_n;
  if (setup_ok && enabled("tail"))
    stage("tail", tail_path, [&] {
      std::string csv = std::string(kTailCsvHeader) + "\n";
      for (int n : config.n_values) {
        McOptions mo;
        mo.replications = config.mc.replications;
        mo.ci_level = config.mc.ci_level;
        mo.master_seed = seed;
        mo.stream_id = config.experiment_id + "/tail/n=" + std::to_string(n);
        mo.threads = threads;
        auto points = run_tail_estimation(kernel, model,
                                          static_cast<std::size_t>(n),
                                          config.t_grid, mo);
        for (const TailPoint& p : points) {
          tail_rows.push_back(p);
          tail_row_n.push_back(static_cast<std::size_t>(n));
          Row row;
          row.add(std::to_string(n));
          row.add(p.t);
          row.add(p.exceedances);
          row.add(p.trials);
          row.add(p.p_hat);
          row.add(p.ci_low);
          row.add(p.ci_high);
          row.add(std::log(p.p_hat));
          row.add(std::log(p.ci_low));
          row.add(std::log(p.ci_high));
          csv += row.s + "\n";
        }
      }
      return csv;
    });

  if (setup_ok && enabled("ldp_scan") &&
      config.kernel->family == KernelFamily::product) {
    skipped.emplace_back("ldp_scan",
                         "the product kernel has no one-argument minorant, "
                         "so the lower bound and ratio scan do not apply");
    note("stage ldp_scan: skipped (" + skipped.back().second + ")");
  } else if (setup_ok && enabled("ldp_scan")) {
    stage("ldp_scan", ldp_path, [&] {
      LdpScanOptions lo;
      lo.beta = config.beta;
      lo.v = config.v_choice;
      lo.replications = config.mc.replications;
      lo.max_replications =
          config.mc.replications > (UINT64_MAX >> 7)
              ? UINT64_MAX
              : config.mc.replications * 128;
      lo.ci_level = config.mc.ci_level;
      lo.master_seed = seed;
      lo.stream_prefix = config.experiment_id + "/ldp";
      lo.threads = threads;
      std::vector<std::size_t> ns(config.n_values.begin(),
                                  config.n_values.end());
      auto rows = ldp_ratio_scan(kernel, model, ns, config.t_grid.back(), lo);
      std::string csv = std::string(kLdpScanCsvHeader) + "\n";
      for (const LdpScanRow& r : rows) {
        Row row;
        row.add(static_cast<std::uint64_t>(r.n));
        row.add(r.k);
        row.add(r.t);
        row.add(r.i_kt);
        row.add(r.exceedances);
        row.add(r.trials);
        row.add(r.p_hat);
        row.add(r.neg_log_phat);
        row.add(r.ratio);
        row.add(r.lower_bound);
        row.add(r.bound_total);
        row.add(r.censored ? "1" : "0");
        row.add(lower_bound(kernel, model, r.n, r.t).log_value);
        row.add(std::log(r.bound_total));
        csv += row.s + "\n";
      }
      return csv;
    });
  }

  // Optional within-run validity assertion: at every grid point with at
  // least 50 exceedances, the upper bound must sit above the lower
  // confidence limit and the minorant lower bound below the upper one.
  std::string assert_note;
  if (report.exit_code == 0 && options.assert_properties &&
      (bound_rows.size() != tail_rows.size() || tail_rows.empty())) {
    assert_note = "skipped: the assertion pass needs both bound and tail";
    note("assert: " + assert_note);
  } else if (report.exit_code == 0 && options.assert_properties) {
    for (std::size_t i = 0; i < tail_rows.size(); ++i) {
      const TailPoint& p = tail_rows[i];
      if (p.exceedances < 50) continue;
      const BoundBreakdown& b = bound_rows[i];
      const std::size_t n = tail_row_n[i];
      if (b.total < p.ci_low)
        report.assert_violations.push_back(
            "upper bound " + to_shortest_string(b.total) +
            " below the empirical lower CI " + to_shortest_string(p.ci_low) +
            " at n = " + std::to_string(n) +
            ", t = " + to_shortest_string(p.t));
      if (config.kernel->family != KernelFamily::product) {
        LowerBoundResult lb = lower_bound(kernel, model, n, p.t);
        if (lb.value > p.ci_high)
          report.assert_violations.push_back(
              "lower bound " + to_shortest_string(lb.value) +
              " above the empirical upper CI " +
              to_shortest_string(p.ci_high) + " at n = " + std::to_string(n) +
              ", t = " + to_shortest_string(p.t));
      }
    }
    if (!report.assert_violations.empty()) {
      report.exit_code = 4;
      for (const auto& v : report.assert_violations)
        note("assert: " + v);
    }
  }

  nlohmann::ordered_json manifest;
  manifest["experiment_id"] = config.experiment_id;
  manifest["status"] = report.exit_code == 3 ? "failed" : "ok";
  if (report.exit_code == 3) {
    manifest["failed_stage"] = report.failed_stage;
    manifest["error"] = report.error;
  }
  manifest["seed"] = seed;
  manifest["threads"] = threads;
  {
    nlohmann::ordered_json c;
    c["model"] = config.model_token;
    c["kernel"] = config.kernel_token;
    if (setup_ok) {
      c["centering"] = {{"value", centering.value},
                        {"standard_error", centering.standard_error}};
    }
    c["n_values"] = config.n_values;
    c["t_grid"] = config.t_grid;
    c["beta"] = config.beta;
    c["v_mode"] = config.v_mode_token;
    c["mc"] = {{"replications", config.mc.replications},
               {"seed", config.mc.seed},
               {"ci_level", config.mc.ci_level}};
    c["out_dir"] = dir.string();
    manifest["config"] = c;
  }
  manifest["catalog"] = {{"version", version_string},
                         {"models", model_catalog_version},
                         {"kernels", kernel_catalog_version}};
  {
    nlohmann::ordered_json arts = nlohmann::ordered_json::array();
    for (const StageArtifact& a : report.artifacts)
      arts.push_back({{"stage", a.stage},
                      {"path", a.path},
                      {"fnv1a64", a.checksum},
                      {"wall_ms", a.wall_ms}});
    manifest["artifacts"] = arts;
  }
  if (!skipped.empty()) {
    nlohmann::ordered_json sk = nlohmann::ordered_json::array();
    for (const auto& [name, reason] : skipped)
      sk.push_back({{"stage", name}, {"reason", reason}});
    manifest["skipped"] = sk;
  }
  if (options.assert_properties) {
    manifest["assert"] = {{"enabled", true},
                          {"violations", report.assert_violations}};
    if (!assert_note.empty()) manifest["assert"]["note"] = assert_note;
  }
  manifest["total_wall_ms"] = ms_since(run_start);

  try {
    write_file(manifest_path, manifest.dump(2) + "\n");
    report.manifest_path = manifest_path.string();
    note("manifest: " + manifest_path.string());
  } catch (const std::exception& e) {
    if (report.exit_code == 0) {
      report.exit_code = 3;
      report.failed_stage = "manifest";
      report.error = e.what();
    }
    note(std::string("manifest write failed: ") + e.what());
  }
  return report;
}

}  // namespace utail
