#include "gammalab/cli/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gammalab/cli/cache.hpp"
#include "gammalab/errors.hpp"
#include "gammalab/sequences.hpp"
#include "json.hpp"

namespace gammalab::cli {
namespace {

using Clock = std::chrono::steady_clock;

// Runs f(ns[i]) for every i on up to `jobs` threads; results stay in input order.
template <class R, class F>
std::vector<R> parallel_map(const std::vector<index_t>& ns, unsigned jobs, F f) {
  std::vector<R> out(ns.size());
  std::vector<std::exception_ptr> errors(ns.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ns.size(); i = next++) {
      try {
        out[i] = f(ns[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ns.size())));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Manifest base_manifest(const RunConfig& config) {
  Manifest m;
  m.command = config.command;
  m.command_line = config.command_line;
  m.policy = config.policy;
  m.frac_bits = config.frac_bits;
  m.tail_eps = config.tail_eps;
  m.seed = config.seed;
  m.n_range = config.n_spec;
  m.jobs = config.jobs;
  if (config.cache_dir) m.cache_dir = config.cache_dir->string();
  return m;
}

void require_positive(const std::vector<index_t>& ns) {
  for (index_t n : ns) {
    if (n == 0) throw ConfigError("n must be >= 1");
  }
}

std::optional<mp::ErrBound> parse_tail_eps(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  Rat eps;
  try {
    eps = decimal_to_rat(*text);
  } catch (const std::exception&) {
    throw ConfigError("--tail-eps: not a decimal number: " + *text);
  }
  if (eps <= 0) throw ConfigError("--tail-eps must be positive");
  return mp::ErrBound::upper(eps);
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

std::vector<index_t> parse_n_spec(const std::string& spec) {
  auto parse_index = [&](const std::string& s) -> index_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit) || s.size() > 9) {
      throw ConfigError("bad n specification: " + spec);
    }
    return static_cast<index_t>(std::stoul(s));
  };
  std::vector<index_t> ns;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const index_t a = parse_index(spec.substr(0, dots));
    const index_t b = parse_index(spec.substr(dots + 2));
    for (index_t n = a; n <= b; ++n) ns.push_back(n);
    return ns;
  }
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) ns.push_back(parse_index(item));
  return ns;
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "gammalab";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["command_line"] = command_line;
  j["policy"] = {{"target_bits", policy.target_bits},
                 {"guard_bits", policy.guard_bits},
                 {"max_bits", policy.max_bits},
                 {"auto_escalate", policy.auto_escalate},
                 {"frac_bits", frac_bits},
                 {"tail_eps", tail_eps ? nlohmann::ordered_json(*tail_eps) : nullptr}};
  j["seed"] = std::to_string(seed);
  j["n_range"] = n_range;
  j["jobs"] = jobs;
  j["timings"]["wall_seconds"] = wall.count();
  auto& per_n = j["timings"]["per_n_seconds"] = nlohmann::ordered_json::object();
  for (const auto& [n, s] : per_n_seconds) per_n[std::to_string(n)] = s;
  auto& s = j["suites"] = nlohmann::ordered_json::object();
  for (const auto& [name, c] : suites) s[name] = {{"passed", c.passed}, {"failed", c.failed}};
  j["cache"] = {{"dir", cache_dir ? nlohmann::ordered_json(*cache_dir) : nullptr},
                {"hits", cache_hits},
                {"misses", cache_misses},
                {"corrupt", cache_corrupt},
                {"written", cache_written}};
  return j.dump(2) + "\n";
}

CommandResult cmd_verify(const RunConfig& config) {
  if (config.n_max == 0) throw ConfigError("--n-max must be >= 1");
  CommandResult res;
  res.manifest = base_manifest(config);
  res.manifest.n_range = "1.." + std::to_string(config.n_max);

  verify::Options options;
  options.seed = config.seed;
  options.corrupt_stirling = config.corrupt_stirling;
  const verify::Report report = verify::run_exact_suite(config.n_max, options);

  res.table.add_column("identity");
  res.table.add_column("n_max", CellKind::integer);
  res.table.add_column("passed", CellKind::integer);
  res.table.add_column("failed", CellKind::integer);
  for (const auto& [name, counts] : report.suites) {
    res.table.begin_row();
    res.table.set("identity", name)
        .set("n_max", static_cast<long long>(config.n_max))
        .set("passed", static_cast<long long>(counts.passed))
        .set("failed", static_cast<long long>(counts.failed));
  }
  res.manifest.suites = report.suites;
  if (const auto& f = report.first_failure) {
    res.messages.push_back("FAIL " + f->identity + " at n=" + std::to_string(f->n) + ": " + f->detail);
    res.exit_code = kExitVerificationFailed;
  } else {
    res.messages.push_back("all exact identities hold for n <= " + std::to_string(config.n_max));
  }
  return res;
}

CommandResult cmd_table(const RunConfig& config) {
  require_positive(config.ns);
  const std::optional<mp::ErrBound> tail_eps = parse_tail_eps(config.tail_eps);
  CommandResult res;
  res.manifest = base_manifest(config);

  Table& t = res.table;
  t.add_column("n", CellKind::integer);
  t.add_column("status");
  t.add_column("A");
  t.add_column("d2n");
  for (const char* name : {"L_logfact", "L_logS"}) t.add_bounded_column(name);
  t.add_column("L_consistent", CellKind::boolean);
  t.add_bounded_column("logS");
  for (const char* name : {"I_closed", "I_series"}) t.add_bounded_column(name);
  t.add_column("I_consistent", CellKind::boolean);
  t.add_column("tail_cutoff", CellKind::integer);
  t.add_column("tail_bound");
  for (const char* name : {"frac_logS", "Q", "dist_Q_zero", "dist_Q_threshold"}) t.add_bounded_column(name);
  t.add_column("precision_used", CellKind::integer);

  struct Outcome {
    std::optional<seq::SeqRecord> record;
    std::string failure;
    double seconds = 0;
  };
  const auto outcomes = parallel_map<Outcome>(config.ns, config.jobs, [&](index_t n) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o.record = seq::build_record(n, config.policy, tail_eps);
    } catch (const PrecisionInsufficient& e) {
      o.failure = std::string("precision-insufficient: ") + first_line(e.what());
    }
    o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return o;
  });

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    res.manifest.per_n_seconds.emplace_back(config.ns[i], o.seconds);
    t.begin_row();
    t.set("n", static_cast<long long>(config.ns[i]));
    if (!o.record) {
      t.set("status", o.failure);
      res.exit_code = std::max<int>(res.exit_code, kExitPrecisionExhausted);
      continue;
    }
    const seq::SeqRecord& r = *o.record;
    t.set("status", r.status).set("A", r.A.get_str()).set("d2n", r.d2n.get_str());
    t.set_bounded("L_logfact", r.L_logfact).set_bounded("L_logS", r.L_logS).set_bool("L_consistent", r.L_consistent);
    t.set_bounded("I_closed", r.I_closed).set_bounded("I_series", r.I_series);
    t.set_bool("I_consistent", r.I_consistent);
    t.set("tail_cutoff", static_cast<long long>(r.tail_cutoff)).set("tail_bound", r.tail_bound.to_string(3));
    if (r.has_criterion) {
      t.set_bounded("logS", r.logS).set_bounded("frac_logS", r.frac_logS).set_bounded("Q", r.Q);
      t.set_bounded("dist_Q_zero", r.dist_Q_zero).set_bounded("dist_Q_threshold", r.dist_Q_threshold);
    }
    t.set("precision_used", static_cast<long long>(r.precision_used));
    if (r.status.starts_with("precision-insufficient")) {
      res.exit_code = std::max<int>(res.exit_code, kExitPrecisionExhausted);
    } else if (r.status != "ok") {
      res.exit_code = std::max<int>(res.exit_code, kExitVerificationFailed);
    }
    if (r.status != "ok") res.messages.push_back("n=" + std::to_string(r.n) + ": " + r.status);
  }
  return res;
}

CommandResult cmd_criterion(const RunConfig& config) {
  require_positive(config.ns);
  if (config.frac_bits < 1) throw ConfigError("--frac-bits must be >= 1");
  CommandResult res;
  res.manifest = base_manifest(config);

  Table& t = res.table;
  t.add_column("n", CellKind::integer);
  t.add_column("status");
  t.add_column("d2n");
  t.add_column("floor_logS");
  for (const char* name : {"frac_logS", "Q", "dist_Q_zero", "dist_Q_threshold"}) t.add_bounded_column(name);
  t.add_column("precision_used", CellKind::integer);

  struct Outcome {
    std::optional<seq::Criterion> crit;
    std::string failure;
    double seconds = 0;
  };
  const auto outcomes = parallel_map<Outcome>(config.ns, config.jobs, [&](index_t n) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o.crit = seq::Q_criterion(n, config.frac_bits, config.policy);
    } catch (const PrecisionInsufficient& e) {
      o.failure = std::string("precision-insufficient: ") + first_line(e.what());
    }
    o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return o;
  });

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    res.manifest.per_n_seconds.emplace_back(config.ns[i], o.seconds);
    t.begin_row();
    t.set("n", static_cast<long long>(config.ns[i]));
    if (!o.crit) {
      t.set("status", o.failure);
      res.messages.push_back("n=" + std::to_string(config.ns[i]) + ": " + o.failure);
      res.exit_code = kExitPrecisionExhausted;
      continue;
    }
    const seq::Criterion& c = *o.crit;
    t.set("status", Cell("ok")).set("d2n", c.d2n.get_str()).set("floor_logS", c.floor_logS.get_str());
    t.set_bounded("frac_logS", c.frac_logS).set_bounded("Q", c.Q);
    t.set_bounded("dist_Q_zero", c.dist_zero).set_bounded("dist_Q_threshold", c.dist_threshold);
    t.set("precision_used", static_cast<long long>(c.precision));
  }
  return res;
}

CommandResult cmd_asym(const RunConfig& config) {
  require_positive(config.ns);
  CommandResult res;
  res.manifest = base_manifest(config);

  Table& t = res.table;
  t.add_column("law");
  t.add_column("n", CellKind::integer);
  for (const char* name : {"model", "measured", "ratio", "residual"}) t.add_bounded_column(name);
  t.add_column("note");
  t.add_column("trend_monotone", CellKind::boolean);
  t.add_column("trend_closer_at_high_end", CellKind::boolean);
  t.add_column("aitken_limit");
  t.add_column("aitken_limit_err");
  t.add_column("aitken_degenerate", CellKind::boolean);

  std::vector<asym::Law> laws = config.laws;
  if (laws.empty()) laws.assign(std::begin(asym::kAllLaws), std::end(asym::kAllLaws));

  for (asym::Law law : laws) {
    std::vector<asym::Row> rows = parallel_map<asym::Row>(
        config.ns, config.jobs, [law](index_t n) { return asym::evaluate(law, n); });
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    const asym::Trend trend = asym::summarize(law, rows);
    for (const asym::Row& row : rows) {
      t.begin_row();
      t.set("law", Cell(std::string(asym::law_id(law)))).set("n", static_cast<long long>(row.n));
      t.set_bounded("model", row.model).set_bounded("measured", row.measured).set_bounded("ratio", row.ratio);
      if (row.residual) t.set_bounded("residual", *row.residual);
      t.set("note", Cell(trend.report_only ? "report-only: no tolerance" : ""));
      t.set_bool("trend_monotone", trend.monotone);
      t.set_bool("trend_closer_at_high_end", trend.closer_at_high_end);
      if (trend.aitken) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", trend.aitken->limit);
        t.set("aitken_limit", Cell(buf)).set("aitken_limit_err", Cell("uncertified"));
        t.set_bool("aitken_degenerate", trend.aitken->degenerate);
      }
    }
  }
  return res;
}

std::string gamma_digits(int digits) {
  if (digits < 1) throw ConfigError("digits must be >= 1");
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  for (mp::prec_t prec = static_cast<mp::prec_t>(digits * 3.33) + 64;; prec *= 2) {
    const mp::Bounded g = mp::euler_gamma(prec);
    Rat lo, hi;
    mpfr_get_q(lo.get_mpq_t(), g.lower().get());
    mpfr_get_q(hi.get_mpq_t(), g.upper().get());
    Int a, b;
    const Rat slo = lo * scale, shi = hi * scale;
    mpz_fdiv_q(a.get_mpz_t(), slo.get_num_mpz_t(), slo.get_den_mpz_t());
    mpz_fdiv_q(b.get_mpz_t(), shi.get_num_mpz_t(), shi.get_den_mpz_t());
    if (a != b) continue;
    std::string frac = a.get_str();
    frac.insert(0, static_cast<std::size_t>(digits) - std::min<std::size_t>(frac.size(), digits), '0');
    return "0." + frac;
  }
}

CommandResult cmd_gamma(const RunConfig& config) {
  CommandResult res;
  res.manifest = base_manifest(config);
  res.manifest.n_range = "";
  res.text = gamma_digits(config.digits) + "\n";
  return res;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  std::optional<DiskCache> cache;
  CommandResult res;
  try {
    if (config.cache_dir) {
      cache.emplace(*config.cache_dir);
      load_tables(*cache);
    }
    if (config.command == "verify") {
      res = cmd_verify(config);
    } else if (config.command == "table") {
      res = cmd_table(config);
    } else if (config.command == "criterion") {
      res = cmd_criterion(config);
    } else if (config.command == "asym") {
      res = cmd_asym(config);
    } else if (config.command == "gamma") {
      res = cmd_gamma(config);
    } else {
      throw ConfigError("unknown command: " + config.command);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoOrConfig;
  } catch (const PrecisionInsufficient& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecisionExhausted;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoOrConfig;
  }

  auto emit = [&](std::ostream& sink) {
    if (res.text) {
      sink << *res.text;
    } else {
      res.table.write(sink, config.format);
    }
  };
  if (config.out) {
    std::ofstream file(*config.out, std::ios::binary | std::ios::trunc);
    if (file) emit(file);
    if (!file) {
      err << "error: cannot write " << config.out->string() << "\n";
      return kExitIoOrConfig;
    }
  } else {
    emit(out);
  }

  if (cache) {
    try {
      store_tables(*cache);
    } catch (const std::exception& e) {
      err << "warning: cache not updated: " << e.what() << "\n";
    }
    const CacheStats& s = cache->stats();
    res.manifest.cache_hits = s.hits;
    res.manifest.cache_misses = s.misses;
    res.manifest.cache_corrupt = s.corrupt;
    res.manifest.cache_written = s.written;
  }
  res.manifest.wall = Clock::now() - start;

  for (const std::string& m : res.messages) err << m << "\n";
  if (config.out) {
    std::ofstream manifest(config.out->string() + ".manifest.json", std::ios::binary | std::ios::trunc);
    manifest << res.manifest.to_json();
    if (!manifest) {
      err << "error: cannot write manifest\n";
      return kExitIoOrConfig;
    }
  } else {
    err << res.manifest.to_json();
  }
  return res.exit_code;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gammalab: exact and certified numerics around Euler's constant"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::string format = "csv", out_path, cache_dir;
  std::vector<std::string> laws;
  bool no_escalate = false;
  config.jobs = std::max(1u, std::thread::hardware_concurrency());

  app.add_option("--n", config.n_spec, "index range A..B or list a,b,c");
  app.add_option("--bits", config.policy.target_bits, "target bits")->check(CLI::PositiveNumber);
  app.add_option("--guard-bits", config.policy.guard_bits, "guard bits")->check(CLI::NonNegativeNumber);
  app.add_option("--max-bits", config.policy.max_bits, "escalation ceiling")->check(CLI::PositiveNumber);
  app.add_flag("--no-escalate", no_escalate, "fail instead of raising precision");
  app.add_option("--frac-bits", config.frac_bits, "certified fractional bits of log S_n");
  app.add_option("--tail-eps", config.tail_eps, "absolute target for the I_n series (decimal)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_path, "data file (default stdout)");
  app.add_option("--seed", config.seed, "seed for sampled checks");
  app.add_option("--jobs", config.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", cache_dir, "cache directory (default $GAMMALAB_CACHE)");

  auto* verify_cmd = app.add_subcommand("verify", "exact identity suite");
  verify_cmd->add_option("--n-max", config.n_max, "largest n");
  app.add_subcommand("table", "per-n records");
  app.add_subcommand("criterion", "Q_n probe with certified fractional parts");
  auto* asym_cmd = app.add_subcommand("asym", "ratio-to-model series");
  asym_cmd->add_option("--law", laws, "law ids (default all)")->delimiter(',');
  auto* gamma_cmd = app.add_subcommand("gamma", "certified digits of Euler's constant");
  gamma_cmd->add_option("digits,--digits", config.digits, "digits after the point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIoOrConfig;
  }

  config.command = app.get_subcommands().front()->get_name();
  for (int i = 1; i < argc; ++i) {
    if (i > 1) config.command_line += ' ';
    config.command_line += argv[i];
  }
  config.policy.auto_escalate = !no_escalate;
  config.format = *parse_format(format);
  if (!out_path.empty()) config.out = out_path;
  if (!cache_dir.empty()) {
    config.cache_dir = cache_dir;
  } else if (const char* env = std::getenv("GAMMALAB_CACHE"); env && *env) {
    config.cache_dir = env;
  }
  for (const std::string& id : laws) {
    const auto law = asym::parse_law(id);
    if (!law) {
      err << "error: unknown law " << id << "\n";
      return kExitIoOrConfig;
    }
    config.laws.push_back(*law);
  }
  try {
    if (config.command == "table" || config.command == "criterion" || config.command == "asym") {
      if (config.n_spec.empty()) throw ConfigError("--n is required");
      config.ns = parse_n_spec(config.n_spec);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoOrConfig;
  }
  return run(config, out, err);
}

}  // namespace gammalab::cli
