#include "latgibbs/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "latgibbs/errors.hpp"
#include "latgibbs/models.hpp"

namespace latgibbs {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Pre-resolution option values, shared by flag and config-file parsing.
struct RawConfig {
  std::string model;
  int q = 2;
  double beta = 0.0;
  double h = 1.0;
  int mesh_l = 2;
  std::string strategy = "exact-min";
  std::string window;
  std::uint64_t seed = 0;
  int samples = 1;
  std::int64_t budget = 10'000'000;
  std::int64_t enum_cap = std::int64_t{1} << 26;
  std::int64_t transfer_cap = std::int64_t{1} << 16;
  std::int64_t joint_cap = std::int64_t{1} << 24;
  std::string out = "-";
  std::string ells = "2,3,4,5";
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T v{};
  in >> v;
  if (in.fail() || !in.eof())
    throw ConfigError("bad value '" + value + "' for key '" + key + "'");
  return v;
}

void apply_pair(RawConfig& rc, const std::string& key,
                const std::string& value) {
  if (key == "model") rc.model = value;
  else if (key == "q") rc.q = parse_number<int>(key, value);
  else if (key == "beta") rc.beta = parse_number<double>(key, value);
  else if (key == "h") rc.h = parse_number<double>(key, value);
  else if (key == "L") rc.mesh_l = parse_number<int>(key, value);
  else if (key == "strategy") rc.strategy = value;
  else if (key == "window") rc.window = value;
  else if (key == "seed") rc.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "samples") rc.samples = parse_number<int>(key, value);
  else if (key == "budget") rc.budget = parse_number<std::int64_t>(key, value);
  else if (key == "enum_cap")
    rc.enum_cap = parse_number<std::int64_t>(key, value);
  else if (key == "transfer_cap")
    rc.transfer_cap = parse_number<std::int64_t>(key, value);
  else if (key == "joint_cap")
    rc.joint_cap = parse_number<std::int64_t>(key, value);
  else if (key == "out") rc.out = value;
  else if (key == "ells") rc.ells = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::int32_t> parse_int_list(const std::string& key,
                                         const std::string& text) {
  std::vector<std::int32_t> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    out.push_back(parse_number<std::int32_t>(key, item));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

RunConfig finalize(const RawConfig& rc, bool window_set) {
  RunConfig cfg;
  cfg.model = rc.model;
  cfg.q = rc.q;
  cfg.beta = rc.beta;
  cfg.h = rc.h;
  cfg.mesh_l = rc.mesh_l;
  cfg.strategy = parse_strategy(rc.strategy);
  cfg.seed = rc.seed;
  cfg.samples = rc.samples;
  cfg.budget = rc.budget;
  cfg.enum_cap = rc.enum_cap;
  cfg.transfer_cap = rc.transfer_cap;
  cfg.joint_cap = rc.joint_cap;
  cfg.out = rc.out;
  if (window_set) {
    auto w = parse_int_list("window", rc.window);
    if (w.size() != 4)
      throw ConfigError("window must be x0,y0,x1,y1");
    cfg.window = {w[0], w[1], w[2], w[3]};
  }
  auto ells = parse_int_list("ells", rc.ells);
  cfg.ells.assign(ells.begin(), ells.end());
  return cfg;
}

void validate_common(const RunConfig& cfg) {
  if (cfg.mesh_l < 2) throw ConfigError("L must be >= 2");
  if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
  if (cfg.budget < 1) throw ConfigError("budget must be >= 1");
  if (cfg.enum_cap < 1 || cfg.transfer_cap < 1 || cfg.joint_cap < 1)
    throw ConfigError("caps must be positive");
  if (!cfg.model.empty()) {
    SpinSystem sys = build_system(cfg);
    if (cfg.strategy == Strategy::monotone_extremes &&
        !sys.monotone_eligible())
      throw ConfigError(
          "strategy 'monotone' requires a monotone-eligible model");
  } else if (cfg.strategy == Strategy::monotone_extremes) {
    throw ConfigError("strategy 'monotone' requires a model to check against");
  }
  for (std::size_t i = 0; i < cfg.ells.size(); ++i) {
    if (cfg.ells[i] < 1) throw ConfigError("ells entries must be >= 1");
    if (i > 0 && cfg.ells[i] <= cfg.ells[i - 1])
      throw ConfigError("ells must strictly increase");
  }
}

void require_window(const RunConfig& cfg) {
  if (cfg.window[0] > cfg.window[2] || cfg.window[1] > cfg.window[3])
    throw ConfigError("window is empty (need x0<=x1 and y0<=y1)");
}

}  // namespace

SpinSystem build_system(const RunConfig& cfg) {
  try {
    if (cfg.model == "potts") return potts(cfg.q, cfg.beta);
    if (cfg.model == "ising") {
      if (cfg.q != 2) throw ConfigError("model 'ising' has q=2");
      return ising(cfg.beta, cfg.h);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown model '" + cfg.model +
                    "' (expected potts or ising)");
}

RunConfig parse_config_text(const std::string& text) {
  RawConfig rc;
  bool window_set = false;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    if (token[0] == '#') {  // comment runs to end of line
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    auto eq = token.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value, got '" + token + "'");
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    if (key == "window") window_set = true;
    apply_pair(rc, key, value);
  }
  RunConfig cfg = finalize(rc, window_set);
  validate_common(cfg);
  if (window_set) require_window(cfg);
  return cfg;
}

Invocation parse_config(const std::vector<std::string>& args) {
  CLI::App app{"latgibbs: perfect sampling of 2-D lattice spin systems"};
  app.require_subcommand(1);

  RawConfig rc;
  struct Tracked {
    std::string key;
    CLI::Option* opt;
  };
  std::map<CLI::App*, std::vector<Tracked>> tracked;
  std::map<CLI::App*, std::string> config_files;
  std::map<CLI::App*, Subcommand> kinds;

  auto attach = [&](CLI::App* sub, Subcommand kind) {
    std::vector<Tracked> t;
    t.push_back({"model", sub->add_option("--model", rc.model,
                                          "spin model: potts or ising")});
    t.push_back({"q", sub->add_option("--q", rc.q, "number of spins (potts)")});
    t.push_back({"beta", sub->add_option("--beta", rc.beta,
                                         "inverse temperature (>= 0)")});
    t.push_back({"h", sub->add_option("--h", rc.h,
                                      "external field on spin 2 (ising, > 0)")});
    t.push_back({"L", sub->add_option("--mesh-l", rc.mesh_l,
                                      "mesh parameter L (>= 2)")});
    t.push_back({"strategy",
                 sub->add_option("--strategy", rc.strategy,
                                 "lower-bound strategy: exact-min (default), "
                                 "monotone, trivial")});
    t.push_back({"window", sub->add_option("--window", rc.window,
                                           "window rectangle x0,y0,x1,y1")});
    t.push_back({"seed", sub->add_option("--seed", rc.seed,
                                         "64-bit seed (default 0)")});
    t.push_back({"samples", sub->add_option("--samples", rc.samples,
                                            "number of samples/runs/instances "
                                            "(default 1)")});
    t.push_back({"budget", sub->add_option("--budget", rc.budget,
                                           "max recursive calls per run "
                                           "(default 10^7)")});
    t.push_back({"enum_cap", sub->add_option("--enum-cap", rc.enum_cap,
                                             "brute-force state cap")});
    t.push_back({"transfer_cap",
                 sub->add_option("--transfer-cap", rc.transfer_cap,
                                 "transfer row-state cap")});
    t.push_back({"joint_cap", sub->add_option("--joint-cap", rc.joint_cap,
                                              "query-tracking table cap")});
    t.push_back({"out", sub->add_option("--out", rc.out,
                                        "output path ('-' for stdout)")});
    t.push_back({"ells", sub->add_option("--ells", rc.ells,
                                         "probe scales, e.g. 2,3,4,5")});
    config_files[sub] = "";
    sub->add_option("--config", config_files[sub],
                    "key=value config file (flags take precedence)");
    tracked[sub] = std::move(t);
    kinds[sub] = kind;
  };

  attach(app.add_subcommand("sample", "draw perfect window samples"),
         Subcommand::sample);
  attach(app.add_subcommand("marginal",
                            "exact window marginal by both engines"),
         Subcommand::marginal);
  attach(app.add_subcommand("probe-wsm",
                            "boundary-influence decay over scales"),
         Subcommand::probe_wsm);
  attach(app.add_subcommand("check-oracle",
                            "randomized transfer-vs-brute equivalence suite"),
         Subcommand::check_oracle);
  attach(app.add_subcommand("stats", "recursion statistics over repeated runs"),
         Subcommand::stats);

  std::vector<const char*> argv;
  argv.push_back("latgibbs");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help;
    help << app.help();
    throw HelpRequested{help.str()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  std::set<std::string> cli_set;
  for (const Tracked& t : tracked[sub])
    if (t.opt->count() > 0) cli_set.insert(t.key);

  if (!config_files[sub].empty()) {
    std::ifstream in(config_files[sub]);
    if (!in)
      throw ConfigError("cannot read config file '" + config_files[sub] + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    RawConfig from_file;
    std::istringstream text(buf.str());
    std::string token;
    while (text >> token) {
      if (token[0] == '#') {
        std::string rest;
        std::getline(text, rest);
        continue;
      }
      auto eq = token.find('=');
      if (eq == std::string::npos)
        throw ConfigError("expected key=value in config file, got '" + token +
                          "'");
      std::string key = token.substr(0, eq);
      std::string value = token.substr(eq + 1);
      if (cli_set.count(key) == 0) {
        apply_pair(rc, key, value);
        cli_set.insert(key);  // later duplicates in the file still override
      }
    }
  }

  const Subcommand kind = kinds[sub];
  const bool window_set = cli_set.count("window") > 0;
  RunConfig cfg = finalize(rc, window_set);
  validate_common(cfg);

  const bool needs_model = kind != Subcommand::check_oracle;
  const bool needs_window = kind == Subcommand::sample ||
                            kind == Subcommand::marginal ||
                            kind == Subcommand::stats;
  const bool needs_mesh = kind == Subcommand::sample || kind == Subcommand::stats;
  if (needs_model && cfg.model.empty())
    throw ConfigError("missing required key 'model'");
  if (needs_window && !window_set)
    throw ConfigError("missing required key 'window'");
  if (needs_window) require_window(cfg);
  if (needs_mesh && cli_set.count("L") == 0)
    throw ConfigError("missing required key 'L' (--mesh-l)");
  return Invocation{kind, cfg};
}

namespace {

const char* subcommand_name(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::sample: return "sample";
    case Subcommand::marginal: return "marginal";
    case Subcommand::probe_wsm: return "probe-wsm";
    case Subcommand::check_oracle: return "check-oracle";
    case Subcommand::stats: return "stats";
  }
  return "?";
}

void write_header(std::ostream& os, Subcommand cmd, const RunConfig& cfg) {
  os << "# latgibbs " << subcommand_name(cmd) << "\n";
  os << "# model=" << (cfg.model.empty() ? "-" : cfg.model) << " q=" << cfg.q
     << " beta=" << g17(cfg.beta) << " h=" << g17(cfg.h) << "\n";
  os << "# L=" << cfg.mesh_l << " strategy=" << strategy_name(cfg.strategy)
     << " window=" << cfg.window[0] << "," << cfg.window[1] << ","
     << cfg.window[2] << "," << cfg.window[3] << " seed=" << cfg.seed
     << " samples=" << cfg.samples << " budget=" << cfg.budget << "\n";
  os << "# enum_cap=" << cfg.enum_cap << " transfer_cap=" << cfg.transfer_cap
     << " joint_cap=" << cfg.joint_cap << "\n";
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << text;
}

std::string assignment_digits(const JointDistribution& d, std::size_t index,
                              int q) {
  // First variable most significant, spins printed 1-based.
  std::vector<int> digits(d.vars.size());
  std::size_t rem = index;
  for (std::size_t i = d.vars.size(); i-- > 0;) {
    digits[i] = static_cast<int>(rem % static_cast<std::size_t>(q));
    rem /= static_cast<std::size_t>(q);
  }
  std::string s;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0) s.push_back('-');
    s += std::to_string(digits[i] + 1);
  }
  return s;
}

int run_sample(const RunConfig& cfg, std::ostream& diag) {
  SpinSystem sys = build_system(cfg);
  Sampler sampler(sys, SamplerConfig{cfg.mesh_l, cfg.strategy, cfg.budget,
                                     cfg.caps(), true});
  Region window = Region::rectangle(cfg.window[0], cfg.window[1], cfg.window[2],
                                    cfg.window[3]);
  std::ostringstream os;
  write_header(os, Subcommand::sample, cfg);
  for (int k = 0; k < cfg.samples; ++k) {
    const std::uint64_t sample_seed = cfg.seed + static_cast<std::uint64_t>(k);
    Sampler::RunState state = sampler.make_state(sample_seed);
    PartialConfiguration grid;
    try {
      grid = sampler.sample_window(state, window);
    } catch (const BudgetExhausted& e) {
      int max_depth = 0;
      for (const RecursionTrace& t : state.traces)
        max_depth = std::max(max_depth, t.max_depth());
      diag << "budget abort on sample " << k << ": " << e.what()
           << " (roots=" << state.traces.size() << " max_depth=" << max_depth
           << ")\n";
      return 3;
    }
    os << "# sample=" << k << " seed=" << sample_seed << "\n";
    for (std::int32_t y = cfg.window[3]; y >= cfg.window[1]; --y) {
      for (std::int32_t x = cfg.window[0]; x <= cfg.window[2]; ++x) {
        if (x > cfg.window[0]) os << ' ';
        os << grid.at(Vertex{x, y}) + 1;
      }
      os << "\n";
    }
    if (k + 1 < cfg.samples) os << "\n";
  }
  write_output(cfg.out, os.str());
  return 0;
}

int run_marginal(const RunConfig& cfg, std::ostream&) {
  SpinSystem sys = build_system(cfg);
  Region window = Region::rectangle(cfg.window[0], cfg.window[1], cfg.window[2],
                                    cfg.window[3]);
  InferenceProblem prob;
  prob.system = &sys;
  prob.free = window;
  prob.query = window;
  JointDistribution dt = marginal_transfer(prob, cfg.caps());
  JointDistribution db = marginal_brute(prob, cfg.caps());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < dt.probs.size(); ++i)
    max_diff = std::max(max_diff, std::abs(dt.probs[i] - db.probs[i]));
  std::ostringstream os;
  write_header(os, Subcommand::marginal, cfg);
  os << "# columns=assignment,p_transfer,p_brute\n";
  for (std::size_t i = 0; i < dt.probs.size(); ++i)
    os << assignment_digits(dt, i, sys.q()) << "," << g17(dt.probs[i]) << ","
       << g17(db.probs[i]) << "\n";
  os << "# max_abs_diff=" << g17(max_diff) << "\n";
  write_output(cfg.out, os.str());
  return 0;
}

int run_probe(const RunConfig& cfg, std::ostream&) {
  SpinSystem sys = build_system(cfg);
  DecayTable table = wsm_probe(sys, cfg.ells, cfg.caps());
  std::ostringstream os;
  write_header(os, Subcommand::probe_wsm, cfg);
  os << "# ells=";
  for (std::size_t i = 0; i < cfg.ells.size(); ++i)
    os << (i ? "," : "") << cfg.ells[i];
  os << "\n# columns=ell,tv\n";
  for (const auto& row : table.rows)
    os << row.ell << "," << g17(row.tv) << "\n";
  write_output(cfg.out, os.str());
  return 0;
}

int run_check_oracle(const RunConfig& cfg, std::ostream& diag) {
  const double tolerance = 1e-10;
  SplitStream master(cfg.seed);
  std::ostringstream os;
  write_header(os, Subcommand::check_oracle, cfg);
  os << "# columns=instance,rows,cols,q,beta,h,context_cells,max_abs_diff\n";
  double max_overall = 0.0;
  for (int k = 0; k < cfg.samples; ++k) {
    SplitStream s = master.split(static_cast<std::uint64_t>(k));
    const int q = 2 + static_cast<int>(s.next_u64() % 2);
    const double beta = 1.5 * s.uniform01();
    const double h = 0.5 + 1.5 * s.uniform01();
    SpinSystem sys = q == 2 ? ising(beta, h) : potts(3, beta);
    const int cols = 1 + static_cast<int>(s.next_u64() % 5);
    const int rows = 1 + static_cast<int>(s.next_u64() % 5);
    Region square = Region::rectangle(0, 0, cols - 1, rows - 1);
    PartialConfiguration ctx;
    for (const Vertex& v : graph_boundary(square))
      ctx.set(v, static_cast<int>(s.next_u64() % static_cast<unsigned>(q)));
    std::vector<Vertex> free_cells(square.begin(), square.end());
    const int holes = static_cast<int>(s.next_u64() % 3);
    for (int i = 0; i < holes && free_cells.size() > 1; ++i) {
      const std::size_t pick = s.next_u64() % free_cells.size();
      ctx.set(free_cells[pick],
              static_cast<int>(s.next_u64() % static_cast<unsigned>(q)));
      free_cells.erase(free_cells.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::vector<Vertex> qcells;
    const int nq = 1 + static_cast<int>(s.next_u64() % 2);
    std::vector<Vertex> pool = free_cells;
    for (int i = 0; i < nq && !pool.empty(); ++i) {
      const std::size_t pick = s.next_u64() % pool.size();
      qcells.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    InferenceProblem prob;
    prob.system = &sys;
    prob.free = Region(free_cells);
    prob.context = ctx;
    prob.query = Region(qcells);
    JointDistribution dt = marginal_transfer(prob, cfg.caps());
    JointDistribution db = marginal_brute(prob, cfg.caps());
    double diff = 0.0;
    for (std::size_t i = 0; i < dt.probs.size(); ++i)
      diff = std::max(diff, std::abs(dt.probs[i] - db.probs[i]));
    max_overall = std::max(max_overall, diff);
    os << k << "," << rows << "," << cols << "," << q << "," << g17(beta)
       << "," << g17(h) << "," << ctx.size() << "," << g17(diff) << "\n";
  }
  const bool pass = max_overall <= tolerance;
  os << "# max_overall=" << g17(max_overall) << "\n";
  os << "# result=" << (pass ? "PASS" : "FAIL") << "\n";
  write_output(cfg.out, os.str());
  if (!pass) diag << "oracle mismatch: max diff " << g17(max_overall) << "\n";
  return pass ? 0 : 1;
}

int run_stats(const RunConfig& cfg, std::ostream&) {
  SpinSystem sys = build_system(cfg);
  Sampler sampler(sys, SamplerConfig{cfg.mesh_l, cfg.strategy, cfg.budget,
                                     cfg.caps(), true});
  Vertex target;
  bool found = false;
  for (std::int32_t y = cfg.window[1]; y <= cfg.window[3] && !found; ++y)
    for (std::int32_t x = cfg.window[0]; x <= cfg.window[2] && !found; ++x)
      if (on_mesh(Vertex{x, y}, cfg.mesh_l)) {
        target = Vertex{x, y};
        found = true;
      }
  if (!found) throw ConfigError("stats: window contains no mesh vertex");

  std::ostringstream os;
  write_header(os, Subcommand::stats, cfg);
  os << "# target=" << target.x << "," << target.y << "\n";
  os << "# columns=run,total_calls,max_depth,aborted\n";
  std::vector<RecursionTrace> completed;
  std::int64_t aborted_runs = 0;
  for (int r = 0; r < cfg.samples; ++r) {
    Sampler::RunState state =
        sampler.make_state(cfg.seed + static_cast<std::uint64_t>(r));
    int aborted = 0;
    try {
      sampler.lazy(state, target);
    } catch (const BudgetExhausted&) {
      aborted = 1;
      ++aborted_runs;
    }
    const int depth =
        state.traces.empty() ? 0 : state.traces.front().max_depth();
    os << r << "," << state.calls_used << "," << depth << "," << aborted
       << "\n";
    if (!aborted && !state.traces.empty())
      completed.push_back(std::move(state.traces.front()));
  }
  os << "# aborted_runs=" << aborted_runs << "\n";
  if (!completed.empty()) {
    BranchingSummary s = branching_stats(completed);
    os << "# completed_runs=" << s.runs << " mean_calls=" << g17(s.mean_calls)
       << " max_depth=" << s.max_depth
       << " indecision_frequency=" << g17(s.indecision_frequency) << "\n";
  }
  write_output(cfg.out, os.str());
  return 0;
}

}  // namespace

int execute(const Invocation& invocation, std::ostream& diagnostics) {
  switch (invocation.cmd) {
    case Subcommand::sample: return run_sample(invocation.config, diagnostics);
    case Subcommand::marginal:
      return run_marginal(invocation.config, diagnostics);
    case Subcommand::probe_wsm:
      return run_probe(invocation.config, diagnostics);
    case Subcommand::check_oracle:
      return run_check_oracle(invocation.config, diagnostics);
    case Subcommand::stats: return run_stats(invocation.config, diagnostics);
  }
  return 1;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    Invocation inv = parse_config(args);
    return execute(inv, std::cerr);
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible configuration: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget abort: " << e.what() << "\n";
    return 3;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace latgibbs
