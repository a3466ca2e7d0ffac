#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "config.hpp"
#include "pbrp/csv_io.hpp"
#include "pbrp/stats.hpp"
#include "report_json.hpp"

namespace pbrp::app {

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = kPass;
  Json result = Json::object();
  std::string text;
  std::vector<std::pair<std::string, std::string>> files;  // relative path, contents
};

// 64 beats 3 beats 2 beats 1 beats 0
int rank(int code) {
  switch (code) {
    case kConfigInvalid: return 4;
    case kIoFailure: return 3;
    case kDiverged: return 2;
    case kVerdictFail: return 1;
    default: return 0;
  }
}

int worse(int a, int b) { return rank(a) >= rank(b) ? a : b; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <class Writer>
std::string to_text(Writer w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

void add_file(Outcome& o, const Experiment& e, const std::string& file, std::string contents) {
  o.files.emplace_back(e.name + "/" + file, std::move(contents));
}

void add_json(Outcome& o, const Experiment& e, const std::string& file, const Json& j) {
  add_file(o, e, file, j.dump(2) + "\n");
}

int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t(1) << k) < n) ++k;
  return k;
}

RoughPathPtr build_lift(const Experiment& e, int jobs) {
  LiftOptions o;
  o.substeps = e.substeps;
  o.jobs = jobs;
  o.alpha = e.alpha;
  return lift(e.driver, e.N, uniform_grid(e.T, e.cells), o);
}

std::size_t end_node(const Experiment& e) { return node_of(e, e.t < 0 ? e.T : e.t); }

// --- hopf-selftest ------------------------------------------------------------

Outcome run_selftest(const Experiment& e, int) {
  Outcome o;
  Json per_d = Json::array();
  std::string first_failure, failed_check;
  int matched = 0;
  bool pass = true;
  for (int d = 1; d <= e.d; ++d) {
    HopfTables T(e.extended_alphabet ? extended_letters(d) : base_letters(d), e.N);
    if (e.corrupt) {
      Forest f, l, r;
      try {
        f = parse_forest(e.corrupt->forest);
        l = parse_forest(e.corrupt->left);
        r = parse_forest(e.corrupt->right);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("corrupt: ") + ex.what());
      }
      if (T.contains(f)) T.corrupt(f, l, r, Exact(e.corrupt->delta));
    }
    const auto res = hopf_selftest(T, d);
    Json j = to_json(res);
    j["d"] = d;
    j["forests"] = T.forests().size();
    per_d.push_back(j);
    matched = res.reference_vectors_matched;
    pass = pass && res.pass();
    o.text += "[" + e.name + "] d=" + std::to_string(d) + " N=" + std::to_string(e.N) + " forests=" +
              std::to_string(T.forests().size()) + "\n";
    for (const auto& c : res.checks) {
      o.text += "  " + c.name + std::string(c.name.size() < 20 ? 20 - c.name.size() : 1, ' ') +
                (c.passed ? "pass" : "FAIL") + "  cases=" + std::to_string(c.cases) + "\n";
      if (!c.passed && first_failure.empty()) {
        first_failure = c.first_failure;
        failed_check = c.name;
      }
    }
  }
  const int want = e.N < 3 ? 2 : 5;
  o.text += "  reference coproducts matched " + std::to_string(matched) + "/" + std::to_string(want) + "\n";
  o.result["pass"] = pass;
  o.result["reference_coproducts_matched"] = matched;
  o.result["reference_coproducts_total"] = want;
  o.result["per_d"] = per_d;
  if (!pass) {
    o.code = kVerdictFail;
    o.result["first_failure"] = failed_check;
    add_file(o, e, "first_failure.csv",
             "# pbrp failure v1\n# check=" + failed_check + "\nforest,left,right,coefficient\n" + first_failure);
  }
  add_json(o, e, "selftest.json", o.result);
  return o;
}

// --- lift -----------------------------------------------------------------------

Outcome run_lift(const Experiment& e, int jobs) {
  Outcome o;
  auto X = build_lift(e, jobs);
  add_file(o, e, "rough_path.csv", to_text([&](std::ostream& os) { write_rough_path(os, *X); }));
  if (e.extension) {
    auto Xhat = bracket_extension(*X, jobs);
    add_file(o, e, "rough_path_extension.csv", to_text([&](std::ostream& os) { write_rough_path(os, *Xhat); }));
  }
  const auto& B = X->basis();
  std::mt19937_64 rng(e.seed);
  double chen = 0.0, chr = 0.0;
  const std::size_t M = X->cells();
  if (M > 0) {
    std::uniform_int_distribution<std::size_t> node(0, M), pick(1, B.size() - 1);
    for (int p = 0; p < e.probes; ++p) {
      std::size_t a[3] = {node(rng), node(rng), node(rng)};
      std::sort(a, a + 3);
      for (std::size_t w = 1; w < B.size(); ++w) chen = std::max(chen, chen_residual(*X, a[0], a[1], a[2], B.forest(w)));
      // both factors non-unit, so the first one has degree below N
      std::size_t f = pick(rng), g = pick(rng);
      while (B.forest(f).degree() >= e.N) f = pick(rng);
      while (B.forest(f).degree() + B.forest(g).degree() > e.N) g = pick(rng);
      chr = std::max(chr, character_residual(*X, a[0], a[2], B.forest(f), B.forest(g)));
    }
  }
  Json slopes = Json::object();
  const int k = log2_exact(M);
  if (M > 0 && (std::size_t(1) << k) == M && k >= 5) {
    std::vector<int> levels;
    for (int L = std::max(0, k - 8); L <= k - 2; ++L) levels.push_back(L);
    for (std::size_t w = 1; w < B.size(); ++w) slopes[B.forest(w).key()] = real(holder_slope(*X, B.forest(w), levels));
  }
  constexpr double kAxiomTolerance = 1e-10;
  const bool pass = chen < kAxiomTolerance && chr < kAxiomTolerance;
  o.code = pass ? kPass : kVerdictFail;
  o.result = {{"N", e.N},
              {"alpha", real(e.alpha)},
              {"cells", M},
              {"forests", B.size()},
              {"probes", e.probes},
              {"chen_residual_max", real(chen)},
              {"character_residual_max", real(chr)},
              {"axiom_tolerance", kAxiomTolerance},
              {"holder_slopes", slopes},
              {"pass", pass}};
  add_json(o, e, "lift.json", o.result);
  o.text = "[" + e.name + "] lift N=" + std::to_string(e.N) + " cells=" + std::to_string(M) +
           " chen=" + fmt("%.3e", chen) + " character=" + fmt("%.3e", chr) + (pass ? "  pass\n" : "  FAIL\n");
  return o;
}

// --- integrate ------------------------------------------------------------------

Outcome run_integrate(const Experiment& e, int jobs) {
  Outcome o;
  auto X = build_lift(e, jobs);
  auto F = make_function(*e.function, e.d);
  auto Y = compose_FX(X, F, 1);
  const Letter a = Letter::base(e.letter);
  const double threshold = (e.N + 1) * e.alpha - 1.0 - e.slack;
  auto rep = rough_integral_report(Y, *X, a, node_of(e, e.s), end_node(e), mesh_strides(e), threshold);
  o.result = to_json(rep);
  o.result["letter"] = e.letter;
  const int k = log2_exact(e.cells);
  if (k >= 6) {
    std::vector<int> levels;
    for (int L = std::max(1, k - 7); L <= k - 2; ++L) levels.push_back(L);
    o.result["defect_slope"] = real(integral_defect_slope(Y, *X, a, levels, e.floor));
  }
  o.code = rep.pass ? kPass : kVerdictFail;
  add_json(o, e, "integral.json", o.result);
  add_file(o, e, "convergence.csv",
           to_text([&](std::ostream& os) { write_convergence(os, rep.meshes, rep.residuals, e.floor); }));
  o.text = "[" + e.name + "] integral against letter " + std::to_string(e.letter) + "  slope " +
           fmt("%.3f", rep.slope) + " (threshold " + fmt("%.3f", threshold) + ")" +
           (rep.pass ? "  pass\n" : "  FAIL\n") + convergence_table(rep.meshes, rep.residuals, e.floor);
  return o;
}

// --- rde ------------------------------------------------------------------------

Outcome run_rde(const Experiment& e, int jobs) {
  Outcome o;
  auto X = build_lift(e, jobs);
  const auto f = make_fields(e);
  auto Y = solve_rde(X, f, e.xi);
  add_file(o, e, "solution.csv", to_text([&](std::ostream& os) { write_controlled_path(os, Y); }));

  Json rates = Json::array();
  bool pass = true;
  const int k = log2_exact(Y.count() - 1);
  if (k >= 6) {
    std::vector<int> levels;
    for (int L = std::max(1, k - 6); L <= k - 2; ++L) levels.push_back(L);
    for (const auto& tau : Y.forests()) {
      const double rate = remainder_rate(Y, tau, levels);
      const double want = (e.N - tau.degree()) * e.alpha - 0.2;
      const bool ok = rate >= want;
      pass = pass && ok;
      rates.push_back({{"forest", tau.key()}, {"rate", real(rate)}, {"threshold", real(want)}, {"pass", ok}});
    }
  }
  o.result["terminal"] = reals(Y.value(X->cells()));
  o.result["remainder_rates"] = rates;

  if (e.fine > 0) {
    // terminal value over the mesh ladder, reported only
    std::vector<double> meshes, residuals;
    Eigen::VectorXd prev;
    Json values = Json::array();
    for (auto stride : mesh_strides(e)) {
      RdeOptions ro;
      ro.stride = stride;
      auto Z = solve_rde(X, f, e.xi, ro);
      Eigen::VectorXd v = Z.value(X->cells());
      meshes.push_back(e.T * double(stride) / double(e.cells));
      residuals.push_back(prev.size() ? (v - prev).lpNorm<Eigen::Infinity>() : std::nan(""));
      values.push_back(reals(v));
      prev = v;
    }
    o.result["ladder"] = {{"meshes", reals(meshes)}, {"values", values}, {"residuals", reals(residuals)},
                          {"slope", real(loglog_slope(std::vector<double>(meshes.begin() + 1, meshes.end()),
                                                      std::vector<double>(residuals.begin() + 1, residuals.end()),
                                                      e.floor))}};
    add_file(o, e, "convergence.csv",
             to_text([&](std::ostream& os) { write_convergence(os, meshes, residuals, e.floor); }));
  }
  o.result["pass"] = pass;
  o.code = pass ? kPass : kVerdictFail;
  add_json(o, e, "rde.json", o.result);
  o.text = "[" + e.name + "] rde N=" + std::to_string(e.N) + " Y_T=" + fmt("%.10g", Y.value(X->cells())(0)) +
           (pass ? "  remainder rates pass\n" : "  remainder rates FAIL\n");
  return o;
}

// --- ito ------------------------------------------------------------------------

Outcome run_ito(const Experiment& e, int jobs) {
  Outcome o;
  auto X = build_lift(e, jobs);
  ItoOptions opt;
  opt.alpha = e.alpha;
  opt.strides = mesh_strides(e);
  opt.s = node_of(e, e.s);
  opt.t = end_node(e);
  opt.tolerance = e.tolerance;
  opt.slack = e.slack;
  opt.floor = e.floor;
  opt.jobs = jobs;
  ItoReport rep;
  if (e.identity == "simple") {
    auto F = make_function(*e.function, e.d);
    rep = e.N == 2 ? verify_simple_N2(X, F, opt) : verify_simple_N3(X, F, opt);
  } else {
    auto F = make_function(*e.function, static_cast<int>(e.xi.size()));
    const auto f = make_fields(e);
    rep = e.N == 2 ? verify_general_N2(X, f, F, e.xi, opt) : verify_general_N3(X, f, F, e.xi, opt);
  }
  o.result = to_json(rep);
  o.code = rep.verdict ? kPass : kVerdictFail;
  add_json(o, e, "ito.json", o.result);
  add_file(o, e, "convergence.csv",
           to_text([&](std::ostream& os) { write_convergence(os, rep.meshes, rep.residuals, e.floor); }));
  o.text = "[" + e.name + "] " + rep.theorem + "  residual " + fmt("%.3e", rep.residuals.back()) + "  order " +
           fmt("%.3f", rep.order) + " (threshold " + fmt("%.3f", rep.threshold) + ", slack " +
           fmt("%.2f", rep.slack) + ")" + (rep.verdict ? "  pass\n" : "  FAIL\n") +
           convergence_table(rep.meshes, rep.residuals, e.floor);
  for (const auto& w : rep.warnings) o.text += "  warning: " + w + "\n";
  return o;
}

// --- dump -----------------------------------------------------------------------

Outcome run_dump(const Experiment& e, int jobs) {
  Outcome o;
  std::optional<HopfTables> T;
  RoughPathPtr X;
  Json files = Json::array();
  for (const auto& t : e.tables) {
    if (t == "coproduct" || t == "star") {
      if (!T) T.emplace(e.extended_alphabet ? extended_letters(e.d) : base_letters(e.d), e.N);
      if (t == "coproduct")
        add_file(o, e, "coproduct.csv", to_text([&](std::ostream& os) { write_coproduct(os, *T); }));
      else
        add_file(o, e, "star.csv", to_text([&](std::ostream& os) { write_star(os, *T); }));
    } else {
      if (!X) X = build_lift(e, jobs);
      if (t == "rough_path") {
        add_file(o, e, "rough_path.csv", to_text([&](std::ostream& os) { write_rough_path(os, *X); }));
      } else {
        if (!e.function) throw ConfigError("function: required by the controlled_path table");
        auto Y = compose_FX(X, make_function(*e.function, e.d), 1);
        add_file(o, e, "controlled_path.csv", to_text([&](std::ostream& os) { write_controlled_path(os, Y); }));
      }
    }
    files.push_back(o.files.back().first);
  }
  if (T) o.result["forests"] = T->forests().size();
  o.result["tables"] = files;
  o.text = "[" + e.name + "] dumped " + std::to_string(files.size()) + " table(s)\n";
  return o;
}

using Runner = Outcome (*)(const Experiment&, int);

Runner runner_for(const std::string& command) {
  if (command == "hopf-selftest") return run_selftest;
  if (command == "lift") return run_lift;
  if (command == "integrate") return run_integrate;
  if (command == "rde") return run_rde;
  if (command == "ito") return run_ito;
  if (command == "dump") return run_dump;
  return nullptr;
}

Outcome run_guarded(Runner run, const Experiment& e, int jobs) {
  try {
    return run(e, jobs);
  } catch (const SolverDivergence& ex) {
    Outcome o;
    o.code = kDiverged;
    o.result = {{"status", "diverged"}, {"message", ex.what()}};
    add_json(o, e, "divergence.json", o.result);
    o.text = "[" + e.name + "] diverged: " + std::string(ex.what()) + "\n";
    return o;
  } catch (const ConfigError& ex) {
    Outcome o;
    o.code = kConfigInvalid;
    o.result = {{"status", "invalid"}, {"message", ex.what()}};
    o.text = "[" + e.name + "] invalid config: " + std::string(ex.what()) + "\n";
    return o;
  } catch (const std::invalid_argument& ex) {
    Outcome o;
    o.code = kConfigInvalid;
    o.result = {{"status", "invalid"}, {"message", ex.what()}};
    o.text = "[" + e.name + "] rejected: " + std::string(ex.what()) + "\n";
    return o;
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << contents;
  os.close();
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"hopf-selftest", "lift", "integrate", "rde", "ito", "dump"};
  return names;
}

int run_command(const std::string& command, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const Runner run = runner_for(command);
  if (!run) {
    err << "unknown command '" << command << "'\n";
    return kConfigInvalid;
  }
  Config cfg;
  try {
    cfg = opt.config ? load_config(*opt.config, command) : default_config(command);
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return kIoFailure;
  } catch (const ConfigError& ex) {
    err << "invalid config: " << ex.what() << "\n";
    return kConfigInvalid;
  }

  // experiments in parallel; a single experiment gets the threads instead
  const std::size_t n = cfg.experiments.size();
  const int jobs = std::max(1, opt.jobs);
  const int outer = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(jobs)));
  const int inner = n == 1 ? jobs : 1;
  std::vector<Outcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < n;) outcomes[k] = run_guarded(run, cfg.experiments[k], inner);
  };
  if (outer <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < outer; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  int code = kPass;
  Json summary;
  summary["command"] = command;
  Json list = Json::array();
  try {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& o = outcomes[k];
      out << o.text;
      Json files = Json::array();
      for (const auto& [rel, contents] : o.files) {
        write_file(fs::path(opt.out) / rel, contents);
        files.push_back(rel);
      }
      list.push_back({{"name", cfg.experiments[k].name}, {"exit", o.code}, {"files", files}, {"result", o.result}});
      code = worse(code, o.code);
    }
    summary["exit"] = code;
    summary["experiments"] = list;
    write_file(fs::path(opt.out) / "summary.json", summary.dump(2) + "\n");
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return kIoFailure;
  }
  return code;
}

}  // namespace pbrp::app
