// Acceptance run: one line per criterion, exit 0 iff every criterion passes.
// Tolerances and runtime budgets are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "pbrp/calculus.hpp"
#include "pbrp/controlled.hpp"
#include "pbrp/hopf.hpp"
#include "pbrp/ito.hpp"
#include "pbrp/rough_path.hpp"

using namespace pbrp;
namespace fs = std::filesystem;

namespace {

constexpr double kHopfBudget = 10, kPrimitivityBudget = 5, kAxiomBudget = 60, kOracleBudget = 30,
                 kAnalyticBudget = 60, kSuiteBudget = 15 * 60, kRemainderBudget = 5 * 60, kRdeBudget = 30,
                 kExtensionBudget = 60;
constexpr double kAxiomTol = 1e-10;       // Chen and character residuals
constexpr double kOracleRelTol = 1e-8;    // canonical lift of (t, t^2)
constexpr double kAnalyticTol = 1e-6;     // residual at mesh 2^-12
constexpr double kSuiteTol = 1e-5;        // residual at the finest mesh
constexpr double kOrderSlack = 0.3;
constexpr double kRemainderSlack = 0.2;
constexpr double kRdeTol = 1e-4, kRdeGap = 1e-5;
constexpr double kAdditivityTol = 1e-10, kRestrictionTol = 1e-12;
constexpr int kProbes = 1000;

const Letter L1 = Letter::base(1), L2 = Letter::base(2);

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

DriverSpec trig2() {
  DriverSpec s;
  s.letters = {ScalarPath::trig({{1.0, 3.0, 0.1}}), ScalarPath::trig({{0.5, 7.0, 0.0}, {0.3, 2.0, 1.0}})};
  return s;
}

DriverSpec with_intensities(DriverSpec s) {
  s.intensities.emplace_back(tddeux(L1, L2), ScalarPath::trig({{0.4, 2.0, 0.0}}));
  s.intensities.emplace_back(tddeux(L2, L2), ScalarPath::polynomial({0, -0.5}));
  s.intensities.emplace_back(tdtroisun(L1, L2, L1), ScalarPath::polynomial({0, 0.3}));
  s.intensities.emplace_back(ladder3(L2, L1, L2), ScalarPath::trig({{0.2, 1.0, 0.5}}));
  return s;
}

// --- 1 ------------------------------------------------------------------------

Verdict hopf_exactness() {
  HopfTables T(base_letters(2), 3);
  const auto r = hopf_selftest(T, 2);
  Verdict v;
  std::set<std::string> need = {"counit", "coassociativity", "duality", "reference_coproducts"};
  for (const auto& c : r.checks)
    if (need.count(c.name) && !c.passed) {
      v.pass = false;
      v.detail += c.name + " failed; ";
    }
  v.pass = v.pass && T.forests().size() == 51 && r.reference_vectors_matched == 5;
  v.detail += std::to_string(T.forests().size()) + " forests, reference coproducts " +
              std::to_string(r.reference_vectors_matched) + "/5, exact int64";
  return v;
}

// --- 2 ------------------------------------------------------------------------

Verdict primitivity() {
  Verdict v;
  int n2 = 0, n3 = 0;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      n2 += is_primitive(bracket_element(i, j)) ? 1 : 0;
      for (int k = 1; k <= 2; ++k) n3 += is_primitive_modulo_brackets(tilde_element(i, j, k)) ? 1 : 0;
    }
  v.pass = n2 == 4 && n3 == 8;
  v.detail = "degree 2: " + std::to_string(n2) + "/4 primitive; degree 3: " + std::to_string(n3) +
             "/8 primitive modulo the bracket relation";
  return v;
}

// --- 3 ------------------------------------------------------------------------

Verdict axioms() {
  std::vector<std::pair<std::string, DriverSpec>> specs;
  DriverSpec poly;
  poly.letters = {ScalarPath::polynomial({0, 1}), ScalarPath::polynomial({0, 0.5, -1.0, 0.3})};
  DriverSpec rough;
  rough.letters = {ScalarPath::fbm_synthetic(0.4, 64, 5, 1.0, 1.0), ScalarPath::fbm_synthetic(0.35, 64, 6, 1.0, 1.0)};
  specs = {{"polynomial", poly}, {"polynomial+intensities", with_intensities(poly)},
           {"trig", trig2()},    {"trig+intensities", with_intensities(trig2())},
           {"fbm", rough},       {"fbm+intensities", with_intensities(rough)}};
  double chen = 0, chr = 0;
  std::mt19937_64 rng(2024);
  for (const auto& [name, spec] : specs) {
    auto X = lift(spec, 3, uniform_grid(1.0, 256), {64, 4, 0.3});
    const auto& B = X->basis();
    std::uniform_int_distribution<std::size_t> node(0, X->cells()), pick(1, B.size() - 1);
    for (int p = 0; p < kProbes; ++p) {
      std::size_t a[3] = {node(rng), node(rng), node(rng)};
      std::sort(a, a + 3);
      const Eigen::VectorXd lhs = B.star(X->character(a[0], a[1]), X->character(a[1], a[2]));
      chen = std::max(chen, (lhs - X->character(a[0], a[2])).lpNorm<Eigen::Infinity>());
      std::size_t f = pick(rng), g = pick(rng);
      while (B.forest(f).degree() >= 3) f = pick(rng);
      while (B.forest(f).degree() + B.forest(g).degree() > 3) g = pick(rng);
      chr = std::max(chr, character_residual(*X, a[0], a[2], B.forest(f), B.forest(g)));
    }
  }
  Verdict v;
  v.pass = chen < kAxiomTol && chr < kAxiomTol;
  v.detail = "6 lifts x 1000 probes: Chen " + sci(chen) + ", character " + sci(chr) + " (tol " + sci(kAxiomTol) + ")";
  return v;
}

// --- 4 ------------------------------------------------------------------------

using Poly = std::vector<double>;

Poly padd(Poly a, const Poly& b, double s) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += s * b[k];
  return a;
}
Poly pmul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}
Poly pint(const Poly& a) {
  Poly out(a.size() + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) out[k + 1] = a[k] / double(k + 1);
  return out;
}
double pat(const Poly& a, double t) {
  double v = 0;
  for (std::size_t k = a.size(); k-- > 0;) v = v * t + a[k];
  return v;
}
// d/dt <X_{0,t}, w' [w'']_a> = <X_{0,t}, w' sh w''> dX^a/dt
Poly iterated(const Forest& f, const std::vector<Poly>& dX) {
  if (f.empty()) return {1.0};
  const Tree& last = f.trees().back();
  Poly inner{0.0};
  for (const auto& [g, c] : shuffle(f.slice(0, f.size() - 1), Forest(last.children())).terms())
    inner = padd(inner, iterated(g, dX), double(c));
  return pint(pmul(inner, dX[last.root().i - 1]));
}

Verdict canonical_oracle() {
  DriverSpec s;
  s.letters = {ScalarPath::polynomial({0, 1}), ScalarPath::polynomial({0, 0, 1})};
  // one step over [0, 1] with 64 substeps
  auto X = lift(s, 3, uniform_grid(1.0, 1), {64, 1, 0.3});
  const std::vector<Poly> dX = {{1.0}, {0.0, 2.0}};
  double worst = 0;
  for (const auto& f : X->basis().forests()) {
    const double want = pat(iterated(f, dX), 1.0), got = X->eval(std::size_t(0), std::size_t(1), f);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
  }
  Verdict v;
  v.pass = worst < kOracleRelTol;
  v.detail = "51 forests of X_{0,1}, max relative error " + sci(worst) + " (64 substeps)";
  return v;
}

// --- 5 ------------------------------------------------------------------------

Verdict analytic_instance() {
  DriverSpec s;
  s.letters = {ScalarPath::polynomial({0, 1})};
  s.intensities.emplace_back(tddeux(L1, L1), ScalarPath::polynomial({0, -0.5}));
  auto X = lift(s, 2, uniform_grid(1.0, 4096));
  ItoOptions o;
  o.alpha = 0.45;
  for (int L = 4; L <= 12; ++L) o.strides.push_back(std::size_t(1) << (12 - L));
  const auto r = verify_simple_N2(X, builtin::power_sum(1, 2, 1.0), o);
  const double rough = r.terms[0].values.back()(0), bracket = r.terms[1].values.back()(0), lhs = r.lhs.back()(0);
  Verdict v;
  v.pass = std::abs(rough) < kAnalyticTol && std::abs(bracket - 1) < kAnalyticTol && std::abs(lhs - 1) < kAnalyticTol &&
           r.meshes.back() == std::ldexp(1.0, -12) && r.residuals.back() < kAnalyticTol &&
           r.order >= 3 * 0.45 - 1 - kOrderSlack;
  v.detail = "rough " + sci(rough) + ", bracket " + std::to_string(bracket) + ", lhs " + std::to_string(lhs) +
             ", residual " + sci(r.residuals.back()) + ", order " + std::to_string(r.order);
  return v;
}

// --- 6 ------------------------------------------------------------------------

double json_real(const app::Json& j) {
  if (j.is_string()) return j == "inf" ? INFINITY : (j == "-inf" ? -INFINITY : NAN);
  return j.get<double>();
}

Verdict ito_suite(const fs::path& scratch) {
  app::RunOptions opt;
  opt.config = "ito-suite";
  opt.out = (scratch / "ito-suite").string();
  opt.jobs = 4;
  std::ostringstream out, err;
  const int code = app::run_command("ito", opt, out, err);
  Verdict v;
  if (code != 0 && code != 1) {
    v.pass = false;
    v.detail = "suite exited " + std::to_string(code) + ": " + err.str();
    return v;
  }
  std::ifstream in(fs::path(opt.out) / "summary.json");
  const auto summary = app::Json::parse(in);
  std::set<std::string> theorems;
  int passed = 0, total = 0;
  for (const auto& e : summary["experiments"]) {
    const auto& r = e["result"];
    ++total;
    theorems.insert(r["theorem"].get<std::string>());
    const double res = json_real(r["residuals"].back()), order = json_real(r["order"]);
    const double want = json_real(r["threshold"]) - kOrderSlack;
    if (res < kSuiteTol && order >= want) {
      ++passed;
    } else {
      v.detail += e["name"].get<std::string>() + " failed (residual " + sci(res) + ", order " + std::to_string(order) + "); ";
    }
  }
  v.pass = total >= 6 && passed == total && theorems.size() == 4;
  v.detail += std::to_string(passed) + "/" + std::to_string(total) + " configurations, " +
              std::to_string(theorems.size()) + "/4 identities covered";
  return v;
}

// --- 7 ------------------------------------------------------------------------

Verdict remainder_rates() {
  const double alpha = 0.3;
  auto X = lift(with_intensities(trig2()), 3, uniform_grid(1.0, 1024), {16, 4, alpha});
  const std::vector<int> levels = {2, 3, 4, 5, 6};
  double margin = INFINITY;
  std::string worst;
  int count = 0;
  auto check_all = [&](const ControlledPath& Y, const std::string& what) {
    for (const auto& tau : Y.forests()) {
      const double rate = remainder_rate(Y, tau, levels);
      const double m = rate - ((3 - tau.degree()) * alpha - kRemainderSlack);
      ++count;
      if (m < margin) {
        margin = m;
        worst = what + " " + tau.key();
      }
    }
  };
  const auto F = builtin::sin_wave(Eigen::Vector2d(0.7, 1.1), 1.0);
  check_all(compose_FX(X, F), "F(X)");
  VectorFieldFamily f{{builtin::sin_field(Eigen::Vector2d(0.5, -0.3), Eigen::Vector2d(0.2, 1.0)),
                       builtin::affine((Eigen::Matrix2d() << 0.4, -0.2, 0.1, 0.3).finished(), Eigen::Vector2d(0, 0.1))}};
  auto Y = solve_rde(X, f, Eigen::Vector2d(0.3, -0.2));
  check_all(Y, "RDE");
  check_all(compose_FY(Y, builtin::exp_wave(Eigen::Vector2d(0.3, 0.2), 1.0)), "F(Y)");
  check_all(lift_integral(Y, L1), "integral");
  Verdict v;
  v.pass = margin >= 0;
  v.detail = std::to_string(count) + " (path, tau) pairs, smallest margin " + std::to_string(margin) + " at " + worst;
  return v;
}

// --- 8 ------------------------------------------------------------------------

Verdict rde_oracle() {
  DriverSpec s;
  s.letters = {ScalarPath::polynomial({0, 1})};
  VectorFieldFamily f{{builtin::identity(1)}};
  const double xi = 1.0;
  auto Y2 = solve_rde(lift(s, 2, uniform_grid(1.0, 1024)), f, Eigen::VectorXd::Constant(1, xi));
  auto Y3 = solve_rde(lift(s, 3, uniform_grid(1.0, 1024)), f, Eigen::VectorXd::Constant(1, xi));
  double e2 = 0, e3 = 0, gap = 0;
  for (std::size_t k = 0; k <= 1024; ++k) {
    const double exact = xi * std::exp(double(k) / 1024.0);
    e2 = std::max(e2, std::abs(Y2.value(k)(0) - exact));
    e3 = std::max(e3, std::abs(Y3.value(k)(0) - exact));
    gap = std::max(gap, std::abs(Y2.value(k)(0) - Y3.value(k)(0)));
  }
  Verdict v;
  v.pass = e2 < kRdeTol && e3 < kRdeTol && gap < kRdeGap;
  v.detail = "mesh 2^-10: N=2 error " + sci(e2) + ", N=3 error " + sci(e3) + ", N=2 vs N=3 " + sci(gap);
  return v;
}

// --- 9 ------------------------------------------------------------------------

Verdict extension_additivity() {
  DriverSpec s;
  s.letters = {ScalarPath::fbm_synthetic(0.4, 32, 1, 1.0, 1.0), ScalarPath::trig({{1.0, 5.0, 0.3}})};
  s = with_intensities(s);
  auto X = lift(s, 3, uniform_grid(1.0, 64), {8, 4, 0.3});
  auto Xh = bracket_extension(*X, 4);
  const auto& B = Xh->basis();
  std::vector<Eigen::VectorXd> elems;
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      elems.push_back(B.dense(Series<Exact>(dots({Letter::bracket(i, j)}))));
      for (int k = 1; k <= 2; ++k) {
        elems.push_back(B.dense(tilde_element(i, j, k)));
        elems.push_back(B.dense(cbar_element(i, j, k)));
      }
    }
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> node(0, X->cells());
  double add = 0;
  for (int p = 0; p < kProbes; ++p) {
    std::size_t a[3] = {node(rng), node(rng), node(rng)};
    std::sort(a, a + 3);
    const Eigen::VectorXd gac = Xh->character(a[0], a[2]), gab = Xh->character(a[0], a[1]),
                          gbc = Xh->character(a[1], a[2]);
    for (const auto& e : elems) add = std::max(add, std::abs(gac.dot(e) - gab.dot(e) - gbc.dot(e)));
  }
  double restr = 0;
  for (std::size_t a = 0; a <= 64; a += 8)
    for (std::size_t b = a; b <= 64; b += 8)
      for (const auto& f : X->basis().forests()) restr = std::max(restr, std::abs(Xh->eval(a, b, f) - X->eval(a, b, f)));
  Verdict v;
  v.pass = add < kAdditivityTol && restr < kRestrictionTol;
  v.detail = "1000 triples x " + std::to_string(elems.size()) + " paths: additivity " + sci(add) +
             "; restriction to base forests " + sci(restr);
  return v;
}

// --- 10 -----------------------------------------------------------------------

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& p : fs::recursive_directory_iterator(root)) {
    if (!p.is_regular_file()) continue;
    std::ifstream in(p.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(p.path(), root).string()] = ss.str();
  }
  return files;
}

Verdict determinism(const fs::path& scratch) {
  const std::vector<std::pair<std::string, std::string>> suite = {
      {"hopf-selftest", "selftest"},  {"lift", "lift-drivers"},         {"integrate", "integrate-sin"},
      {"rde", "rde-exponential"},     {"ito", "simple-n2-analytic"},    {"ito", "general-n3-smooth"},
      {"ito", "ito-suite"},           {"dump", "dump-tables"},          {"dump", "dump-empty-grid"}};
  std::string stdout_runs[2];
  for (int run = 0; run < 2; ++run) {
    for (const auto& [cmd, cfg] : suite) {
      app::RunOptions opt;
      opt.config = cfg;
      opt.out = (scratch / ("run" + std::to_string(run)) / (cmd + "-" + cfg)).string();
      opt.jobs = run == 0 ? 1 : 4;
      std::ostringstream out, err;
      const int code = app::run_command(cmd, opt, out, err);
      stdout_runs[run] += cmd + " " + cfg + " exit " + std::to_string(code) + "\n" + out.str();
    }
  }
  const auto a = read_tree(scratch / "run0"), b = read_tree(scratch / "run1");
  std::size_t bytes = 0, differing = 0;
  for (const auto& [k, v] : a) {
    bytes += v.size();
    auto it = b.find(k);
    if (it == b.end() || it->second != v) ++differing;
  }
  Verdict v;
  v.pass = !a.empty() && a.size() == b.size() && differing == 0 && stdout_runs[0] == stdout_runs[1];
  v.detail = std::to_string(a.size()) + " files (" + std::to_string(bytes) + " bytes), " +
             std::to_string(differing) + " differ, stdout " + (stdout_runs[0] == stdout_runs[1] ? "identical" : "differs") +
             "; second run with --jobs 4";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "pbrp-acceptance";
  std::error_code ec;
  fs::remove_all(scratch, ec);
  fs::create_directories(scratch);

  struct Criterion {
    int id;
    const char* title;
    double budget;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Hopf exactness", kHopfBudget, hopf_exactness},
      {2, "primitivity", kPrimitivityBudget, primitivity},
      {3, "rough path axioms", kAxiomBudget, axioms},
      {4, "canonical lift oracle", kOracleBudget, canonical_oracle},
      {5, "analytic Ito instance", kAnalyticBudget, analytic_instance},
      {6, "Ito convergence suite", kSuiteBudget, [&] { return ito_suite(scratch); }},
      {7, "controlled remainder rates", kRemainderBudget, remainder_rates},
      {8, "RDE oracle", kRdeBudget, rde_oracle},
      {9, "extension path additivity", kExtensionBudget, extension_additivity},
      {10, "determinism", 0, [&] { return determinism(scratch); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0 && secs > c.budget) {
      v.pass = false;
      v.detail += "; over the " + std::to_string(int(c.budget)) + " s budget";
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2d  %-4s  %-28s %7.2fs  %s\n", c.id, v.pass ? "PASS" : "FAIL", c.title, secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
