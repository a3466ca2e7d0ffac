#include "pbrp/ito.hpp"

#include <atomic>
#include <mutex>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "pbrp/stats.hpp"

namespace pbrp {

double ito_threshold(int N, double alpha) { return N == 2 ? 3 * alpha - 1 : 4 * alpha - 1; }

namespace {

struct Mesh {
  Eigen::VectorXd lhs;
  std::vector<Eigen::VectorXd> terms;
  std::vector<std::string> warnings;
};

struct Setup {
  RoughPathPtr X, Xh;
  std::size_t s, t;
  int d;
};

Setup prepare(RoughPathPtr X, const ItoOptions& opt, RoughPathPtr Xhat, int N, const char* who) {
  if (!X) throw std::invalid_argument(std::string(who) + ": no rough path");
  if (X->truncation() != N)
    throw std::invalid_argument(std::string(who) + ": needs a rough path truncated at N = " +
                                std::to_string(N));
  Setup su{X, Xhat, opt.s, opt.t == 0 ? X->cells() : opt.t, X->dimension()};
  if (su.s >= su.t || su.t > X->cells()) throw std::invalid_argument(std::string(who) + ": bad interval");
  const auto& st = opt.strides;
  if (st.size() < 4) throw std::invalid_argument(std::string(who) + ": need >= 4 meshes");
  for (std::size_t k = 0; k < st.size(); ++k) {
    if (st[k] == 0 || X->cells() % st[k] != 0 || su.s % st[k] != 0 || su.t % st[k] != 0)
      throw std::invalid_argument(std::string(who) + ": mesh does not partition the interval");
    if (k > 0 && (st[k] >= st[k - 1] || st[k - 1] % st[k] != 0))
      throw std::invalid_argument(std::string(who) + ": meshes must be nested and decreasing");
  }
  if (!su.Xh) su.Xh = bracket_extension(*X, opt.jobs);
  if (su.Xh->grid() != X->grid() || su.Xh->truncation() != N)
    throw std::invalid_argument(std::string(who) + ": extension on a different grid");
  for (int i = 1; i <= su.d; ++i)
    for (int j = 1; j <= su.d; ++j)
      if (!su.Xh->basis().has_letter(Letter::bracket(i, j)))
        throw std::invalid_argument(std::string(who) + ": extension lacks bracket letters");
  return su;
}

// Meshes are independent; each one is computed sequentially, so the outcome
// does not depend on the number of workers.
std::vector<Mesh> run_meshes(std::size_t count, int jobs,
                             const std::function<Mesh(std::size_t)>& work) {
  std::vector<Mesh> out(count);
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = work(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < count;) {
        try {
          out[k] = work(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

ItoReport assemble(std::string theorem, int N, const Setup& su, const ItoOptions& opt,
                   std::vector<std::string> names, std::vector<Mesh> meshes) {
  ItoReport rep;
  rep.theorem = std::move(theorem);
  rep.alpha = opt.alpha;
  rep.s = su.X->grid()[su.s];
  rep.t = su.X->grid()[su.t];
  rep.threshold = ito_threshold(N, opt.alpha);
  rep.slack = opt.slack;
  rep.tolerance = opt.tolerance;
  for (auto& n : names) rep.terms.push_back({std::move(n), {}});
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    auto& m = meshes[k];
    rep.meshes.push_back(su.X->grid()[opt.strides[k]] - su.X->grid()[0]);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.lhs.size());
    for (std::size_t q = 0; q < m.terms.size(); ++q) {
      rhs += m.terms[q];
      rep.terms[q].values.push_back(m.terms[q]);
    }
    rep.residuals.push_back((m.lhs - rhs).lpNorm<Eigen::Infinity>());
    rep.lhs.push_back(std::move(m.lhs));
    for (auto& w : m.warnings) rep.warnings.push_back(std::move(w));
  }
  rep.order = loglog_slope(rep.meshes, rep.residuals, opt.floor);
  rep.verdict = rep.residuals.back() < opt.tolerance && rep.order >= rep.threshold - opt.slack;
  return rep;
}

Letter base(int i) { return Letter::base(i); }

ItoReport verify_simple(RoughPathPtr X, const SmoothFunction& F, const ItoOptions& opt,
                        RoughPathPtr Xhat, int N) {
  const char* who = N == 2 ? "verify_simple_N2" : "verify_simple_N3";
  Setup su = prepare(X, opt, Xhat, N, who);
  const int d = su.d;
  if (F.in_dim() != d) throw std::invalid_argument(std::string(who) + ": F must act on R^d");
  const std::size_t fine = opt.strides.back();
  std::vector<ControlledPath> G, H;
  for (int i = 0; i < d; ++i) G.push_back(compose_FX(X, partial_function(F, {i}), fine));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) H.push_back(compose_FX(X, partial_function(F, {i, j}), fine));
  std::vector<SmoothFunction> D3;
  std::vector<ScalarExtensionPath> tilde;
  if (N == 3)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          D3.push_back(partial_function(F, {i, j, k}));
          tilde.push_back(tilde_path(su.Xh, i + 1, j + 1, k + 1));
        }

  auto work = [&](std::size_t m) {
    const std::size_t h = opt.strides[m];
    Mesh out;
    out.lhs = F(X->base_path(su.t)) - F(X->base_path(su.s));
    Eigen::VectorXd t1 = Eigen::VectorXd::Zero(F.out_dim()), t2 = t1, t3 = t1;
    for (int i = 0; i < d; ++i) t1 += rough_integral(G[i], *X, base(i + 1), su.s, su.t, h);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        t2 += rough_integral(H[i * d + j], *su.Xh, Letter::bracket(i + 1, j + 1), su.s, su.t, h);
    out.terms = {t1, t2};
    if (N == 3) {
      for (std::size_t q = 0; q < D3.size(); ++q) {
        NodeFunction g = [&, q](std::size_t u) { return D3[q](X->base_path(u)); };
        t3 += young_integral(g, tilde[q], su.s, su.t, h);
        if (m + 1 == opt.strides.size())
          for (auto& w : young_precondition(g, tilde[q], X->grid(), su.s, su.t, h))
            out.warnings.push_back(std::move(w));
      }
      out.terms.push_back(t3);
    }
    return out;
  };
  std::vector<std::string> names = {"DF:dX", "D2F:dXhat"};
  if (N == 3) names.push_back("D3F:dXtilde");
  return assemble(N == 2 ? "simple-N2" : "simple-N3", N, su, opt, std::move(names),
                  run_meshes(opt.strides.size(), opt.jobs, work));
}

ItoReport verify_general(RoughPathPtr X, const VectorFieldFamily& f, const SmoothFunction& F,
                         const Eigen::VectorXd& xi, const ItoOptions& opt, RoughPathPtr Xhat,
                         int N) {
  const char* who = N == 2 ? "verify_general_N2" : "verify_general_N3";
  Setup su = prepare(X, opt, Xhat, N, who);
  const int d = su.d;
  const int n = static_cast<int>(xi.size());
  if (f.letters() != d) throw std::invalid_argument(std::string(who) + ": need d vector fields");
  if (F.in_dim() != n) throw std::invalid_argument(std::string(who) + ": F must act on R^n");

  std::vector<SmoothFunction> DF, D2F, D3F, cbarF;
  std::vector<ScalarExtensionPath> tilde, cbar;
  for (int i = 0; i < d; ++i) DF.push_back(contract(F, {f.fields[i]}));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) D2F.push_back(contract(F, {f.fields[i], f.fields[j]}));
  if (N == 3)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          D3F.push_back(contract(F, {f.fields[i], f.fields[j], f.fields[k]}));
          cbarF.push_back(contract(F, {f.fields[i], contract(f.fields[j], {f.fields[k]})}));
          tilde.push_back(tilde_path(su.Xh, i + 1, j + 1, k + 1));
          cbar.push_back(cbar_path(su.Xh, i + 1, j + 1, k + 1));
        }

  auto work = [&](std::size_t m) {
    const std::size_t h = opt.strides[m];
    RdeOptions ro;
    ro.stride = h;
    ControlledPath Y = solve_rde(X, f, xi, ro);
    Mesh out;
    out.lhs = F(Y.value(su.t)) - F(Y.value(su.s));
    Eigen::VectorXd t1 = Eigen::VectorXd::Zero(F.out_dim()), t2 = t1, t3 = t1, t4 = t1;
    for (int i = 0; i < d; ++i)
      t1 += rough_integral(compose_FY(Y, DF[i]), *X, base(i + 1), su.s, su.t, h);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        t2 += rough_integral(compose_FY(Y, D2F[i * d + j]), *su.Xh, Letter::bracket(i + 1, j + 1),
                             su.s, su.t, h);
    out.terms = {t1, t2};
    if (N == 3) {
      const bool last = m + 1 == opt.strides.size();
      for (std::size_t q = 0; q < D3F.size(); ++q) {
        NodeFunction g3 = [&, q](std::size_t u) { return D3F[q](Y.value(u)); };
        NodeFunction g4 = [&, q](std::size_t u) { return cbarF[q](Y.value(u)); };
        t3 += young_integral(g3, tilde[q], su.s, su.t, h);
        t4 += young_integral(g4, cbar[q], su.s, su.t, h);
        if (!last) continue;
        for (auto& w : young_precondition(g3, tilde[q], X->grid(), su.s, su.t, h))
          out.warnings.push_back(std::move(w));
        for (auto& w : young_precondition(g4, cbar[q], X->grid(), su.s, su.t, h))
          out.warnings.push_back(std::move(w));
      }
      out.terms.push_back(t3);
      out.terms.push_back(t4);
    }
    return out;
  };
  std::vector<std::string> names = {"DF:f dX", "D2F:(f,f) dXhat"};
  if (N == 3) {
    names.push_back("D3F:(f,f,f) dXtilde");
    names.push_back("D2F:(f,Df:f) dcbarX");
  }
  return assemble(N == 2 ? "general-N2" : "general-N3", N, su, opt, std::move(names),
                  run_meshes(opt.strides.size(), opt.jobs, work));
}

}  // namespace

ItoReport verify_simple_N2(RoughPathPtr X, const SmoothFunction& F, const ItoOptions& opt,
                           RoughPathPtr Xhat) {
  return verify_simple(std::move(X), F, opt, std::move(Xhat), 2);
}

ItoReport verify_simple_N3(RoughPathPtr X, const SmoothFunction& F, const ItoOptions& opt,
                           RoughPathPtr Xhat) {
  return verify_simple(std::move(X), F, opt, std::move(Xhat), 3);
}

ItoReport verify_general_N2(RoughPathPtr X, const VectorFieldFamily& f, const SmoothFunction& F,
                            const Eigen::VectorXd& xi, const ItoOptions& opt, RoughPathPtr Xhat) {
  return verify_general(std::move(X), f, F, xi, opt, std::move(Xhat), 2);
}

ItoReport verify_general_N3(RoughPathPtr X, const VectorFieldFamily& f, const SmoothFunction& F,
                            const Eigen::VectorXd& xi, const ItoOptions& opt, RoughPathPtr Xhat) {
  return verify_general(std::move(X), f, F, xi, opt, std::move(Xhat), 3);
}

}  // namespace pbrp
