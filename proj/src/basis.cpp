#include "pbrp/basis.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "pbrp/hopf.hpp"

namespace pbrp {

Basis::Basis(std::vector<Letter> letters, int N)
    : letters_(std::move(letters)), N_(N), forests_(enumerate_forests(letters_, N)) {
  if (N < 0 || N > 3) throw std::invalid_argument("truncation must be in 0..3");
  for (std::size_t k = 0; k < forests_.size(); ++k) index_.emplace(forests_[k].key(), k);
  for (std::size_t k = 0; k < forests_.size(); ++k) {
    const Forest& f = forests_[k];
    if (f.degree() < 2) continue;
    for (const auto& [lr, c] : coproduct_mkw(f).terms()) {
      if (lr.first.empty() || lr.second.empty()) continue;
      f_.push_back(static_cast<int>(k));
      l_.push_back(static_cast<int>(index(lr.first)));
      r_.push_back(static_cast<int>(index(lr.second)));
      coef_.push_back(static_cast<double>(c));
    }
  }
}

std::optional<std::size_t> Basis::find(const Forest& f) const {
  auto it = index_.find(f.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Basis::index(const Forest& f) const {
  auto it = index_.find(f.key());
  if (it == index_.end()) throw std::out_of_range("forest not in basis: " + f.key());
  return it->second;
}

bool Basis::has_letter(Letter a) const {
  return std::find(letters_.begin(), letters_.end(), a) != letters_.end();
}

Eigen::VectorXd Basis::unit() const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size());
  e(0) = 1.0;
  return e;
}

Eigen::VectorXd Basis::reduced_star(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  const std::size_t n = coef_.size();
  for (std::size_t e = 0; e < n; ++e) out(f_[e]) += coef_[e] * a(l_[e]) * b(r_[e]);
  return out;
}

Eigen::VectorXd Basis::star(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = reduced_star(a, b);
  out += a(0) * b + b(0) * a;
  out(0) -= a(0) * b(0);
  return out;
}

Eigen::VectorXd Basis::exp(const Eigen::VectorXd& x) const {
  // x is nilpotent of order N + 1 in the truncated algebra
  Eigen::VectorXd out = unit();
  Eigen::VectorXd term = x;
  for (int p = 1; p <= N_; ++p) {
    out += term;
    if (p < N_) term = reduced_star(term, x) / double(p + 1);
  }
  return out;
}

double Basis::pair(const Eigen::VectorXd& g, const Series<Exact>& s) const {
  double out = 0.0;
  for (const auto& [f, c] : s.terms()) {
    auto k = find(f);
    if (k) out += static_cast<double>(c) * g(*k);
  }
  return out;
}

std::shared_ptr<const Basis> basis_for(std::vector<Letter> letters, int N) {
  static std::mutex mu;
  static std::map<std::pair<std::vector<Letter>, int>, std::shared_ptr<const Basis>> cache;
  std::sort(letters.begin(), letters.end());
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{letters, N}];
  if (!slot) slot = std::make_shared<const Basis>(letters, N);
  return slot;
}

}  // namespace pbrp
