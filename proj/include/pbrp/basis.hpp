#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbrp/series.hpp"

namespace pbrp {

// Indexed forests of degree <= N over an alphabet, with the truncated dual
// product as a flat table. Index 0 is the unit forest.
class Basis {
 public:
  Basis(std::vector<Letter> letters, int N);

  const std::vector<Letter>& letters() const { return letters_; }
  int truncation() const { return N_; }
  std::size_t size() const { return forests_.size(); }
  const Forest& forest(std::size_t k) const { return forests_[k]; }
  const std::vector<Forest>& forests() const { return forests_; }

  std::optional<std::size_t> find(const Forest& f) const;
  std::size_t index(const Forest& f) const;  // throws std::out_of_range
  std::size_t letter_index(Letter a) const { return index(Forest(single(a))); }
  bool has_letter(Letter a) const;

  Eigen::VectorXd unit() const;
  // full truncated product
  Eigen::VectorXd star(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  // product of two elements with vanishing unit component
  Eigen::VectorXd reduced_star(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  // truncated exponential of an element with vanishing unit component
  Eigen::VectorXd exp(const Eigen::VectorXd& x) const;

  double pair(const Eigen::VectorXd& g, const Series<Exact>& s) const;
  template <class Scalar>
  Eigen::VectorXd dense(const Series<Scalar>& s) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size());
    for (const auto& [f, c] : s.terms()) v(index(f)) += static_cast<double>(c);
    return v;
  }

  std::size_t table_size() const { return coef_.size(); }

 private:
  std::vector<Letter> letters_;
  int N_;
  std::vector<Forest> forests_;
  std::unordered_map<std::string, std::size_t> index_;
  // entries of the coproducts with both legs non-unit: <a*b, f> += c a_l b_r
  std::vector<int> f_, l_, r_;
  std::vector<double> coef_;
};

std::shared_ptr<const Basis> basis_for(std::vector<Letter> letters, int N);

}  // namespace pbrp
