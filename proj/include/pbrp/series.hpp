#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "pbrp/forest.hpp"

namespace pbrp {

using Exact = std::int64_t;

// Finite linear combination of forests. Zero coefficients are never stored.
template <class Scalar>
class Series {
 public:
  using Map = std::map<Forest, Scalar>;

  Series() = default;
  explicit Series(const Forest& f, Scalar c = Scalar(1)) { add(f, c); }

  void add(const Forest& f, const Scalar& c) {
    if (c == Scalar(0)) return;
    auto [it, fresh] = terms_.try_emplace(f, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  Scalar coeff(const Forest& f) const {
    auto it = terms_.find(f);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  const Map& terms() const& { return terms_; }
  // a temporary hands over its map, so range-for over f().terms() stays valid
  Map terms() && { return std::move(terms_); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int max_degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }

  // drop components above degree n
  Series truncated(int n) const {
    Series out;
    for (const auto& [f, c] : terms_)
      if (f.degree() <= n) out.terms_.emplace(f, c);
    return out;
  }

  Series& operator+=(const Series& o) {
    for (const auto& [f, c] : o.terms_) add(f, c);
    return *this;
  }
  Series& operator-=(const Series& o) {
    for (const auto& [f, c] : o.terms_) add(f, -c);
    return *this;
  }
  Series& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [f, c] : terms_) c *= s;
    return *this;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Scalar s, Series a) { return a *= s; }
  bool operator==(const Series& o) const { return terms_ == o.terms_; }

 private:
  Map terms_;
};

// Elements of the graded dual share the representation; the product differs.
template <class Scalar>
using DualSeries = Series<Scalar>;

template <class Scalar>
class TensorSeries {
 public:
  using Key = std::pair<Forest, Forest>;
  using Map = std::map<Key, Scalar>;

  void add(const Forest& l, const Forest& r, const Scalar& c) {
    if (c == Scalar(0)) return;
    auto [it, fresh] = terms_.try_emplace(Key{l, r}, c);
    if (!fresh) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }
  Scalar coeff(const Forest& l, const Forest& r) const {
    auto it = terms_.find(Key{l, r});
    return it == terms_.end() ? Scalar(0) : it->second;
  }
  const Map& terms() const& { return terms_; }
  // a temporary hands over its map, so range-for over f().terms() stays valid
  Map terms() && { return std::move(terms_); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  TensorSeries& operator+=(const TensorSeries& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
    return *this;
  }
  TensorSeries& operator-=(const TensorSeries& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, -c);
    return *this;
  }
  TensorSeries& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend TensorSeries operator-(TensorSeries a, const TensorSeries& b) { return a -= b; }
  bool operator==(const TensorSeries& o) const { return terms_ == o.terms_; }

 private:
  Map terms_;
};

}  // namespace pbrp
