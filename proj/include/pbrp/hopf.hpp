#pragma once

#include <algorithm>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbrp/series.hpp"

namespace pbrp {

// Shuffle of the tree sequences; trees are the letters.
Series<Exact> shuffle(const Forest& a, const Forest& b);
Series<Exact> shuffle(const Series<Exact>& a, const Series<Exact>& b);

// Left admissible cut coproduct, computed by the recursion
//   D(1) = 1 (x) 1
//   D(w' B+_a(w'')) = w' B+_a(w'') (x) 1 + D(w') *(id (x) B+_a) D(w'')
// where (x (x) y)*(z (x) w) = (x sh z) (x) (y w).
TensorSeries<Exact> coproduct_mkw(const Forest& f);
TensorSeries<Exact> coproduct_mkw(const Series<Exact>& s);

// Kronecker pairing extended bilinearly.
template <class Scalar>
Scalar pairing(const DualSeries<Scalar>& a, const Series<Scalar>& s) {
  Scalar out(0);
  const auto& big = a.size() < s.size() ? s : a;
  const auto& small = a.size() < s.size() ? a : s;
  for (const auto& [f, c] : small.terms()) out += c * big.coeff(f);
  return out;
}

template <class Scalar>
Scalar pairing(const DualSeries<Scalar>& a, const DualSeries<Scalar>& b,
               const TensorSeries<Exact>& t) {
  Scalar out(0);
  for (const auto& [k, c] : t.terms()) out += Scalar(c) * a.coeff(k.first) * b.coeff(k.second);
  return out;
}

bool is_primitive(const Series<Exact>& s);

// Projection sending the vertex (ij) to  j i - [j]_i  and fixing every other
// forest. Its kernel is spanned by  j i - [j]_i - (ij).
Series<Exact> bracket_projection(const Series<Exact>& s);
// Primitive in the quotient by the bracket relations: the reduced coproduct
// vanishes after applying bracket_projection on both tensor legs.
bool is_primitive_modulo_brackets(const Series<Exact>& s);
TensorSeries<Exact> reduced_coproduct(const Series<Exact>& s);

// Coproducts of every forest of degree <= N over a fixed alphabet, plus the
// transposed index used for the dual product.
class HopfTables {
 public:
  HopfTables(std::vector<Letter> letters, int N);

  const std::vector<Letter>& letters() const { return letters_; }
  int truncation() const { return N_; }
  const std::vector<Forest>& forests() const { return forests_; }
  const TensorSeries<Exact>& coproduct(const Forest& f) const;
  bool contains(const Forest& f) const { return coproducts_.count(f.key()) != 0; }

  // test hook: overwrite one coproduct entry and rebuild the star index
  void corrupt(const Forest& f, const Forest& l, const Forest& r, Exact delta);

  // <a * b, f> = <a (x) b, D f> for every f of degree <= N
  template <class Scalar>
  DualSeries<Scalar> star(const DualSeries<Scalar>& a, const DualSeries<Scalar>& b) const {
    DualSeries<Scalar> out;
    for (const auto& [l, cl] : a.terms())
      for (const auto& [r, cr] : b.terms()) {
        if (l.degree() + r.degree() > N_) continue;
        auto it = index_.find({l.key(), r.key()});
        if (it == index_.end()) continue;
        for (const auto& [f, c] : it->second) out.add(f, Scalar(c) * cl * cr);
      }
    return out;
  }

 private:
  void rebuild_index();

  std::vector<Letter> letters_;
  int N_;
  std::vector<Forest> forests_;
  std::map<std::string, TensorSeries<Exact>> coproducts_;
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<Forest, Exact>>> index_;
};

// Shared tables for the letters occurring in a and b.
std::shared_ptr<const HopfTables> tables_for(std::vector<Letter> letters, int N);
template <class Scalar>
std::vector<Letter> letters_of(const Series<Scalar>& s) {
  std::vector<Letter> out;
  std::vector<const Tree*> stack;
  for (const auto& [f, c] : s.terms())
    for (const auto& t : f.trees()) stack.push_back(&t);
  while (!stack.empty()) {
    const Tree* t = stack.back();
    stack.pop_back();
    out.push_back(t->root());
    for (const auto& c : t->children()) stack.push_back(&c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <class Scalar>
DualSeries<Scalar> star(const DualSeries<Scalar>& a, const DualSeries<Scalar>& b, int N) {
  auto la = letters_of(a);
  auto lb = letters_of(b);
  la.insert(la.end(), lb.begin(), lb.end());
  std::sort(la.begin(), la.end());
  la.erase(std::unique(la.begin(), la.end()), la.end());
  return tables_for(la, N)->star(a, b);
}

// Named small trees, child order fixed by the reference
// coproducts:  tddeux(i;j) = [j]_i,  tdtroisun(i;j;k) = [k j]_i,
// ladder3(i;j;k) = [[k]_j]_i.
Tree tddeux(Letter i, Letter j);
Tree tdtroisun(Letter i, Letter j, Letter k);
Tree ladder3(Letter i, Letter j, Letter k);
Forest dots(std::initializer_list<Letter> letters);

// Elements whose pairings give the extension paths.
Series<Exact> bracket_element(int i, int j);          // j i - [j]_i
Series<Exact> tilde_element(int i, int j, int k);     // k j i - [k j]_i - [k]_(ij)
// i [k]_j + [k]_j i - [[k]_j]_i - [k i]_j - [i k]_j - [k]_(ij) - [k]_(ji)
Series<Exact> cbar_element(int i, int j, int k);
// the same without the two cherries; not primitive
Series<Exact> cbar_element_without_cherries(int i, int j, int k);

struct SelftestCheck {
  std::string name;
  bool passed = true;
  long long cases = 0;
  std::string first_failure;  // csv rows: forest,left,right,coefficient
};

struct SelftestResult {
  std::vector<SelftestCheck> checks;
  int reference_vectors_matched = 0;
  bool pass() const;
};

// Exhaustive exact checks on tables over d base letters (and, for the
// primitivity vectors, the bracket letters).
SelftestResult hopf_selftest(const HopfTables& tables, int d);

}  // namespace pbrp
