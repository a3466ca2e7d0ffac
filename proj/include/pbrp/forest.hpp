#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace pbrp {

// Decoration of a vertex. j == 0 marks a base letter i in 1..d,
// otherwise the bracket letter (ij) of the extended alphabet.
struct Letter {
  int i = 0;
  int j = 0;

  static Letter base(int i) { return Letter{i, 0}; }
  static Letter bracket(int i, int j) { return Letter{i, j}; }
  bool is_bracket() const { return j != 0; }

  auto operator<=>(const Letter&) const = default;
};

std::string letter_key(Letter a);

class Forest;

// Planar rooted tree, immutable. The text key is computed once at construction.
class Tree {
 public:
  Tree(Letter root, std::vector<Tree> children);

  Letter root() const { return root_; }
  const std::vector<Tree>& children() const { return children_; }
  int degree() const { return degree_; }
  const std::string& key() const { return key_; }

  bool operator==(const Tree& o) const { return key_ == o.key_; }

 private:
  Letter root_;
  std::vector<Tree> children_;
  int degree_;
  std::string key_;
};

// Ordered sequence of planar trees; the empty sequence is the unit forest.
class Forest {
 public:
  Forest();
  explicit Forest(std::vector<Tree> trees);
  Forest(const Tree& t);  // NOLINT: a tree is a one-tree forest

  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t size() const { return trees_.size(); }
  bool empty() const { return trees_.empty(); }
  int degree() const { return degree_; }
  const std::string& key() const { return key_; }

  // sub-forest of trees [first, last)
  Forest slice(std::size_t first, std::size_t last) const;

  bool operator==(const Forest& o) const { return key_ == o.key_; }
  // total order: degree first, then byte-wise key
  bool operator<(const Forest& o) const {
    return degree_ != o.degree_ ? degree_ < o.degree_ : key_ < o.key_;
  }

 private:
  std::vector<Tree> trees_;
  int degree_;
  std::string key_;
};

Tree single(Letter a);
Tree b_plus(const Forest& w, Letter a);
Forest concat(const Forest& a, const Forest& b);
// inverse of b_plus on the child list
Forest remove_root(const Tree& t);

// All forests of degree <= N over the given letters, ordered by (degree, key).
std::vector<Forest> enumerate_forests(const std::vector<Letter>& letters, int N);
// Same over the base letters 1..d; N is capped at 3.
std::vector<Forest> enumerate_forests(int d, int N);
// Trees only (degree 1..N).
std::vector<Tree> enumerate_trees(const std::vector<Letter>& letters, int N);

std::vector<Letter> base_letters(int d);
// A together with every bracket letter (ij), i,j in 1..d
std::vector<Letter> extended_letters(int d);

inline const std::string& canonical_key(const Forest& w) { return w.key(); }

// Parses the text form produced by canonical_key. Throws std::invalid_argument.
Forest parse_forest(std::string_view text);
Tree parse_tree(std::string_view text);

// Number of forests of degree exactly k over d letters: C_k d^k.
long long forest_count(int d, int k);

}  // namespace pbrp
