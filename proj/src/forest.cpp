#include "pbrp/forest.hpp"

#include <algorithm>
#include <stdexcept>
#include <string_view>

namespace pbrp {

namespace {

constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022
constexpr std::string_view kUnit = "e";

std::string index_key(int n) {
  if (n >= 1 && n <= 9) return std::to_string(n);
  return "{" + std::to_string(n) + "}";
}

}  // namespace

std::string letter_key(Letter a) {
  if (a.is_bracket()) return "(" + index_key(a.i) + index_key(a.j) + ")";
  return index_key(a.i);
}

Tree::Tree(Letter root, std::vector<Tree> children)
    : root_(root), children_(std::move(children)), degree_(1) {
  if (root_.i < 1 || root_.j < 0) throw std::invalid_argument("bad letter");
  std::string inner;
  for (const auto& c : children_) {
    degree_ += c.degree();
    inner += c.key();
  }
  key_ = children_.empty() ? std::string(kBullet) + letter_key(root_)
                           : "[" + inner + "]" + letter_key(root_);
}

Forest::Forest() : degree_(0), key_(kUnit) {}

Forest::Forest(std::vector<Tree> trees) : trees_(std::move(trees)), degree_(0) {
  for (const auto& t : trees_) {
    degree_ += t.degree();
    key_ += t.key();
  }
  if (trees_.empty()) key_ = kUnit;
}

Forest::Forest(const Tree& t) : Forest(std::vector<Tree>{t}) {}

Forest Forest::slice(std::size_t first, std::size_t last) const {
  return Forest(std::vector<Tree>(trees_.begin() + first, trees_.begin() + last));
}

Tree single(Letter a) { return Tree(a, {}); }

Tree b_plus(const Forest& w, Letter a) { return Tree(a, w.trees()); }

Forest concat(const Forest& a, const Forest& b) {
  std::vector<Tree> t = a.trees();
  t.insert(t.end(), b.trees().begin(), b.trees().end());
  return Forest(std::move(t));
}

Forest remove_root(const Tree& t) { return Forest(t.children()); }

std::vector<Letter> base_letters(int d) {
  std::vector<Letter> out;
  for (int i = 1; i <= d; ++i) out.push_back(Letter::base(i));
  return out;
}

std::vector<Letter> extended_letters(int d) {
  auto out = base_letters(d);
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) out.push_back(Letter::bracket(i, j));
  return out;
}

namespace {

// by_deg[k] = all forests of degree exactly k
std::vector<std::vector<Forest>> forests_by_degree(const std::vector<Letter>& letters,
                                                   int N) {
  std::vector<std::vector<Forest>> forests(N + 1);
  std::vector<std::vector<Tree>> trees(N + 1);
  forests[0].push_back(Forest());
  for (int k = 1; k <= N; ++k) {
    for (const auto& w : forests[k - 1])
      for (auto a : letters) trees[k].push_back(b_plus(w, a));
    // first tree has degree m, the rest is a forest of degree k - m
    for (int m = 1; m <= k; ++m)
      for (const auto& t : trees[m])
        for (const auto& rest : forests[k - m]) forests[k].push_back(concat(Forest(t), rest));
  }
  return forests;
}

}  // namespace

std::vector<Forest> enumerate_forests(const std::vector<Letter>& letters, int N) {
  if (N < 0) throw std::invalid_argument("negative truncation");
  auto by_deg = forests_by_degree(letters, N);
  std::vector<Forest> out;
  for (auto& v : by_deg) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Forest> enumerate_forests(int d, int N) {
  if (d < 1) throw std::invalid_argument("alphabet size must be >= 1");
  if (N > 3) throw std::invalid_argument("truncation above 3 is not supported");
  return enumerate_forests(base_letters(d), N);
}

std::vector<Tree> enumerate_trees(const std::vector<Letter>& letters, int N) {
  std::vector<Tree> out;
  for (const auto& w : enumerate_forests(letters, N - 1))
    for (auto a : letters) out.push_back(b_plus(w, a));
  std::sort(out.begin(), out.end(), [](const Tree& x, const Tree& y) {
    return Forest(x) < Forest(y);
  });
  return out;
}

long long forest_count(int d, int k) {
  // Catalan number C_k times d^k
  long long c = 1;
  for (int n = 0; n < k; ++n) c = c * 2 * (2 * n + 1) / (n + 2);
  long long p = 1;
  for (int n = 0; n < k; ++n) p *= d;
  return c * p;
}

// --- parser -----------------------------------------------------------------

namespace {

struct Parser {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const char* what) const {
    throw std::invalid_argument(std::string("forest key: ") + what + " at offset " +
                                std::to_string(pos) + " in '" + std::string(s) + "'");
  }
  bool at_end() const { return pos >= s.size(); }
  bool starts(std::string_view p) const { return s.substr(pos, p.size()) == p; }

  int index() {
    if (at_end()) fail("expected letter");
    char c = s[pos];
    if (c >= '1' && c <= '9') {
      ++pos;
      return c - '0';
    }
    if (c != '{') fail("expected letter");
    auto close = s.find('}', pos);
    if (close == std::string_view::npos) fail("unterminated '{'");
    int v = 0;
    for (std::size_t q = pos + 1; q < close; ++q) {
      if (s[q] < '0' || s[q] > '9') fail("bad digit");
      v = v * 10 + (s[q] - '0');
    }
    if (v < 1) fail("letter index must be positive");
    pos = close + 1;
    return v;
  }

  Letter letter() {
    if (!at_end() && s[pos] == '(') {
      ++pos;
      int i = index();
      int j = index();
      if (at_end() || s[pos] != ')') fail("expected ')'");
      ++pos;
      return Letter::bracket(i, j);
    }
    return Letter::base(index());
  }

  Tree tree() {
    if (starts(kBullet)) {
      pos += kBullet.size();
      return single(letter());
    }
    if (at_end() || s[pos] != '[') fail("expected tree");
    ++pos;
    std::vector<Tree> kids;
    while (!at_end() && s[pos] != ']') kids.push_back(tree());
    if (at_end()) fail("unterminated '['");
    if (kids.empty()) fail("empty child list");
    ++pos;
    Letter a = letter();
    return Tree(a, std::move(kids));
  }

  Forest forest() {
    if (s == kUnit) return Forest();
    std::vector<Tree> ts;
    while (!at_end()) ts.push_back(tree());
    if (ts.empty()) fail("empty text");
    return Forest(std::move(ts));
  }
};

}  // namespace

Forest parse_forest(std::string_view text) { return Parser{text}.forest(); }

Tree parse_tree(std::string_view text) {
  Parser p{text};
  Tree t = p.tree();
  if (!p.at_end()) p.fail("trailing characters after tree");
  return t;
}

}  // namespace pbrp
