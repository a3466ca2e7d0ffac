#include <set>
#include <stdexcept>

#include "doctest.h"
#include "pbrp/forest.hpp"

using namespace pbrp;

namespace {

const Letter L1 = Letter::base(1), L2 = Letter::base(2), L3 = Letter::base(3);

// independent count: trees t(k) = d * f(k-1), forests f(k) = sum_m t(m) f(k-m)
long long recursive_count(int d, int k) {
  std::vector<long long> t(k + 1, 0), f(k + 1, 0);
  f[0] = 1;
  for (int n = 1; n <= k; ++n) {
    t[n] = d * f[n - 1];
    for (int m = 1; m <= n; ++m) f[n] += t[m] * f[n - m];
  }
  return f[k];
}

}  // namespace

TEST_CASE("single vertices") {
  CHECK(single(L1).degree() == 1);
  CHECK(single(L1).key() == "\xE2\x80\xA2" "1");
  CHECK(single(Letter::bracket(1, 2)).degree() == 1);
  CHECK(single(Letter::bracket(1, 2)).key() == "\xE2\x80\xA2(12)");
  CHECK(single(L3).degree() == 1);
}

TEST_CASE("grafting") {
  CHECK(b_plus(Forest(), L1) == single(L1));
  Tree ladder = b_plus(Forest(single(L2)), L1);
  CHECK(ladder.degree() == 2);
  CHECK(ladder.key() == "[\xE2\x80\xA2" "2]1");
  Tree cherry = b_plus(concat(Forest(single(L3)), Forest(single(L2))), L1);
  CHECK(cherry.degree() == 3);
  CHECK(cherry.children().size() == 2);
  CHECK(enumerate_forests(1, 3).size() - enumerate_forests(1, 2).size() == 5);
}

TEST_CASE("concatenation") {
  Forest a(single(L2)), b(single(L1));
  CHECK(concat(a, b).key() == "\xE2\x80\xA2" "2\xE2\x80\xA2" "1");
  CHECK(concat(Forest(), a) == a);
  CHECK(concat(a, Forest()) == a);
  CHECK(concat(concat(Forest(single(L3)), a), b).degree() == 3);
}

TEST_CASE("enumeration counts") {
  auto f = enumerate_forests(1, 2);
  REQUIRE(f.size() == 4);
  CHECK(f[0].key() == "e");
  CHECK(f[1].key() == "\xE2\x80\xA2" "1");
  CHECK(enumerate_forests(2, 3).size() == 51);
  CHECK(enumerate_forests(3, 0).size() == 1);
  for (int d = 1; d <= 3; ++d)
    for (int N = 0; N <= 3; ++N) {
      long long want = 0, independent = 0;
      for (int k = 0; k <= N; ++k) {
        want += forest_count(d, k);
        independent += recursive_count(d, k);
      }
      CHECK(enumerate_forests(d, N).size() == static_cast<std::size_t>(want));
      CHECK(want == independent);
    }
  CHECK_THROWS_AS(enumerate_forests(2, 4), std::invalid_argument);
}

TEST_CASE("order is by degree then key") {
  auto f = enumerate_forests(2, 3);
  for (std::size_t k = 1; k < f.size(); ++k) {
    CHECK(f[k - 1] < f[k]);
    CHECK(f[k - 1].degree() <= f[k].degree());
  }
}

TEST_CASE("canonical keys") {
  CHECK(canonical_key(Forest()) == "e");
  CHECK(canonical_key(concat(Forest(single(L1)), Forest(single(L2)))) !=
        canonical_key(concat(Forest(single(L2)), Forest(single(L1)))));
  CHECK(canonical_key(Forest(b_plus(Forest(single(L2)), L1))) !=
        canonical_key(concat(Forest(single(L1)), Forest(single(L2)))));
  auto all = enumerate_forests(3, 3);
  std::set<std::string> keys;
  for (const auto& f : all) keys.insert(f.key());
  CHECK(keys.size() == all.size());
}

TEST_CASE("root removal inverts grafting") {
  for (const auto& f : enumerate_forests(2, 2)) {
    for (auto a : extended_letters(2)) CHECK(remove_root(b_plus(f, a)) == f);
  }
}

TEST_CASE("parse round trip") {
  for (const auto& f : enumerate_forests(extended_letters(2), 3)) CHECK(parse_forest(f.key()) == f);
  Forest big(b_plus(Forest(single(Letter::base(12))), Letter::bracket(10, 3)));
  CHECK(big.key() == "[\xE2\x80\xA2{12}]({10}3)");
  CHECK(parse_forest(big.key()) == big);
  CHECK_THROWS_AS(parse_forest("[]1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_forest("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_forest("[\xE2\x80\xA2" "1"), std::invalid_argument);
}
