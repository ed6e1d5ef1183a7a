#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "asdim/covering.hpp"
#include "asdim/errors.hpp"
#include "asdim/spaces.hpp"

using namespace asdim;

namespace {

// Oracles by subset enumeration over all centres (cover) or target subsets (packing).
Index brute_cover(const FiniteMetricSpace& s, const IndexList& target, double r) {
  const Index n = s.size();
  Index best = static_cast<Index>(target.size());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const Index k = __builtin_popcount(mask);
    if (k >= best) continue;
    bool ok = true;
    for (Index t : target) {
      bool hit = false;
      for (Index c = 0; c < n && !hit; ++c) hit = ((mask >> c) & 1u) && s.distance(c, t) < r;
      if (!hit) { ok = false; break; }
    }
    if (ok) best = k;
  }
  return best;
}

Index brute_packing(const FiniteMetricSpace& s, const IndexList& target, double r) {
  const auto m = static_cast<Index>(target.size());
  Index best = 0;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    bool ok = true;
    for (Index a = 0; a < m && ok; ++a)
      for (Index b = a + 1; b < m && ok; ++b)
        if (((mask >> a) & 1u) && ((mask >> b) & 1u) && s.distance(target[a], target[b]) < 2 * r)
          ok = false;
    if (ok) best = std::max<Index>(best, __builtin_popcount(mask));
  }
  return best;
}

FiniteMetricSpace random_cloud(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  Eigen::MatrixXd p(n, 2);
  for (Index i = 0; i < n; ++i) p(i, 0) = u(rng), p(i, 1) = u(rng);
  return from_points(p, Norm::euclidean);
}

}  // namespace

TEST_CASE("exact cover and packing agree with subset enumeration") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const FiniteMetricSpace s = random_cloud(10, seed);
    IndexList target;
    for (Index i = 0; i < s.size(); i += (seed % 2) + 1) target.push_back(i);
    for (double r : {0.5, 1.0, 1.7}) {
      const CoverResult c = covering_number_exact(s, target, r);
      CHECK(c.count == brute_cover(s, target, r));
      CHECK(covers(s, c.centers, target, r));
      CHECK(packing_number_exact(s, target, r).count == brute_packing(s, target, r));
      CHECK(covering_number_greedy(s, target, r).count >= c.count);
      CHECK(packing_number_greedy(s, target, r).count <= brute_packing(s, target, r));
    }
  }
}

TEST_CASE("sandwich n_r >= nu_r >= n_2r on small spaces") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const FiniteMetricSpace s = random_cloud(12, seed + 100);
    IndexList all(12);
    std::iota(all.begin(), all.end(), 0);
    for (double r : {0.3, 0.8, 1.5}) {
      const SandwichCertificate cert = sandwich_certificate(s, all, r);
      CHECK(cert.exact);
      CHECK(cert.holds);
      CHECK(cert.cover_r >= cert.pack_r);
      CHECK(cert.pack_r >= cert.cover_2r);
    }
  }
}

TEST_CASE("cover centres may lie outside the target") {
  // Target {0, 2} on the segment 0,1,2 with r = 1.5: the midpoint covers both.
  const FiniteMetricSpace s = real_grid(0.0, 2.0, 1.0);
  const IndexList target{0, 2};
  CHECK(covering_number_exact(s, target, 1.5).count == 1);
  // Packing centres must be 2r apart: 0 and 2 are at distance 2 < 3.
  CHECK(packing_number_exact(s, target, 1.5).count == 1);
  CHECK(packing_number_exact(s, target, 1.0).count == 2);
}

TEST_CASE("greedy cover of a Z segment by open balls of radius k") {
  // An open ball of radius k in Z holds 2k - 1 points; greedy is optimal here.
  const FiniteMetricSpace z = lattice(1, 50, Norm::sup);
  IndexList all(101);
  std::iota(all.begin(), all.end(), 0);
  for (Index k : {1, 2, 3, 5}) {
    const Index want = (101 + 2 * k - 2) / (2 * k - 1);
    CHECK(covering_number_greedy(z, all, k).count == want);
    CHECK(packing_number_greedy(z, all, k).count == (100 / (2 * k)) + 1);
  }
}

TEST_CASE("exact cover refuses oversized instances") {
  const FiniteMetricSpace z = lattice(1, 100, Norm::sup);
  IndexList all(201);
  std::iota(all.begin(), all.end(), 0);
  CHECK_THROWS_AS(covering_number_exact(z, all, 1.0, 24), ResourceError);
}

TEST_CASE("covering grid does not depend on the worker count") {
  const FiniteMetricSpace s = lattice(2, 30, Norm::sup);
  const Index c = (s.size() - 1) / 2;
  const std::vector<double> r{1.0, 2.0}, R{4.0, 8.0, 16.0};
  const auto a = covering_grid(s, c, r, R, 1);
  const auto b = covering_grid(s, c, r, R, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].cover == b[i].cover);
    CHECK(a[i].packing == b[i].packing);
    CHECK(a[i].cover_2r == b[i].cover_2r);
    CHECK(a[i].cover >= a[i].packing);
  }
}
