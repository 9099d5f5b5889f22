#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cec/error.hpp"
#include "cec/linalg.hpp"
#include "support/synthetic.hpp"

using namespace cec;
using cec::testing::deg;

namespace {

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST_CASE("eigh on identity and diagonal input") {
  const auto id = eigh(SymMatrix::identity(2));
  CHECK(id.values[0] == doctest::Approx(1.0));
  CHECK(id.values[1] == doctest::Approx(1.0));

  const double d[] = {1.0, 4.0};
  const auto ed = eigh(SymMatrix::diagonal(d));
  CHECK(ed.values[0] == 4.0);
  CHECK(ed.values[1] == 1.0);
  // Sign convention: first nonzero component positive.
  CHECK(ed.vector(0) == Vector{0.0, 1.0});
  CHECK(ed.vector(1) == Vector{1.0, 0.0});
}

TEST_CASE("eigh recovers the spectrum of an explicitly rotated matrix") {
  const SymMatrix m = testing::rotated_2x2(deg(30), 4.0, 1.0);
  const auto ed = eigh(m);
  CHECK(std::abs(ed.values[0] - 4.0) < 1e-10);
  CHECK(std::abs(ed.values[1] - 1.0) < 1e-10);
  const Vector v = ed.vector(0);
  CHECK(std::abs(v[0] - std::cos(deg(30))) < 1e-10);
  CHECK(std::abs(v[1] - std::sin(deg(30))) < 1e-10);
}

TEST_CASE("eigh rejects non-finite entries") {
  SymMatrix m(2);
  m.set(0, 1, std::nan(""));
  try {
    eigh(m);
    FAIL("expected InvalidMatrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidMatrix);
  }
}

TEST_CASE("eigh reconstruction and orthonormality on random symmetric matrices") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dims(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = static_cast<std::size_t>(dims(rng));
    const SymMatrix m = testing::random_symmetric(n, rng);
    const auto ed = eigh(m);
    for (std::size_t i = 1; i < n; ++i) REQUIRE(ed.values[i - 1] >= ed.values[i]);
    REQUIRE(max_abs_diff(ed.reconstruct(), m) <= 1e-10 * (1.0 + m.frobenius_norm()));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += ed.vectors[k * n + a] * ed.vectors[k * n + b];
        REQUIRE(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-10);
      }
    const auto again = eigh(m);
    REQUIRE(again.values == ed.values);
    REQUIRE(again.vectors == ed.vectors);
  }
}

TEST_CASE("eigenvalues of PSD matrices are not meaningfully negative") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    // Rank-deficient PSD: B Bᵀ with B of rank 1..n
    const std::size_t n = 4;
    std::normal_distribution<double> g;
    SymMatrix m(n);
    const int rank = 1 + trial % 3;
    for (int r = 0; r < rank; ++r) {
      Vector v(n);
      for (auto& x : v) x = g(rng);
      m.add_outer(v, 1.0);
    }
    const auto ed = eigh(m);
    REQUIRE(ed.values.back() >= -1e-10 * m.trace());
  }
}

TEST_CASE("log_det_pd and inverse_pd") {
  const SymMatrix m = testing::rotated_2x2(0.3, 5.0, 2.0);
  double ld = 0.0;
  REQUIRE(log_det_pd(m, ld));
  CHECK(ld == doctest::Approx(std::log(10.0)));
  const SymMatrix inv = inverse_pd(m);
  CHECK(max_abs_diff(inv, testing::rotated_2x2(0.3, 0.2, 0.5)) < 1e-12);

  std::mt19937_64 rng(3);
  const SymMatrix big = testing::random_psd(5, rng);
  REQUIRE(log_det_pd(big, ld));
  double ref = 0.0;
  for (double l : eigh(big).values) ref += std::log(l);
  CHECK(ld == doctest::Approx(ref).epsilon(1e-10));

  SymMatrix singular(3);
  CHECK_FALSE(log_det_pd(singular, ld));
  CHECK_THROWS_AS(inverse_pd(singular), Error);
}

TEST_CASE("stats_from_points basic cases") {
  const std::vector<Vector> two = {{0, 0}, {2, 0}};
  const auto s = stats_from_points(two);
  CHECK(s.count() == 2);
  CHECK(s.mean() == Vector{1, 0});
  const SymMatrix cov = s.covariance();
  CHECK(cov(0, 0) == 1.0);
  CHECK(cov(0, 1) == 0.0);
  CHECK(cov(1, 1) == 0.0);

  const std::vector<Vector> one = {{1, 1}};
  const auto s1 = stats_from_points(one);
  CHECK(s1.mean() == Vector{1, 1});
  CHECK(s1.covariance() == SymMatrix(2));

  const auto empty = stats_from_points(std::vector<Vector>{});
  CHECK(empty.count() == 0);
  CHECK(empty.mean().empty());

  const std::vector<Vector> mixed = {{1, 2}, {1, 2, 3}};
  try {
    stats_from_points(mixed);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("uniform density on an ellipse has covariance diag(r1²/4, r2²/4)") {
  std::mt19937_64 rng(2024);
  const PointCloud pts = testing::uniform_in_ellipse(4.0, 2.0, 10000, rng);
  const SymMatrix cov = stats_from_points(pts).covariance();
  CHECK(std::abs(cov(0, 0) - 4.0) < 0.05 * 4.0);
  CHECK(std::abs(cov(1, 1) - 1.0) < 0.05 * 1.0);
  CHECK(std::abs(cov(0, 1)) < 0.05);
}

TEST_CASE("add_point and remove_point") {
  const std::vector<Vector> one = {{0, 0}};
  const std::vector<Vector> two = {{0, 0}, {2, 0}};
  const double x[] = {2, 0};
  const auto added = add_point(stats_from_points(one), x);
  const auto ref = stats_from_points(two);
  CHECK(added.count() == 2);
  CHECK(added.mean() == ref.mean());
  CHECK(added.scatter() == ref.scatter());

  std::mt19937_64 rng(1);
  const auto base = stats_from_points(testing::gaussian_blobs({{3.0, -1.0}}, 2.0, 20, rng).points);
  const double y[] = {7.5, 2.25};
  const auto round_trip = remove_point(add_point(base, y), y);
  CHECK(round_trip.count() == base.count());
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(round_trip.mean()[i] - base.mean()[i]) < 1e-12);
  CHECK(max_abs_diff(round_trip.scatter(), base.scatter()) < 1e-12 * (1.0 + base.scatter().frobenius_norm()));

  ClusterStats empty(2);
  try {
    empty.remove(y);
    FAIL("expected EmptyCluster");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyCluster);
  }
  const auto back_to_empty = remove_point(add_point(ClusterStats(2), y), y);
  CHECK(back_to_empty.count() == 0);
  CHECK(back_to_empty.mean() == Vector{0, 0});
  CHECK(back_to_empty.scatter() == SymMatrix(2));
}

TEST_CASE("random add/remove sequences match batch recomputation") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(5.0, 3.0);
  std::bernoulli_distribution coin(0.6);
  for (std::size_t dim : {2u, 3u}) {
    ClusterStats s(dim);
    std::vector<Vector> live;
    for (int step = 0; step < 1000; ++step) {
      if (live.empty() || coin(rng)) {
        Vector p(dim);
        for (auto& v : p) v = g(rng);
        s.add(p);
        live.push_back(p);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
        const std::size_t k = pick(rng);
        s.remove(live[k]);
        live.erase(live.begin() + static_cast<long>(k));
      }
      const auto ref = stats_from_points(live);
      REQUIRE(s.count() == live.size());
      if (live.empty()) continue;
      const double scale = 1.0 + ref.covariance().frobenius_norm();
      REQUIRE(max_abs_diff(s.covariance(), ref.covariance()) < 1e-9 * scale);
    }
  }
}
