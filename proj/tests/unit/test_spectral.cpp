#include "doctest.h"
#include "oracles.hpp"

#include "curvlab/spectral.hpp"
#include "curvlab/verify.hpp"

#include <cmath>
#include <random>

using namespace curvlab;

namespace {

PolySeries poly(std::vector<double> c) { return PolySeries(std::move(c)); }

// Degree 1..8 with coefficients on a 1/8 grid in [-2, 2], so the monomial arithmetic stays exact.
std::vector<PolySeries> dyadic_corpus() {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> degree(1, 8);
  std::uniform_int_distribution<int> numerator(-16, 16);
  std::vector<PolySeries> out;
  for (int draw = 0; draw < 50; ++draw) {
    std::vector<double> c(degree(rng) + 1);
    for (double& v : c) v = numerator(rng) / 8.0;
    if (c.back() == 0.0) c.back() = 1.0;
    out.emplace_back(std::move(c));
  }
  return out;
}

// Independent route to int (f^(k))^2 dgamma: differentiate the coefficient list by hand and use
// E x^{2m} = (2m-1)!!.
double derivative_square_oracle(std::vector<double> c, int k) {
  for (int i = 0; i < k; ++i) {
    if (c.size() <= 1) return 0.0;
    std::vector<double> d(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = static_cast<double>(j) * c[j];
    c = std::move(d);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      const std::size_t p = i + j;
      if (p % 2) continue;
      double moment = 1.0;
      for (std::size_t q = 1; q < p; q += 2) moment *= static_cast<double>(q);
      acc += c[i] * c[j] * moment;
    }
  return acc;
}

}  // namespace

TEST_CASE("basis change: hand values and round trip") {
  const HermiteSeries one = expand(poly({1.0}));
  CHECK(one.degree() == 0);
  CHECK(one.coefficient(0) == 1.0);

  const HermiteSeries sq = expand(poly({0.0, 0.0, 1.0}));
  CHECK(sq.coefficient(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sq.coefficient(1) == 0.0);
  CHECK(sq.coefficient(2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const PolySeries f = poly({0.0, -3.0, 0.0, 0.0, 0.0, 1.0});
  const PolySeries back = to_poly(expand(f));
  REQUIRE(back.coeffs().size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(back.coeffs()[k] - f.coeffs()[k]) <= 1e-10);

  CHECK_THROWS_AS(PolySeries::monomial(kDegreeCap + 1), ParameterError);
  CHECK_THROWS_AS(PolySeries::monomial(20) * PolySeries::monomial(20), ParameterError);
}

TEST_CASE("mean and Parseval variance against quadrature") {
  for (const std::vector<double>& c : {std::vector<double>{0.5, -1.0, 2.0, 0.25}, std::vector<double>{1, 0, 0, 0, 1, -0.5}}) {
    const PolySeries f = poly(c);
    const HermiteSeries h = expand(f);
    const double mean = oracle::gaussian_mean([&](double x) { return f(x); });
    const double var = oracle::gaussian_mean([&](double x) { return (f(x) - mean) * (f(x) - mean); });
    CHECK(h.mean() == doctest::Approx(mean).epsilon(1e-11));
    CHECK(std::abs(h.variance() - var) <= 1e-9 * (1.0 + var));
    CHECK(f.gaussian_mean() == doctest::Approx(mean).epsilon(1e-11));
  }
}

TEST_CASE("L, P_t and L^k act diagonally") {
  const HermiteSeries h1({0.0, 1.0});
  CHECK(apply_L(h1).coeffs() == std::vector<double>{0.0, -1.0});

  const HermiteSeries h3({0.0, 0.0, 0.0, 1.0});
  CHECK(apply_Lk(h3, 2).coefficient(3) == 9.0);
  CHECK(apply_Lk(h3, 0).coeffs() == h3.coeffs());

  const PolySeries pt = to_poly(apply_Pt(expand(poly({0.0, 0.0, 1.0})), std::log(2.0)));
  CHECK(pt.coeffs()[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(pt.coeffs()[2] == doctest::Approx(0.25).epsilon(1e-14));
  for (double x : {-1.5, 0.0, 2.0})
    CHECK(pt(x) == doctest::Approx(oracle::ou_apply([](double y) { return y * y; }, std::log(2.0), x)).epsilon(1e-10));

  const HermiteSeries f = expand(poly({1.0, -2.0, 0.5, 0.0, 0.3}));
  const HermiteSeries two = apply_Pt(apply_Pt(f, 0.3), 0.45);
  const HermiteSeries once = apply_Pt(f, 0.75);
  for (int k = 0; k <= f.degree(); ++k) CHECK(two.coefficient(k) == doctest::Approx(once.coefficient(k)).epsilon(1e-14));

  // The Hermite route and the monomial generator agree.
  const PolySeries p = poly({1.0, -2.0, 0.5, 0.0, 0.3});
  const PolySeries lp = to_poly(apply_L(expand(p)));
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(lp.coeffs()[k] - p.apply_L().coeffs()[k]) <= 1e-12);
}

TEST_CASE("Q_k integrals: hand values") {
  CHECK(std::abs(Q_iterate(poly({0.0, 1.0}), 2).gaussian_mean()) <= 1e-14);
  CHECK(Q_iterate(poly({0.0, 0.0, 1.0}), 2).gaussian_mean() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(Q_iterate(poly({0.0, 0.0, 0.0, 1.0}), 3, {1.0, 2.0, 3.0}).gaussian_mean() == doctest::Approx(36.0).epsilon(1e-14));
  CHECK(Q_iterate(poly({0.0, 3.0}), 1).coeffs() == std::vector<double>{9.0});

  const std::vector<double> quartic{0.0, 0.0, 0.0, 0.0, 1.0};
  for (int k = 1; k <= 4; ++k) {
    CAPTURE(k);
    CHECK(std::abs(Q_iterate(poly(quartic), k).gaussian_mean() - derivative_square_oracle(quartic, k)) <= 1e-8);
  }
  CHECK_THROWS_AS(Q_iterate(poly({0.0, 1.0}), 0), ParameterError);
  CHECK_THROWS_AS(Q_iterate(poly({0.0, 1.0}), 2, {1.0, -1.0}), ParameterError);
}

TEST_CASE("Q_k integrals match derivative integrals on the random corpus") {
  for (const PolySeries& f : dyadic_corpus()) {
    for (int k = 1; k <= 4; ++k) {
      const double oracle = derivative_square_oracle(f.coeffs(), k);
      CHECK(std::abs(Q_iterate(f, k).gaussian_mean() - oracle) <= 1e-8);
      CHECK(std::abs(derivative_square_mean(f, k) - oracle) <= 1e-8);
    }
  }
}

TEST_CASE("houdre-kagan hand values") {
  const HoudreKagan lin = houdre_kagan(poly({2.0, 1.0}), 2);
  CHECK(lin.variance == doctest::Approx(1.0));
  for (double s : lin.partial_sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));

  const HoudreKagan sq = houdre_kagan(poly({0.0, 0.0, 1.0}), 1);
  CHECK(std::abs(sq.upper - 4.0) <= 1e-10);
  CHECK(std::abs(sq.lower - 2.0) <= 1e-10);
  CHECK(std::abs(sq.variance - 2.0) <= 1e-10);

  const HoudreKagan cube = houdre_kagan(poly({0.0, 0.0, 0.0, 1.0}), 1);
  CHECK(std::abs(cube.upper - 27.0) <= 1e-10);
  CHECK(std::abs(cube.lower - 9.0) <= 1e-10);
  CHECK(std::abs(cube.variance - 15.0) <= 1e-10);
  REQUIRE(cube.partial_sums.size() >= 3);
  CHECK(std::abs(cube.partial_sums[2] - 15.0) <= 1e-10);
  CHECK(std::abs(cube.derivative_integrals[1] - 36.0) <= 1e-10);

  CHECK_THROWS_AS(houdre_kagan(poly({1.0}), 0), ParameterError);
}

TEST_CASE("houdre-kagan brackets the variance on the random corpus") {
  for (const PolySeries& f : dyadic_corpus()) {
    const double var = oracle::gaussian_mean([&](double x) { return f(x) * f(x); }) -
                       std::pow(oracle::gaussian_mean([&](double x) { return f(x); }), 2);
    const double slack = 1e-9 * (1.0 + std::abs(var));
    for (int n = 1; n <= 3; ++n) {
      const HoudreKagan hk = houdre_kagan(f, n);
      CAPTURE(n);
      CHECK(std::abs(hk.variance - var) <= 1e-8 * (1.0 + var));
      CHECK(hk.lower <= hk.variance + slack);
      CHECK(hk.variance <= hk.upper + slack);
      for (int k = 1; k <= static_cast<int>(hk.derivative_integrals.size()); ++k)
        CHECK(std::abs(hk.derivative_integrals[k - 1] - derivative_square_oracle(f.coeffs(), k)) <=
              1e-9 * (1.0 + hk.derivative_integrals[k - 1]));
      if (2 * n >= f.degree()) {
        CHECK(std::abs(hk.lower - hk.variance) <= slack);
        if (2 * n - 1 >= f.degree()) CHECK(std::abs(hk.upper - hk.variance) <= slack);
      }
    }
  }
}

TEST_CASE("variance bracket front-end") {
  const InequalityReport cube = variance_bracket_check(poly({0.0, 0.0, 0.0, 1.0}), 3);
  CHECK(cube.pass());
  bool saw_lower = false;
  for (const EvalRecord& r : cube.records) {
    if (r.note.rfind("n=2 lower", 0) == 0) {
      saw_lower = true;
      CHECK(r.lhs == doctest::Approx(9.0).epsilon(1e-12));
      CHECK(r.rhs == doctest::Approx(15.0).epsilon(1e-12));
    }
  }
  CHECK(saw_lower);

  const InequalityReport lin = variance_bracket_check(poly({0.0, 1.0}), 4);
  CHECK(lin.pass());
  for (const EvalRecord& r : lin.records)
    if (r.note.find("cross-check") == std::string::npos) CHECK(std::abs(r.margin) <= 1e-12);

  for (const PolySeries& f : dyadic_corpus()) CHECK(variance_bracket_check(f, 5).pass());
}

TEST_CASE("generalized local inequality: k = 0 reduces to the poincare check") {
  const MultiMFunction m = make_quadratic_multi(0, 1.0, 0.0, 0.0);
  CHECK(multi_hypotheses(m).empty());
  const PolySeries f = poly({0.0, 1.0, 0.2});
  const std::vector<double> xs{-1.0, 0.0, 0.5, 2.0};

  const SemigroupEngine engine(make_gaussian_potential(1), EngineSpec{});
  Schedule s = Schedule::points_1d(xs);
  s.t = {0.4};
  s.alpha = {0.5};
  const InequalityReport base = verify_local(catalog("poincare"), engine, parse_test_function("poly:0,1,0.2"), s, 1.0);
  const InequalityReport gen = generalized_local_check(m, f, 0.4, 0.5, xs);
  REQUIRE(gen.records.size() == base.records.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(gen.records[i].lhs == doctest::Approx(base.records[i].lhs).epsilon(1e-10));
    CHECK(gen.records[i].rhs == doctest::Approx(base.records[i].rhs).epsilon(1e-10));
  }
  CHECK(gen.pass());
}

TEST_CASE("generalized local inequality: t = 0 equality and the first-order M") {
  const PolySeries f = poly({0.0, 1.0, 0.2});
  const std::vector<double> xs{-2.0, -1.0, 0.0, 1.0, 2.0};

  const MultiMFunction rich0 = make_quadratic_multi(1, 0.5, 0.3, 0.25);
  for (const EvalRecord& r : generalized_local_check(rich0, f, 0.0, 0.7, xs).records) CHECK(std::abs(r.margin) <= 1e-9);

  // With c = 1 and a = 0 the (x0, x1) block is [[0, -eps], [-eps, 0]], so only eps = 0 survives the pre-check.
  CHECK_FALSE(multi_hypotheses(make_quadratic_multi(1, 1.0, 0.1, 0.0)).empty());
  CHECK(multi_hypotheses(make_quadratic_multi(1, 1.0, 0.0, 0.0)).empty());
  CHECK(generalized_local_check(make_quadratic_multi(1, 1.0, 0.0, 0.0), f, 0.4, 0.0, xs).pass());

  // Largest eps on a 0.05 ladder that passes the pre-check for c = 1/2, a = 1/4.
  double eps = 0.0;
  for (double e = 0.05; e <= 1.0; e += 0.05)
    if (multi_hypotheses(make_quadratic_multi(1, 0.5, e, 0.25)).empty()) eps = e;
  CHECK(eps > 0.0);
  const InequalityReport r = generalized_local_check(make_quadratic_multi(1, 0.5, eps, 0.25), f, 0.4, 0.0, xs);
  CHECK(r.precondition_ok);
  for (const EvalRecord& rec : r.records) CHECK(rec.margin >= -1e-6);

  const InequalityReport bad = generalized_local_check(make_quadratic_multi(1, 1.0, 0.5, 0.0), f, 0.4, 0.0, xs);
  CHECK_FALSE(bad.precondition_ok);
  CHECK_FALSE(bad.pass());
  CHECK_THROWS_AS(make_quadratic_multi(2, 1.0, 0.0, 0.0), ParameterError);
}
