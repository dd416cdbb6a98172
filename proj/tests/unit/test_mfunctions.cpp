#include "doctest.h"
#include "oracles.hpp"

#include "curvlab/mfunctions.hpp"

#include <cmath>

using namespace curvlab;

namespace {

// Partial derivatives of M by central differences of its value.
MJet numeric_jet(const MFunction& mf, double x, double y, double h = 2e-5) {
  auto m = [&](double a, double b) { return mf.value(a, b); };
  MJet j;
  j.m = m(x, y);
  j.mx = (m(x + h, y) - m(x - h, y)) / (2 * h);
  j.my = (m(x, y + h) - m(x, y - h)) / (2 * h);
  j.mxx = (m(x + h, y) - 2 * j.m + m(x - h, y)) / (h * h);
  j.myy = (m(x, y + h) - 2 * j.m + m(x, y - h)) / (h * h);
  j.mxy = (m(x + h, y + h) - m(x + h, y - h) - m(x - h, y + h) + m(x - h, y - h)) / (4 * h * h);
  return j;
}

const char* kForward[] = {"poincare", "log-sobolev", "bobkov", "beckner:p=1.2", "beckner:p=1.5", "beckner:p=1.8",
                          "exp-integrability", "sqrt-y", "y"};
const char* kReverse[] = {"reverse-poincare", "reverse-log-sobolev", "reverse-beckner:p=1.5"};

}  // namespace

TEST_CASE("poincare and log-sobolev hand values") {
  const MJet p = catalog("poincare").jet(2.0, 3.0);
  CHECK(p.m == -1.0);
  CHECK(p.mxx == -2.0);
  CHECK(p.my == 1.0);

  const MJet l = catalog("log-sobolev").jet(1.0, 1.0);
  CHECK(l.m == doctest::Approx(0.5));
  CHECK(l.my == doctest::Approx(0.5));
  CHECK(l.mxy == doctest::Approx(-0.5));
}

TEST_CASE("beckner tends to poincare as p -> 2") {
  const MFunction b = catalog("beckner:p=1.9999");
  for (double x : {0.5, 1.0, 3.0}) {
    for (double y : {0.1, 2.0}) CHECK(b.value(x, y) == doctest::Approx(-x * x + y).epsilon(1e-3));
  }
}

TEST_CASE("closed-form partials match finite differences") {
  for (const char* id : kForward) {
    const MFunction mf = catalog(id);
    for (double x : {0.3, 0.7}) {
      for (double y : {0.4, 2.0}) {
        const MJet a = mf.jet(x, y);
        const MJet n = numeric_jet(mf, x, y);
        CAPTURE(id);
        CHECK(a.mx == doctest::Approx(n.mx).epsilon(1e-6).scale(1.0));
        CHECK(a.my == doctest::Approx(n.my).epsilon(1e-6).scale(1.0));
        CHECK(a.mxx == doctest::Approx(n.mxx).epsilon(1e-3).scale(1.0));
        CHECK(a.myy == doctest::Approx(n.myy).epsilon(1e-3).scale(1.0));
        CHECK(a.mxy == doctest::Approx(n.mxy).epsilon(1e-3).scale(1.0));
      }
    }
  }
}

TEST_CASE("condition matrices: hand values") {
  const Mat2 a = condition_matrix(catalog("log-sobolev"), MatrixKind::Forward, 1.0, 1.0);
  CHECK(a(0, 0) == doctest::Approx(1.0));
  CHECK(a(0, 1) == doctest::Approx(-0.5));
  CHECK(a(1, 1) == doctest::Approx(0.25));
  CHECK(a.determinant() == doctest::Approx(0.0).scale(1.0));

  for (double x : {-2.0, 0.0, 1.0}) {
    for (double y : {0.1, 5.0}) {
      // The M_y / (2y) entry survives, so B = diag(0, 1/(2y)) rather than the zero matrix.
      const Mat2 b = condition_matrix(catalog("reverse-poincare"), MatrixKind::Reverse, x, y);
      CHECK(b(0, 0) == 0.0);
      CHECK(b(0, 1) == 0.0);
      CHECK(b(1, 1) == doctest::Approx(0.5 / y));
    }
  }

  const Mat2 bob = condition_matrix(catalog("bobkov"), MatrixKind::Forward, 0.3, 0.5);
  CHECK(std::abs(bob.determinant()) <= 1e-10);
  CHECK_THROWS_AS(condition_matrix(catalog("log-sobolev"), MatrixKind::Forward, 1.0, 0.0), DomainError);
}

TEST_CASE("degenerate determinant for bobkov and log-sobolev across the sample") {
  for (const char* id : {"bobkov", "log-sobolev"}) {
    const MFunction mf = catalog(id);
    const SampleSpec spec = default_sample(mf);
    for (double x : spec.xs()) {
      for (double y : spec.ys()) {
        const Mat2 a = condition_matrix(mf, MatrixKind::Forward, x, y);
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        CHECK(std::abs(a.determinant()) / (scale * scale) <= 1e-9);
      }
    }
  }
}

TEST_CASE("PSD certification of the catalog") {
  for (const char* id : kForward) {
    CAPTURE(id);
    CHECK(certify_psd(catalog(id), MatrixKind::Forward).pass);
  }
  for (const char* id : kReverse) {
    CAPTURE(id);
    CHECK(certify_psd(catalog(id), MatrixKind::Reverse).pass);
  }
  for (double p : {1.2, 1.5, 1.8}) CHECK(certify_psd(make_reverse_beckner(p), MatrixKind::Reverse).pass);
}

TEST_CASE("log-sobolev and beckner on the stated rectangle") {
  const SampleSpec rect{0.1, 10.0, 0.01, 10.0};
  CHECK(certify_psd(catalog("log-sobolev"), MatrixKind::Forward, rect).pass);
  CHECK(certify_psd(catalog("beckner:p=1.5"), MatrixKind::Forward, rect).pass);
}

TEST_CASE("dropping the y term breaks PSD") {
  const MFunction neg(
      "minus-x-squared", [](double x, double) { return -x * x; },
      [](double x, double) { return MJet{-x * x, -2 * x, 0, -2, 0, 0}; }, Interval::real_line(),
      Interval::nonnegative());
  const PsdReport r = certify_psd(neg, MatrixKind::Forward);
  CHECK_FALSE(r.pass);
  // A = diag(-2, 0), reported after scaling by its largest entry.
  CHECK(r.worst_trace == doctest::Approx(-1.0));
}

TEST_CASE("perturbation a M + b x + c keeps the PSD verdict") {
  for (const char* id : kForward) {
    const MFunction mf = catalog(id);
    const MFunction pert = mf.perturbed(2.0, 3.0, 1.0);
    CHECK(certify_psd(mf, MatrixKind::Forward).pass == certify_psd(pert, MatrixKind::Forward).pass);
    const Mat2 a = condition_matrix(mf, MatrixKind::Forward, 0.4, 0.7);
    const Mat2 b = condition_matrix(pert, MatrixKind::Forward, 0.4, 0.7);
    CHECK((b - 2.0 * a).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()));
  }
  CHECK_THROWS_AS(catalog("poincare").perturbed(-1.0, 0.0, 0.0), ParameterError);
}

TEST_CASE("M_y sign check passes for every entry declaring M_y >= 0") {
  for (const std::string& id : catalog_names()) {
    const MFunction mf = catalog(id);
    if (!mf.my_nonnegative) continue;
    CAPTURE(id);
    CHECK(check_my_sign(mf, default_sample(mf)).pass);
  }
}

TEST_CASE("catalog errors") {
  CHECK_THROWS_AS(catalog("nope"), ParameterError);
  CHECK_THROWS_AS(catalog("beckner:p=3"), ParameterError);
  CHECK_THROWS_AS(catalog("log-sobolev").value(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(catalog("poincare").value(1.0, -1.0), DomainError);
}

TEST_CASE("catalog lists the named entries") {
  const auto names = catalog_names();
  for (const char* id : {"poincare", "log-sobolev", "bobkov", "exp-integrability", "reverse-poincare"})
    CHECK(std::find(names.begin(), names.end(), id) != names.end());
}
