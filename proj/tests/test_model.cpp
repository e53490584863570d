#include <cmath>
#include <functional>
#include <stdexcept>

#include "doctest.h"
#include "qrg/model.hpp"
#include "qrg/rng.hpp"

using namespace qrg;

namespace {

// Composite Simpson quadrature, independent of the closed forms under test.
double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  double h = (hi - lo) / (2 * panels);
  double acc = f(lo) + f(hi);
  for (int i = 1; i < 2 * panels; ++i) {
    acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Interval-length density below the cut: x e^{-x} on (0, c).
double cut_density(double x) { return x * std::exp(-x); }

}  // namespace

TEST_CASE("mean interval length matches quadrature") {
  for (double c : {0.3, 1.0, 2.5, 6.0}) {
    double atom = (1.0 + c) * std::exp(-c);
    double oracle = simpson([](double x) { return x * cut_density(x); }, 0.0, c, 400) + c * atom;
    CHECK(mean_interval_length(c) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("mean interval length pinned at c = 1") {
  CHECK(mean_interval_length(1.0) == doctest::Approx(0.896361676485673).epsilon(1e-14));
}

TEST_CASE("critical lambda equals the mean interval length") {
  for (double c : {0.5, 1.0, 3.0}) {
    CHECK(critical_lambda(c) == mean_interval_length(c));
  }
  CHECK(critical_lambda(1.0) == doctest::Approx(0.896361676485673).epsilon(1e-14));
  CHECK(critical_lambda(0.5) == doctest::Approx(0.48367335071841644).epsilon(1e-14));
  CHECK(critical_lambda(3.0) == doctest::Approx(1.7510646581606804).epsilon(1e-14));
}

TEST_CASE("critical curve F satisfies the substitution identity") {
  // F(beta, lambda) = m(lambda*beta) / lambda exactly, so F = 1 iff the
  // mean interval length at c = lambda*beta equals lambda.
  for (double beta : {0.2, 0.7, 1.0, 1.9, 3.4}) {
    for (double lambda : {0.3, 0.8963, 1.0, 1.6}) {
      double f = critical_curve_F(beta, lambda);
      CHECK(f == doctest::Approx(mean_interval_length(lambda * beta) / lambda).epsilon(1e-12));
    }
  }
}

TEST_CASE("critical curve F pinned example") {
  CHECK(critical_curve_F(1.0, 0.89636168) ==
        doctest::Approx(0.91272869588107719).epsilon(1e-12));
}

TEST_CASE("curve crosses one exactly at the critical pairing") {
  for (double c : {0.4, 1.0, 2.0}) {
    double lam = critical_lambda(c);
    CHECK(critical_curve_F(c / lam, lam) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("window parameters") {
  ModelParams p = window_params(1.0, 1.0, 1000);
  CHECK(p.c == 1.0);
  CHECK(p.a == 1.0);
  CHECK(p.n == 1000);
  CHECK(p.lambda == doctest::Approx(0.81487425135061176).epsilon(1e-14));
  // a = 0 sits exactly at criticality.
  CHECK(window_params(1.0, 0.0, 1000).lambda ==
        doctest::Approx(critical_lambda(1.0)).epsilon(1e-15));
  // The perturbation vanishes as n grows.
  CHECK(window_params(1.0, 1.0, 1000000000).lambda ==
        doctest::Approx(critical_lambda(1.0)).epsilon(1e-3));
}

TEST_CASE("model params validation") {
  CHECK_NOTHROW(ModelParams(1.0, 0.9, 0.0, 10));
  CHECK_THROWS_AS(ModelParams(0.0, 0.9, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(-1.0, 0.9, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1.0, 0.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1.0, -0.5, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1.0, 0.9, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(std::nan(""), 0.9, 0.0, 10), std::invalid_argument);
}

TEST_CASE("cut gamma law closed forms against quadrature") {
  for (double c : {0.5, 1.0, 2.0}) {
    CutGammaLaw law(c);
    double atom = (1.0 + c) * std::exp(-c);
    CHECK(law.atom_mass() == doctest::Approx(atom).epsilon(1e-13));

    // Continuous mass plus atom is a probability law.
    double cont_mass = simpson(cut_density, 0.0, c, 400);
    CHECK(cont_mass + atom == doctest::Approx(1.0).epsilon(1e-10));

    CHECK(law.mean() == doctest::Approx(mean_interval_length(c)).epsilon(1e-14));

    for (double x : {0.1 * c, 0.5 * c, 0.9 * c}) {
      double below = simpson(cut_density, 0.0, x, 400);
      CHECK(law.cdf(x) == doctest::Approx(below).epsilon(1e-9));
      CHECK(law.continuous_cdf(x) == doctest::Approx(below / cont_mass).epsilon(1e-9));
    }
    CHECK(law.cdf(c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.cdf(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(law.continuous_cdf(c) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(CutGammaLaw(1.0).atom_mass() ==
        doctest::Approx(0.73575888234288467).epsilon(1e-14));
}

TEST_CASE("cut gamma truncation rule") {
  CutGammaLaw law(1.0);
  CHECK(law.truncate(0.2, 0.3) == doctest::Approx(0.5));
  CHECK(law.truncate(0.8, 0.7) == doctest::Approx(1.0));
  CHECK(law.truncate(1.4, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("cut gamma sampling matches the law") {
  CutGammaLaw law(1.5);
  RngStream rng(11);
  const int n = 200000;
  std::int64_t at_cut = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = law.sample(rng);
    REQUIRE(x > 0.0);
    REQUIRE(x <= 1.5);
    if (x == 1.5) ++at_cut;
    sum += x;
  }
  double atom_se = std::sqrt(law.atom_mass() * (1.0 - law.atom_mass()) / n);
  CHECK(std::fabs(static_cast<double>(at_cut) / n - law.atom_mass()) < 5.0 * atom_se);
  CHECK(sum / n == doctest::Approx(law.mean()).epsilon(0.01));
}

TEST_CASE("laplace transform of the cut law") {
  // theta = 0 is total mass one.
  for (double c : {0.5, 1.0, 2.0}) {
    CHECK(cut_gamma_laplace(c, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  }
  for (double c : {0.8, 1.0, 2.3}) {
    for (double theta : {0.05, 0.5, 2.0}) {
      double atom = (1.0 + c) * std::exp(-c);
      double oracle =
          simpson([theta](double x) { return std::exp(-theta * x) * cut_density(x); }, 0.0, c,
                  400) +
          std::exp(-theta * c) * atom;
      CHECK(cut_gamma_laplace(c, theta) == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
  CHECK(cut_gamma_laplace(1.0, 1.0 / (0.89636168 * 100)) ==
        doctest::Approx(0.99005268647982403).epsilon(1e-13));
}

TEST_CASE("expected offspring approaches one at criticality") {
  // n(1 - E e^{-|I| / (lambda n)}) -> E|I| / lambda = 1 at lambda = m(c).
  for (double c : {0.7, 1.0, 2.0}) {
    ModelParams p(c, critical_lambda(c), 0.0, 100000);
    CHECK(expected_offspring(p) == doctest::Approx(1.0).epsilon(1e-4));
    // Strictly below one at finite n by convexity of the exponential.
    CHECK(expected_offspring(p) < 1.0);
  }
  // Subcritical lambda (above the curve) gives mean offspring below one.
  ModelParams sub(1.0, 1.2, 0.0, 100000);
  CHECK(expected_offspring(sub) < 1.0);
  ModelParams super(1.0, 0.5, 0.0, 100000);
  CHECK(expected_offspring(super) > 1.0);
}
