#include "qrg/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qrg {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

double mean_interval_length(double c) {
  require(positive_finite(c), "mean_interval_length: c must be positive and finite");
  // expm1 keeps the c -> 0 limit (~c) accurate.
  return 2.0 * (-std::expm1(-c)) - c * std::exp(-c);
}

double critical_curve_F(double beta, double lambda) {
  require(positive_finite(beta), "critical_curve_F: beta must be positive and finite");
  require(positive_finite(lambda), "critical_curve_F: lambda must be positive and finite");
  const double x = lambda * beta;
  return (2.0 / lambda) * (-std::expm1(-x)) - beta * std::exp(-x);
}

double critical_lambda(double c) { return mean_interval_length(c); }

ModelParams::ModelParams(double c_, double lambda_, double a_, std::int64_t n_)
    : c(c_), lambda(lambda_), a(a_), n(n_) {
  require(positive_finite(c), "ModelParams: c must be positive and finite");
  require(positive_finite(lambda), "ModelParams: lambda must be positive and finite");
  require(std::isfinite(a), "ModelParams: a must be finite");
  require(n >= 1, "ModelParams: n must be at least 1");
}

ModelParams window_params(double c, double a, std::int64_t n) {
  require(positive_finite(c), "window_params: c must be positive and finite");
  require(std::isfinite(a), "window_params: a must be finite");
  require(n >= 1, "window_params: n must be at least 1");
  const double scale = 1.0 + a * std::pow(static_cast<double>(n), -1.0 / 3.0);
  require(scale > 0.0, "window_params: 1 + a*n^(-1/3) must be positive");
  return ModelParams(c, mean_interval_length(c) / scale, a, n);
}

CutGammaLaw::CutGammaLaw(double c_) : c(c_) {
  require(positive_finite(c), "CutGammaLaw: c must be positive and finite");
}

double CutGammaLaw::atom_mass() const { return (1.0 + c) * std::exp(-c); }

double CutGammaLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x >= c) return 1.0;
  // Gamma(2,1) CDF below the cut.
  return 1.0 - (1.0 + x) * std::exp(-x);
}

double CutGammaLaw::continuous_cdf(double x) const {
  const double mass = 1.0 - atom_mass();
  if (x <= 0.0) return 0.0;
  if (x >= c) return 1.0;
  return cdf(x) / mass;
}

double cut_gamma_laplace(double c, double theta) {
  require(positive_finite(c), "cut_gamma_laplace: c must be positive and finite");
  require(std::isfinite(theta) && theta >= 0.0,
          "cut_gamma_laplace: theta must be nonnegative and finite");
  const double s = 1.0 + theta;
  const double esc = std::exp(-s * c);
  // integral of x e^-x e^(-theta x) over (0, c), plus the atom at c.
  return (1.0 - (1.0 + s * c) * esc) / (s * s) + (1.0 + c) * esc;
}

double expected_offspring(const ModelParams& params) {
  const double theta = 1.0 / (params.lambda * static_cast<double>(params.n));
  return static_cast<double>(params.n) * (1.0 - cut_gamma_laplace(params.c, theta));
}

}  // namespace qrg
