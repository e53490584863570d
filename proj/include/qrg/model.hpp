#pragma once

#include <cstdint>

#include "qrg/rng.hpp"

namespace qrg {

// Mean length of the interval around a fixed point of a circle of length c
// punctured by unit-intensity Poisson holes: 2(1 - e^-c) - c e^-c.
double mean_interval_length(double c);

// F(beta, lambda) = (2/lambda)(1 - e^(-lambda*beta)) - beta e^(-lambda*beta).
// Satisfies F(beta, lambda) = mean_interval_length(lambda*beta) / lambda;
// F = 1 characterizes the critical curve.
double critical_curve_F(double beta, double lambda);

// Critical lambda for circle length c: the value with mean_interval_length(c)
// = lambda, i.e. the solution of F(c/lambda, lambda) = 1.
double critical_lambda(double c);

struct ModelParams {
  double c;        // circle length
  double lambda;   // link intensity scale: each pair links at rate 1/(lambda*n)
  double a;        // window location parameter (0 = exactly critical)
  std::int64_t n;  // number of vertices

  ModelParams(double c, double lambda, double a, std::int64_t n);
};

// Parameters inside the critical window: lambda is set so that
// mean_interval_length(c) = lambda * (1 + a * n^(-1/3)).
ModelParams window_params(double c, double a, std::int64_t n);

// Law of min(U + V, c) with U, V independent Exp(1): density x e^-x on
// (0, c) plus an atom of mass (1 + c) e^-c at c.
struct CutGammaLaw {
  double c;

  explicit CutGammaLaw(double c);

  // Deterministic core, exposed so tests can inject the exponentials.
  double truncate(double u, double v) const { return (u + v < c) ? u + v : c; }

  double sample(RngStream& rng) const {
    return truncate(rng.exponential(), rng.exponential());
  }

  double mean() const { return mean_interval_length(c); }
  double atom_mass() const;
  double cdf(double x) const;             // P(X <= x)
  double continuous_cdf(double x) const;  // P(X <= x | X < c)
};

// E exp(-theta * X) for X cut-gamma on a circle of length c.
double cut_gamma_laplace(double c, double theta);

// E xi for the dominating offspring count xi ~ Bin(n, 1 - e^(-|I|/(lambda n)))
// with |I| cut-gamma: n * (1 - cut_gamma_laplace(c, 1/(lambda n))).
double expected_offspring(const ModelParams& params);

}  // namespace qrg
