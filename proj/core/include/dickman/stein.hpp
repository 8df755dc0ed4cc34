// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dickman/dickman.hpp"

namespace dickman {

// Test function with analytic first and second derivatives. The averaging
// pipeline propagates derivative information through every iterate, so the
// seed function must supply its own derivatives (piecewise values are fine
// for functions with isolated kinks).
struct SteinTestFn {
  std::string name;
  std::function<double(double)> h;
  std::function<double(double)> dh;
  std::function<double(double)> d2h;
};

SteinTestFn cos_test();
SteinTestFn sin_test();
// Hinge (x - b)_+ with the derivative at the kink taken from the left.
SteinTestFn hinge_test(double b);

// One function sampled on explicit abscissae, with first and second
// derivatives carried alongside the values.
struct GridFunction {
  std::vector<double> x;
  std::vector<double> value;
  std::vector<double> deriv;
  std::vector<double> second;
};

// Averaging operator A_x h = (1/t(x)) * integral_0^x h(v) t'(v) dv with
// t = s^theta, evaluated by direct adaptive quadrature; A_0 h = h(0).
// Absolute error of the returned value is at most abs_tol.
// Throws RangeError for x < 0.
double averaging_operator(const DickmanSpec& spec, const std::function<double(double)>& h,
                          double x, double abs_tol = 1e-9);

// Iterated averages h, Ah, A^2 h, ..., A^depth h where each application maps
// q(x) to A_{x+1} q, sampled at eval_x (depth+1 entries). The input function
// is used as given; callers wanting the geometric sup-norm decay must pass a
// centered h. Throws ContractionError when the contraction bound is >= 1,
// std::invalid_argument for empty or negative eval_x.
std::vector<GridFunction> iterate_averages(const DickmanSpec& spec, const SteinTestFn& test,
                                           std::size_t depth, const std::vector<double>& eval_x);

// Constant component of h under repeated averaging: iterating A drives any
// bounded h toward the constant E[h] under the fixed point, so the value of a
// deep iterate at 0 estimates that expectation with geometric error tol.
double centering_constant(const DickmanSpec& spec, const SteinTestFn& test, double tol = 1e-8);

// Solution of (t(x)/t'(x)) f'(x) + f(x) - f(x+1) = h(x) - c on a uniform grid
// over (0, x_max], built from the truncated series g = sum of the first K+1
// iterated averages and f = A_x g. Derivatives come from the analytic
// relations satisfied by A_x, never from finite differences.
struct SteinSolution {
  explicit SteinSolution(DickmanSpec spec_in) : spec(std::move(spec_in)) {}

  DickmanSpec spec;
  std::vector<double> grid;            // strictly increasing, on (0, x_max]
  std::vector<double> f;
  std::vector<double> f_prime;
  std::vector<double> f_double_prime;
  std::size_t K = 0;                   // series truncation depth
  double tail_bound = 0.0;             // (mu_hat + x_max) rho^(K+1) / (1 - rho)
  double rho = 0.0;                    // contraction constant used for K
  double mu_hat = 0.0;                 // upper estimate of the fixed point mean
  double center = 0.0;                 // constant subtracted from h
  double residual_max = 0.0;           // max equation residual over the grid
  std::string test_name;
};

// Builds the truncated-series solution. Any constant component of h is
// estimated through the operator limit and subtracted internally (reported as
// .center), so h may be passed uncentered. K is the least integer with
// (mu_hat + x_max) * rho^(K+1) <= epsilon; the reported tail_bound keeps the
// full geometric-series factor 1/(1-rho). Throws ContractionError when the
// contraction bound is >= 1 or too close to 1 for the series to be practical,
// std::invalid_argument for nonpositive epsilon or x_max.
SteinSolution solve_stein(const DickmanSpec& spec, const SteinTestFn& test, double epsilon,
                          double x_max = 10.0);

// Right-limit at x = b of the second derivative of the averaged hinge
// A_x (· - b)_+ in the standard case (identity utility, theta = 1), where
// A_x h = (x-b)^2/(2x) for x >= b. The limit equals 1/b, so the averaged
// hinge family admits no uniform curvature bound as b decreases to 0.
// Throws RangeError for b <= 0.
double counterexample_curvature(double b);

// CSV rendering: `#` metadata line recording theta, utility tag, K and
// tail_bound, then a header row `x,f,f_prime,f_double_prime` and one row per
// grid point, full round-trip precision.
std::string stein_solution_csv(const SteinSolution& sol);

}  // namespace dickman
