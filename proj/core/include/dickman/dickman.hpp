// SPDX-License-Identifier: MIT
//
// Generalized Dickman samplers. The base family D_theta is the fixed point
// of the transform W -> U^{1/theta}(W+1); the utility-bent family D_{theta,s}
// replaces the affine step by s^{-1}(U^{1/theta} s(W+1)). Both are sampled
// by iterating the recursion from W_0 = 0, which carries an explicit
// geometric Wasserstein-1 bound per step.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dickman/sample_batch.hpp"
#include "dickman/utility.hpp"

namespace dickman {

struct DickmanSpec {
    double theta;
    Utility utility;

    DickmanSpec(double theta_in, Utility utility_in);
};

// Depth-n recursion batch for the base family. Within each per-sample
// stream, draw j is the factor V_j of the equivalent product series
// sum_{k<n} prod_{j<=k} V_j, so batches at different depths under the same
// seed are monotonically coupled: deepening a batch only adds mass.
// certified_d1 = theta * (theta/(theta+1))^depth_n.
SampleBatch sample_dtheta(double theta, std::uint64_t depth_n, std::size_t num_samples,
                          std::uint64_t seed, unsigned threads = 0);

// Depth-n recursion batch for the utility family. Draws are consumed in
// descending index order so that, under a shared seed, the depth-(n+1)
// chain is the depth-n chain restarted from s^{-1}(V); the coupled-chains
// setting behind the per-step contraction. Identity utility delegates to
// sample_dtheta (identical values for identical seeds).
// certified_d1 = (1-rho)^{-1} (theta/(theta+1))^n E[s^{-1}(U^{1/theta})].
SampleBatch sample_dtheta_s(const DickmanSpec& spec, std::uint64_t depth_n,
                            std::size_t num_samples, std::uint64_t seed, unsigned threads = 0);

// One step of the size-bias-style transform: s^{-1}(u^{1/theta} s(w+1)).
// Requires u in (0, 1]; the result never exceeds w + 1.
double bias_transform_sample(const DickmanSpec& spec, double w, double u);

// Contraction diagnostics for the averaging kernel
//   I(x) = theta s'(x) / s^{theta+1}(x) * integral_0^x s^theta(v) dv.
struct RhoBound {
    double value;             // reported contraction constant
    bool certified;           // true when a structural certificate applies
    double grid_sup;          // raw supremum of I over the evaluation grid
    std::string certificate;  // e.g. "concave:theta/(theta+1)"
};

// Supremum of I over the grid (default: geometric grid on (1e-8, 50] with
// 4096 points, refined around the argmax). Concave built-ins earn the
// structural certificate theta/(theta+1); a power mixture at theta = 1 with
// top exponent a earns min(grid sup, a/(a+1)); tabulated utilities whose
// knots are not concave get the uncertified grid supremum only.
RhoBound rho_bound(const DickmanSpec& spec, const std::vector<double>& grid = {});

std::vector<double> default_rho_grid(double x_max = 50.0, std::size_t points = 4096);

// Global certified contraction constant used inside d1 certificates:
// theta/(theta+1) for concave utilities, tightened to a/(a+1) for a
// theta = 1 power mixture with top exponent a. Throws ContractionError for
// utilities without a certificate.
double contraction_constant(const DickmanSpec& spec);

// theta * (theta/(theta+1))^depth, the recursion's d1 bound to D_theta.
double recursion_d1_bound(double theta, std::uint64_t depth_n);

// (1-rho)^{-1} (theta/(theta+1))^depth * E[s^{-1}(U^{1/theta})].
double utility_recursion_d1_bound(const DickmanSpec& spec, std::uint64_t depth_n);

// E[s^{-1}(U^{1/theta})] = theta * integral_0^1 s^{-1}(v) v^{theta-1} dv,
// by quadrature to 1e-8 absolute (closed form theta/(theta+1) for the
// identity).
double expected_inverse_draw(const DickmanSpec& spec);

// Least depth n with theta*(theta/(theta+1))^n <= epsilon.
std::uint64_t reference_depth(double theta, double epsilon);

}  // namespace dickman
