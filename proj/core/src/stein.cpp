// SPDX-License-Identifier: MIT
#include "dickman/stein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "dickman/errors.hpp"
#include "dickman/kahan.hpp"
#include "dickman/quadrature.hpp"
#include "dickman/sample_batch.hpp"

namespace dickman {

namespace {

constexpr std::size_t kNodesPerUnit = 512;
constexpr double kStep = 1.0 / 512.0;

// Quadrature weights of one grid cell [a, a+step]. Applied to the cubic
// Hermite interpolant of the integrand's factor, they give the exact integral
// of that interpolant against t' (the c weights, fed by value/slope pairs)
// and against t (the j weights, fed by slope/curvature pairs).
struct CellWeights {
  double c[4];
  double j[4];
};

// Converts moments m[j] = integral_0^delta u^j w(a+u) du of a weight w into
// weights for the Hermite basis (value at a, slope at a, value at b, slope
// at b) of a cubic on the cell.
void hermite_weights_from_moments(const double m[4], double delta, double out[4]) {
  const double inv2 = 1.0 / (delta * delta);
  const double inv3 = inv2 / delta;
  out[0] = m[0] - 3.0 * m[2] * inv2 + 2.0 * m[3] * inv3;
  out[1] = m[1] - 2.0 * m[2] / delta + m[3] * inv2;
  out[2] = 3.0 * m[2] * inv2 - 2.0 * m[3] * inv3;
  out[3] = -m[2] / delta + m[3] * inv2;
}

// Exact power moments I_j = integral_0^delta u^j (a+u)^(theta-1+i) du for the
// identity utility, where t'(v) = theta v^(theta-1) and t(v) = v^theta. The
// downward recursion I_j = (delta^j b^(p+1) - j I_{j-1} at level p+1)/(p+1)
// stays stable for a >> delta, where direct binomial expansion cancels badly.
CellWeights identity_cell(double a, double delta, double theta, double a_pow_theta) {
  double i0[5];
  double bp[5];
  if (a <= 0.0) {
    double dp = std::pow(delta, theta);
    for (int i = 0; i < 5; ++i) {
      bp[i] = dp;
      i0[i] = dp / (theta + i);
      dp *= delta;
    }
  } else {
    const double ell = std::log1p(delta / a);
    double ap = a_pow_theta;
    for (int i = 0; i < 5; ++i) {
      const double e = std::expm1((theta + i) * ell);
      i0[i] = ap * e / (theta + i);
      bp[i] = ap * (1.0 + e);
      ap *= a;
    }
  }
  const double d2 = delta * delta;
  const double d3 = d2 * delta;
  double i1[4];
  double i2[3];
  double i3[2];
  for (int i = 0; i < 4; ++i) i1[i] = (delta * bp[i] - i0[i + 1]) / (theta + i);
  for (int i = 0; i < 3; ++i) i2[i] = (d2 * bp[i] - 2.0 * i1[i + 1]) / (theta + i);
  for (int i = 0; i < 2; ++i) i3[i] = (d3 * bp[i] - 3.0 * i2[i + 1]) / (theta + i);

  const double mc[4] = {theta * i0[0], theta * i1[0], theta * i2[0], theta * i3[0]};
  const double mj[4] = {i0[1], i1[1], i2[1], i3[1]};
  CellWeights w;
  hermite_weights_from_moments(mc, delta, w.c);
  hermite_weights_from_moments(mj, delta, w.j);
  return w;
}

// Hermite basis functions on [0, delta] evaluated at u, in the order
// (value at 0, slope at 0, value at delta, slope at delta).
void hermite_basis(double u, double delta, double b[4]) {
  const double r = u / delta;
  const double r2 = r * r;
  b[0] = 1.0 - 3.0 * r2 + 2.0 * r2 * r;
  b[1] = u * (1.0 - r) * (1.0 - r);
  b[2] = 3.0 * r2 - 2.0 * r2 * r;
  b[3] = u * r * (r - 1.0);
}

// Basis-weight cell for a general utility, by Gauss quadrature of the basis
// functions against t' and t. head_splits > 0 subdivides the cell dyadically
// toward its left edge (for the origin cell, where t' may be singular);
// panels > 1 splits smooth cells to keep the rule sharp near the origin.
CellWeights general_cell(const Utility& u, double theta, double a, double delta,
                         int head_splits, int panels) {
  static constexpr double kNode[3] = {0.4058451513773971669066064,
                                      0.7415311855993944398638648,
                                      0.9491079123427585245261897};
  static constexpr double kWeight[3] = {0.3818300505051189449503698,
                                        0.2797053914892766679014678,
                                        0.1294849661688696932706114};
  static constexpr double kWeightCenter = 0.4179591836734693877551020;
  CellWeights w{};
  auto add_point = [&](double pos, double gw) {
    const double s = u.eval(a + pos);
    const double sp = u.deriv(a + pos);
    const double t = std::pow(s, theta);
    const double tp = theta * std::pow(s, theta - 1.0) * sp;
    double b[4];
    hermite_basis(pos, delta, b);
    for (int m = 0; m < 4; ++m) {
      w.c[m] += gw * b[m] * tp;
      w.j[m] += gw * b[m] * t;
    }
  };
  auto add_segment = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    add_point(c, kWeightCenter * h);
    for (int i = 0; i < 3; ++i) {
      const double d = h * kNode[i];
      add_point(c - d, kWeight[i] * h);
      add_point(c + d, kWeight[i] * h);
    }
  };
  if (head_splits > 0) {
    double hi = delta;
    for (int k = 0; k < head_splits && hi > 1e-60; ++k) {
      const double lo = 0.5 * hi;
      add_segment(lo, hi);
      hi = lo;
    }
  } else {
    const double sub = delta / panels;
    for (int p = 0; p < panels; ++p) add_segment(p * sub, (p + 1) * sub);
  }
  return w;
}

// Uniform grid with per-node t, t'/t, t''/t and per-cell quadrature weights.
struct AveragingGrid {
  double theta = 1.0;
  std::size_t n_nodes = 0;
  std::vector<double> t;
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<CellWeights> cells;
};

AveragingGrid build_grid(const DickmanSpec& spec, std::size_t n_nodes) {
  AveragingGrid g;
  g.theta = spec.theta;
  g.n_nodes = n_nodes;
  g.t.assign(n_nodes, 0.0);
  g.r1.assign(n_nodes, 0.0);
  g.r2.assign(n_nodes, 0.0);
  g.cells.resize(n_nodes - 1);
  const double th = spec.theta;
  if (spec.utility.is_identity()) {
    for (std::size_t i = 1; i < n_nodes; ++i) {
      const double x = static_cast<double>(i) * kStep;
      g.t[i] = std::pow(x, th);
      g.r1[i] = th / x;
      g.r2[i] = th * (th - 1.0) / (x * x);
    }
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
      g.cells[i] = identity_cell(static_cast<double>(i) * kStep, kStep, th, g.t[i]);
    }
  } else {
    const Utility& u = spec.utility;
    for (std::size_t i = 1; i < n_nodes; ++i) {
      const double x = static_cast<double>(i) * kStep;
      const double s = u.eval(x);
      const double sp = u.deriv(x);
      const double spp = u.second_deriv(x);
      g.t[i] = std::pow(s, th);
      g.r1[i] = th * sp / s;
      g.r2[i] = th * (th - 1.0) * (sp / s) * (sp / s) + th * spp / s;
    }
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
      const double a = static_cast<double>(i) * kStep;
      if (i == 0) {
        g.cells[i] = general_cell(u, th, a, kStep, 90, 1);
      } else {
        g.cells[i] = general_cell(u, th, a, kStep, 0, i < 64 ? 4 : 1);
      }
    }
  }
  return g;
}

// One iterate: node values with first and second derivatives, valid on the
// index range [0, valid).
struct IterateState {
  std::vector<double> q;
  std::vector<double> qp;
  std::vector<double> qpp;
  std::size_t valid = 0;
};

void seed_state(const AveragingGrid& g, const SteinTestFn& test, IterateState& s) {
  s.valid = g.n_nodes;
  s.q.resize(g.n_nodes);
  s.qp.resize(g.n_nodes);
  s.qpp.resize(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    const double x = static_cast<double>(i) * kStep;
    s.q[i] = test.h(x);
    s.qp[i] = test.dh(x);
    s.qpp[i] = test.d2h(x);
  }
}

// Cumulative integrals c(y) = integral_0^y q t' and j(y) = integral_0^y q' t
// over the state's valid range, one compensated prefix sum each.
void cumulative(const AveragingGrid& g, const IterateState& s, std::vector<double>& c,
                std::vector<double>& j) {
  c.resize(s.valid);
  j.resize(s.valid);
  c[0] = 0.0;
  j[0] = 0.0;
  KahanSum cc;
  KahanSum jj;
  for (std::size_t i = 0; i + 1 < s.valid; ++i) {
    const CellWeights& w = g.cells[i];
    cc.add(w.c[0] * s.q[i] + w.c[1] * s.qp[i] + w.c[2] * s.q[i + 1] + w.c[3] * s.qp[i + 1]);
    jj.add(w.j[0] * s.qp[i] + w.j[1] * s.qpp[i] + w.j[2] * s.qp[i + 1] + w.j[3] * s.qpp[i + 1]);
    c[i + 1] = cc.value();
    j[i + 1] = jj.value();
  }
}

// Applies the shifted averaging map q -> (A q)(x) = A_{x+1} q once. The new
// derivatives come from the analytic relations
//   (A q)'(x)  = (t'/t)(y) * J(y)/t(y)
//   (A q)''(x) = (t'/t)(y) q'(y) + (J(y)/t(y)) * (t''/t - 2 (t'/t)^2)(y)
// at y = x+1, so no numerical differentiation enters the pipeline.
void sweep(const AveragingGrid& g, const IterateState& in, IterateState& out,
           std::vector<double>& c, std::vector<double>& j) {
  if (in.valid <= kNodesPerUnit) {
    throw std::logic_error("iterate domain exhausted; grid sized too small");
  }
  cumulative(g, in, c, j);
  if (out.q.size() < in.valid) {
    out.q.resize(in.valid);
    out.qp.resize(in.valid);
    out.qpp.resize(in.valid);
  }
  out.valid = in.valid - kNodesPerUnit;
  for (std::size_t i = 0; i < out.valid; ++i) {
    const std::size_t y = i + kNodesPerUnit;
    const double invt = 1.0 / g.t[y];
    const double d = j[y] * invt;
    out.q[i] = c[y] * invt;
    out.qp[i] = g.r1[y] * d;
    out.qpp[i] = g.r1[y] * in.qp[y] + d * (g.r2[y] - 2.0 * g.r1[y] * g.r1[y]);
  }
}

double hermite_value(double qa, double qpa, double qb, double qpb, double delta, double u) {
  const double d2 = delta * delta;
  const double c2 = (3.0 * (qb - qa) - delta * (2.0 * qpa + qpb)) / d2;
  const double c3 = (2.0 * (qa - qb) + delta * (qpa + qpb)) / (d2 * delta);
  return qa + u * (qpa + u * (c2 + u * c3));
}

GridFunction sample_state(const IterateState& s, const std::vector<double>& xs) {
  GridFunction out;
  out.x = xs;
  out.value.resize(xs.size());
  out.deriv.resize(xs.size());
  out.second.resize(xs.size());
  const double x_top = static_cast<double>(s.valid - 1) * kStep;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double e = xs[n];
    if (e > x_top + 1e-12) {
      throw std::invalid_argument("evaluation point beyond the iterate domain");
    }
    std::size_t i = static_cast<std::size_t>(e / kStep);
    if (i + 2 > s.valid) i = s.valid - 2;
    const double u = e - static_cast<double>(i) * kStep;
    if (u < 1e-13) {
      out.value[n] = s.q[i];
      out.deriv[n] = s.qp[i];
      out.second[n] = s.qpp[i];
    } else if (u > kStep - 1e-13) {
      out.value[n] = s.q[i + 1];
      out.deriv[n] = s.qp[i + 1];
      out.second[n] = s.qpp[i + 1];
    } else {
      out.value[n] = hermite_value(s.q[i], s.qp[i], s.q[i + 1], s.qp[i + 1], kStep, u);
      out.deriv[n] = hermite_value(s.qp[i], s.qpp[i], s.qp[i + 1], s.qpp[i + 1], kStep, u);
      out.second[n] = s.qpp[i] + (s.qpp[i + 1] - s.qpp[i]) * (u / kStep);
    }
  }
  return out;
}

double pipeline_rho(const DickmanSpec& spec) {
  const RhoBound rb = rho_bound(spec);
  if (!(rb.value < 1.0)) {
    throw ContractionError("averaging iteration requires a contraction constant below 1");
  }
  return rb.value;
}

// Upper estimate of the fixed-point mean: exact for the identity utility,
// otherwise a deep-recursion sample mean inflated by its certified distance
// bound and three standard errors so downstream tail bounds stay upper
// bounds.
double mu_upper(const DickmanSpec& spec) {
  if (spec.utility.is_identity()) return spec.theta;
  std::size_t depth = 1;
  while (depth < 400 && utility_recursion_d1_bound(spec, depth) > 1e-4) ++depth;
  const double d1 = utility_recursion_d1_bound(spec, depth);
  const std::size_t m = 200000;
  const SampleBatch batch = sample_dtheta_s(spec, depth, m, 0x5EEDULL);
  KahanSum sum;
  for (double v : batch.values) sum.add(v);
  const double mean = sum.value() / static_cast<double>(m);
  KahanSum sq;
  for (double v : batch.values) sq.add((v - mean) * (v - mean));
  const double sd = std::sqrt(sq.value() / static_cast<double>(m - 1));
  return mean + d1 + 3.0 * sd / std::sqrt(static_cast<double>(m));
}

std::size_t geometric_count(double scale, double rho, double target, const char* what) {
  std::size_t k = 0;
  double v = scale;
  while (v > target) {
    ++k;
    v *= rho;
    if (k > 8000) {
      throw ContractionError(std::string("contraction too weak to reach the ") + what);
    }
  }
  return k;
}

}  // namespace

SteinTestFn cos_test() {
  return {"cos", [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
          [](double x) { return -std::cos(x); }};
}

SteinTestFn sin_test() {
  return {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
          [](double x) { return -std::sin(x); }};
}

SteinTestFn hinge_test(double b) {
  if (!(b > 0.0)) throw RangeError("hinge kink must be positive");
  char name[48];
  std::snprintf(name, sizeof name, "hinge(%g)", b);
  return {name, [b](double x) { return x > b ? x - b : 0.0; },
          [b](double x) { return x > b ? 1.0 : 0.0; }, [](double) { return 0.0; }};
}

double averaging_operator(const DickmanSpec& spec, const std::function<double(double)>& h,
                          double x, double abs_tol) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (!(x >= 0.0)) throw RangeError("averaging point must be nonnegative");
  if (x == 0.0) return h(0.0);
  const double th = spec.theta;
  const Utility& u = spec.utility;
  double tx;
  double integral;
  if (u.is_identity()) {
    tx = std::pow(x, th);
    auto f = [&h, th](double v) { return h(v) * th * std::pow(v, th - 1.0); };
    integral = integrate_zero_split(f, x, 0.5 * abs_tol * tx);
  } else {
    tx = std::pow(u.eval(x), th);
    auto f = [&h, &u, th](double v) {
      const double s = u.eval(v);
      return h(v) * th * std::pow(s, th - 1.0) * u.deriv(v);
    };
    integral = integrate_zero_split(f, x, 0.5 * abs_tol * tx);
  }
  return integral / tx;
}

std::vector<GridFunction> iterate_averages(const DickmanSpec& spec, const SteinTestFn& test,
                                           std::size_t depth, const std::vector<double>& eval_x) {
  if (eval_x.empty()) throw std::invalid_argument("need at least one evaluation point");
  double maxx = 0.0;
  for (double e : eval_x) {
    if (!(e >= 0.0)) throw std::invalid_argument("evaluation points must be nonnegative");
    maxx = std::max(maxx, e);
  }
  pipeline_rho(spec);
  const std::size_t top = static_cast<std::size_t>(std::ceil(maxx / kStep - 1e-9)) + 2;
  const std::size_t n_nodes = top + depth * kNodesPerUnit + 1;
  const AveragingGrid g = build_grid(spec, n_nodes);
  IterateState cur;
  IterateState next;
  std::vector<double> c;
  std::vector<double> j;
  seed_state(g, test, cur);
  std::vector<GridFunction> out;
  out.reserve(depth + 1);
  out.push_back(sample_state(cur, eval_x));
  for (std::size_t k = 1; k <= depth; ++k) {
    sweep(g, cur, next, c, j);
    std::swap(cur, next);
    out.push_back(sample_state(cur, eval_x));
  }
  return out;
}

double centering_constant(const DickmanSpec& spec, const SteinTestFn& test, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("centering tolerance must be positive");
  const double rho = pipeline_rho(spec);
  const double mu = mu_upper(spec);
  const std::size_t kc = geometric_count(mu, rho, tol, "centering tolerance");
  const std::size_t n_nodes = kc * kNodesPerUnit + 2;
  const AveragingGrid g = build_grid(spec, n_nodes);
  IterateState cur;
  IterateState next;
  std::vector<double> c;
  std::vector<double> j;
  seed_state(g, test, cur);
  for (std::size_t k = 1; k <= kc; ++k) {
    sweep(g, cur, next, c, j);
    std::swap(cur, next);
  }
  return cur.q[0];
}

SteinSolution solve_stein(const DickmanSpec& spec, const SteinTestFn& test, double epsilon,
                          double x_max) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("tail target must be positive");
  if (!(x_max >= kStep)) throw std::invalid_argument("x_max must cover at least one grid cell");
  const double rho = pipeline_rho(spec);
  const double mu = mu_upper(spec);

  const std::size_t big_k = geometric_count((mu + x_max) * rho, rho, epsilon, "tail target");
  const double ctol = std::min(1e-8, epsilon / 20.0);
  const std::size_t kc = geometric_count(mu, rho, ctol, "centering tolerance");
  const std::size_t sweeps = std::max(big_k, kc);

  const std::size_t top_idx = static_cast<std::size_t>(x_max / kStep + 1e-9);
  const std::size_t n_nodes =
      std::max(top_idx + (big_k + 2) * kNodesPerUnit, (sweeps + 1) * kNodesPerUnit) + 1;

  const AveragingGrid g = build_grid(spec, n_nodes);
  IterateState cur;
  IterateState next;
  std::vector<double> c;
  std::vector<double> j;
  seed_state(g, test, cur);

  const std::size_t g_valid = n_nodes - big_k * kNodesPerUnit;
  std::vector<double> gs(g_valid, 0.0);
  std::vector<double> gsp(g_valid, 0.0);
  std::vector<double> gspp(g_valid, 0.0);
  auto accumulate = [&](const IterateState& s) {
    for (std::size_t i = 0; i < g_valid; ++i) {
      gs[i] += s.q[i];
      gsp[i] += s.qp[i];
      gspp[i] += s.qpp[i];
    }
  };
  accumulate(cur);
  for (std::size_t k = 1; k <= sweeps; ++k) {
    sweep(g, cur, next, c, j);
    std::swap(cur, next);
    if (k <= big_k) accumulate(cur);
  }
  const double c_hat = cur.q[0];

  const double shift = static_cast<double>(big_k + 1) * c_hat;
  for (std::size_t i = 0; i < g_valid; ++i) gs[i] -= shift;

  IterateState gstate;
  gstate.q = std::move(gs);
  gstate.qp = std::move(gsp);
  gstate.qpp = std::move(gspp);
  gstate.valid = g_valid;
  cumulative(g, gstate, c, j);

  std::vector<double> f_all(g_valid);
  std::vector<double> fp_all(g_valid);
  std::vector<double> fpp_all(g_valid);
  f_all[0] = gstate.q[0];
  fp_all[0] = 0.0;
  fpp_all[0] = 0.0;
  for (std::size_t i = 1; i < g_valid; ++i) {
    const double invt = 1.0 / g.t[i];
    const double d = j[i] * invt;
    f_all[i] = c[i] * invt;
    fp_all[i] = g.r1[i] * d;
    fpp_all[i] = g.r1[i] * gstate.qp[i] + d * (g.r2[i] - 2.0 * g.r1[i] * g.r1[i]);
  }

  SteinSolution sol{spec};
  sol.K = big_k;
  sol.rho = rho;
  sol.mu_hat = mu;
  sol.center = c_hat;
  sol.tail_bound =
      (mu + x_max) * std::pow(rho, static_cast<double>(big_k) + 1.0) / (1.0 - rho);
  sol.test_name = test.name;
  sol.grid.resize(top_idx);
  sol.f.resize(top_idx);
  sol.f_prime.resize(top_idx);
  sol.f_double_prime.resize(top_idx);
  double rmax = 0.0;
  for (std::size_t i = 1; i <= top_idx; ++i) {
    const double x = static_cast<double>(i) * kStep;
    const double resid =
        fp_all[i] / g.r1[i] + f_all[i] - f_all[i + kNodesPerUnit] - (test.h(x) - c_hat);
    rmax = std::max(rmax, std::fabs(resid));
    sol.grid[i - 1] = x;
    sol.f[i - 1] = f_all[i];
    sol.f_prime[i - 1] = fp_all[i];
    sol.f_double_prime[i - 1] = fpp_all[i];
  }
  sol.residual_max = rmax;
  return sol;
}

double counterexample_curvature(double b) {
  if (!(b > 0.0)) throw RangeError("kink location must be positive");
  return 1.0 / b;
}

std::string stein_solution_csv(const SteinSolution& sol) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "# theta=%.17g utility=%s K=%zu tail_bound=%.17g\n",
                sol.spec.theta, sol.spec.utility.tag().c_str(), sol.K, sol.tail_bound);
  out += buf;
  out += "x,f,f_prime,f_double_prime\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", sol.grid[i], sol.f[i],
                  sol.f_prime[i], sol.f_double_prime[i]);
    out += buf;
  }
  return out;
}

}  // namespace dickman
