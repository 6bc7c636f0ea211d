#pragma once

#include "hodgedirac/rng.hpp"
#include "hodgedirac/solver.hpp"

// Built-in coefficient recipes and manufactured problems. Manufactured
// fields are normalized to unit L2 norm so absolute stopping tolerances and
// the geometric iteration bounds line up.

namespace hodgedirac::recipes {

inline constexpr double kPi = 3.14159265358979323846264338;

// Random field band-limited to |k| <= frac * N/2, restricted to the given
// grades, mean removed and normalized.
inline MultivectorGridField random_band_limited(const GridSpec& g, Rng& rng,
                                                std::initializer_list<int> grades,
                                                double frac = 1.0 / 3.0) {
  MultivectorGridField F = MultivectorGridField::physical(g);
  for (int b = 0; b < F.ncoeff(); ++b) {
    bool keep = false;
    for (int k : grades) keep = keep || std::popcount(unsigned(b)) == k;
    if (!keep) continue;
    double* dst = F.component(b);
    for (long long p = 0; p < F.total(); ++p) dst[p] = rng.uniform(-1.0, 1.0);
  }
  F = mean_project(band_limit(F, frac));
  double n = l2_norm(F);
  if (n > 0) F *= 1.0 / n;
  return F;
}

// Smooth scalar profile with max |s| = 1, extremes attained on grid points.
inline double unit_wave(const std::array<double, kMaxGridDim>& x, double L) {
  return std::sin(2 * kPi * x[0] / L);
}

// Coefficient fields ------------------------------------------------------

// M(x) = strength * sin(2 pi x_1 / L) * I, exterior mode; sup norm = strength.
inline EndoGridField coefficient_sine_isotropic(const GridSpec& g, double strength) {
  return EndoGridField::from_matrix_field(
      g,
      [&, strength](const auto& x) {
        return Mat(strength * unit_wave(x, g.box_length) * Mat::Identity(g.dim, g.dim));
      },
      EndoMode::exterior);
}

// mu(x) I on the whole algebra (contracts every grade, grade 0 included).
inline EndoGridField coefficient_sine_scalar(const GridSpec& g, double strength) {
  const double L = g.box_length;
  return EndoGridField::isotropic(
      g, [=](const auto& x) { return strength * unit_wave(x, L); });
}

// Piecewise-constant +/- strength checkerboard coefficient.
inline EndoGridField coefficient_checkerboard(const GridSpec& g, double strength) {
  return EndoGridField::from_matrix_field(
      g,
      [&, strength](const auto& x) {
        int cell = 0;
        for (int a = 0; a < g.dim; ++a) cell += int(std::floor(4.0 * x[a] / g.box_length));
        double s = (cell % 2 == 0) ? strength : -strength;
        return Mat(s * Mat::Identity(g.dim, g.dim));
      },
      EndoMode::exterior);
}

// Smooth SPD coefficient with eigenvalues in [lam, Lam], both attained:
// A(x) = Q(x) diag(d_i(x)) Q(x)^T with a rotating eigenframe.
inline EndoGridField coefficient_smooth_spd(const GridSpec& g, double lam, double Lam) {
  const int n = g.dim;
  const double L = g.box_length;
  return EndoGridField::from_matrix_field(
      g,
      [=](const auto& x) {
        double mid = 0.5 * (lam + Lam), amp = 0.5 * (Lam - lam);
        Vec dvec(n);
        for (int i = 0; i < n; ++i) {
          double phase = std::sin(2 * kPi * (x[i % n]) / L + 0.5 * i);
          dvec[i] = mid + amp * (i == 0 ? unit_wave(x, L) : 0.6 * phase);
        }
        double th = 0.7 * std::sin(2 * kPi * x[1 % n] / L);
        Mat Q = Mat::Identity(n, n);
        Q(0, 0) = std::cos(th);
        Q(0, 1) = -std::sin(th);
        Q(1, 0) = std::sin(th);
        Q(1, 1) = std::cos(th);
        return Mat(Q * dvec.asDiagonal() * Q.transpose());
      },
      EndoMode::vector_only);
}

// Manufactured linear problem: pick a band-limited exact field in grades
// {0,2}, then define Psi = D- F* - M D+ F*.
struct ManufacturedLinear {
  BeltramiProblem problem;
  MultivectorGridField exact;
};

inline ManufacturedLinear manufactured_linear(const GridSpec& g, const EndoGridField& M,
                                              std::uint64_t seed, double tol = 1e-10,
                                              int max_iter = 500) {
  Rng rng(seed);
  MultivectorGridField exact = random_band_limited(g, rng, {0, 2});
  Multivector mean = Multivector::scalar(g.dim, rng.uniform(-1.0, 1.0));
  add_constant(exact, mean);
  MultivectorGridField Psi = dminus(exact) - M.apply(dplus(exact));
  ManufacturedLinear out{{g, M, nullptr, 0.0, std::move(Psi), mean, tol, max_iter},
                         std::move(exact)};
  return out;
}

// Componentwise saturating contraction with Lipschitz constant k.
inline NonlinearCoefficient saturating_coefficient(double k) {
  return [k](const std::array<double, kMaxGridDim>&, const Multivector& w) {
    Multivector out(w.dim());
    for (unsigned b = 0; b < w.size(); ++b) out[b] = k * std::sin(w[b]);
    return out;
  };
}

struct ManufacturedNonlinear {
  BeltramiProblem problem;
  MultivectorGridField exact;
};

inline ManufacturedNonlinear manufactured_nonlinear(const GridSpec& g, double k,
                                                    std::uint64_t seed, double tol = 1e-10,
                                                    int max_iter = 500) {
  Rng rng(seed);
  MultivectorGridField exact = random_band_limited(g, rng, {0, 2});
  Multivector mean = Multivector::scalar(g.dim, rng.uniform(-1.0, 1.0));
  add_constant(exact, mean);
  NonlinearCoefficient coeff = saturating_coefficient(k);
  MultivectorGridField dp = dplus(exact);
  MultivectorGridField Psi = dminus(exact);
  for (long long q = 0; q < g.total(); ++q)
    Psi.set(q, Psi.at(q) - coeff(position(g, q), dp.at(q)));
  ManufacturedNonlinear out{{g, std::nullopt, coeff, k, std::move(Psi), mean, tol, max_iter},
                            std::move(exact)};
  return out;
}

// Elliptic problem with a band-limited divergence source.
inline EllipticProblem elliptic_problem(const GridSpec& g, EndoGridField A, std::uint64_t seed,
                                        double tol = 1e-10, int max_iter = 500) {
  Rng rng(seed);
  MultivectorGridField G = random_band_limited(g, rng, {1});
  return EllipticProblem{g, std::move(A), std::move(G), 0.0, tol, max_iter};
}

// Exact Fourier solution of a Laplace u = div G (constant isotropic a).
inline MultivectorGridField poisson_exact(const MultivectorGridField& G, double a) {
  MultivectorGridField S = fft(G);
  const GridSpec& g = G.spec();
  MultivectorGridField out = MultivectorGridField::spectral(g);
  std::array<int, kMaxGridDim> idx{};
  const double base = 2 * kPi / g.box_length;
  for (long long p = 0; p < g.total(); ++p) {
    unravel(g, p, idx);
    double xi2 = 0;
    bool nyq = false;
    double xi[kMaxGridDim];
    for (int axis = 0; axis < g.dim; ++axis) {
      int k = freq_index(idx[axis], g.npoints);
      if (k == -g.npoints / 2) nyq = true;
      xi[axis] = base * k;
      xi2 += xi[axis] * xi[axis];
    }
    if (xi2 == 0.0 || nyq) continue;
    // -a |xi|^2 u_hat = F(div G) = sum_a i xi_a G_hat_a
    std::complex<double> divg(0, 0);
    for (int axis = 0; axis < g.dim; ++axis)
      divg += std::complex<double>(0, xi[axis]) * S.component_cx(1 << axis)[p];
    out.component_cx(0)[p] = -divg / (a * xi2);
  }
  return ifft(out);
}

// Smooth periodic bump supported in |x - center| < radius.
inline MultivectorGridField bump(const GridSpec& g, const std::array<double, kMaxGridDim>& center,
                                 double radius) {
  return sample(g, [&](const auto& x) {
    double r2 = 0;
    for (int a = 0; a < g.dim; ++a) {
      double dx = x[a] - center[a];
      // nearest periodic image
      dx -= g.box_length * std::round(dx / g.box_length);
      r2 += dx * dx;
    }
    Multivector w(g.dim);
    double s = r2 / (radius * radius);
    if (s < 1.0) w[0] = std::exp(1.0 - 1.0 / (1.0 - s));
    return w;
  });
}

}  // namespace hodgedirac::recipes
