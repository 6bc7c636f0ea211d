#pragma once

#include <optional>

#include "hodgedirac/spectral.hpp"

// Neumann-series and successive-approximation solvers for the first-order
// system D- F = M D+ F + Psi on the torus, the second-order reduction
// div A grad u = div G <-> Dirac-Beltrami via the Cayley transform, gauge
// reconstruction, and the local-estimate experiment machinery.

namespace hodgedirac {

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // successive-difference norms
  double final_residual = 0;             // full equation residual after correction
  double contraction_estimate = 0;       // max observed difference ratio
  double norm_dF = 0;
  double norm_deltaF = 0;
  double norm_F = 0;
  long long distortion_violation_count = 0;
  bool converged = false;
  bool conditioning_warning = false;  // coefficient norm >= 0.95
  // Constant multivector omega with D- F - M D+ F = Psi + (I+M) omega. The
  // torus analogue of the harmonic-field correction: a source is solvable
  // exactly only up to a constant in the range of (I+M), and omega = 0 for
  // compatible (e.g. manufactured) sources.
  Multivector harmonic_correction;
};

using NonlinearCoefficient =
    std::function<Multivector(const std::array<double, kMaxGridDim>&, const Multivector&)>;

struct BeltramiProblem {
  GridSpec spec;
  std::optional<EndoGridField> linear;  // M(x)
  NonlinearCoefficient nonlinear;       // M(x, w), Lipschitz in w
  double lipschitz = 0;                 // declared contraction constant k < 1
  MultivectorGridField source;          // Psi
  Multivector mean_value;               // constant part of the solution
  double tol = 1e-10;
  int max_iter = 500;
};

namespace detail {

inline double contraction_estimate(const std::vector<double>& hist) {
  if (hist.size() < 2) return 0.0;
  const double floor = std::max(1e-13 * hist.front(), 1e-300);
  double worst = 0;
  for (std::size_t k = 1; k < hist.size(); ++k) {
    if (hist[k - 1] <= floor || hist[k] <= floor) continue;
    worst = std::max(worst, hist[k] / hist[k - 1]);
  }
  return worst;
}

template <class ApplyCoeff>
std::pair<MultivectorGridField, SolveReport> fixed_point_solve(const BeltramiProblem& p,
                                                               double rate_bound,
                                                               ApplyCoeff&& coeff) {
  p.source.require_domain(Domain::physical);
  SolveReport report;
  report.conditioning_warning = rate_bound >= 0.95;
  MultivectorGridField Phi = MultivectorGridField::physical(p.spec);
  bool trivial_map = rate_bound == 0.0;
  for (int it = 1; it <= p.max_iter; ++it) {
    MultivectorGridField next = coeff(Phi);
    next += p.source;
    next = mean_project(beurling(next));
    double diff = l2_norm(next - Phi);
    report.residual_history.push_back(diff);
    Phi = std::move(next);
    report.iterations = it;
    if (diff <= p.tol || trivial_map) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged)
    throw std::runtime_error(
        "solver: no convergence within max_iter (coefficient norm too close to 1, or aliasing)");
  report.contraction_estimate = detail::contraction_estimate(report.residual_history);

  MultivectorGridField F = cauchy_plus(Phi);
  add_constant(F, p.mean_value);
  MultivectorGridField resid = dminus(F) - coeff(dplus(F)) - p.source;
  report.final_residual = l2_norm(mean_project(resid));
  report.norm_dF = l2_norm(d(F));
  report.norm_deltaF = l2_norm(delta(F));
  report.norm_F = l2_norm(F);
  return {std::move(F), std::move(report)};
}

}  // namespace detail

// Neumann-series solution of D- F - M D+ F = Psi + (I+M) omega: iterates
// Phi <- S(M Phi + Psi + (I+M) omega) with the constant omega balanced each
// step so the iterate stays mean-free, and sets F = C+ Phi + mean.
inline std::pair<MultivectorGridField, SolveReport> neumann_solve(const BeltramiProblem& p) {
  if (!p.linear) throw std::invalid_argument("neumann_solve: linear coefficient required");
  const EndoGridField& M = *p.linear;
  if (!(M.spec() == p.spec)) throw std::invalid_argument("neumann_solve: spec mismatch");
  if (M.sup_norm() >= 1.0)
    throw std::invalid_argument("neumann_solve: coefficient norm must satisfy M < 1");
  p.source.require_domain(Domain::physical);
  const int nc = 1 << p.spec.dim;
  if (M.mode() == EndoMode::exterior) {
    // the exterior extension of any map fixes scalars, so it cannot contract
    // a grade-0 source; use an isotropic coefficient for those
    double s0 = 0;
    const double* src = p.source.component(0);
    for (long long q = 0; q < p.spec.total(); ++q) s0 = std::max(s0, std::abs(src[q]));
    if (s0 > 1e-13 * (1.0 + lp_norm(p.source, std::numeric_limits<double>::infinity())))
      throw std::invalid_argument(
          "neumann_solve: exterior-mode coefficient with a grade-0 source "
          "(extensions fix scalars; use an isotropic coefficient)");
  }

  // mean action of M on constants, as a 2^n x 2^n matrix
  Mat Mbar(nc, nc);
  {
    double in[1 << kMaxGridDim], out[1 << kMaxGridDim], acc[1 << kMaxGridDim];
    for (int b = 0; b < nc; ++b) {
      for (int r = 0; r < nc; ++r) in[r] = r == b ? 1.0 : 0.0;
      for (int r = 0; r < nc; ++r) acc[r] = 0.0;
      for (long long q = 0; q < p.spec.total(); ++q) {
        M.apply_raw(q, in, out);
        for (int r = 0; r < nc; ++r) acc[r] += out[r];
      }
      for (int r = 0; r < nc; ++r) Mbar(r, b) = acc[r] / double(p.spec.total());
    }
  }
  Eigen::FullPivLU<Mat> balance(Mat::Identity(nc, nc) + Mbar);
  if (!balance.isInvertible())
    throw std::invalid_argument("neumann_solve: I + mean(M) is singular");

  SolveReport report;
  report.conditioning_warning = M.sup_norm() >= 0.95;
  report.harmonic_correction = Multivector(p.spec.dim);
  MultivectorGridField Phi = MultivectorGridField::physical(p.spec);
  Multivector omega(p.spec.dim);
  const bool trivial_map = M.sup_norm() == 0.0;
  for (int it = 1; it <= p.max_iter; ++it) {
    MultivectorGridField next = M.apply(Phi);
    next += p.source;
    // balance the constant mode: omega solves (I + Mbar) omega = -mean(...)
    Multivector mean = field_mean(next);
    Vec rhs(nc);
    for (int b = 0; b < nc; ++b) rhs[b] = -mean[unsigned(b)];
    Vec w = balance.solve(rhs);
    for (int b = 0; b < nc; ++b) omega[unsigned(b)] = w[b];
    M.add_constant_image(next, omega, 1.0);
    next = mean_project(beurling(next));
    double diff = l2_norm(next - Phi);
    report.residual_history.push_back(diff);
    Phi = std::move(next);
    report.iterations = it;
    if (diff <= p.tol || trivial_map) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged)
    throw std::runtime_error(
        "neumann_solve: no convergence within max_iter (M too close to 1, or aliasing)");
  report.contraction_estimate = detail::contraction_estimate(report.residual_history);
  report.harmonic_correction = omega;

  MultivectorGridField F = cauchy_plus(Phi);
  add_constant(F, p.mean_value);
  MultivectorGridField resid = dminus(F) - M.apply(dplus(F)) - p.source;
  M.add_constant_image(resid, omega, -1.0);
  report.final_residual = l2_norm(resid);
  report.norm_dF = l2_norm(d(F));
  report.norm_deltaF = l2_norm(delta(F));
  report.norm_F = l2_norm(F);
  return {std::move(F), std::move(report)};
}

// Successive approximations for D- F = M(x, D+ F) + Psi with a pointwise
// k-Lipschitz coefficient, M(x, 0) = 0.
inline std::pair<MultivectorGridField, SolveReport> nonlinear_solve(const BeltramiProblem& p) {
  if (!p.nonlinear) throw std::invalid_argument("nonlinear_solve: coefficient required");
  if (!(p.lipschitz >= 0.0 && p.lipschitz < 1.0))
    throw std::invalid_argument("nonlinear_solve: Lipschitz constant must be in [0,1)");
  // spot check M(x,0) = 0
  Multivector zero(p.spec.dim);
  for (long long q : {0LL, p.spec.total() / 3, p.spec.total() - 1})
    if (norm(p.nonlinear(position(p.spec, q), zero)) > 1e-12)
      throw std::invalid_argument("nonlinear_solve: coefficient must vanish at w = 0");
  auto apply_nl = [&](const MultivectorGridField& Phi) {
    MultivectorGridField out = MultivectorGridField::physical(p.spec);
    for (long long q = 0; q < p.spec.total(); ++q)
      out.set(q, p.nonlinear(position(p.spec, q), Phi.at(q)));
    return out;
  };
  try {
    return detail::fixed_point_solve(p, p.lipschitz, apply_nl);
  } catch (const std::runtime_error&) {
    // diagnose: sample Lipschitz quotients before giving up
    Rng rng(0x4c495053);
    double worst = 0;
    for (int t = 0; t < 64; ++t) {
      long long q = rng.uniform_int(0, p.spec.total() - 1);
      Multivector w1 = rng.multivector(p.spec.dim), w2 = rng.multivector(p.spec.dim);
      double dw = norm(w1 - w2);
      if (dw < 1e-9) continue;
      auto x = position(p.spec, q);
      worst = std::max(worst, norm(p.nonlinear(x, w1) - p.nonlinear(x, w2)) / dw);
    }
    throw std::runtime_error("nonlinear_solve: no convergence; sampled Lipschitz quotient " +
                             std::to_string(worst) + " vs declared " + std::to_string(p.lipschitz));
  }
}

struct EllipticProblem {
  GridSpec spec;
  EndoGridField A;          // positive vector maps
  MultivectorGridField G;   // grade-1 source of div A grad u = div G
  double mean_u = 0;
  double tol = 1e-10;
  int max_iter = 500;
};

// Second-order -> first-order reduction: M = Cayley(A) applied through the
// exterior extension, Psi = (I + M) G, target field in grades {0, 2}.
inline BeltramiProblem reduce_second_order(const EllipticProblem& p) {
  p.G.require_domain(Domain::physical);
  if (!(p.G.spec() == p.spec) || !(p.A.spec() == p.spec))
    throw std::invalid_argument("reduce_second_order: spec mismatch");
  EndoGridField M = p.A.cayley_field();  // throws on positivity failure
  MultivectorGridField Psi = p.G + M.apply(grade_project(p.G, 1));
  BeltramiProblem out{p.spec,
                      std::move(M),
                      nullptr,
                      0.0,
                      std::move(Psi),
                      Multivector::scalar(p.spec.dim, p.mean_u),
                      p.tol,
                      p.max_iter};
  return out;
}

inline MultivectorGridField extract_scalar(const MultivectorGridField& F) {
  return grade_project(F, 0);
}

// Physical flux A grad u - G.
inline MultivectorGridField flux(const EllipticProblem& p, const MultivectorGridField& u) {
  return p.A.apply(d(u)) - p.G;
}

// || delta(A grad u - G) ||_{-1} / || A grad u - G ||_2: a mesh-independent
// relative measure of the weak second-order residual.
inline double residual_second_order(const EllipticProblem& p, const MultivectorGridField& u) {
  MultivectorGridField B = flux(p, u);
  double nb = l2_norm(B);
  return negative_order_norm(delta(B)) / (nb > 0 ? nb : 1.0);
}

// || d <F>_2 || / || D+ F ||: the gauge condition dv = 0 should emerge from
// the solve rather than being imposed.
inline double dv_residual(const MultivectorGridField& F) {
  double nd = l2_norm(dplus(F));
  return l2_norm(d(grade_project(F, 2))) / (nd > 0 ? nd : 1.0);
}

struct GaugeResult {
  MultivectorGridField v;
  double d_residual = 0;      // || d v ||
  double delta_residual = 0;  // || delta v - mean-free flux || / || flux ||
};

// Reconstructs the bivector potential of a (numerically) divergence-free
// flux B = A grad u - G: v = <C+ (P0 B)>_2 with delta v = P0 B, d v = 0.
inline GaugeResult gauge_reconstruct(const EndoGridField& A, const MultivectorGridField& u,
                                     const MultivectorGridField& G, double compat_tol = 1e-6) {
  MultivectorGridField B = A.apply(d(u)) - G;
  double nb = l2_norm(B);
  if (nb == 0) return {MultivectorGridField::physical(u.spec()), 0.0, 0.0};
  double compat = negative_order_norm(delta(B)) / nb;
  if (compat > compat_tol)
    throw std::runtime_error("gauge_reconstruct: flux is not divergence free (residual " +
                             std::to_string(compat) + ")");
  MultivectorGridField B0 = mean_project(B);
  MultivectorGridField v = grade_project(cauchy_plus(B0), 2);
  GaugeResult out{std::move(v), 0.0, 0.0};
  out.d_residual = l2_norm(d(out.v)) / nb;
  out.delta_residual = l2_norm(delta(out.v) - B0) / nb;
  return out;
}

// Counts grid points violating |P|^2 + |M|^2 <= (K/2)(|P|^2 - |M|^2) with
// P = D+F + s, M = D-F - s, beyond a slack proportional to the pointwise
// field scale. For the homogeneous equation s = 0; for elliptic-reduction
// solves s is the effective source G + omega, which turns (P, M) into
// (E+B, E-B) for the physical pair E = grad u, B = A grad u.
inline long long distortion_check(const MultivectorGridField& F, double K,
                                  const MultivectorGridField* source_vec = nullptr,
                                  double slack_rel = 1e-8) {
  MultivectorGridField dp = dplus(F), dm = dminus(F);
  if (source_vec) {
    dp += *source_vec;
    dm -= *source_vec;
  }
  const long long total = F.total();
  double scale = 0;
  std::vector<double> plus(total), minus(total);
  for (long long p = 0; p < total; ++p) {
    double a2 = 0, b2 = 0;
    for (int b = 0; b < F.ncoeff(); ++b) {
      a2 += dp.component(b)[p] * dp.component(b)[p];
      b2 += dm.component(b)[p] * dm.component(b)[p];
    }
    plus[std::size_t(p)] = a2;
    minus[std::size_t(p)] = b2;
    scale = std::max(scale, a2 + b2);
  }
  const double slack = slack_rel * scale;
  long long count = 0;
  for (long long p = 0; p < total; ++p) {
    double lhs = plus[std::size_t(p)] + minus[std::size_t(p)];
    double rhs = 0.5 * K * (plus[std::size_t(p)] - minus[std::size_t(p)]);
    if (lhs > rhs + slack) ++count;
  }
  return count;
}

struct LocalizationResult {
  double recursion = 0;  // eta F = C-(I - M S)^{-1} sigma_M(grad eta, x) F
  double d1 = 0;         // eta D+ F = S X - grad eta /\_+ F
  double d2 = 0;         // eta D- F = X - grad eta /\_- F
};

// Localization identities for a field solving the homogeneous equation on
// supp eta (up to the constant harmonic correction omega of its solve,
// which enters the cutoff source as eta (I+M) omega). X solves
// (I - M S) X = sigma by Neumann iteration; the recursion residual is
// measured on mean-free parts.
inline LocalizationResult localization_check(const MultivectorGridField& F,
                                             const EndoGridField& M,
                                             const MultivectorGridField& eta,
                                             const Multivector* omega = nullptr) {
  MultivectorGridField sigma = symbol_source(eta, M, F);
  if (omega) {
    MultivectorGridField corr = MultivectorGridField::physical(F.spec());
    M.add_constant_image(corr, *omega, 1.0);
    sigma += cutoff_apply(eta, corr);
  }
  MultivectorGridField X = sigma;
  double scale = l2_norm(sigma);
  for (int it = 0; it < 400; ++it) {
    MultivectorGridField next = sigma + M.apply(beurling(X));
    double diff = l2_norm(next - X);
    X = std::move(next);
    if (diff <= 1e-13 * std::max(1.0, scale)) break;
  }
  MultivectorGridField grad_eta = d(eta);
  LocalizationResult r;
  MultivectorGridField etaF = cutoff_apply(eta, F);
  double nf = l2_norm(etaF);
  r.recursion = l2_norm(mean_project(etaF) - cauchy_minus(X)) / (nf > 0 ? nf : 1.0);
  // the derivative identities are normalized against the localized-field
  // scale ||X|| = ||D- (eta F)||; near eta the plain eta D+- F factors can be
  // arbitrarily small while the two big terms cancel
  MultivectorGridField lhs1 = cutoff_apply(eta, dplus(F));
  MultivectorGridField lhs2 = cutoff_apply(eta, dminus(F));
  double scale2 = std::max(l2_norm(X), 1e-300);
  r.d1 = l2_norm(lhs1 - beurling(X) + field_cliff(grad_eta, F, Signature::positive)) / scale2;
  r.d2 = l2_norm(lhs2 - X + field_cliff(grad_eta, F, Signature::negative)) / scale2;
  return r;
}

struct MeyersResult {
  double lhs = 0;  // h^n sum |eta|^p |grad (x) F|^p
  double rhs = 0;  // h^n sum |grad eta|^p |F|^p
  double ratio = 0;
};

inline MeyersResult meyers_experiment(const MultivectorGridField& F,
                                      const MultivectorGridField& eta, double p, double M) {
  const int n = F.dim();
  double sobolev_cap = n > 2 ? 2.0 * n / (n - 2.0) : std::numeric_limits<double>::infinity();
  double pM = 1.0 + 1.0 / M;
  if (!(p >= 2.0 && p < std::min(sobolev_cap, pM)))
    throw std::invalid_argument("meyers_experiment: p outside [2, min(2n/(n-2), p_M))");
  MultivectorGridField gradF = gradient_norm_field(F);
  MultivectorGridField grad_eta = d(eta);
  MeyersResult out;
  const long long total = F.total();
  for (long long q = 0; q < total; ++q) {
    double ge2 = 0;
    for (int b = 0; b < grad_eta.ncoeff(); ++b) {
      double v = grad_eta.component(b)[q];
      ge2 += v * v;
    }
    double f2 = 0;
    for (int b = 0; b < F.ncoeff(); ++b) {
      double v = F.component(b)[q];
      f2 += v * v;
    }
    out.lhs += std::pow(std::abs(eta.component(0)[q]), p) * std::pow(gradF.component(0)[q], p);
    out.rhs += std::pow(ge2, 0.5 * p) * std::pow(f2, 0.5 * p);
  }
  double hv = F.spec().cell_volume();
  out.lhs *= hv;
  out.rhs *= hv;
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
  return out;
}

// Residual of the Hodge-dual equation for self-dual coefficients:
// with G = involution(F)★ and D- F = M D+ F + Psi, star conjugation gives
//   D+ G = -M D- G + Psi★.
inline double hodge_duality_check(const MultivectorGridField& F, const EndoGridField& M,
                                  const MultivectorGridField& Psi) {
  if (M.mode() == EndoMode::exterior || M.mode() == EndoMode::vector_only) {
    for (long long q : {0LL, M.spec().total() / 2, M.spec().total() - 1})
      if (!is_self_dual(M.matrix(q), 1e-8))
        throw std::invalid_argument("hodge_duality_check: coefficient is not self-dual");
  }
  MultivectorGridField G = field_star_right(field_involution(F));
  MultivectorGridField lhs = dplus(G) + M.apply(dminus(G)) - field_star_right(Psi);
  double nd = l2_norm(dplus(G));
  return l2_norm(mean_project(lhs)) / (nd > 0 ? nd : 1.0);
}

// Critical exponent p_M with M ||S||_{p_M} = 1. Without a norm function the
// conjectured norm max{p-1, 1/(p-1)} gives p_M = 1 + 1/M in closed form.
inline double critical_exponent(double M, const std::function<double(double)>& s_norm = nullptr) {
  if (!(M > 0.0 && M < 1.0)) throw std::invalid_argument("critical_exponent: M must be in (0,1)");
  if (!s_norm) return 1.0 + 1.0 / M;
  double lo = 2.0, hi = 2.0;
  if (M * s_norm(lo) >= 1.0) throw std::invalid_argument("critical_exponent: no root above p=2");
  while (M * s_norm(hi) < 1.0) {
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("critical_exponent: norm function never reaches 1/M");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (M * s_norm(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// k-fold Sobolev conjugate iteration x -> n x / (n - x); stops once the
// iterate reaches n, and refuses to step past the stopping grade. Tracked as
// a quotient p/q so the stopping values come out exact.
inline double sobolev_iterate(int n, int k, double x) {
  if (k < 0) throw std::invalid_argument("sobolev_iterate: negative iteration count");
  double p = x, q = 1.0;
  for (int j = 0; j < k; ++j) {
    if (p >= double(n) * q)
      throw std::invalid_argument("sobolev_iterate: iterate past the stopping grade");
    double np = double(n) * p;
    double nq = double(n) * q - p;
    p = np;
    q = nq;
  }
  return p / q;
}

}  // namespace hodgedirac
