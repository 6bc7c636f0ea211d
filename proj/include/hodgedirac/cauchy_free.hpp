#pragma once

#include <map>

#include "hodgedirac/fft.hpp"
#include "hodgedirac/grid.hpp"

// Free-space Cauchy transform on a compactly supported grid field:
//   (C+ phi)(x) = h^n sum_y E(x - y) /\_+ phi(y),  E(z) = z / (sigma_{n-1} |z|^n),
// realized as a zero-padded FFT convolution with the sampled kernel, the
// singular self-cell replaced by 0 (the kernel is odd, so the cell average
// of the principal value vanishes). cauchy_free_at evaluates the identical
// discrete sum directly at selected points, which is cheaper when only a few
// values are needed.

namespace hodgedirac {

inline double unit_sphere_area(int n) {
  const double pi = 3.14159265358979323846264338;
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace detail {

struct R2cPlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

inline R2cPlanPair get_r2c_plans(int dim, int P) {
  static std::map<std::pair<int, int>, R2cPlanPair> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({dim, P});
  if (it != cache.end()) return it->second;
  long long total = 1;
  for (int a = 0; a < dim; ++a) total *= P;
  long long spectral = total / P * (P / 2 + 1);
  RealBuffer rs(static_cast<std::size_t>(total), 0.0);
  ComplexBuffer cs(static_cast<std::size_t>(spectral), std::complex<double>(0.0));
  int nn[kMaxGridDim];
  for (int a = 0; a < dim; ++a) nn[a] = P;
  R2cPlanPair plans;
  plans.fwd = fftw_plan_dft_r2c(dim, nn, rs.data(), reinterpret_cast<fftw_complex*>(cs.data()),
                                FFTW_ESTIMATE);
  plans.bwd = fftw_plan_dft_c2r(dim, nn, reinterpret_cast<fftw_complex*>(cs.data()), rs.data(),
                                FFTW_ESTIMATE);
  cache[{dim, P}] = plans;
  return plans;
}

// Indices of the central 1/pad fraction of the original box.
inline bool in_central_band(const std::array<int, kMaxGridDim>& idx, int dim, int N, int pad) {
  const int halfwidth = N / (2 * pad);
  for (int a = 0; a < dim; ++a)
    if (std::abs(idx[a] - N / 2) > halfwidth) return false;
  return true;
}

inline long long ravel_padded(const std::array<int, kMaxGridDim>& idx, int dim, int P) {
  long long p = 0;
  for (int a = 0; a < dim; ++a) p = p * P + idx[a];
  return p;
}

}  // namespace detail

inline std::vector<unsigned> nonzero_components(const MultivectorGridField& F) {
  std::vector<unsigned> out;
  for (int b = 0; b < F.ncoeff(); ++b) {
    const double* src = F.component(b);
    for (long long p = 0; p < F.total(); ++p)
      if (src[p] != 0.0) {
        out.push_back(unsigned(b));
        break;
      }
  }
  return out;
}

inline void check_central_support(const MultivectorGridField& phi, int pad_factor) {
  const GridSpec& g = phi.spec();
  std::array<int, kMaxGridDim> idx{};
  for (long long p = 0; p < g.total(); ++p) {
    bool nonzero = false;
    for (int b = 0; b < phi.ncoeff() && !nonzero; ++b) nonzero = phi.component(b)[p] != 0.0;
    if (!nonzero) continue;
    unravel(g, p, idx);
    if (!detail::in_central_band(idx, g.dim, g.npoints, pad_factor))
      throw std::invalid_argument(
          "cauchy_free: support leaves the central 1/pad fraction of the box (aliasing guard)");
  }
}

inline MultivectorGridField cauchy_free(const MultivectorGridField& phi, int pad_factor) {
  phi.require_domain(Domain::physical);
  if (pad_factor < 2) throw std::invalid_argument("cauchy_free: pad factor must be >= 2");
  check_central_support(phi, pad_factor);

  const GridSpec& g = phi.spec();
  const int n = g.dim;
  const int N = g.npoints;
  const int P = pad_factor * N;
  const double h = g.spacing();
  const double sigma = unit_sphere_area(n);
  long long ptotal = 1;
  for (int a = 0; a < n; ++a) ptotal *= P;
  const long long pspectral = ptotal / P * (P / 2 + 1);

  detail::R2cPlanPair plans = detail::get_r2c_plans(n, P);
  RealBuffer padR(static_cast<std::size_t>(ptotal), 0.0);
  ComplexBuffer kernel_spec(static_cast<std::size_t>(pspectral), std::complex<double>(0.0));
  ComplexBuffer source_spec(static_cast<std::size_t>(pspectral), std::complex<double>(0.0));
  std::map<unsigned, ComplexBuffer> acc;

  std::vector<unsigned> source_blades = nonzero_components(phi);
  std::array<int, kMaxGridDim> idx{};

  for (int j = 0; j < n; ++j) {
    // sampled kernel component E_j on wrapped padded offsets, self cell zeroed
    for (long long q = 0; q < ptotal; ++q) {
      long long rest = q;
      double z2 = 0, zj = 0;
      for (int a = n - 1; a >= 0; --a) {
        int i = int(rest % P);
        rest /= P;
        double za = (i < P / 2 ? i : i - P) * h;
        z2 += za * za;
        if (a == j) zj = za;
      }
      padR[std::size_t(q)] = z2 == 0.0 ? 0.0 : zj / (sigma * std::pow(z2, 0.5 * n));
    }
    fftw_execute_dft_r2c(plans.fwd, padR.data(),
                         reinterpret_cast<fftw_complex*>(kernel_spec.data()));

    for (unsigned t : source_blades) {
      // zero-padded source component
      std::fill(padR.begin(), padR.end(), 0.0);
      const double* src = phi.component(int(t));
      for (long long p = 0; p < g.total(); ++p) {
        unravel(g, p, idx);
        padR[std::size_t(detail::ravel_padded(idx, n, P))] = src[p];
      }
      fftw_execute_dft_r2c(plans.fwd, padR.data(),
                           reinterpret_cast<fftw_complex*>(source_spec.data()));

      const double s = double(single_sign(j, t));
      unsigned r = t ^ (1u << j);
      auto [it, fresh] = acc.try_emplace(r);
      if (fresh) it->second.assign(std::size_t(pspectral), std::complex<double>(0.0));
      ComplexBuffer& a = it->second;
      for (long long q = 0; q < pspectral; ++q)
        a[std::size_t(q)] += s * kernel_spec[std::size_t(q)] * source_spec[std::size_t(q)];
    }
  }

  MultivectorGridField out = MultivectorGridField::physical(g);
  const double scale = h * std::pow(h, n - 1) / double(ptotal);
  for (auto& [r, buf] : acc) {
    fftw_execute_dft_c2r(plans.bwd, reinterpret_cast<fftw_complex*>(buf.data()), padR.data());
    double* dst = out.component(int(r));
    for (long long p = 0; p < g.total(); ++p) {
      unravel(g, p, idx);
      dst[p] = scale * padR[std::size_t(detail::ravel_padded(idx, n, P))];
    }
  }
  return out;
}

// Direct evaluation of the same discrete convolution at chosen grid points.
// Sources are stored compactly (only the nonzero blades carry values) so
// fields with millions of support points stay cheap.
inline std::vector<Multivector> cauchy_free_at(const MultivectorGridField& phi,
                                               const std::vector<long long>& eval_points) {
  phi.require_domain(Domain::physical);
  const GridSpec& g = phi.spec();
  const int n = g.dim;
  const double h = g.spacing();
  const double sigma = unit_sphere_area(n);

  const std::vector<unsigned> blades = nonzero_components(phi);
  std::vector<long long> src;
  for (long long p = 0; p < g.total(); ++p) {
    bool nonzero = false;
    for (unsigned b : blades) nonzero = nonzero || phi.component(int(b))[p] != 0.0;
    if (nonzero) src.push_back(p);
  }
  std::vector<double> vals(src.size() * blades.size());
  std::vector<std::array<double, kMaxGridDim>> coords(src.size());
  for (std::size_t s = 0; s < src.size(); ++s) {
    for (std::size_t bi = 0; bi < blades.size(); ++bi)
      vals[s * blades.size() + bi] = phi.component(int(blades[bi]))[src[s]];
    auto x = position(g, src[s]);
    for (int a = 0; a < n; ++a) coords[s][a] = x[a];
  }

  std::vector<Multivector> out;
  out.reserve(eval_points.size());
  const double weight = std::pow(h, n);
  for (long long ep : eval_points) {
    std::array<double, kMaxGridDim> x = position(g, ep);
    Multivector acc(n);
    for (std::size_t s = 0; s < src.size(); ++s) {
      if (src[s] == ep) continue;  // principal value: drop the singular cell
      double z2 = 0;
      double z[kMaxGridDim];
      for (int a = 0; a < n; ++a) {
        z[a] = x[a] - coords[s][a];
        z2 += z[a] * z[a];
      }
      const double f = weight / (sigma * std::pow(z2, 0.5 * n));
      for (int j = 0; j < n; ++j) {
        if (z[j] == 0.0) continue;
        const double ez = f * z[j];
        const unsigned bit = 1u << j;
        for (std::size_t bi = 0; bi < blades.size(); ++bi) {
          double v = vals[s * blades.size() + bi];
          if (v == 0.0) continue;
          unsigned b = blades[bi];
          acc[b ^ bit] += ez * double(single_sign(j, b)) * v;
        }
      }
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace hodgedirac
