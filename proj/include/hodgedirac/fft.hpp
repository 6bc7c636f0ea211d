#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "hodgedirac/grid.hpp"

// FFTW-backed transforms. Plans are cached per (dim, N, howmany, sign) and
// created with FFTW_ESTIMATE so planning is deterministic; the plan cache is
// the only synchronization point.

namespace hodgedirac {

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  // In-place c2c transform of `howmany` contiguous N^dim volumes.
  fftw_plan get_many(int dim, int npoints, int howmany, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    Key key{dim, npoints, howmany, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    long long total = 1;
    for (int a = 0; a < dim; ++a) total *= npoints;
    ComplexBuffer scratch(std::size_t(total) * howmany);
    int n[kMaxGridDim];
    for (int a = 0; a < dim; ++a) n[a] = npoints;
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_many_dft(dim, n, howmany, ptr, nullptr, 1, int(total), ptr,
                                        nullptr, 1, int(total), sign, FFTW_ESTIMATE);
    plans_[key] = plan;
    return plan;
  }

 private:
  using Key = std::tuple<int, int, int, int>;
  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

}  // namespace detail

inline MultivectorGridField fft(const MultivectorGridField& F) {
  F.require_domain(Domain::physical);
  MultivectorGridField out = MultivectorGridField::spectral(F.spec());
  const long long total = F.total();
  for (int b = 0; b < F.ncoeff(); ++b) {
    const double* src = F.component(b);
    std::complex<double>* dst = out.component_cx(b);
    for (long long p = 0; p < total; ++p) dst[p] = src[p];
  }
  fftw_plan plan =
      detail::PlanCache::instance().get_many(F.dim(), F.spec().npoints, F.ncoeff(), FFTW_FORWARD);
  fftw_complex* ptr = reinterpret_cast<fftw_complex*>(out.raw_cx().data());
  fftw_execute_dft(plan, ptr, ptr);
  return out;
}

inline MultivectorGridField ifft(const MultivectorGridField& G) {
  G.require_domain(Domain::spectral);
  MultivectorGridField tmp = G;
  fftw_plan plan =
      detail::PlanCache::instance().get_many(G.dim(), G.spec().npoints, G.ncoeff(), FFTW_BACKWARD);
  fftw_complex* ptr = reinterpret_cast<fftw_complex*>(tmp.raw_cx().data());
  fftw_execute_dft(plan, ptr, ptr);
  MultivectorGridField out = MultivectorGridField::physical(G.spec());
  const double scale = 1.0 / double(G.total());
  const long long total = G.total();
  for (int b = 0; b < G.ncoeff(); ++b) {
    const std::complex<double>* src = tmp.component_cx(b);
    double* dst = out.component(b);
    for (long long p = 0; p < total; ++p) dst[p] = src[p].real() * scale;
  }
  return out;
}

// Largest imaginary residue of the inverse transform; nonzero values signal a
// multiplier that broke conjugate symmetry.
inline double ifft_imag_residual(const MultivectorGridField& G) {
  G.require_domain(Domain::spectral);
  MultivectorGridField tmp = G;
  fftw_plan plan =
      detail::PlanCache::instance().get_many(G.dim(), G.spec().npoints, G.ncoeff(), FFTW_BACKWARD);
  fftw_complex* ptr = reinterpret_cast<fftw_complex*>(tmp.raw_cx().data());
  fftw_execute_dft(plan, ptr, ptr);
  double m = 0;
  const double scale = 1.0 / double(G.total());
  for (const auto& v : tmp.raw_cx()) m = std::max(m, std::abs(v.imag()) * scale);
  return m;
}

// Zeroes every mode whose largest |frequency index| exceeds frac * N/2.
inline MultivectorGridField band_limit(const MultivectorGridField& F, double frac) {
  MultivectorGridField spec = F.domain() == Domain::spectral ? F : fft(F);
  const GridSpec& g = F.spec();
  const int cutoff = int(frac * (g.npoints / 2));
  std::array<int, kMaxGridDim> idx{};
  for (long long p = 0; p < g.total(); ++p) {
    unravel(g, p, idx);
    int kmax = 0;
    for (int a = 0; a < g.dim; ++a) kmax = std::max(kmax, std::abs(freq_index(idx[a], g.npoints)));
    if (kmax <= cutoff) continue;
    for (int b = 0; b < spec.ncoeff(); ++b) spec.component_cx(b)[p] = 0.0;
  }
  return F.domain() == Domain::spectral ? spec : ifft(spec);
}

}  // namespace hodgedirac
