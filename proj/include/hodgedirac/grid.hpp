#pragma once

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hodgedirac/multivector.hpp"

// Periodic grids of multivectors. Storage is component-major: the 2^n blade
// components are contiguous N^n volumes, so per-blade FFTs run on contiguous
// memory. Axis 0 is the slowest index; point p has coordinates i_a * h in
// [0, L)^n and FFT frequency k_a in {-N/2, ..., N/2-1}.

namespace hodgedirac {

inline constexpr int kMaxGridDim = 4;

struct GridSpec {
  int dim = 2;
  int npoints = 8;
  double box_length = 1.0;

  double spacing() const { return box_length / npoints; }
  long long total() const {
    long long t = 1;
    for (int a = 0; a < dim; ++a) t *= npoints;
    return t;
  }
  double cell_volume() const { return std::pow(spacing(), dim); }
  bool operator==(const GridSpec&) const = default;
};

inline void validate(const GridSpec& s) {
  if (s.dim < 2 || s.dim > kMaxGridDim) throw std::invalid_argument("GridSpec: dim must be in [2,4]");
  if (s.npoints < 2 || (s.npoints & (s.npoints - 1)) != 0)
    throw std::invalid_argument("GridSpec: points per axis must be a power of two >= 2");
  if (!(s.box_length > 0)) throw std::invalid_argument("GridSpec: box length must be positive");
}

inline void unravel(const GridSpec& s, long long p, std::array<int, kMaxGridDim>& idx) {
  for (int a = s.dim - 1; a >= 0; --a) {
    idx[a] = int(p % s.npoints);
    p /= s.npoints;
  }
}

inline long long ravel(const GridSpec& s, const std::array<int, kMaxGridDim>& idx) {
  long long p = 0;
  for (int a = 0; a < s.dim; ++a) p = p * s.npoints + idx[a];
  return p;
}

inline std::array<double, kMaxGridDim> position(const GridSpec& s, long long p) {
  std::array<int, kMaxGridDim> idx{};
  unravel(s, p, idx);
  std::array<double, kMaxGridDim> x{};
  for (int a = 0; a < s.dim; ++a) x[a] = idx[a] * s.spacing();
  return x;
}

// FFT ordering: array index i holds frequency index i (i < N/2) or i - N.
inline int freq_index(int i, int npoints) { return i < npoints / 2 ? i : i - npoints; }

// FFTW-compatible aligned allocator so plans and field buffers share
// alignment.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) {}
  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { fftw_free(p); }
  template <class U>
  bool operator==(const FftwAllocator<U>&) const {
    return true;
  }
};

using RealBuffer = std::vector<double, FftwAllocator<double>>;
using ComplexBuffer = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

enum class Domain { physical, spectral };

class MultivectorGridField {
 public:
  MultivectorGridField() = default;

  static MultivectorGridField physical(const GridSpec& spec) {
    return MultivectorGridField(spec, Domain::physical);
  }
  static MultivectorGridField spectral(const GridSpec& spec) {
    return MultivectorGridField(spec, Domain::spectral);
  }

  const GridSpec& spec() const { return spec_; }
  Domain domain() const { return dom_; }
  int dim() const { return spec_.dim; }
  int ncoeff() const { return ncoeff_; }
  long long total() const { return spec_.total(); }

  double* component(int b) { return re_.data() + std::size_t(b) * total(); }
  const double* component(int b) const { return re_.data() + std::size_t(b) * total(); }
  std::complex<double>* component_cx(int b) { return cx_.data() + std::size_t(b) * total(); }
  const std::complex<double>* component_cx(int b) const { return cx_.data() + std::size_t(b) * total(); }

  RealBuffer& raw() { return re_; }
  const RealBuffer& raw() const { return re_; }
  ComplexBuffer& raw_cx() { return cx_; }
  const ComplexBuffer& raw_cx() const { return cx_; }

  Multivector at(long long p) const {
    require_domain(Domain::physical);
    Multivector w(spec_.dim);
    for (int b = 0; b < ncoeff_; ++b) w[unsigned(b)] = component(b)[p];
    return w;
  }
  void set(long long p, const Multivector& w) {
    require_domain(Domain::physical);
    for (int b = 0; b < ncoeff_; ++b) component(b)[p] = w[unsigned(b)];
  }
  ComplexMultivector at_cx(long long p) const {
    require_domain(Domain::spectral);
    ComplexMultivector w(spec_.dim);
    for (int b = 0; b < ncoeff_; ++b) w[unsigned(b)] = component_cx(b)[p];
    return w;
  }
  void set_cx(long long p, const ComplexMultivector& w) {
    require_domain(Domain::spectral);
    for (int b = 0; b < ncoeff_; ++b) component_cx(b)[p] = w[unsigned(b)];
  }

  void require_domain(Domain d) const {
    if (dom_ != d) throw std::invalid_argument("grid field: wrong domain for this operation");
  }
  void check_compatible(const MultivectorGridField& o) const {
    if (!(spec_ == o.spec_) || dom_ != o.dom_)
      throw std::invalid_argument("grid field: spec or domain mismatch");
  }

  MultivectorGridField& operator+=(const MultivectorGridField& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < re_.size(); ++i) re_[i] += o.re_[i];
    for (std::size_t i = 0; i < cx_.size(); ++i) cx_[i] += o.cx_[i];
    return *this;
  }
  MultivectorGridField& operator-=(const MultivectorGridField& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < re_.size(); ++i) re_[i] -= o.re_[i];
    for (std::size_t i = 0; i < cx_.size(); ++i) cx_[i] -= o.cx_[i];
    return *this;
  }
  MultivectorGridField& operator*=(double s) {
    for (auto& v : re_) v *= s;
    for (auto& v : cx_) v *= s;
    return *this;
  }
  friend MultivectorGridField operator+(MultivectorGridField a, const MultivectorGridField& b) {
    return a += b;
  }
  friend MultivectorGridField operator-(MultivectorGridField a, const MultivectorGridField& b) {
    return a -= b;
  }
  friend MultivectorGridField operator*(double s, MultivectorGridField a) { return a *= s; }

 private:
  MultivectorGridField(const GridSpec& spec, Domain dom)
      : spec_(spec), dom_(dom), ncoeff_(1 << spec.dim) {
    validate(spec);
    std::size_t n = std::size_t(ncoeff_) * std::size_t(total());
    if (dom == Domain::physical)
      re_.assign(n, 0.0);
    else
      cx_.assign(n, std::complex<double>(0.0, 0.0));
  }

  GridSpec spec_{};
  Domain dom_ = Domain::physical;
  int ncoeff_ = 0;
  RealBuffer re_;
  ComplexBuffer cx_;
};

using PointFunction = std::function<Multivector(const std::array<double, kMaxGridDim>&)>;

inline MultivectorGridField sample(const GridSpec& spec, const PointFunction& f) {
  MultivectorGridField F = MultivectorGridField::physical(spec);
  const long long total = spec.total();
  for (long long p = 0; p < total; ++p) {
    Multivector w = f(position(spec, p));
    if (w.dim() != spec.dim) throw std::invalid_argument("sample: closure dimension mismatch");
    F.set(p, w);
  }
  return F;
}

// Removes the zero Fourier mode (physical: per-component mean). Idempotent.
inline MultivectorGridField mean_project(const MultivectorGridField& F) {
  MultivectorGridField out = F;
  const long long total = F.total();
  if (F.domain() == Domain::physical) {
    for (int b = 0; b < F.ncoeff(); ++b) {
      double m = 0;
      const double* src = F.component(b);
      for (long long p = 0; p < total; ++p) m += src[p];
      m /= double(total);
      double* dst = out.component(b);
      for (long long p = 0; p < total; ++p) dst[p] -= m;
    }
  } else {
    for (int b = 0; b < F.ncoeff(); ++b) out.component_cx(b)[0] = 0.0;
  }
  return out;
}

inline Multivector field_mean(const MultivectorGridField& F) {
  F.require_domain(Domain::physical);
  Multivector m(F.dim());
  const long long total = F.total();
  for (int b = 0; b < F.ncoeff(); ++b) {
    double acc = 0;
    const double* src = F.component(b);
    for (long long p = 0; p < total; ++p) acc += src[p];
    m[unsigned(b)] = acc / double(total);
  }
  return m;
}

inline void add_constant(MultivectorGridField& F, const Multivector& c) {
  F.require_domain(Domain::physical);
  const long long total = F.total();
  for (int b = 0; b < F.ncoeff(); ++b) {
    double v = c[unsigned(b)];
    if (v == 0.0) continue;
    double* dst = F.component(b);
    for (long long p = 0; p < total; ++p) dst[p] += v;
  }
}

// (h^n sum |F(x)|^p)^{1/p}; p = infinity gives the pointwise max norm.
inline double lp_norm(const MultivectorGridField& F, double p) {
  F.require_domain(Domain::physical);
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  const long long total = F.total();
  const bool inf = std::isinf(p);
  double acc = 0;
  for (long long q = 0; q < total; ++q) {
    double n2 = 0;
    for (int b = 0; b < F.ncoeff(); ++b) {
      double v = F.component(b)[q];
      n2 += v * v;
    }
    double n = std::sqrt(n2);
    if (inf)
      acc = std::max(acc, n);
    else
      acc += std::pow(n, p);
  }
  if (inf) return acc;
  return std::pow(F.spec().cell_volume() * acc, 1.0 / p);
}

inline double l2_norm(const MultivectorGridField& F) { return lp_norm(F, 2.0); }

// h^n sum <F(x), G(x)>
inline double l2_inner(const MultivectorGridField& F, const MultivectorGridField& G) {
  F.check_compatible(G);
  F.require_domain(Domain::physical);
  double acc = 0;
  const long long total = F.total();
  for (int b = 0; b < F.ncoeff(); ++b) {
    const double* f = F.component(b);
    const double* g = G.component(b);
    for (long long p = 0; p < total; ++p) acc += f[p] * g[p];
  }
  return acc * F.spec().cell_volume();
}

// Pointwise unary maps (physical domain).
inline MultivectorGridField field_map(const MultivectorGridField& F,
                                      const std::function<Multivector(const Multivector&)>& op) {
  F.require_domain(Domain::physical);
  MultivectorGridField out = MultivectorGridField::physical(F.spec());
  for (long long p = 0; p < F.total(); ++p) out.set(p, op(F.at(p)));
  return out;
}

inline MultivectorGridField field_involution(const MultivectorGridField& F) {
  MultivectorGridField out = F;
  for (int b = 0; b < F.ncoeff(); ++b) {
    if (!(std::popcount(unsigned(b)) & 1)) continue;
    double* dst = out.component(b);
    for (long long p = 0; p < F.total(); ++p) dst[p] = -dst[p];
  }
  return out;
}

inline MultivectorGridField field_star_right(const MultivectorGridField& F) {
  F.require_domain(Domain::physical);
  MultivectorGridField out = MultivectorGridField::physical(F.spec());
  const unsigned full = volume_blade(F.dim());
  const BladeTable& tab = blade_table(F.dim());
  for (int b = 0; b < F.ncoeff(); ++b) {
    double s = double(tab.sign(unsigned(b), full ^ unsigned(b)));
    const double* src = F.component(b);
    double* dst = out.component(int(full ^ unsigned(b)));
    for (long long p = 0; p < F.total(); ++p) dst[p] = s * src[p];
  }
  return out;
}

inline MultivectorGridField field_star_left(const MultivectorGridField& F) {
  F.require_domain(Domain::physical);
  MultivectorGridField out = MultivectorGridField::physical(F.spec());
  const unsigned full = volume_blade(F.dim());
  const BladeTable& tab = blade_table(F.dim());
  for (int b = 0; b < F.ncoeff(); ++b) {
    double s = double(tab.sign(full ^ unsigned(b), unsigned(b)));
    const double* src = F.component(b);
    double* dst = out.component(int(full ^ unsigned(b)));
    for (long long p = 0; p < F.total(); ++p) dst[p] = s * src[p];
  }
  return out;
}

inline MultivectorGridField grade_project(const MultivectorGridField& F, int k) {
  MultivectorGridField out = F;
  for (int b = 0; b < F.ncoeff(); ++b) {
    if (std::popcount(unsigned(b)) == k) continue;
    if (F.domain() == Domain::physical) {
      double* dst = out.component(b);
      for (long long p = 0; p < F.total(); ++p) dst[p] = 0.0;
    } else {
      std::complex<double>* dst = out.component_cx(b);
      for (long long p = 0; p < F.total(); ++p) dst[p] = 0.0;
    }
  }
  return out;
}

// Pointwise Clifford product of a grade-1 field against a general field.
inline MultivectorGridField field_cliff(const MultivectorGridField& V,
                                        const MultivectorGridField& F, Signature sig) {
  V.check_compatible(F);
  V.require_domain(Domain::physical);
  const int n = F.dim();
  MultivectorGridField out = MultivectorGridField::physical(F.spec());
  const bool neg = sig == Signature::negative;
  for (int j = 0; j < n; ++j) {
    const double* vj = V.component(1 << j);
    for (int b = 0; b < F.ncoeff(); ++b) {
      double s = double(single_sign(j, unsigned(b)));
      if (neg && ((unsigned(b) >> j) & 1u)) s = -s;
      const double* src = F.component(b);
      double* dst = out.component(int(unsigned(b) ^ (1u << j)));
      for (long long p = 0; p < F.total(); ++p) dst[p] += s * vj[p] * src[p];
    }
  }
  return out;
}

// Pointwise scalar multiply by the grade-0 component of eta.
inline MultivectorGridField cutoff_apply(const MultivectorGridField& eta,
                                         const MultivectorGridField& F) {
  eta.check_compatible(F);
  eta.require_domain(Domain::physical);
  MultivectorGridField out = F;
  const double* e = eta.component(0);
  for (int b = 0; b < F.ncoeff(); ++b) {
    double* dst = out.component(b);
    for (long long p = 0; p < F.total(); ++p) dst[p] *= e[p];
  }
  return out;
}

}  // namespace hodgedirac
