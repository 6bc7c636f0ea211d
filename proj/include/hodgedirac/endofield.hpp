#pragma once

#include <cstring>

#include "hodgedirac/grid.hpp"
#include "hodgedirac/linmaps.hpp"

// Per-point coefficient fields M(x) in L(R^n), applied to multivector fields
// either on grade 1 only, through the exterior extension (grade blocks built
// lazily from minors, memory stays n^2 per point), or as mu(x) I on the whole
// algebra.

namespace hodgedirac {

enum class EndoMode { vector_only, exterior, isotropic };

namespace detail {

// Determinant of the k x k minor of a row-major n x n matrix, rows/cols
// picked by bitmask. k <= 4.
inline double minor_det(const double* m, int n, unsigned rows, unsigned cols) {
  int r[4], c[4];
  int k = 0;
  for (int j = 0; j < n; ++j)
    if (rows & (1u << j)) r[k++] = j;
  int kc = 0;
  for (int j = 0; j < n; ++j)
    if (cols & (1u << j)) c[kc++] = j;
  auto e = [&](int a, int b) { return m[r[a] * n + c[b]]; };
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return e(0, 0);
    case 2:
      return e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
    case 3:
      return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
             e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
             e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    case 4: {
      double det = 0, sign = 1;
      for (int a = 0; a < 4; ++a) {
        double sub[9];
        int t = 0;
        for (int i = 1; i < 4; ++i)
          for (int b = 0; b < 4; ++b)
            if (b != a) sub[t++] = e(i, b);
        double d3 = sub[0] * (sub[4] * sub[8] - sub[5] * sub[7]) -
                    sub[1] * (sub[3] * sub[8] - sub[5] * sub[6]) +
                    sub[2] * (sub[3] * sub[7] - sub[4] * sub[6]);
        det += sign * e(0, a) * d3;
        sign = -sign;
      }
      return det;
    }
    default:
      throw std::invalid_argument("minor_det: order above 4");
  }
}

inline const std::vector<std::vector<unsigned>>& grade_blade_lists(int dim) {
  static std::array<std::vector<std::vector<unsigned>>, kMaxDim + 1> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (cache[dim].empty()) {
    cache[dim].resize(dim + 1);
    for (int k = 0; k <= dim; ++k) cache[dim][k] = grade_blades(dim, k);
  }
  return cache[dim];
}

}  // namespace detail

using MatrixFunction = std::function<Mat(const std::array<double, kMaxGridDim>&)>;
using ScalarFunction = std::function<double(const std::array<double, kMaxGridDim>&)>;

class EndoGridField {
 public:
  static EndoGridField from_matrix_field(const GridSpec& spec, const MatrixFunction& f,
                                         EndoMode mode) {
    if (mode == EndoMode::isotropic)
      throw std::invalid_argument("EndoGridField: isotropic mode needs a scalar function");
    EndoGridField out(spec, mode);
    const int n = spec.dim;
    out.data_.resize(std::size_t(spec.total()) * n * n);
    for (long long p = 0; p < spec.total(); ++p) {
      Mat m = f(position(spec, p));
      if (m.rows() != n || m.cols() != n)
        throw std::invalid_argument("EndoGridField: matrix size mismatch");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.data_[std::size_t(p) * n * n + i * n + j] = m(i, j);
    }
    out.compute_sup_norm();
    return out;
  }

  static EndoGridField from_matrices(const GridSpec& spec, std::vector<double> mats, EndoMode mode) {
    EndoGridField out(spec, mode);
    if (static_cast<long long>(mats.size()) != spec.total() * spec.dim * spec.dim)
      throw std::invalid_argument("EndoGridField: matrix array size mismatch");
    out.data_ = std::move(mats);
    out.compute_sup_norm();
    return out;
  }

  static EndoGridField isotropic(const GridSpec& spec, const ScalarFunction& f) {
    EndoGridField out(spec, EndoMode::isotropic);
    out.data_.resize(std::size_t(spec.total()));
    double m = 0;
    for (long long p = 0; p < spec.total(); ++p) {
      out.data_[std::size_t(p)] = f(position(spec, p));
      m = std::max(m, std::abs(out.data_[std::size_t(p)]));
    }
    out.sup_norm_ = m;
    return out;
  }

  const GridSpec& spec() const { return spec_; }
  EndoMode mode() const { return mode_; }
  double sup_norm() const { return sup_norm_; }

  const double* matrix_at(long long p) const {
    return data_.data() + std::size_t(p) * spec_.dim * spec_.dim;
  }
  Mat matrix(long long p) const {
    const int n = spec_.dim;
    Mat m(n, n);
    const double* src = matrix_at(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = src[i * n + j];
    return m;
  }
  double iso_at(long long p) const { return data_[std::size_t(p)]; }

  // Allocation-free core: out = M(x_p) in, both 2^n raw coefficient arrays.
  void apply_raw(long long p, const double* in, double* out) const {
    const int n = spec_.dim;
    const unsigned nc = 1u << n;
    if (mode_ == EndoMode::isotropic) {
      const double mu = iso_at(p);
      for (unsigned b = 0; b < nc; ++b) out[b] = mu * in[b];
      return;
    }
    const double* m = matrix_at(p);
    if (mode_ == EndoMode::vector_only) {
      for (unsigned b = 0; b < nc; ++b) out[b] = 0.0;
      for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int j = 0; j < n; ++j) acc += m[i * n + j] * in[1u << j];
        out[1u << i] = acc;
      }
      return;
    }
    const auto& lists = detail::grade_blade_lists(n);
    out[0] = in[0];
    for (int k = 1; k <= n; ++k) {
      const auto& blades = lists[k];
      for (unsigned rb : blades) {
        double acc = 0;
        for (unsigned cb : blades) acc += detail::minor_det(m, n, rb, cb) * in[cb];
        out[rb] = acc;
      }
    }
  }

  Multivector apply_point(long long p, const Multivector& w) const {
    Multivector out(spec_.dim);
    apply_raw(p, w.coeffs().data(), out.coeffs().data());
    return out;
  }

  // X(x) += sign * (w + M(x) w) for a constant multivector w.
  void add_constant_image(MultivectorGridField& X, const Multivector& w, double sign) const {
    X.require_domain(Domain::physical);
    const unsigned nc = 1u << spec_.dim;
    double mw[1 << kMaxDim];
    const long long total = spec_.total();
    for (long long p = 0; p < total; ++p) {
      apply_raw(p, w.coeffs().data(), mw);
      for (unsigned b = 0; b < nc; ++b)
        X.component(int(b))[p] += sign * (w[b] + mw[b]);
    }
  }

  // Pointwise application to a physical field.
  MultivectorGridField apply(const MultivectorGridField& F) const {
    F.require_domain(Domain::physical);
    if (!(F.spec() == spec_)) throw std::invalid_argument("EndoGridField::apply: spec mismatch");
    const int n = spec_.dim;
    const long long total = spec_.total();
    MultivectorGridField out = MultivectorGridField::physical(spec_);
    if (mode_ == EndoMode::isotropic) {
      for (int b = 0; b < F.ncoeff(); ++b) {
        const double* src = F.component(b);
        double* dst = out.component(b);
        for (long long p = 0; p < total; ++p) dst[p] = data_[std::size_t(p)] * src[p];
      }
      return out;
    }
    if (mode_ == EndoMode::vector_only) {
      for (int i = 0; i < n; ++i) {
        double* dst = out.component(1 << i);
        for (int j = 0; j < n; ++j) {
          const double* src = F.component(1 << j);
          const double* m = data_.data();
          for (long long p = 0; p < total; ++p) dst[p] += m[std::size_t(p) * n * n + i * n + j] * src[p];
        }
      }
      return out;
    }
    double in[1 << kMaxGridDim], res[1 << kMaxGridDim];
    for (long long p = 0; p < total; ++p) {
      for (int b = 0; b < F.ncoeff(); ++b) in[b] = F.component(b)[p];
      apply_raw(p, in, res);
      for (int b = 0; b < F.ncoeff(); ++b) out.component(b)[p] = res[b];
    }
    return out;
  }

  // Pointwise Cayley transform (I-A)(I+A)^{-1}, exterior mode. Throws when
  // the quadratic form of A(x) fails to be positive at some point.
  EndoGridField cayley_field() const {
    if (mode_ == EndoMode::isotropic) {
      EndoGridField out(spec_, EndoMode::isotropic);
      out.data_.resize(data_.size());
      double m = 0;
      for (std::size_t p = 0; p < data_.size(); ++p) {
        double a = data_[p];
        if (a <= 0) throw std::invalid_argument("cayley_field: coefficient not positive at point " +
                                                std::to_string(p));
        out.data_[p] = (1.0 - a) / (1.0 + a);
        m = std::max(m, std::abs(out.data_[p]));
      }
      out.sup_norm_ = m;
      return out;
    }
    const int n = spec_.dim;
    std::vector<double> mats(data_.size());
    for (long long p = 0; p < spec_.total(); ++p) {
      Mat A = matrix(p);
      if (!is_positive(A))
        throw std::invalid_argument("cayley_field: coefficient not positive at point " +
                                    std::to_string(p));
      Mat C = cayley(A);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mats[std::size_t(p) * n * n + i * n + j] = C(i, j);
    }
    return from_matrices(spec_, std::move(mats), EndoMode::exterior);
  }

 private:
  EndoGridField(const GridSpec& spec, EndoMode mode) : spec_(spec), mode_(mode) { validate(spec); }

  void compute_sup_norm() {
    const int n = spec_.dim;
    double m = 0;
    Mat A(n, n);
    for (long long p = 0; p < spec_.total(); ++p) {
      const double* src = matrix_at(p);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = src[i * n + j];
      Eigen::SelfAdjointEigenSolver<Mat> es(A.transpose() * A);
      m = std::max(m, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
    }
    sup_norm_ = m;
  }

  GridSpec spec_;
  EndoMode mode_;
  std::vector<double> data_;
  double sup_norm_ = 0;
};

}  // namespace hodgedirac
