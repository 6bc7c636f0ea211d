#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hodgedirac/multivector.hpp"

// Linear maps on V = R^n and their grade-preserving extensions to the
// exterior algebra, plus the Cayley-transform calculus the solvers rely on.

namespace hodgedirac {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Bitmasks of the grade-k basis blades, in increasing numeric order. This
// fixes the row/column convention of every grade block below.
inline std::vector<unsigned> grade_blades(int dim, int k) {
  std::vector<unsigned> out;
  for (unsigned b = 0; b < (1u << dim); ++b)
    if (std::popcount(b) == k) out.push_back(b);
  return out;
}

inline int blade_index_within_grade(int dim, unsigned blade) {
  int k = std::popcount(blade);
  int idx = 0;
  for (unsigned b = 0; b < blade; ++b)
    if (std::popcount(b) == k) ++idx;
  (void)dim;
  return idx;
}

// Grade-preserving linear map on ΛR^n stored as one dense block per grade.
class ExteriorMap {
 public:
  explicit ExteriorMap(int dim) : dim_(dim), blocks_(dim + 1) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("ExteriorMap: dim out of range");
    for (int k = 0; k <= dim; ++k) {
      auto blades = grade_blades(dim, k);
      blocks_[k] = Mat::Zero(long(blades.size()), long(blades.size()));
    }
  }

  static ExteriorMap identity(int dim) {
    ExteriorMap m(dim);
    for (int k = 0; k <= dim; ++k)
      m.blocks_[k] = Mat::Identity(m.blocks_[k].rows(), m.blocks_[k].cols());
    return m;
  }

  int dim() const { return dim_; }
  Mat& block(int k) { return blocks_[k]; }
  const Mat& block(int k) const { return blocks_[k]; }

  Multivector apply(const Multivector& w) const {
    if (w.dim() != dim_) throw std::invalid_argument("ExteriorMap::apply: dimension mismatch");
    Multivector out(dim_);
    for (int k = 0; k <= dim_; ++k) {
      auto blades = grade_blades(dim_, k);
      Vec in(long(blades.size()));
      for (std::size_t i = 0; i < blades.size(); ++i) in[long(i)] = w[blades[i]];
      Vec res = blocks_[k] * in;
      for (std::size_t i = 0; i < blades.size(); ++i) out[blades[i]] = res[long(i)];
    }
    return out;
  }

  // this ∘ other
  ExteriorMap compose(const ExteriorMap& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("ExteriorMap::compose: dimension mismatch");
    ExteriorMap out(dim_);
    for (int k = 0; k <= dim_; ++k) out.blocks_[k] = blocks_[k] * other.blocks_[k];
    return out;
  }

  double block_distance(const ExteriorMap& other, int k_lo, int k_hi) const {
    double d = 0;
    for (int k = k_lo; k <= k_hi; ++k)
      d = std::max(d, (blocks_[k] - other.blocks_[k]).norm());
    return d;
  }

 private:
  int dim_;
  std::vector<Mat> blocks_;
};

// Exterior extension: the unique algebra homomorphism with T̂(1)=1 and
// T̂|_V = T. Grade-k block entries are k x k minors of T.
inline ExteriorMap exterior_extend(const Mat& T) {
  const int n = int(T.rows());
  if (T.cols() != n) throw std::invalid_argument("exterior_extend: square matrix required");
  ExteriorMap out(n);
  for (int k = 0; k <= n; ++k) {
    auto blades = grade_blades(n, k);
    Mat& blk = out.block(k);
    for (std::size_t c = 0; c < blades.size(); ++c) {
      std::vector<int> cols;
      for (int j = 0; j < n; ++j)
        if (blades[c] & (1u << j)) cols.push_back(j);
      for (std::size_t r = 0; r < blades.size(); ++r) {
        std::vector<int> rows;
        for (int j = 0; j < n; ++j)
          if (blades[r] & (1u << j)) rows.push_back(j);
        if (k == 0) {
          blk(0, 0) = 1.0;
          continue;
        }
        Mat minor(k, k);
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) minor(a, b) = T(rows[a], cols[b]);
        blk(long(r), long(c)) = minor.determinant();
      }
    }
  }
  return out;
}

// Grassmann dual: L^c(w) = L(★w)★. Built column-by-column on basis blades.
inline ExteriorMap grassmann_dual(const ExteriorMap& L) {
  const int n = L.dim();
  ExteriorMap out(n);
  for (int k = 0; k <= n; ++k) {
    auto blades = grade_blades(n, k);
    Mat& blk = out.block(k);
    for (std::size_t c = 0; c < blades.size(); ++c) {
      Multivector col = hodge_right(L.apply(hodge_left(Multivector::basis(n, blades[c]))));
      for (std::size_t r = 0; r < blades.size(); ++r) blk(long(r), long(c)) = col[blades[r]];
    }
  }
  return out;
}

inline double operator_norm(const Mat& T) {
  if (T.rows() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(T);
  return svd.singularValues()[0];
}

// Largest singular value over the grade blocks k >= min_grade. The grade-0
// block of any exterior extension is the identity, so norm statements about
// extensions of contractions only make sense from grade 1 up.
inline double ext_operator_norm(const ExteriorMap& L, int min_grade) {
  if (min_grade < 0 || min_grade > L.dim())
    throw std::invalid_argument("ext_operator_norm: min_grade out of range");
  double m = 0;
  for (int k = min_grade; k <= L.dim(); ++k) m = std::max(m, operator_norm(L.block(k)));
  return m;
}

// Self-duality of a vector map, tested on the middle grades 1..n-1 of its
// exterior extension (grades 0 and n swap the constants 1 and det T, so the
// literal all-grades comparison rejects every conformal map with det != 1).
inline bool is_self_dual(const Mat& T, double tol) {
  ExteriorMap ext = exterior_extend(T);
  ExteriorMap dual = grassmann_dual(ext);
  return ext.block_distance(dual, 1, int(T.rows()) - 1) <= tol;
}

inline Mat cayley(const Mat& T) {
  const int n = int(T.rows());
  Mat ipt = Mat::Identity(n, n) + T;
  Eigen::FullPivLU<Mat> lu(ipt);
  if (!lu.isInvertible()) throw std::invalid_argument("cayley: I + T is singular");
  return (Mat::Identity(n, n) - T) * lu.inverse();
}

// Positivity of the quadratic form <Tv,v>, exact via the symmetric part.
inline bool is_positive(const Mat& T) {
  Mat sym = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  return es.eigenvalues().minCoeff() > 0;
}

struct EllipticityConstants {
  double M;  // ||cayley(A)|| < 1
  double K;  // 2(1+M^2)/(1-M^2) >= 2
};

inline EllipticityConstants ellipticity_constants(const Mat& A) {
  if (!is_positive(A))
    throw std::invalid_argument("ellipticity_constants: A is not positive");
  double M = operator_norm(cayley(A));
  return {M, 2.0 * (1.0 + M * M) / (1.0 - M * M)};
}

// Nonlinear structure field A(x, xi) with ellipticity constant K:
// |dxi|^2 + |dA|^2 <= K <A(x,xi)-A(x,zeta), xi-zeta>.
struct StructureField {
  int dim;
  double K;
  std::function<Vec(const Vec& x, const Vec& xi)> eval;
};

// Nonlinear Cayley transform: solves xi + A(x,xi) = zeta by the damped
// fixed point xi <- xi - theta (xi + A(x,xi) - zeta) with theta = 2/(K+2)
// (contraction factor sqrt((K-2)/(K+2))), and returns M(x,zeta) = 2 xi - zeta.
inline Vec nonlinear_cayley(const StructureField& A, const Vec& x, const Vec& zeta,
                            double tol = 1e-12, int max_iter = 10000) {
  if (A.K < 2.0) throw std::invalid_argument("nonlinear_cayley: K must be >= 2");
  const double theta = 2.0 / (A.K + 2.0);
  Vec xi = Vec::Zero(zeta.size());
  double scale = 1.0 + zeta.norm();
  for (int it = 0; it < max_iter; ++it) {
    Vec update = theta * (xi + A.eval(x, xi) - zeta);
    xi -= update;
    if (update.norm() <= tol * scale) return 2.0 * xi - zeta;
  }
  throw std::runtime_error("nonlinear_cayley: no convergence (structure assumptions violated?)");
}

}  // namespace hodgedirac
