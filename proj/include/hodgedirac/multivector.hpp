#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

// Dense exterior/Clifford algebra over R^n, n <= 8. Blades are indexed by
// bitmasks: bit j set means e_{j+1} is a factor, factors stored in increasing
// index order. All products reduce to a reordering sign plus (for the
// Clifford products) a metric factor on contracted generators.

namespace hodgedirac {

inline constexpr int kMaxDim = 8;

enum class Signature { positive, negative };

// Number of transpositions needed to merge the sorted factor lists of two
// blades, i.e. #{(i,j) : i in a, j in b, i > j}. Parity gives the sign of
// e_a e_b relative to the canonical blade on a^b / a|b.
inline int reorder_swaps(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned t = a >> 1; t != 0; t >>= 1) swaps += std::popcount(t & b);
  return swaps;
}

inline int reorder_sign(unsigned a, unsigned b) {
  return (reorder_swaps(a, b) & 1) ? -1 : 1;
}

// Sign of e_j wedge/contract against blade b: parity of the factors of b
// below j.
inline int single_sign(int j, unsigned b) {
  return (std::popcount(b & ((1u << j) - 1u)) & 1) ? -1 : 1;
}

// Cached sign table for one dimension: table[a * size + b] = reorder sign.
class BladeTable {
 public:
  explicit BladeTable(int dim) : dim_(dim), size_(1u << dim) {
    sign_.resize(std::size_t(size_) * size_);
    for (unsigned a = 0; a < size_; ++a)
      for (unsigned b = 0; b < size_; ++b)
        sign_[std::size_t(a) * size_ + b] = int8_t(reorder_sign(a, b));
  }
  int dim() const { return dim_; }
  unsigned size() const { return size_; }
  int sign(unsigned a, unsigned b) const {
    return sign_[std::size_t(a) * size_ + b];
  }

 private:
  int dim_;
  unsigned size_;
  std::vector<int8_t> sign_;
};

inline const BladeTable& blade_table(int dim) {
  static std::array<std::unique_ptr<BladeTable>, kMaxDim + 1> tables;
  static std::mutex mu;
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("blade_table: dim out of range");
  std::lock_guard<std::mutex> lock(mu);
  if (!tables[dim]) tables[dim] = std::make_unique<BladeTable>(dim);
  return *tables[dim];
}

namespace detail {
template <class S>
inline double abs2(S v) {
  return double(v) * double(v);
}
template <class T>
inline double abs2(std::complex<T> v) {
  return std::norm(v);
}
}  // namespace detail

template <class Scalar>
class BasicMultivector {
 public:
  BasicMultivector() : dim_(2), coeff_(4, Scalar{}) {}
  explicit BasicMultivector(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Multivector: dim out of range");
    coeff_.assign(std::size_t(1) << dim, Scalar{});
  }

  int dim() const { return dim_; }
  unsigned size() const { return unsigned(coeff_.size()); }
  Scalar& operator[](unsigned blade) { return coeff_[blade]; }
  const Scalar& operator[](unsigned blade) const { return coeff_[blade]; }
  const std::vector<Scalar>& coeffs() const { return coeff_; }
  std::vector<Scalar>& coeffs() { return coeff_; }

  Scalar scalar_part() const { return coeff_[0]; }

  static BasicMultivector basis(int dim, unsigned blade) {
    BasicMultivector w(dim);
    if (blade >= w.size()) throw std::invalid_argument("basis: blade out of range");
    w[blade] = Scalar(1);
    return w;
  }
  static BasicMultivector scalar(int dim, Scalar s) {
    BasicMultivector w(dim);
    w[0] = s;
    return w;
  }
  static BasicMultivector vector(int dim, const std::vector<Scalar>& v) {
    if (int(v.size()) != dim) throw std::invalid_argument("vector: wrong length");
    BasicMultivector w(dim);
    for (int j = 0; j < dim; ++j) w[1u << j] = v[j];
    return w;
  }

  BasicMultivector& operator+=(const BasicMultivector& o) {
    check_same(o);
    for (unsigned i = 0; i < size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
  }
  BasicMultivector& operator-=(const BasicMultivector& o) {
    check_same(o);
    for (unsigned i = 0; i < size(); ++i) coeff_[i] -= o.coeff_[i];
    return *this;
  }
  BasicMultivector& operator*=(Scalar s) {
    for (auto& c : coeff_) c *= s;
    return *this;
  }
  friend BasicMultivector operator+(BasicMultivector a, const BasicMultivector& b) { return a += b; }
  friend BasicMultivector operator-(BasicMultivector a, const BasicMultivector& b) { return a -= b; }
  friend BasicMultivector operator*(BasicMultivector a, Scalar s) { return a *= s; }
  friend BasicMultivector operator*(Scalar s, BasicMultivector a) { return a *= s; }
  friend BasicMultivector operator-(BasicMultivector a) {
    for (auto& c : a.coeff_) c = -c;
    return a;
  }

  void check_same(const BasicMultivector& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("multivector dimension mismatch");
  }

 private:
  int dim_;
  std::vector<Scalar> coeff_;
};

using Multivector = BasicMultivector<double>;
using ComplexMultivector = BasicMultivector<std::complex<double>>;

inline ComplexMultivector complexify(const Multivector& w) {
  ComplexMultivector z(w.dim());
  for (unsigned i = 0; i < w.size(); ++i) z[i] = w[i];
  return z;
}
inline Multivector real_part(const ComplexMultivector& z) {
  Multivector w(z.dim());
  for (unsigned i = 0; i < z.size(); ++i) w[i] = z[i].real();
  return w;
}

template <class S>
BasicMultivector<S> grade_project(const BasicMultivector<S>& w, int k) {
  BasicMultivector<S> out(w.dim());
  for (unsigned b = 0; b < w.size(); ++b)
    if (std::popcount(b) == k) out[b] = w[b];
  return out;
}

// Main involution: grade k scaled by (-1)^k.
template <class S>
BasicMultivector<S> involution(const BasicMultivector<S>& w) {
  BasicMultivector<S> out(w.dim());
  for (unsigned b = 0; b < w.size(); ++b)
    out[b] = (std::popcount(b) & 1) ? -w[b] : w[b];
  return out;
}

// Anti-involution (reversion): grade k scaled by (-1)^{k(k-1)/2}.
template <class S>
BasicMultivector<S> reversion(const BasicMultivector<S>& w) {
  BasicMultivector<S> out(w.dim());
  for (unsigned b = 0; b < w.size(); ++b) {
    int k = std::popcount(b);
    out[b] = ((k * (k - 1) / 2) & 1) ? -w[b] : w[b];
  }
  return out;
}

template <class S>
BasicMultivector<S> wedge(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  a.check_same(b);
  const BladeTable& tab = blade_table(a.dim());
  BasicMultivector<S> out(a.dim());
  for (unsigned i = 0; i < a.size(); ++i) {
    if (a[i] == S{}) continue;
    for (unsigned j = 0; j < b.size(); ++j) {
      if ((i & j) != 0 || b[j] == S{}) continue;
      out[i | j] += S(double(tab.sign(i, j))) * a[i] * b[j];
    }
  }
  return out;
}

// Left interior product a ⌟ b, adjoint of wedge: <a ⌟ w, u> = <w, a ∧ u>.
template <class S>
BasicMultivector<S> lcontract(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  a.check_same(b);
  const BladeTable& tab = blade_table(a.dim());
  BasicMultivector<S> out(a.dim());
  for (unsigned i = 0; i < a.size(); ++i) {
    if (a[i] == S{}) continue;
    for (unsigned j = 0; j < b.size(); ++j) {
      if ((i & j) != i || b[j] == S{}) continue;  // need i ⊆ j
      out[j ^ i] += S(double(tab.sign(i, j ^ i))) * a[i] * b[j];
    }
  }
  return out;
}

// Right interior product a ⌞ b: <w ⌞ b, u> = <w, u ∧ b>.
template <class S>
BasicMultivector<S> rcontract(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  a.check_same(b);
  const BladeTable& tab = blade_table(a.dim());
  BasicMultivector<S> out(a.dim());
  for (unsigned i = 0; i < a.size(); ++i) {
    if (a[i] == S{}) continue;
    for (unsigned j = 0; j < b.size(); ++j) {
      if ((i & j) != j || b[j] == S{}) continue;  // need j ⊆ i
      out[i ^ j] += S(double(tab.sign(i ^ j, j))) * a[i] * b[j];
    }
  }
  return out;
}

namespace detail {
template <class S>
BasicMultivector<S> cliff(const BasicMultivector<S>& a, const BasicMultivector<S>& b, bool negative) {
  a.check_same(b);
  const BladeTable& tab = blade_table(a.dim());
  BasicMultivector<S> out(a.dim());
  for (unsigned i = 0; i < a.size(); ++i) {
    if (a[i] == S{}) continue;
    for (unsigned j = 0; j < b.size(); ++j) {
      if (b[j] == S{}) continue;
      int s = tab.sign(i, j);
      if (negative && (std::popcount(i & j) & 1)) s = -s;
      out[i ^ j] += S(double(s)) * a[i] * b[j];
    }
  }
  return out;
}
}  // namespace detail

// Clifford products for e_j^2 = +1 resp. e_j^2 = -1. The negative-signature
// product reuses the positive sign rule with a per-contracted-generator flip.
template <class S>
BasicMultivector<S> cliff_pos(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  return detail::cliff(a, b, false);
}
template <class S>
BasicMultivector<S> cliff_neg(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  return detail::cliff(a, b, true);
}

template <class S>
S inner(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  a.check_same(b);
  S acc{};
  for (unsigned i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Inner product induced by the anti-euclidean form: <a,b>_- = <involution(a),b>_+.
template <class S>
S inner_neg(const BasicMultivector<S>& a, const BasicMultivector<S>& b) {
  return inner(involution(a), b);
}

template <class S>
double norm(const BasicMultivector<S>& w) {
  double acc = 0;
  for (unsigned i = 0; i < w.size(); ++i) acc += detail::abs2(w[i]);
  return std::sqrt(acc);
}

inline unsigned volume_blade(int dim) { return (1u << dim) - 1u; }

// Left Hodge star: ★w = e_V ⌞ w.
template <class S>
BasicMultivector<S> hodge_left(const BasicMultivector<S>& w) {
  const unsigned full = volume_blade(w.dim());
  const BladeTable& tab = blade_table(w.dim());
  BasicMultivector<S> out(w.dim());
  for (unsigned b = 0; b < w.size(); ++b)
    out[full ^ b] = S(double(tab.sign(full ^ b, b))) * w[b];
  return out;
}

// Right Hodge star: w★ = w ⌟ e_V.
template <class S>
BasicMultivector<S> hodge_right(const BasicMultivector<S>& w) {
  const unsigned full = volume_blade(w.dim());
  const BladeTable& tab = blade_table(w.dim());
  BasicMultivector<S> out(w.dim());
  for (unsigned b = 0; b < w.size(); ++b)
    out[full ^ b] = S(double(tab.sign(b, full ^ b))) * w[b];
  return out;
}

template <class S>
bool is_homogeneous(const BasicMultivector<S>& w, int k, double tol = 0.0) {
  double off = 0;
  for (unsigned b = 0; b < w.size(); ++b)
    if (std::popcount(b) != k) off += detail::abs2(w[b]);
  return std::sqrt(off) <= tol * (1.0 + norm(w));
}

// Clifford inverse of a nonzero vector: v/|v|^2 (positive signature),
// -v/|v|^2 (negative signature).
inline Multivector vector_inverse(const Multivector& v, Signature sig) {
  if (!is_homogeneous(v, 1, 1e-14))
    throw std::invalid_argument("vector_inverse: input is not a vector");
  double n2 = 0;
  for (int j = 0; j < v.dim(); ++j) n2 += v[1u << j] * v[1u << j];
  if (n2 <= 0) throw std::invalid_argument("vector_inverse: zero vector");
  Multivector out = grade_project(v, 1);
  out *= (sig == Signature::positive ? 1.0 : -1.0) / n2;
  return out;
}

// Grade multiplier operator: scales grade k by (n - 2k). Equals the sum
// Σ_j e_j ∆ involution(w) ∆ e_j, which tests use as an independent route.
template <class S>
BasicMultivector<S> b_op(const BasicMultivector<S>& w) {
  BasicMultivector<S> out(w.dim());
  const int n = w.dim();
  for (unsigned b = 0; b < w.size(); ++b)
    out[b] = S(double(n - 2 * std::popcount(b))) * w[b];
  return out;
}

template <class S>
BasicMultivector<S> euler_op(const BasicMultivector<S>& w) {
  BasicMultivector<S> out = b_op(w);
  const double n = w.dim();
  for (unsigned b = 0; b < w.size(); ++b) out[b] = (out[b] - n * w[b]) * S(0.5);
  return out;
}

// Inverse of a versor (Clifford product of invertible vectors):
// reversion(q)/(q ∆ reversion(q))_0. Throws when q ∆ reversion(q) is not a
// nonzero scalar.
inline Multivector versor_inverse(const Multivector& q) {
  Multivector qr = reversion(q);
  Multivector s = cliff_pos(q, qr);
  double s0 = s[0];
  s[0] = 0;
  if (std::abs(s0) <= 1e-12 * (1.0 + norm(q)) || norm(s) > 1e-10 * std::abs(s0))
    throw std::invalid_argument("versor_inverse: not an invertible versor");
  qr *= 1.0 / s0;
  return qr;
}

// q ∆ involution(w) ∆ q^{-1}; for a unit vector q this is the exterior
// extension of the reflection across the hyperplane orthogonal to q.
inline Multivector rotor_conjugate(const Multivector& q, const Multivector& w) {
  q.check_same(w);
  Multivector qinv = versor_inverse(q);
  return cliff_pos(cliff_pos(q, involution(w)), qinv);
}

template <class S>
double max_abs(const BasicMultivector<S>& w) {
  double m = 0;
  for (unsigned i = 0; i < w.size(); ++i) m = std::max(m, std::sqrt(detail::abs2(w[i])));
  return m;
}

inline std::string to_string(const Multivector& w) {
  std::string s;
  for (unsigned b = 0; b < w.size(); ++b) {
    if (w[b] == 0) continue;
    if (!s.empty()) s += " + ";
    s += std::to_string(w[b]);
    if (b != 0) {
      s += "*e";
      for (int j = 0; j < w.dim(); ++j)
        if (b & (1u << j)) s += std::to_string(j + 1);
    }
  }
  return s.empty() ? "0" : s;
}

}  // namespace hodgedirac
