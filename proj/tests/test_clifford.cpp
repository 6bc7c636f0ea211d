#include <catch2/catch_amalgamated.hpp>

#include "hodgedirac/multivector.hpp"
#include "hodgedirac/rng.hpp"

using namespace hodgedirac;

namespace {
Multivector e(int dim, std::initializer_list<int> idx) {
  unsigned b = 0;
  for (int i : idx) b |= 1u << (i - 1);
  return Multivector::basis(dim, b);
}
double dist(const Multivector& a, const Multivector& b) { return norm(a - b); }
}  // namespace

TEST_CASE("wedge on basis blades", "[clifford]") {
  CHECK(dist(wedge(e(2, {1}), e(2, {2})), e(2, {1, 2})) == 0.0);
  CHECK(norm(wedge(e(2, {1}), e(2, {1}))) == 0.0);
  // (e1+e2) ∧ e2 = e12, expanded by hand
  Multivector v = e(2, {1}) + e(2, {2});
  CHECK(dist(wedge(v, e(2, {2})), e(2, {1, 2})) < 1e-15);
  CHECK_THROWS_AS(wedge(Multivector(2), Multivector(3)), std::invalid_argument);
}

TEST_CASE("wedge is associative and graded-anticommutative", "[clifford]") {
  Rng rng(101);
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 50; ++t) {
      Multivector a = rng.multivector(n), b = rng.multivector(n), c = rng.multivector(n);
      CHECK(dist(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-12);
      // v ∧ w = involution(w) ∧ v for vectors v
      Multivector v = rng.vector(n);
      CHECK(dist(wedge(v, a), wedge(involution(a), v)) < 1e-12);
    }
  }
}

TEST_CASE("interior products on basis blades", "[clifford]") {
  CHECK(dist(lcontract(e(2, {1}), e(2, {1, 2})), e(2, {2})) == 0.0);
  CHECK(norm(lcontract(e(2, {1}), e(2, {2}))) == 0.0);
  CHECK(dist(rcontract(e(2, {1, 2}), e(2, {2})), e(2, {1})) == 0.0);
}

TEST_CASE("interior products are adjoint to wedge on all blades", "[clifford]") {
  for (int n = 2; n <= 4; ++n) {
    unsigned size = 1u << n;
    for (unsigned t = 0; t < size; ++t)
      for (unsigned w1 = 0; w1 < size; ++w1)
        for (unsigned w2 = 0; w2 < size; ++w2) {
          Multivector T = Multivector::basis(n, t);
          Multivector W1 = Multivector::basis(n, w1);
          Multivector W2 = Multivector::basis(n, w2);
          CHECK(inner(lcontract(T, W1), W2) == inner(W1, wedge(T, W2)));
          CHECK(inner(rcontract(W1, T), W2) == inner(W1, wedge(W2, T)));
        }
  }
}

TEST_CASE("Clifford generator relations", "[clifford]") {
  CHECK(dist(cliff_pos(e(2, {1}), e(2, {1})), Multivector::scalar(2, 1.0)) == 0.0);
  CHECK(dist(cliff_neg(e(2, {1}), e(2, {1})), Multivector::scalar(2, -1.0)) == 0.0);
  CHECK(dist(cliff_pos(e(3, {1}), e(3, {2, 3})), e(3, {1, 2, 3})) == 0.0);
}

TEST_CASE("Riesz identities relate Clifford, wedge and contraction", "[clifford]") {
  Rng rng(102);
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 100; ++t) {
      Multivector v = rng.vector(n);
      Multivector w = rng.multivector(n);
      CHECK(dist(cliff_pos(v, w), lcontract(v, w) + wedge(v, w)) < 1e-12);
      CHECK(dist(cliff_neg(v, w), wedge(v, w) - lcontract(v, w)) < 1e-12);
      CHECK(dist(cliff_pos(w, v), rcontract(w, v) + wedge(w, v)) < 1e-12);
      CHECK(dist(cliff_neg(w, v), wedge(w, v) - rcontract(w, v)) < 1e-12);
    }
  }
}

TEST_CASE("anti-commutation between the two Clifford products", "[clifford]") {
  Rng rng(103);
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 100; ++t) {
      Multivector u = rng.vector(n), v = rng.vector(n);
      Multivector w = rng.multivector(n);
      CHECK(dist(cliff_pos(u, cliff_neg(v, w)), -cliff_neg(v, cliff_pos(u, w))) < 1e-12);
      CHECK(dist(cliff_pos(v, w), cliff_neg(involution(w), v)) < 1e-12);
    }
  }
}

TEST_CASE("associativity and (anti-)automorphisms", "[clifford]") {
  Rng rng(104);
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 40; ++t) {
      Multivector a = rng.multivector(n), b = rng.multivector(n), c = rng.multivector(n);
      CHECK(dist(cliff_pos(cliff_pos(a, b), c), cliff_pos(a, cliff_pos(b, c))) < 1e-11);
      CHECK(dist(cliff_neg(cliff_neg(a, b), c), cliff_neg(a, cliff_neg(b, c))) < 1e-11);
      CHECK(dist(involution(cliff_pos(a, b)), cliff_pos(involution(a), involution(b))) < 1e-12);
      CHECK(dist(reversion(cliff_pos(a, b)), cliff_pos(reversion(b), reversion(a))) < 1e-12);
    }
  }
}

TEST_CASE("involution and reversion sign patterns, squares to identity", "[clifford]") {
  Multivector w = Multivector::scalar(2, 1.0) + e(2, {1}) + e(2, {1, 2});
  Multivector expect = Multivector::scalar(2, 1.0) - e(2, {1}) + e(2, {1, 2});
  CHECK(dist(involution(w), expect) == 0.0);
  CHECK(dist(reversion(e(2, {1, 2})), -e(2, {1, 2})) == 0.0);
  CHECK(dist(reversion(e(3, {1, 2, 3})), -e(3, {1, 2, 3})) == 0.0);
  Rng rng(105);
  for (int t = 0; t < 20; ++t) {
    Multivector a = rng.multivector(4);
    CHECK(dist(involution(involution(a)), a) == 0.0);
    CHECK(dist(reversion(reversion(a)), a) == 0.0);
  }
}

TEST_CASE("negative-signature Gram rule via involution", "[clifford]") {
  Rng rng(106);
  for (int n = 2; n <= 5; ++n) {
    // on blades: <e_s, e_s>_- = (-1)^{|s|}
    for (unsigned b = 0; b < (1u << n); ++b) {
      Multivector es = Multivector::basis(n, b);
      double expect = (std::popcount(b) & 1) ? -1.0 : 1.0;
      CHECK(inner_neg(es, es) == expect);
    }
    for (int t = 0; t < 30; ++t) {
      Multivector a = rng.multivector(n), b = rng.multivector(n);
      CHECK(std::abs(inner_neg(a, b) - inner(involution(a), b)) == 0.0);
      CHECK(std::abs(inner_neg(a, b) - inner(a, involution(b))) < 1e-14);
    }
  }
}

TEST_CASE("adjoint rule of Clifford multiplication under reversion", "[clifford]") {
  Rng rng(107);
  for (int n = 2; n <= 5; ++n)
    for (int t = 0; t < 40; ++t) {
      Multivector w1 = rng.multivector(n), w2 = rng.multivector(n), w3 = rng.multivector(n);
      CHECK(std::abs(inner(cliff_pos(w1, w2), w3) - inner(w2, cliff_pos(reversion(w1), w3))) < 1e-12);
    }
}

TEST_CASE("Hodge star basics", "[clifford]") {
  // ★1 = volume blade
  for (int n = 2; n <= 4; ++n)
    CHECK(dist(hodge_left(Multivector::scalar(n, 1.0)), Multivector::basis(n, volume_blade(n))) == 0.0);
  // n=2: ★e1 from the contraction sign rule
  CHECK(dist(hodge_left(e(2, {1})), -e(2, {2})) == 0.0);
  CHECK(dist(hodge_left(e(2, {2})), e(2, {1})) == 0.0);
}

TEST_CASE("Hodge star identities", "[clifford]") {
  Rng rng(108);
  for (int n = 2; n <= 6; ++n) {
    Multivector eV = Multivector::basis(n, volume_blade(n));
    for (int t = 0; t < 50; ++t) {
      Multivector w = rng.multivector(n);
      CHECK(dist(hodge_left(hodge_right(w)), w) < 1e-13);
      CHECK(dist(hodge_right(hodge_left(w)), w) < 1e-13);
      // ★★ scales grade k by (-1)^{k(n-k)}: involution for even n, identity
      // for odd n.
      Multivector twice = (n % 2 == 0) ? involution(w) : w;
      CHECK(dist(hodge_left(hodge_left(w)), twice) < 1e-13);
      CHECK(dist(hodge_right(hodge_right(w)), twice) < 1e-13);
      // star via Clifford: ★w = e_V ∆ reversion(w), w★ = reversion(w) ∆ e_V
      CHECK(dist(hodge_left(w), cliff_pos(eV, reversion(w))) < 1e-12);
      CHECK(dist(hodge_right(w), cliff_pos(reversion(w), eV)) < 1e-12);
      Multivector w2 = rng.multivector(n);
      // (w ∧ (w2★))★ pairs equal grades into <w, w2>; cross-grade terms are
      // non-scalar, so the general statement is about the scalar part.
      Multivector lhs = hodge_right(wedge(w, hodge_right(w2)));
      CHECK(std::abs(lhs[0] - inner(w, w2)) < 1e-12);
      for (int k = 0; k <= n; ++k) {
        Multivector a = grade_project(w, k), b = grade_project(w2, k);
        Multivector full = hodge_right(wedge(a, hodge_right(b)));
        CHECK(dist(full, Multivector::scalar(n, inner(a, b))) < 1e-12);
      }
    }
  }
}

TEST_CASE("norm multiplicativity for vector factors", "[clifford]") {
  Rng rng(109);
  for (int n = 2; n <= 6; ++n)
    for (int t = 0; t < 60; ++t) {
      Multivector v = rng.vector(n);
      Multivector w = rng.multivector(n);
      CHECK(std::abs(norm(cliff_pos(v, w)) - norm(v) * norm(w)) < 1e-12);
      CHECK(std::abs(norm(cliff_pos(w, v)) - norm(v) * norm(w)) < 1e-12);
      Multivector w2 = rng.multivector(n);
      CHECK(norm(cliff_pos(w, w2)) <= std::pow(2.0, n) * norm(w) * norm(w2) + 1e-12);
    }
}

TEST_CASE("vector inverse", "[clifford]") {
  CHECK(dist(vector_inverse(e(3, {1}), Signature::positive), e(3, {1})) == 0.0);
  CHECK(dist(vector_inverse(2.0 * e(3, {1}), Signature::positive), 0.5 * e(3, {1})) == 0.0);
  CHECK(dist(vector_inverse(e(3, {1}), Signature::negative), -e(3, {1})) == 0.0);
  Rng rng(110);
  for (int t = 0; t < 20; ++t) {
    Multivector v = rng.vector(4);
    if (norm(v) < 1e-6) continue;
    CHECK(dist(cliff_pos(v, vector_inverse(v, Signature::positive)), Multivector::scalar(4, 1.0)) < 1e-12);
    CHECK(dist(cliff_neg(v, vector_inverse(v, Signature::negative)), Multivector::scalar(4, 1.0)) < 1e-12);
  }
  CHECK_THROWS_AS(vector_inverse(Multivector(3), Signature::positive), std::invalid_argument);
  CHECK_THROWS_AS(vector_inverse(e(3, {1, 2}), Signature::positive), std::invalid_argument);
}

TEST_CASE("grade multiplier operator and its summation route", "[clifford]") {
  CHECK(dist(b_op(e(3, {1, 2})), -e(3, {1, 2})) == 0.0);  // (3-4) = -1
  CHECK(dist(b_op(Multivector::scalar(3, 1.0)), Multivector::scalar(3, 3.0)) == 0.0);
  Rng rng(111);
  for (int n = 2; n <= 6; ++n)
    for (int t = 0; t < 30; ++t) {
      Multivector w = rng.multivector(n);
      Multivector sum(n);
      for (int j = 0; j < n; ++j) {
        Multivector ej = Multivector::basis(n, 1u << j);
        sum += cliff_pos(cliff_pos(ej, involution(w)), ej);
      }
      CHECK(dist(sum, b_op(w)) < 1e-12);
      // b = 2*euler + n*id
      CHECK(dist(b_op(w), 2.0 * euler_op(w) + double(n) * w) < 1e-13);
    }
}

TEST_CASE("rotor conjugation realizes reflections", "[clifford]") {
  CHECK(dist(rotor_conjugate(e(3, {1}), e(3, {1})), -e(3, {1})) == 0.0);
  CHECK(dist(rotor_conjugate(e(3, {1}), e(3, {2})), e(3, {2})) == 0.0);
  CHECK(dist(rotor_conjugate(e(3, {1}), e(3, {1, 2})), -e(3, {1, 2})) == 0.0);
  Rng rng(112);
  for (int n = 2; n <= 5; ++n)
    for (int t = 0; t < 40; ++t) {
      Multivector v = rng.unit_vector(n);
      Multivector w = rng.vector(n);
      // reflection of a vector: w - 2<w,v>v
      Multivector expect = w - (2.0 * inner(w, v)) * v;
      CHECK(dist(rotor_conjugate(v, w), expect) < 1e-12);
      // product of two unit vectors acts as a rotation, preserves norms
      Multivector q = cliff_pos(rng.unit_vector(n), rng.unit_vector(n));
      Multivector a = rng.multivector(n);
      CHECK(std::abs(norm(rotor_conjugate(q, a)) - norm(a)) < 1e-11);
    }
  CHECK_THROWS_AS(rotor_conjugate(Multivector::scalar(3, 1.0) + e(3, {1}), e(3, {2})),
                  std::invalid_argument);
}

TEST_CASE("grade projection partitions a multivector", "[clifford]") {
  Rng rng(113);
  Multivector w = rng.multivector(5);
  Multivector sum(5);
  for (int k = 0; k <= 5; ++k) sum += grade_project(w, k);
  CHECK(dist(sum, w) == 0.0);
  CHECK(inner(e(5, {1}), e(5, {1, 2})) == 0.0);
  CHECK(inner(e(5, {1, 2}), e(5, {1, 2})) == 1.0);
}
