#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <vector>

#include "test_helpers.hpp"

using namespace qtel;
using qtest::diff;
using qtest::random_matrix;

TEST_CASE("matrix_units") {
  SECTION("n=1 is the scalar 1") {
    const OperatorBasis b = matrix_units(1);
    REQUIRE(b.elements.size() == 1);
    REQUIRE(std::abs(b.elements[0](0, 0) - Complex(1, 0)) == 0.0);
  }
  SECTION("e_12 has its unit entry at row 1, column 2") {
    const OperatorBasis b = matrix_units(2);
    const Matrix& e12 = b.elements[1];
    REQUIRE(std::abs(e12(0, 1) - Complex(1, 0)) == 0.0);
    REQUIRE(std::abs(e12(0, 0)) == 0.0);
    REQUIRE(std::abs(e12(1, 0)) == 0.0);
    REQUIRE(std::abs(e12(1, 1)) == 0.0);
  }
  SECTION("units form an orthonormal basis") {
    REQUIRE(is_orthonormal_basis(matrix_units(2)));
    REQUIRE(is_orthonormal_basis(matrix_units(3)));
  }
  SECTION("n=0 rejected") { REQUIRE_THROWS_AS(matrix_units(0), DimensionError); }
}

TEST_CASE("hs_inner") {
  SECTION("identity with itself gives the dimension") {
    const Matrix id = Matrix::Identity(2, 2);
    REQUIRE(std::abs(hs_inner(id, id) - Complex(2, 0)) < 1e-15);
  }
  SECTION("normalized spin matrix has unit norm") {
    const Matrix omega1 = spin_basis().elements[1];
    REQUIRE(std::abs(hs_inner(omega1, omega1) - Complex(1, 0)) < 1e-15);
  }
  SECTION("distinct matrix units are orthogonal") {
    const OperatorBasis b = matrix_units(2);
    REQUIRE(std::abs(hs_inner(b.elements[1], b.elements[2])) == 0.0);
  }
  SECTION("dimension mismatch rejected") {
    REQUIRE_THROWS_AS(hs_inner(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), DimensionError);
  }
}

TEST_CASE("vectorization isomorphisms") {
  const OperatorBasis b = matrix_units(2);
  SECTION("vec_left(e_12) = e_1 (x) e_2") {
    Vector expected(4);
    expected << 0, 1, 0, 0;
    REQUIRE(diff(vec_left(b.elements[1]), expected) == 0.0);
  }
  SECTION("vec_right(e_12) = e_2 (x) e_1") {
    Vector expected(4);
    expected << 0, 0, 1, 0;
    REQUIRE(diff(vec_right(b.elements[1]), expected) == 0.0);
  }
  SECTION("vec_right of the normalized identity is the Bell vector") {
    const double r = 1.0 / std::sqrt(2.0);
    Vector expected(4);
    expected << r, 0, 0, r;
    REQUIRE(diff(vec_right(Matrix(Matrix::Identity(2, 2) / std::sqrt(2.0))), expected) < 1e-15);
  }
  SECTION("both maps are isometries on 100 random pairs") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
      const Matrix a = random_matrix(3, rng);
      const Matrix c = random_matrix(3, rng);
      const Complex inner = hs_inner(a, c);
      REQUIRE(std::abs(inner - vec_left(a).dot(vec_left(c))) < 1e-12);
      REQUIRE(std::abs(inner - vec_right(a).dot(vec_right(c))) < 1e-12);
    }
  }
}

TEST_CASE("devec_left") {
  SECTION("(0,1,0,0) maps back to e_12") {
    Vector v(4);
    v << 0, 1, 0, 0;
    REQUIRE(diff(devec_left(v), matrix_units(2).elements[1]) == 0.0);
  }
  SECTION("zero vector maps to the zero matrix") {
    REQUIRE(max_abs(devec_left(Vector::Zero(9))) == 0.0);
  }
  SECTION("round-trip on 50 random matrices") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 50; ++k) {
      const Matrix a = random_matrix(3, rng);
      REQUIRE(diff(devec_left(vec_left(a)), a) < 1e-14);
    }
  }
  SECTION("non-square length rejected") {
    REQUIRE_THROWS_AS(devec_left(Vector::Zero(3)), DimensionError);
  }
}

TEST_CASE("is_orthonormal_basis") {
  SECTION("matrix units pass") { REQUIRE(is_orthonormal_basis(matrix_units(2))); }
  SECTION("spin basis passes") { REQUIRE(is_orthonormal_basis(spin_basis())); }
  SECTION("unnormalized spin matrices fail") {
    OperatorBasis b;
    b.dim = 2;
    b.elements = spin_matrices();
    REQUIRE_FALSE(is_orthonormal_basis(b));
  }
  SECTION("wrong element count rejected") {
    OperatorBasis b;
    b.dim = 2;
    b.elements = {Matrix::Identity(2, 2)};
    REQUIRE_THROWS_AS(is_orthonormal_basis(b), MalformedBasisError);
  }
}

TEST_CASE("random_onb") {
  SECTION("deterministic in the seed") {
    const OperatorBasis a = random_onb(2, 7);
    const OperatorBasis b = random_onb(2, 7);
    for (size_t k = 0; k < a.elements.size(); ++k)
      REQUIRE(diff(a.elements[k], b.elements[k]) == 0.0);
  }
  SECTION("orthonormal at tight tolerance") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      REQUIRE(is_orthonormal_basis(random_onb(2, seed), 1e-12));
      REQUIRE(is_orthonormal_basis(random_onb(3, seed), 1e-12));
    }
  }
  SECTION("n=1 gives a unimodular scalar") {
    const OperatorBasis b = random_onb(1, 5);
    REQUIRE(b.elements.size() == 1);
    REQUIRE(std::abs(std::abs(b.elements[0](0, 0)) - 1.0) < 1e-12);
  }
}

TEST_CASE("sandwich") {
  const OperatorBasis units = matrix_units(2);
  SECTION("identity frame is the identity map") {
    std::mt19937_64 rng(13);
    const Matrix a = random_matrix(2, rng);
    const Matrix id = Matrix::Identity(2, 2);
    REQUIRE(diff(sandwich(id, id, a), a) == 0.0);
  }
  SECTION("matrix-unit frame moves entries") {
    REQUIRE(diff(sandwich(units.elements[1], units.elements[1], units.elements[3]),
                 units.elements[0]) == 0.0);
  }
  SECTION("spin-frame example") {
    const Matrix omega1 = spin_basis().elements[1];
    REQUIRE(diff(sandwich(omega1, omega1, units.elements[0]),
                 Matrix(0.5 * units.elements[3])) < 1e-15);
  }
}

TEST_CASE("superoperator representations") {
  SECTION("identity map has trace n") {
    const std::vector<Matrix>& images = matrix_units(2).elements;
    const Matrix l = superop_left(images);
    // sum_ij e_ij (x) e_ij: trace counts the diagonal units.
    REQUIRE(std::abs(l.trace() - Complex(2, 0)) < 1e-15);
    REQUIRE(diff(l, superop_right(images)) == 0.0);
  }
  SECTION("normalized-identity frame gives the Bell projector") {
    const Matrix f = Matrix::Identity(2, 2) / std::sqrt(2.0);
    // Oracle: rank-1 outer product of the right vectorization.
    const Vector v = vec_right(f);
    const Matrix oracle = v * v.adjoint();
    std::vector<Matrix> images;
    for (const auto& e : matrix_units(2).elements) images.push_back(Matrix(f * e * f.adjoint()));
    REQUIRE(diff(superop_right(images), oracle) < 1e-12);
  }
  SECTION("superoperator inner product matches the image-sum form") {
    std::mt19937_64 rng(14);
    std::vector<Matrix> phi, psi;
    for (int k = 0; k < 4; ++k) {
      phi.push_back(random_matrix(2, rng));
      psi.push_back(random_matrix(2, rng));
    }
    Complex by_images(0, 0);
    for (int k = 0; k < 4; ++k) by_images += hs_inner(phi[k], psi[k]);
    const Complex by_trace = (superop_left(phi).adjoint() * superop_left(psi)).trace();
    REQUIRE(std::abs(by_trace - by_images) < 1e-10);
  }
  SECTION("double-indexed frame maps are orthonormal in superoperator space") {
    const OperatorBasis b = random_onb(2, 21);
    std::vector<Matrix> frame;
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) {
        std::vector<Matrix> images;
        for (const auto& e : matrix_units(2).elements)
          images.push_back(sandwich(b.elements[a], b.elements[c], e));
        frame.push_back(superop_left(images));
      }
    for (size_t x = 0; x < frame.size(); ++x)
      for (size_t y = 0; y < frame.size(); ++y) {
        const Complex g = (frame[x].adjoint() * frame[y]).trace();
        const double expected = x == y ? 1.0 : 0.0;
        REQUIRE(std::abs(g - Complex(expected, 0)) < 1e-10);
      }
  }
}

namespace {

// Independent reconstruction: images of sum c_ab f_a (.) f_b* on all units.
std::vector<Matrix> reconstruct_images(const Matrix& c, const OperatorBasis& b) {
  const Index n = b.dim;
  std::vector<Matrix> out;
  for (const auto& e : matrix_units(n).elements) {
    Matrix img = Matrix::Zero(n, n);
    for (Index a = 0; a < c.rows(); ++a)
      for (Index d = 0; d < c.cols(); ++d)
        img += c(a, d) * sandwich(b.elements[static_cast<size_t>(a)],
                                  b.elements[static_cast<size_t>(d)], e);
    out.push_back(img);
  }
  return out;
}

}  // namespace

TEST_CASE("decompose_map") {
  SECTION("single frame map has a single coefficient") {
    const OperatorBasis b = random_onb(2, 3);
    std::vector<Matrix> images;
    for (const auto& e : matrix_units(2).elements)
      images.push_back(sandwich(b.elements[1], b.elements[2], e));
    const Matrix c = decompose_map(images, b);
    Matrix expected = Matrix::Zero(4, 4);
    expected(1, 2) = 1;
    REQUIRE(diff(c, expected) < 1e-12);
  }
  SECTION("identity map reconstructs exactly") {
    const OperatorBasis units = matrix_units(2);
    const Matrix c = decompose_map(units.elements, units);
    const std::vector<Matrix> back = reconstruct_images(c, units);
    for (size_t k = 0; k < back.size(); ++k)
      REQUIRE(diff(back[k], units.elements[k]) < 1e-12);
  }
  SECTION("diagonal mixture decomposes to its weights") {
    CpMapSpec t;
    t.basis = random_onb(2, 9);
    t.weights = RealVector(4);
    t.weights << 0.5, 0.3, 0.2, 0.0;
    std::vector<Matrix> images;
    for (const auto& e : matrix_units(2).elements) images.push_back(apply_cp(t, e));
    const Matrix c = decompose_map(images, t.basis);
    Matrix expected = Matrix::Zero(4, 4);
    for (Index k = 0; k < 4; ++k) expected(k, k) = t.weights(k);
    REQUIRE(diff(c, expected) < 1e-10);
  }
  SECTION("random maps round-trip through coefficients") {
    std::mt19937_64 rng(15);
    const OperatorBasis b = random_onb(2, 16);
    std::vector<Matrix> images;
    for (int k = 0; k < 4; ++k) images.push_back(random_matrix(2, rng));
    const Matrix c = decompose_map(images, b);
    const std::vector<Matrix> back = reconstruct_images(c, b);
    for (size_t k = 0; k < images.size(); ++k) REQUIRE(diff(back[k], images[k]) < 1e-10);
  }
  SECTION("non-orthonormal basis rejected") {
    OperatorBasis bad;
    bad.dim = 2;
    bad.elements = spin_matrices();
    REQUIRE_THROWS_AS(decompose_map(matrix_units(2).elements, bad), MalformedBasisError);
  }
}

TEST_CASE("canonical_form") {
  SECTION("identity coefficients keep the map and unit weights") {
    const OperatorBasis b = random_onb(2, 31);
    const CanonicalForm cf = canonical_form(Matrix::Identity(4, 4), b);
    REQUIRE(cf.weights.size() == 4);
    for (Index k = 0; k < 4; ++k) REQUIRE(std::abs(cf.weights(k) - 1.0) < 1e-12);
    REQUIRE(is_orthonormal_basis(cf.basis, 1e-10));
    // Same map: sum_a g_a (.) g_a* must equal sum_a f_a (.) f_a*.
    for (const auto& e : matrix_units(2).elements) {
      Matrix lhs = Matrix::Zero(2, 2);
      Matrix rhs = Matrix::Zero(2, 2);
      for (int a = 0; a < 4; ++a) {
        lhs += sandwich(cf.basis.elements[a], cf.basis.elements[a], e);
        rhs += sandwich(b.elements[a], b.elements[a], e);
      }
      REQUIRE(diff(lhs, rhs) < 1e-10);
    }
  }
  SECTION("diagonal coefficients sort into the same frame") {
    const OperatorBasis b = random_onb(2, 32);
    Matrix c = Matrix::Zero(4, 4);
    const double lam[4] = {0.4, 0.1, 0.3, 0.2};
    for (Index k = 0; k < 4; ++k) c(k, k) = lam[k];
    const CanonicalForm cf = canonical_form(c, b);
    // Ascending weights; each output element matches the source frame entry.
    const int order[4] = {1, 3, 2, 0};
    for (Index k = 0; k < 4; ++k) {
      REQUIRE(std::abs(cf.weights(k) - lam[order[k]]) < 1e-12);
      REQUIRE(diff(cf.basis.elements[static_cast<size_t>(k)],
                   b.elements[static_cast<size_t>(order[k])]) < 1e-10);
    }
  }
  SECTION("random Hermitian coefficients give an orthonormal output frame") {
    std::mt19937_64 rng(33);
    const Matrix h = random_matrix(4, rng);
    const Matrix c = 0.5 * (h + h.adjoint());
    const OperatorBasis b = random_onb(2, 34);
    const CanonicalForm cf = canonical_form(c, b);
    REQUIRE(is_orthonormal_basis(cf.basis, 1e-10));
    // Reconstruction: sum_a w_a g_a (.) g_a* equals sum_ab c_ab f_a (.) f_b*.
    const std::vector<Matrix> target = reconstruct_images(c, b);
    for (size_t k = 0; k < target.size(); ++k) {
      Matrix got = Matrix::Zero(2, 2);
      for (int a = 0; a < 4; ++a)
        got += cf.weights(a) *
               sandwich(cf.basis.elements[a], cf.basis.elements[a],
                        matrix_units(2).elements[k]);
      REQUIRE(diff(got, target[k]) < 1e-10);
    }
  }
  SECTION("non-Hermitian coefficients rejected") {
    Matrix c = Matrix::Zero(4, 4);
    c(0, 1) = 1;
    REQUIRE_THROWS_AS(canonical_form(c, random_onb(2, 35)), MalformedStateError);
  }
}
