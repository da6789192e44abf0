#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "qauth/errors.hpp"
#include "qauth/family.hpp"
#include "qauth/forgery.hpp"
#include "test_support.hpp"

using namespace qauth;
using qauth::testing::random_code_density;
using qauth::testing::random_vector;

namespace {

CodingSet coincident_family(const SpaceLayout& l, std::size_t k_count,
                            std::uint64_t seed) {
  const Index c = l.code_dim();
  const Index d = l.complement_dim();
  std::vector<ComplexMatrix> us{ComplexMatrix::Identity(c + d, c + d)};
  for (std::size_t k = 1; k < k_count; ++k) {
    ComplexMatrix u = ComplexMatrix::Zero(c + d, c + d);
    u.topLeftCorner(c, c) = haar_unitary(c, seed + k);
    u.bottomRightCorner(d, d) = haar_unitary(d, seed + 100 + k);
    us.push_back(u);
  }
  return CodingSet(l, us);
}

// U = v v^dagger + B W B^dagger, with B an orthonormal basis of v-perp.
ComplexMatrix fixing_unitary(const ComplexVector& v, std::uint64_t seed) {
  const Index e = v.size();
  Eigen::HouseholderQR<ComplexMatrix> qr(v);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(e, e);
  const ComplexMatrix b = q.rightCols(e - 1);
  return v * v.adjoint() + b * haar_unitary(e - 1, seed) * b.adjoint();
}

}  // namespace

TEST_CASE("forgery kernel of block-diagonal families is the whole code space") {
  const SpaceLayout l(2, 3, 1);
  const CodingSet cs = coincident_family(l, 3, 4);
  const ComplexMatrix kernel = forgery_kernel(cs);
  CHECK(kernel.cols() == l.code_dim());
  const ForgeryReport rep = optimal_forgery(cs);
  CHECK(rep.perfect_forgery_exists);
}

TEST_CASE("Haar families have an empty forgery kernel") {
  const SpaceLayout layouts[] = {SpaceLayout(2, 2, 1), SpaceLayout(2, 3, 1),
                                 SpaceLayout(3, 2, 1)};
  for (const SpaceLayout& l : layouts) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const CodingSet cs = generate_generic_family(l, 2, 10 * seed);
      // Rank oracle: U_io(1)^dagger already has full column rank C.
      const BlockDecomposition u = io_decompose(l, cs.unitary(1));
      const auto s = svd(u.io.adjoint()).singular_values;
      CHECK(s(l.code_dim() - 1) > 1e-6);
      CHECK(forgery_kernel(cs).cols() == 0);
    }
  }
}

TEST_CASE("a common invariant vector is a perfect forgery") {
  const SpaceLayout l(2, 2, 1);
  std::mt19937_64 rng(19);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ComplexVector v = ComplexVector::Zero(4);
    v.head(2) = random_vector(2, rng);
    const ComplexMatrix u = fixing_unitary(v, seed);
    REQUIRE(is_unitary(u));
    const CodingSet cs(l, {ComplexMatrix::Identity(4, 4), u});
    const BlockDecomposition b = io_decompose(l, u);
    CHECK((b.io.adjoint() * v.head(2)).norm() < 1e-10);

    const ComplexMatrix kernel = forgery_kernel(cs);
    REQUIRE(kernel.cols() == 1);
    CHECK(std::abs(std::abs((kernel.adjoint() * v.head(2))(0, 0)) - 1.0) < 1e-10);

    const DensityOperator forged = forged_state_from_code_vector(l, kernel.col(0));
    for (std::size_t k = 0; k < cs.size(); ++k) {
      CHECK(std::abs(verify(l, decode(cs, forged, k)).accept_prob - 1.0) < 1e-9);
    }
    CHECK(std::abs(p_forge(cs, forged) - 1.0) < 1e-9);
    CHECK(optimal_forgery(cs).perfect_forgery_exists);
  }
}

TEST_CASE("forgery requires at least two keys") {
  const SpaceLayout l(2, 2, 1);
  const CodingSet single(l, {ComplexMatrix::Identity(4, 4)});
  CHECK_THROWS_AS(forgery_kernel(single), DegenerateFamilyError);
  CHECK_THROWS_AS(optimal_forgery(single), DegenerateFamilyError);
}

TEST_CASE("p_forge") {
  SUBCASE("coincident family accepts every code-space state") {
    const SpaceLayout l(2, 2, 1);
    const CodingSet cs = coincident_family(l, 4, 8);
    std::mt19937_64 rng(2);
    CHECK(std::abs(p_forge(cs, random_code_density(l, rng)) - 1.0) < 1e-9);
  }
  SUBCASE("states outside every code subspace are always rejected") {
    const SpaceLayout l(2, 3, 1);
    const CodingSet cs = generate_orthogonal_family(l, 2);
    ComplexMatrix rho = ComplexMatrix::Zero(6, 6);
    rho(5, 5) = 1.0;
    CHECK(p_forge(cs, DensityOperator(rho)) == 0.0);
  }
  SUBCASE("orthogonal family, pure state inside one block") {
    const SpaceLayout l(2, 4, 1);
    std::mt19937_64 rng(5);
    for (std::size_t k_count : {2U, 3U, 4U}) {
      const CodingSet cs = generate_orthogonal_family(l, k_count);
      const ComplexVector psi = cs.unitary(k_count - 1).leftCols(2) * random_vector(2, rng);
      CHECK(std::abs(p_forge(cs, DensityOperator::pure(psi)) - 1.0 / k_count) < 1e-12);
    }
  }
  SUBCASE("shape mismatch") {
    const SpaceLayout l(2, 2, 1);
    CHECK_THROWS_AS(p_forge(generate_orthogonal_family(l, 2),
                            DensityOperator::maximally_mixed(3)),
                    DimensionError);
  }
}

TEST_CASE("optimal forgery bounds") {
  SUBCASE("orthogonal families reach exactly 1/K") {
    const SpaceLayout layouts[] = {SpaceLayout(2, 2, 1), SpaceLayout(2, 4, 1),
                                   SpaceLayout(3, 3, 1)};
    for (const SpaceLayout& l : layouts) {
      const auto p = static_cast<std::size_t>(*l.p());
      for (std::size_t k_count = 2; k_count <= p; ++k_count) {
        const ForgeryReport rep = optimal_forgery(generate_orthogonal_family(l, k_count));
        CHECK(std::abs(rep.top_eigenvalue - 1.0) < 1e-9);
        CHECK(std::abs(rep.optimal_p_forge - 1.0 / static_cast<double>(k_count)) < 1e-9);
        CHECK(rep.top_multiplicity == static_cast<Index>(k_count) * l.code_dim());
        CHECK_FALSE(rep.perfect_forgery_exists);
      }
    }
  }
  SUBCASE("coincident families reach 1") {
    const SpaceLayout l(2, 3, 1);
    const ForgeryReport rep = optimal_forgery(coincident_family(l, 3, 1));
    CHECK(std::abs(rep.top_eigenvalue - 3.0) < 1e-9);
    CHECK(std::abs(rep.optimal_p_forge - 1.0) < 1e-9);
  }
  SUBCASE("generic three-key family") {
    const SpaceLayout l(2, 2, 1);
    const CodingSet cs = generate_generic_family(l, 3, 42);
    const ForgeryReport rep = optimal_forgery(cs);
    // Top eigenvalue of the projector sum from the general complex eigensolver.
    CHECK(rep.optimal_p_forge == doctest::Approx(0.90126831547754216).epsilon(1e-12));
    CHECK(rep.optimal_p_forge > 1.0 / 3.0);
    CHECK(rep.optimal_p_forge < 1.0);
    CHECK(std::abs(p_forge(cs, rep.optimal_state) - rep.optimal_p_forge) < 1e-12);
  }
}

TEST_CASE("no state beats the optimal forgery") {
  const SpaceLayout l(2, 3, 1);
  std::mt19937_64 rng(33);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CodingSet cs = generate_generic_family(l, 3, 7 * seed);
    const double best = optimal_forgery(cs).optimal_p_forge;
    for (int trial = 0; trial < 20; ++trial) {
      CHECK(p_forge(cs, DensityOperator::pure(random_vector(6, rng))) <= best + 1e-12);
    }
  }
}

TEST_CASE("forged_state_from_code_vector") {
  const SpaceLayout l(2, 2, 1);
  ComplexVector psi(2);
  psi << 1.0, 0.0;
  const DensityOperator rho = forged_state_from_code_vector(l, psi);
  CHECK(lies_in_code_space(l, rho));
  CHECK_THROWS_AS(forged_state_from_code_vector(l, ComplexVector::Ones(3)),
                  DimensionError);
}
