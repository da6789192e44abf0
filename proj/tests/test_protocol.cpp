#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "qauth/errors.hpp"
#include "qauth/protocol.hpp"
#include "test_support.hpp"

using namespace qauth;
using qauth::testing::random_code_density;
using qauth::testing::random_density;
using qauth::testing::random_matrix;

namespace {

CodingSet haar_family(const SpaceLayout& layout, std::size_t k_count,
                      std::uint64_t seed) {
  std::vector<ComplexMatrix> us{
      ComplexMatrix::Identity(layout.total_dim(), layout.total_dim())};
  for (std::size_t k = 1; k < k_count; ++k) {
    us.push_back(haar_unitary(layout.total_dim(), seed + k));
  }
  return CodingSet(layout, us);
}

DensityOperator valid_tag(const SpaceLayout& layout) {
  ComplexVector t = ComplexVector::Zero(layout.t_dim());
  t(0) = 1.0;
  return DensityOperator::pure(t);
}

}  // namespace

TEST_CASE("SpaceLayout derived dimensions and validation") {
  const SpaceLayout l(2, 4, 1);
  CHECK(l.code_dim() == 2);
  CHECK(l.complement_dim() == 6);
  CHECK(l.total_dim() == 8);
  CHECK(l.q() == 3);
  CHECK(l.p() == 4);
  CHECK(l.admits_validators());

  const SpaceLayout odd(2, 3, 2);
  CHECK(odd.code_dim() == 4);
  CHECK_FALSE(odd.q().has_value());
  CHECK_FALSE(odd.admits_validators());

  CHECK_THROWS_AS(SpaceLayout(1, 2, 1), LayoutError);
  CHECK_THROWS_AS(SpaceLayout(2, 1, 1), LayoutError);
  CHECK_THROWS_AS(SpaceLayout(2, 2, 2), LayoutError);
  CHECK_THROWS_AS(SpaceLayout(2, 2, 0), LayoutError);
  CHECK_THROWS_AS(SpaceLayout(8, 8, 1, 63), LayoutError);
}

TEST_CASE("canonical permutation for m=2, t=2, v=1") {
  const std::vector<Index> perm = canonical_basis_permutation(SpaceLayout(2, 2, 1));
  CHECK(perm == std::vector<Index>{0, 2, 1, 3});
}

TEST_CASE("canonical ordering places valid tags first") {
  const SpaceLayout l(2, 3, 1);
  // I_M (x) |0><0| in the product basis
  ComplexMatrix tag0 = ComplexMatrix::Zero(3, 3);
  tag0(0, 0) = 1.0;
  const ComplexMatrix product = tensor_product(ComplexMatrix::Identity(2, 2), tag0);
  const ComplexMatrix canon = to_canonical(l, product);
  CHECK((canon - code_projector(l)).norm() == 0.0);
  CHECK(code_projector(l).diagonal().real().head(2).sum() == 2.0);
  CHECK(code_projector(l).diagonal().real().tail(4).sum() == 0.0);
}

TEST_CASE("canonical permutation round trips") {
  const SpaceLayout l(3, 3, 2);
  std::mt19937_64 rng(3);
  const ComplexMatrix a = random_matrix(9, 9, rng);
  CHECK((from_canonical(l, to_canonical(l, a)) - a).norm() == 0.0);
  const std::vector<Index> perm = canonical_basis_permutation(l);
  std::vector<Index> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < 9; ++i) {
    CHECK(sorted[static_cast<std::size_t>(i)] == i);
  }
  // Applying the permutation twice and undoing it twice restores a vector.
  ComplexVector v = random_matrix(9, 1, rng).col(0);
  ComplexVector w = v;
  for (int pass = 0; pass < 2; ++pass) {
    ComplexVector next(9);
    for (Index i = 0; i < 9; ++i) {
      next(i) = w(perm[static_cast<std::size_t>(i)]);
    }
    w = next;
  }
  for (int pass = 0; pass < 2; ++pass) {
    ComplexVector prev(9);
    for (Index i = 0; i < 9; ++i) {
      prev(perm[static_cast<std::size_t>(i)]) = w(i);
    }
    w = prev;
  }
  CHECK((w - v).norm() == 0.0);
}

TEST_CASE("DensityOperator validation") {
  CHECK_THROWS_AS(DensityOperator(ComplexMatrix::Identity(2, 2)), DomainError);
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityOperator{neg}, DomainError);
  ComplexMatrix skew = 0.5 * ComplexMatrix::Identity(2, 2);
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityOperator{skew}, DomainError);
  CHECK_THROWS_AS(DensityOperator::pure(ComplexVector::Zero(3)), DomainError);
  CHECK(DensityOperator::maximally_mixed(4).matrix().trace().real() ==
        doctest::Approx(1.0));
}

TEST_CASE("CodingSet validation") {
  const SpaceLayout l(2, 2, 1);
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  CHECK_THROWS_AS(CodingSet(l, {}), DomainError);
  CHECK_THROWS_AS(CodingSet(l, {haar_unitary(4, 1)}), DomainError);
  CHECK_THROWS_AS(CodingSet(l, {id, 2.0 * id}), DomainError);
  CHECK_THROWS_AS(CodingSet(l, {id, ComplexMatrix::Identity(3, 3)}), DimensionError);
  const CodingSet cs = haar_family(l, 3, 4);
  CHECK(cs.size() == 3);
  CHECK(cs.key_bits() == 2);
  CHECK_THROWS_AS(cs.unitary(3), KeyError);
  CHECK(CodingSet(l, {id}).key_bits() == 0);
}

TEST_CASE("tag_message") {
  const SpaceLayout l(2, 2, 1);
  ComplexVector zero = ComplexVector::Zero(2);
  zero(0) = 1.0;
  const DensityOperator pure =
      tag_message(l, DensityOperator::pure(zero), valid_tag(l));
  CHECK(pure.matrix().block(2, 0, 2, 4).norm() == 0.0);
  CHECK(pure.matrix().block(0, 2, 4, 2).norm() == 0.0);
  CHECK(std::abs(pure.matrix()(0, 0) - 1.0) < 1e-15);

  const DensityOperator mixed =
      tag_message(l, DensityOperator::maximally_mixed(2), valid_tag(l));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.5;
  CHECK((mixed.matrix() - expected).norm() < 1e-15);

  ComplexMatrix leaky = ComplexMatrix::Zero(2, 2);
  leaky(0, 0) = 0.9;
  leaky(1, 1) = 0.1;
  CHECK_THROWS_AS(tag_message(l, DensityOperator::pure(zero), DensityOperator(leaky)),
                  InvalidTagError);
  CHECK_THROWS_AS(tag_message(l, DensityOperator::maximally_mixed(3), valid_tag(l)),
                  DimensionError);
}

TEST_CASE("encode and decode") {
  const SpaceLayout l(2, 2, 1);
  const CodingSet cs = haar_family(l, 3, 10);
  std::mt19937_64 rng(8);
  const DensityOperator rho = random_density(4, rng);
  CHECK((encode(cs, rho, 0).matrix() - rho.matrix()).norm() == 0.0);
  CHECK((decode(cs, rho, 0).matrix() - rho.matrix()).norm() == 0.0);

  const DensityOperator mixed = DensityOperator::maximally_mixed(4);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK((encode(cs, mixed, k).matrix() - mixed.matrix()).norm() < 1e-12);
    CHECK((decode(cs, encode(cs, rho, k), k).matrix() - rho.matrix()).norm() < 1e-12);
  }

  const auto before = qauth::testing::general_eigenvalues(rho.matrix());
  const auto after = qauth::testing::general_eigenvalues(encode(cs, rho, 1).matrix());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(std::abs(before[i] - after[i]) < 1e-10);
  }
}

TEST_CASE("decoding with the wrong key leaves the code space") {
  const SpaceLayout l(2, 2, 1);
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CodingSet cs = haar_family(l, 3, 100 * seed);
    const DensityOperator rho = random_code_density(l, rng);
    const Verification right = verify(l, decode(cs, encode(cs, rho, 1), 1));
    const Verification wrong = verify(l, decode(cs, encode(cs, rho, 1), 2));
    CHECK(right.accept_prob == 1.0);
    CHECK(wrong.accept_prob < 1.0 - 1e-6);
  }
}

TEST_CASE("verify") {
  const SpaceLayout l(2, 3, 1);
  std::mt19937_64 rng(2);
  const DensityOperator rho_m = random_density(2, rng);
  const DensityOperator tagged = tag_message(l, rho_m, DensityOperator::pure(
                                                           ComplexVector::Unit(3, 0)));
  const Verification honest = verify(l, tagged);
  CHECK(honest.accept_prob == 1.0);
  REQUIRE(honest.recovered_plaintext.has_value());
  CHECK((honest.recovered_plaintext->matrix() - rho_m.matrix()).norm() < 1e-10);
  CHECK(lies_in_code_space(l, tagged));

  ComplexMatrix outside = ComplexMatrix::Zero(6, 6);
  outside(4, 4) = 1.0;
  const Verification rejected = verify(l, DensityOperator(outside));
  CHECK(rejected.accept_prob == 0.0);
  CHECK_FALSE(rejected.accepted_state.has_value());
  CHECK_FALSE(rejected.recovered_plaintext.has_value());

  const Verification mixed = verify(l, DensityOperator::maximally_mixed(6));
  CHECK(std::abs(mixed.accept_prob - 2.0 / 6.0) < 1e-12);
}

TEST_CASE("io_decompose special cases") {
  const SpaceLayout l(2, 2, 1);
  const BlockDecomposition p = io_decompose(l, code_projector(l));
  CHECK((p.ii - ComplexMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK(p.io.norm() == 0.0);
  CHECK(p.oi.norm() == 0.0);
  CHECK(p.oo.norm() == 0.0);

  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap.block(0, 2, 2, 2) = ComplexMatrix::Identity(2, 2);
  swap.block(2, 0, 2, 2) = ComplexMatrix::Identity(2, 2);
  const BlockDecomposition s = io_decompose(l, swap);
  CHECK(s.ii.norm() == 0.0);
  CHECK(s.oo.norm() == 0.0);
  CHECK(s.io.norm() > 0.0);
  CHECK(s.oi.norm() > 0.0);
  CHECK((s.assemble() - swap).norm() == 0.0);

  CHECK_THROWS_AS(io_decompose(l, ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("block decomposition of a conjugation matches the block product") {
  std::mt19937_64 rng(77);
  const SpaceLayout layouts[] = {SpaceLayout(2, 2, 1), SpaceLayout(2, 3, 1),
                                 SpaceLayout(3, 2, 1)};
  for (const SpaceLayout& l : layouts) {
    const Index e = l.total_dim();
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix a = random_matrix(e, e, rng);
      const ComplexMatrix rho = random_density(e, rng).matrix();
      const BlockDecomposition direct = io_decompose(l, a * rho * a.adjoint());
      const BlockDecomposition oracle = qauth::testing::block_triple_product(
          io_decompose(l, a), io_decompose(l, rho));
      CHECK((direct.ii - oracle.ii).norm() < 1e-12);
      CHECK((direct.io - oracle.io).norm() < 1e-12);
      CHECK((direct.oi - oracle.oi).norm() < 1e-12);
      CHECK((direct.oo - oracle.oo).norm() < 1e-12);
    }
  }
}

TEST_CASE("transformed projectors") {
  const SpaceLayout l(2, 3, 1);
  const CodingSet cs = haar_family(l, 4, 21);
  CHECK((transformed_projector(cs, 0) - code_projector(l)).norm() == 0.0);
  for (std::size_t k = 1; k < 4; ++k) {
    const ComplexMatrix p = transformed_projector(cs, k);
    CHECK((p * p - p).norm() < 1e-10);
    CHECK(std::abs(p.trace().real() - 2.0) < 1e-10);
  }
}

TEST_CASE("embedding in the code space") {
  const SpaceLayout l(3, 2, 1);
  std::mt19937_64 rng(4);
  const DensityOperator rho = random_code_density(l, rng);
  CHECK(lies_in_code_space(l, rho));
  CHECK_FALSE(lies_in_code_space(l, random_density(6, rng)));
  CHECK_THROWS_AS(embed_in_code_space(l, random_density(4, rng)), DimensionError);
}

TEST_CASE("clamp_probability") {
  CHECK(clamp_probability(0.5) == 0.5);
  CHECK(clamp_probability(1.0 + 1e-13) == 1.0);
  CHECK(clamp_probability(1.0 - 1e-13) == 1.0);
  CHECK(clamp_probability(-1e-13) == 0.0);
  CHECK_THROWS_AS(clamp_probability(1.1), InternalConsistencyError);
  CHECK_THROWS_AS(clamp_probability(-0.1), InternalConsistencyError);
}
