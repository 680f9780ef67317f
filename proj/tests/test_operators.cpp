// test_operators.cpp - operator algebra, interaction picture, density checks

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tclk/operators.hpp"

using namespace tclk;

TEST_CASE("commutator matches a triple-loop product")
{
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix h = oracle_ref::random_hermitian(rng, 3);
        const Matrix rho = oracle_ref::random_hermitian(rng, 3);
        const Matrix ref = oracle_ref::naive_mul(h, rho) - oracle_ref::naive_mul(rho, h);
        CHECK(ops::max_abs(ops::commutator(h, rho) - ref) <= 1e-14);
    }
}

TEST_CASE("commutator of identity vanishes and mismatch throws")
{
    std::mt19937_64 rng(12);
    const Matrix a = oracle_ref::random_hermitian(rng, 4);
    CHECK(ops::max_abs(ops::commutator(Matrix::Identity(4, 4), a)) == 0.0);
    CHECK_THROWS_AS(ops::commutator(Matrix::Identity(2, 2), a), std::invalid_argument);
}

TEST_CASE("matrix units are orthonormal under the Hilbert-Schmidt product")
{
    const OperatorBasis basis(3);
    for (int i = 0; i < basis.size(); ++i) {
        for (int j = 0; j < basis.size(); ++j) {
            const Complex ip = ops::hs_inner(basis.element(i), basis.element(j));
            CHECK(ip == Complex{i == j ? 1.0 : 0.0, 0.0});
        }
    }
    CHECK(basis.flat_index(2, 1) == 7);
}

TEST_CASE("hs_inner is Tr(A^dagger B)")
{
    std::mt19937_64 rng(13);
    const Matrix a = oracle_ref::random_matrix(rng, 3);
    const Matrix b = oracle_ref::random_matrix(rng, 3);
    CHECK(std::abs(ops::hs_inner(a, b) - oracle_ref::naive_mul(a.adjoint(), b).trace()) <= 1e-13);
}

TEST_CASE("interaction picture agrees with the matrix exponential")
{
    std::mt19937_64 rng(14);
    const Matrix h = oracle_ref::random_hermitian(rng, 3);
    const Matrix v = oracle_ref::random_hermitian(rng, 3);
    const SystemHamiltonian hs(h);
    for (double t : {-1.3, 0.0, 0.4, 2.7}) {
        CHECK(ops::max_abs(interaction_picture(v, hs, t) - oracle_ref::heisenberg(v, h, t)) <= 1e-12);
    }
    CHECK(ops::max_abs(interaction_picture(v, hs, 0.0) - v) == 0.0);
}

TEST_CASE("sigma_z is invariant under the dephasing Hamiltonian")
{
    const SystemHamiltonian hs(0.5 * 1.3 * ops::pauli_z());
    for (double t : {0.1, 1.0, 7.5}) {
        CHECK(ops::max_abs(interaction_picture(ops::pauli_z(), hs, t) - ops::pauli_z()) <= 1e-15);
    }
}

TEST_CASE("heisenberg operator in the eigenbasis reproduces v(t)")
{
    std::mt19937_64 rng(15);
    const Matrix h = oracle_ref::random_hermitian(rng, 4);
    const Matrix v = oracle_ref::random_hermitian(rng, 4);
    const SystemHamiltonian hs(h);
    const HeisenbergOperator op(v, hs);
    for (double t : {0.3, 1.7}) {
        const Matrix comp = hs.from_eigenbasis(op.at(t));
        CHECK(ops::max_abs(comp - oracle_ref::heisenberg(v, h, t)) <= 1e-12);
    }
}

TEST_CASE("propagator is the matrix exponential")
{
    std::mt19937_64 rng(16);
    const Matrix h = oracle_ref::random_hermitian(rng, 3);
    const SystemHamiltonian hs(h);
    CHECK(ops::max_abs(hs.propagator(0.8) - oracle_ref::expm(Complex{0.0, -0.8} * h)) <= 1e-12);
}

TEST_CASE("non-Hermitian Hamiltonian is rejected")
{
    Matrix h = ops::pauli_x();
    h(0, 1) = Complex{1.0, 0.5};
    CHECK_THROWS_AS(SystemHamiltonian{h}, std::invalid_argument);
}

TEST_CASE("partial trace matches an explicit index sum")
{
    std::mt19937_64 rng(17);
    const Matrix total = oracle_ref::random_density(rng, 6);
    const DensityOperator red = partial_trace_bath(total, 2, 3);
    CHECK(ops::max_abs(red.matrix() - oracle_ref::partial_trace_second(total, 2, 3)) <= 1e-15);
    CHECK(std::abs(red.matrix().trace() - total.trace()) <= 1e-15);
}

TEST_CASE("partial trace of a product state returns the system factor")
{
    std::mt19937_64 rng(18);
    const Matrix rs = oracle_ref::random_density(rng, 2);
    const Matrix rb = oracle_ref::random_density(rng, 4);
    const DensityOperator red = partial_trace_bath(ops::kron(rs, rb), 2, 4);
    CHECK(ops::max_abs(red.matrix() - rs) <= 1e-15);
}

TEST_CASE("hermitize averages element-wise")
{
    std::mt19937_64 rng(19);
    const Matrix a = oracle_ref::random_matrix(rng, 3);
    const ops::Hermitized h = ops::hermitize(a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(h.matrix(i, j) - 0.5 * (a(i, j) + std::conj(a(j, i)))) <= 1e-15);
    CHECK(h.deviation > 0.0);
}

TEST_CASE("density operator validation")
{
    Matrix plus = Matrix::Constant(2, 2, 0.5);
    CHECK_NOTHROW(DensityOperator{plus});
    Matrix bad_trace = plus * 1.1;
    CHECK_THROWS_AS(DensityOperator{bad_trace}, std::domain_error);
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.2;
    negative(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityOperator{negative}, std::domain_error);
    Matrix non_herm = plus;
    non_herm(0, 1) = Complex{0.5, 0.1};
    CHECK_THROWS_AS(DensityOperator{non_herm}, std::domain_error);
}

TEST_CASE("error generators must be Hermitian and share a dimension")
{
    CHECK_NOTHROW(ErrorGeneratorSet({ops::pauli_x(), ops::pauli_z()}));
    CHECK_THROWS_AS(ErrorGeneratorSet({ops::pauli_x(), Matrix::Identity(3, 3)}), std::invalid_argument);
    Matrix lower = Matrix::Zero(2, 2);
    lower(1, 0) = 1.0;
    CHECK_THROWS_AS(ErrorGeneratorSet({lower}), std::invalid_argument);
}

TEST_CASE("row-major vectorization round trip")
{
    std::mt19937_64 rng(20);
    const Matrix a = oracle_ref::random_matrix(rng, 3);
    const Vector v = ops::vec_row_major(a);
    CHECK(v(1) == a(0, 1));
    CHECK(v(3) == a(1, 0));
    CHECK(ops::max_abs(ops::unvec_row_major(v, 3, 3) - a) == 0.0);
}
