// operators.hpp - dense complex operators for small Hilbert spaces

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tclk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I_UNIT{0.0, 1.0};

namespace ops {

/// Largest absolute entry; zero for empty matrices.
double max_abs(const Matrix& m);

/// max|A - A^dagger|.
double hermiticity_deviation(const Matrix& m);

bool all_finite(const Matrix& m);

/// AB - BA. Throws std::invalid_argument for non-square or mismatched input.
Matrix commutator(const Matrix& a, const Matrix& b);

/// Hilbert-Schmidt inner product Tr(A^dagger B).
Complex hs_inner(const Matrix& a, const Matrix& b);

struct Hermitized {
    Matrix matrix;
    double deviation{0.0}; // max|A - A^dagger| of the input
};

/// (A + A^dagger) / 2 together with the anti-Hermitian residue that was removed.
Hermitized hermitize(const Matrix& a);

/// Kronecker product, left factor leading.
Matrix kron(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of the Hermitian part of a square matrix.
double min_eigenvalue(const Matrix& m);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// Matrix unit |a><b| of dimension d.
Matrix matrix_unit(int d, int a, int b);

/// Row-major flattening: out(a*cols + b) = m(a, b).
Vector vec_row_major(const Matrix& m);
Matrix unvec_row_major(const Vector& v, int rows, int cols);

} // namespace ops

/// Time-independent system Hamiltonian with its eigendecomposition computed once.
///
/// Energies are sorted ascending (Eigen's convention) and eigenvectors form
/// the columns of a unitary matrix. Construction fails for non-Hermitian input
/// (relative tolerance 1e-12 against the max-norm).
class SystemHamiltonian {
public:
    explicit SystemHamiltonian(Matrix h);

    int dim() const { return static_cast<int>(h_.rows()); }
    const Matrix& matrix() const { return h_; }
    const RealVector& energies() const { return energies_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }

    /// Bohr frequencies w(j,k) = e_j - e_k.
    const Eigen::MatrixXd& bohr_frequencies() const { return bohr_; }

    Matrix to_eigenbasis(const Matrix& op) const;
    Matrix from_eigenbasis(const Matrix& op) const;

    /// exp(-i H t).
    Matrix propagator(double t) const;

    /// U(t) rho U(t)^dagger with U = exp(-i H t).
    Matrix evolve(const Matrix& rho, double t) const;

private:
    Matrix h_;
    RealVector energies_;
    Matrix eigenvectors_;
    Eigen::MatrixXd bohr_;
};

/// v(t) = exp(+iHt) v exp(-iHt), evaluated through eigenbasis phases.
/// Negative t is allowed; t == 0 returns v unchanged.
Matrix interaction_picture(const Matrix& v, const SystemHamiltonian& h, double t);

/// An operator expressed in the eigenbasis of H_s, ready for repeated
/// interaction-picture evaluation.
class HeisenbergOperator {
public:
    HeisenbergOperator(const Matrix& v, const SystemHamiltonian& h);

    /// v(t) in the H_s eigenbasis.
    Matrix at(double t) const;

    const Matrix& eigenbasis_matrix() const { return v_eig_; }
    const Eigen::MatrixXd& bohr_frequencies() const { return bohr_; }

private:
    Matrix v_eig_;
    Eigen::MatrixXd bohr_;
};

/// Hermitian, unit-trace, positive-semidefinite d x d matrix.
class DensityOperator {
public:
    struct Tolerances {
        double hermiticity{1e-12}; // relative to max-norm
        double trace{1e-12};
        double min_eigenvalue{-1e-10};
    };

    /// Validates all invariants; throws std::domain_error on violation.
    explicit DensityOperator(Matrix rho);
    DensityOperator(Matrix rho, const Tolerances& tol);

    /// Wraps numerically produced states without validation.
    static DensityOperator unchecked(Matrix rho);

    int dim() const { return static_cast<int>(rho_.rows()); }
    const Matrix& matrix() const { return rho_; }
    Complex operator()(int i, int j) const { return rho_(i, j); }

    double trace_deviation() const;
    double min_eigenvalue() const;

private:
    struct NoCheck {};
    DensityOperator(Matrix rho, NoCheck) : rho_(std::move(rho)) {}
    Matrix rho_;
};

/// Hermitian coupling operators v_alpha through which the bath acts.
class ErrorGeneratorSet {
public:
    ErrorGeneratorSet() = default;
    explicit ErrorGeneratorSet(std::vector<Matrix> generators);

    std::size_t size() const { return generators_.size(); }
    bool empty() const { return generators_.empty(); }
    int dim() const;
    const Matrix& operator[](std::size_t i) const { return generators_[i]; }
    const std::vector<Matrix>& operators() const { return generators_; }

private:
    std::vector<Matrix> generators_;
};

/// Matrix units |a><b| with flat index a*d + b; orthonormal under Tr(A^dagger B).
class OperatorBasis {
public:
    explicit OperatorBasis(int d) : d_(d) {}
    int dim() const { return d_; }
    int size() const { return d_ * d_; }
    int flat_index(int a, int b) const { return a * d_ + b; }
    Matrix operator()(int a, int b) const { return ops::matrix_unit(d_, a, b); }
    Matrix element(int flat) const { return ops::matrix_unit(d_, flat / d_, flat % d_); }

private:
    int d_;
};

/// Reduced state Tr_b of a (d_sys*d_bath)^2 matrix, system as the leading factor.
DensityOperator partial_trace_bath(const Matrix& total, int d_sys, int d_bath);

} // namespace tclk
