// operators.cpp - dense complex operators for small Hilbert spaces

#include "tclk/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tclk {

namespace ops {

double max_abs(const Matrix& m)
{
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double hermiticity_deviation(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("hermiticity_deviation: matrix is not square");
    }
    return max_abs(m - m.adjoint());
}

bool all_finite(const Matrix& m)
{
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

Matrix commutator(const Matrix& a, const Matrix& b)
{
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw std::invalid_argument("commutator: operands must be square with equal dimension");
    }
    return a * b - b * a;
}

Complex hs_inner(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("hs_inner: dimension mismatch");
    }
    // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij
    return a.conjugate().cwiseProduct(b).sum();
}

Hermitized hermitize(const Matrix& a)
{
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("hermitize: matrix is not square");
    }
    Hermitized out;
    out.deviation = hermiticity_deviation(a);
    out.matrix = 0.5 * (a + a.adjoint());
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double min_eigenvalue(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("min_eigenvalue: matrix is not square");
    }
    if (m.size() == 0) return 0.0;
    const Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Matrix pauli_x()
{
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix pauli_y()
{
    Matrix m(2, 2);
    m << Complex{0.0, 0.0}, Complex{0.0, -1.0}, Complex{0.0, 1.0}, Complex{0.0, 0.0};
    return m;
}

Matrix pauli_z()
{
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix matrix_unit(int d, int a, int b)
{
    if (a < 0 || b < 0 || a >= d || b >= d) {
        throw std::out_of_range("matrix_unit: index outside dimension");
    }
    Matrix m = Matrix::Zero(d, d);
    m(a, b) = 1.0;
    return m;
}

Vector vec_row_major(const Matrix& m)
{
    Vector v(m.size());
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            v(a * m.cols() + b) = m(a, b);
        }
    }
    return v;
}

Matrix unvec_row_major(const Vector& v, int rows, int cols)
{
    if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
        throw std::invalid_argument("unvec_row_major: size mismatch");
    }
    Matrix m(rows, cols);
    for (int a = 0; a < rows; ++a) {
        for (int b = 0; b < cols; ++b) {
            m(a, b) = v(a * cols + b);
        }
    }
    return m;
}

} // namespace ops

namespace {

void require_hermitian(const Matrix& m, double rel_tol, const char* what)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
    if (!ops::all_finite(m)) {
        throw std::invalid_argument(std::string(what) + ": non-finite entries");
    }
    const double scale = std::max(ops::max_abs(m), 1e-300);
    const double dev = ops::hermiticity_deviation(m);
    if (dev > rel_tol * scale) {
        throw std::invalid_argument(std::string(what) + ": not Hermitian (max|A - A^dagger| = " +
                                    std::to_string(dev) + ")");
    }
}

} // namespace

SystemHamiltonian::SystemHamiltonian(Matrix h) : h_(std::move(h))
{
    require_hermitian(h_, 1e-12, "SystemHamiltonian");
    h_ = 0.5 * (h_ + h_.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h_);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("SystemHamiltonian: eigendecomposition failed");
    }
    energies_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    const int d = dim();
    bohr_.resize(d, d);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) bohr_(j, k) = energies_(j) - energies_(k);
    }
}

Matrix SystemHamiltonian::to_eigenbasis(const Matrix& op) const
{
    return eigenvectors_.adjoint() * op * eigenvectors_;
}

Matrix SystemHamiltonian::from_eigenbasis(const Matrix& op) const
{
    return eigenvectors_ * op * eigenvectors_.adjoint();
}

Matrix SystemHamiltonian::propagator(double t) const
{
    Vector phases(dim());
    for (int j = 0; j < dim(); ++j) phases(j) = std::exp(Complex{0.0, -energies_(j) * t});
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

Matrix SystemHamiltonian::evolve(const Matrix& rho, double t) const
{
    const Matrix u = propagator(t);
    return u * rho * u.adjoint();
}

HeisenbergOperator::HeisenbergOperator(const Matrix& v, const SystemHamiltonian& h)
    : v_eig_(h.to_eigenbasis(v)), bohr_(h.bohr_frequencies())
{
    if (v.rows() != h.dim() || v.cols() != h.dim()) {
        throw std::invalid_argument("HeisenbergOperator: dimension mismatch with H_s");
    }
}

Matrix HeisenbergOperator::at(double t) const
{
    if (t == 0.0) return v_eig_;
    Matrix out(v_eig_.rows(), v_eig_.cols());
    for (Eigen::Index j = 0; j < out.rows(); ++j) {
        for (Eigen::Index k = 0; k < out.cols(); ++k) {
            out(j, k) = v_eig_(j, k) * std::exp(Complex{0.0, bohr_(j, k) * t});
        }
    }
    return out;
}

Matrix interaction_picture(const Matrix& v, const SystemHamiltonian& h, double t)
{
    if (t == 0.0) {
        if (v.rows() != h.dim() || v.cols() != h.dim()) {
            throw std::invalid_argument("interaction_picture: dimension mismatch with H_s");
        }
        return v;
    }
    return h.from_eigenbasis(HeisenbergOperator(v, h).at(t));
}

DensityOperator::DensityOperator(Matrix rho) : DensityOperator(std::move(rho), Tolerances{}) {}

DensityOperator::DensityOperator(Matrix rho, const Tolerances& tol) : rho_(std::move(rho))
{
    try {
        require_hermitian(rho_, tol.hermiticity, "DensityOperator");
    } catch (const std::invalid_argument& e) {
        throw std::domain_error(e.what());
    }
    if (trace_deviation() > tol.trace) {
        throw std::domain_error("DensityOperator: trace deviates from 1 by " +
                                std::to_string(trace_deviation()));
    }
    const double lam = min_eigenvalue();
    if (lam < tol.min_eigenvalue) {
        throw std::domain_error("DensityOperator: negative eigenvalue " + std::to_string(lam));
    }
}

DensityOperator DensityOperator::unchecked(Matrix rho)
{
    return DensityOperator(std::move(rho), NoCheck{});
}

double DensityOperator::trace_deviation() const
{
    return std::abs(rho_.trace() - Complex{1.0, 0.0});
}

double DensityOperator::min_eigenvalue() const
{
    return ops::min_eigenvalue(rho_);
}

ErrorGeneratorSet::ErrorGeneratorSet(std::vector<Matrix> generators)
    : generators_(std::move(generators))
{
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        const Matrix& v = generators_[i];
        if (v.rows() != v.cols() || v.rows() == 0) {
            throw std::invalid_argument("ErrorGeneratorSet: generator " + std::to_string(i) +
                                        " is not square");
        }
        if (v.rows() != generators_.front().rows()) {
            throw std::invalid_argument("ErrorGeneratorSet: generators differ in dimension");
        }
        if (ops::hermiticity_deviation(v) > 1e-12 * std::max(1.0, ops::max_abs(v))) {
            throw std::invalid_argument("ErrorGeneratorSet: generator " + std::to_string(i) +
                                        " is not Hermitian");
        }
    }
}

int ErrorGeneratorSet::dim() const
{
    return generators_.empty() ? 0 : static_cast<int>(generators_.front().rows());
}

DensityOperator partial_trace_bath(const Matrix& total, int d_sys, int d_bath)
{
    if (d_sys <= 0 || d_bath <= 0) {
        throw std::invalid_argument("partial_trace_bath: dimensions must be positive");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(d_sys) * d_bath;
    if (total.rows() != n || total.cols() != n) {
        throw std::invalid_argument("partial_trace_bath: matrix size does not match d_sys * d_bath");
    }
    Matrix reduced = Matrix::Zero(d_sys, d_sys);
    for (int i = 0; i < d_sys; ++i) {
        for (int j = 0; j < d_sys; ++j) {
            Complex acc{};
            for (int k = 0; k < d_bath; ++k) acc += total(i * d_bath + k, j * d_bath + k);
            reduced(i, j) = acc;
        }
    }
    return DensityOperator::unchecked(std::move(reduced));
}

} // namespace tclk
