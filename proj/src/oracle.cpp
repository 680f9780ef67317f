// oracle.cpp - exact evolution of a small system coupled to truncated bosonic modes

#include "tclk/oracle.hpp"

#include <cmath>
#include <string>

namespace tclk::oracle {

namespace {

// Identity factors around a single-mode operator in the multi-mode Fock space.
Matrix embed(const Matrix& op, std::size_t k, std::size_t n_modes, int levels)
{
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t j = 0; j < n_modes; ++j) {
        out = ops::kron(out, j == k ? op : Matrix(Matrix::Identity(levels, levels)));
    }
    return out;
}

Matrix annihilation(int levels)
{
    Matrix a = Matrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

long long product_dim(long long d, std::size_t n_modes, int n_max)
{
    long long out = d;
    for (std::size_t k = 0; k < n_modes; ++k) {
        out *= n_max + 1;
        if (out > (1LL << 40)) break;
    }
    return out;
}

} // namespace

TruncatedBath::TruncatedBath(std::vector<OracleMode> modes, int n_max, double temperature)
    : modes_(std::move(modes)), n_max_(n_max), temperature_(temperature)
{
    if (modes_.empty()) throw std::invalid_argument("oracle: at least one mode is required");
    if (n_max < 1) throw std::invalid_argument("oracle: n_max must be >= 1");
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("oracle: temperature must be finite and >= 0");
    }
    const std::size_t n_gen = modes_.front().g.size();
    if (n_gen == 0) throw std::invalid_argument("oracle: modes need at least one coupling");
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const OracleMode& m = modes_[k];
        if (!(m.omega > 0.0) || !std::isfinite(m.omega)) {
            throw std::invalid_argument("oracle: mode " + std::to_string(k) +
                                        " needs a positive finite frequency");
        }
        if (m.g.size() != n_gen) {
            throw std::invalid_argument("oracle: all modes need the same number of couplings");
        }
        RealVector w = RealVector::Zero(n_max + 1);
        double tail = 0.0;
        if (temperature == 0.0) {
            w(0) = 1.0;
        } else {
            const double x = m.omega / temperature;
            for (int n = 0; n <= n_max; ++n) w(n) = std::exp(-x * n);
            // Geometric tail relative to the full partition function.
            tail = std::exp(-x * (n_max + 1));
            w /= w.sum();
        }
        if (!(tail < kMaxDiscardedWeight)) {
            throw TruncationError("oracle: n_max = " + std::to_string(n_max) + " discards thermal weight " +
                                  std::to_string(tail) + " of mode " + std::to_string(k));
        }
        weights_.push_back(std::move(w));
        discarded_.push_back(tail);
    }
}

int TruncatedBath::generator_count() const { return static_cast<int>(modes_.front().g.size()); }

int TruncatedBath::dim() const
{
    const long long d = product_dim(1, modes_.size(), n_max_);
    if (d > TotalSystem::kMaxDim) {
        throw std::invalid_argument("oracle: bath dimension " + std::to_string(d) + " exceeds the guard");
    }
    return static_cast<int>(d);
}

TruncatedBath TruncatedBath::with_n_max(int n_max) const
{
    return TruncatedBath(modes_, n_max, temperature_);
}

RealVector TruncatedBath::hamiltonian_diagonal() const
{
    const int levels = n_max_ + 1;
    RealVector out = RealVector::Zero(dim());
    // Mode 0 is the most significant digit of the Fock index.
    for (Eigen::Index idx = 0; idx < out.size(); ++idx) {
        Eigen::Index rest = idx;
        double e = 0.0;
        for (std::size_t k = modes_.size(); k-- > 0;) {
            e += modes_[k].omega * static_cast<double>(rest % levels);
            rest /= levels;
        }
        out(idx) = e;
    }
    return out;
}

Matrix TruncatedBath::coupling_operator(int generator) const
{
    if (generator < 0 || generator >= generator_count()) {
        throw std::out_of_range("oracle: generator index out of range");
    }
    const int levels = n_max_ + 1;
    const Matrix a = annihilation(levels);
    Matrix out = Matrix::Zero(dim(), dim());
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const Complex g = modes_[k].g[static_cast<std::size_t>(generator)];
        if (g == Complex{}) continue;
        out += embed(g * a.adjoint() + std::conj(g) * a, k, modes_.size(), levels);
    }
    return out;
}

RealVector TruncatedBath::thermal_state_diagonal() const
{
    RealVector out = RealVector::Ones(1);
    for (const RealVector& w : weights_) {
        RealVector next(out.size() * w.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            for (Eigen::Index j = 0; j < w.size(); ++j) next(i * w.size() + j) = out(i) * w(j);
        }
        out = std::move(next);
    }
    return out;
}

TotalSystem::TotalSystem(Matrix system_hamiltonian, ErrorGeneratorSet generators, TruncatedBath bath)
    : h_s_(std::move(system_hamiltonian)), generators_(std::move(generators)), bath_(std::move(bath))
{
    const int d = static_cast<int>(h_s_.rows());
    if (d == 0 || h_s_.cols() != d) throw std::invalid_argument("oracle: H_s must be square");
    const double scale = std::max(1.0, ops::max_abs(h_s_));
    if (ops::hermiticity_deviation(h_s_) > 1e-12 * scale) {
        throw std::invalid_argument("oracle: H_s is not Hermitian");
    }
    if (static_cast<int>(generators_.size()) != bath_.generator_count()) {
        throw std::invalid_argument("oracle: generator count does not match the mode couplings");
    }
    if (!generators_.empty() && generators_.dim() != d) {
        throw std::invalid_argument("oracle: generator dimension does not match H_s");
    }
    const long long total = product_dim(d, bath_.modes().size(), bath_.n_max());
    if (total > kMaxDim) {
        throw std::invalid_argument("oracle: combined dimension " + std::to_string(total) +
                                    " exceeds the guard " + std::to_string(kMaxDim));
    }
    const int nb = bath_.dim();
    h_ = ops::kron(h_s_, Matrix::Identity(nb, nb));
    const RealVector hb = bath_.hamiltonian_diagonal();
    for (int s = 0; s < d; ++s) {
        for (int j = 0; j < nb; ++j) h_(s * nb + j, s * nb + j) += hb(j);
    }
    for (std::size_t a = 0; a < generators_.size(); ++a) {
        h_ += ops::kron(generators_[a], bath_.coupling_operator(static_cast<int>(a)));
    }
    if (ops::hermiticity_deviation(h_) > 1e-12 * std::max(1.0, ops::max_abs(h_))) {
        throw std::logic_error("oracle: assembled total Hamiltonian is not Hermitian");
    }
}

TotalSystem TotalSystem::with_n_max(int n_max) const
{
    return TotalSystem(h_s_, generators_, bath_.with_n_max(n_max));
}

namespace {

struct RawEvolution {
    std::vector<Matrix> reduced;
    double max_trace_deviation{0.0};
    double max_purity_drift{0.0};
};

RawEvolution evolve_raw(const TotalSystem& total, const DensityOperator& rho_s0,
                        std::span<const double> grid)
{
    const int d = total.system_dim();
    const int nb = total.bath().dim();
    const int big = total.dim();

    // rho_s0 (x) rho_b as a weighted sum of product vectors.
    Eigen::SelfAdjointEigenSolver<Matrix> sys(rho_s0.matrix());
    const RealVector bath_w = total.bath().thermal_state_diagonal();
    std::vector<double> weights;
    std::vector<Vector> vectors;
    for (int i = 0; i < d; ++i) {
        const double ls = sys.eigenvalues()(i);
        if (ls <= 0.0) continue;
        for (int j = 0; j < nb; ++j) {
            const double w = ls * bath_w(j);
            if (w <= 0.0) continue;
            Vector psi = Vector::Zero(big);
            for (int s = 0; s < d; ++s) psi(s * nb + j) = sys.eigenvectors()(s, i);
            weights.push_back(w);
            vectors.push_back(std::move(psi));
        }
    }
    const int r = static_cast<int>(vectors.size());
    Matrix psi0(big, r);
    for (int k = 0; k < r; ++k) psi0.col(k) = vectors[static_cast<std::size_t>(k)];
    const RealVector w = Eigen::Map<const RealVector>(weights.data(), r);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(total.hamiltonian());
    if (solver.info() != Eigen::Success) throw std::runtime_error("oracle: diagonalization failed");
    const Matrix& e = solver.eigenvectors();
    const RealVector& energies = solver.eigenvalues();
    const Matrix coeff = e.adjoint() * psi0;

    auto purity = [&](const Matrix& psi) {
        const Matrix gram = psi.adjoint() * psi;
        double acc = 0.0;
        for (int k = 0; k < r; ++k) {
            for (int l = 0; l < r; ++l) acc += w(k) * w(l) * std::norm(gram(k, l));
        }
        return acc;
    };
    const double purity0 = purity(psi0);

    RawEvolution out;
    for (double t : grid) {
        Matrix phased = coeff;
        for (int n = 0; n < big; ++n) phased.row(n) *= std::exp(Complex{0.0, -energies(n) * t});
        const Matrix psi = e * phased;
        Matrix rho = Matrix::Zero(d, d);
        for (int k = 0; k < r; ++k) {
            // Column k reshaped to d x nb, system index leading.
            const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                m(psi.col(k).data(), d, nb);
            rho += w(k) * (m * m.adjoint());
        }
        out.max_trace_deviation = std::max(out.max_trace_deviation, std::abs(rho.trace() - 1.0));
        out.max_purity_drift = std::max(out.max_purity_drift, std::abs(purity(psi) - purity0));
        out.reduced.push_back(std::move(rho));
    }
    return out;
}

} // namespace

tcl::Trajectory evolve_exact(const TotalSystem& total, const DensityOperator& rho_s0,
                             std::span<const double> grid, const ExactOptions& options,
                             ExactDiagnostics* diagnostics)
{
    if (rho_s0.dim() != total.system_dim()) {
        throw std::invalid_argument("evolve_exact: initial state dimension mismatch");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw std::invalid_argument("evolve_exact: grid must be finite and strictly increasing");
        }
    }
    RawEvolution raw = evolve_raw(total, rho_s0, grid);
    if (raw.max_trace_deviation > options.trace_tolerance) {
        throw std::runtime_error("evolve_exact: reduced trace drifted by " +
                                 std::to_string(raw.max_trace_deviation));
    }
    if (raw.max_purity_drift > options.purity_tolerance) {
        throw std::runtime_error("evolve_exact: total purity drifted by " +
                                 std::to_string(raw.max_purity_drift));
    }

    ExactDiagnostics diag;
    diag.max_trace_deviation = raw.max_trace_deviation;
    diag.max_purity_drift = raw.max_purity_drift;
    if (options.check_convergence) {
        // Double n_max, or enlarge as far as the dimension guard allows.
        const int d = total.system_dim();
        const std::size_t n_modes = total.bath().modes().size();
        int check = 2 * total.bath().n_max();
        while (check > total.bath().n_max() && product_dim(d, n_modes, check) > TotalSystem::kMaxDim) --check;
        if (check == total.bath().n_max()) {
            throw TruncationError("evolve_exact: no room under the dimension guard for the n_max check");
        }
        const RawEvolution ref = evolve_raw(total.with_n_max(check), rho_s0, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            diag.convergence_delta =
                std::max(diag.convergence_delta, ops::max_abs(ref.reduced[i] - raw.reduced[i]));
        }
        diag.check_n_max = check;
        if (!(diag.convergence_delta < options.convergence_tolerance)) {
            throw TruncationError("evolve_exact: n_max = " + std::to_string(total.bath().n_max()) +
                                  " not converged (change " + std::to_string(diag.convergence_delta) +
                                  " at n_max = " + std::to_string(check) + ")");
        }
    }
    if (diagnostics) *diagnostics = diag;

    tcl::Trajectory out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        DensityOperator rho = DensityOperator::unchecked(std::move(raw.reduced[i]));
        tcl::StepDiagnostics sd;
        sd.trace_deviation = rho.trace_deviation();
        sd.hermiticity_deviation = ops::hermiticity_deviation(rho.matrix());
        sd.min_eigenvalue = rho.min_eigenvalue();
        out.times.push_back(grid[i]);
        out.states.push_back(std::move(rho));
        out.diagnostics.push_back(sd);
    }
    return out;
}

namespace {

std::vector<Complex> correlation_truncated(const TruncatedBath& bath, std::span<const double> times)
{
    const Matrix b = bath.coupling_operator(0);
    const RealVector e = bath.hamiltonian_diagonal();
    const RealVector p = bath.thermal_state_diagonal();
    struct Term {
        Complex weight;
        double frequency;
    };
    // Tr[b(t) b rho] = sum_jk b_jk e^{i(E_j - E_k)t} b_kj p_j
    std::vector<Term> terms;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        if (p(j) == 0.0) continue;
        for (Eigen::Index k = 0; k < b.cols(); ++k) {
            if (b(j, k) == Complex{}) continue;
            terms.push_back({p(j) * b(j, k) * b(k, j), e(j) - e(k)});
        }
    }
    std::vector<Complex> out;
    out.reserve(times.size());
    for (double t : times) {
        Complex acc{};
        for (const Term& term : terms) acc += term.weight * std::exp(Complex{0.0, term.frequency * t});
        out.push_back(acc);
    }
    return out;
}

} // namespace

std::vector<Complex> bath_correlation_exact(const TruncatedBath& bath, std::span<const double> times)
{
    if (bath.generator_count() != 1) {
        throw std::invalid_argument("bath_correlation_exact: single-generator coupling required");
    }
    const std::vector<Complex> values = correlation_truncated(bath, times);
    const std::vector<Complex> check = correlation_truncated(bath.with_n_max(2 * bath.n_max()), times);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(std::abs(check[i] - values[i]) < 1e-9)) {
            throw TruncationError("bath_correlation_exact: n_max = " + std::to_string(bath.n_max()) +
                                  " not converged at t = " + std::to_string(times[i]) + " (change " +
                                  std::to_string(std::abs(check[i] - values[i])) + ")");
        }
    }
    return values;
}

Complex bath_correlation_exact(const TruncatedBath& bath, double t)
{
    return bath_correlation_exact(bath, std::span<const double>(&t, 1)).front();
}

} // namespace tclk::oracle
