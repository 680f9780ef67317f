// oracle.hpp - exact evolution of a small system coupled to truncated bosonic modes

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "tclk/operators.hpp"
#include "tclk/tcl.hpp"

namespace tclk::oracle {

/// A harmonic mode with one coupling constant per error generator:
/// b_alpha = sum_k g_k,alpha a_k^dagger + conj(g_k,alpha) a_k.
struct OracleMode {
    double omega{0.0};
    std::vector<Complex> g;
};

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fock space truncated at n_max quanta per mode, prepared in the thermal state.
class TruncatedBath {
public:
    static constexpr double kMaxDiscardedWeight = 1e-8;

    TruncatedBath(std::vector<OracleMode> modes, int n_max, double temperature);

    const std::vector<OracleMode>& modes() const { return modes_; }
    int n_max() const { return n_max_; }
    double temperature() const { return temperature_; }
    int generator_count() const;
    int dim() const;

    /// Renormalized thermal populations of mode k, length n_max + 1.
    const RealVector& weights(std::size_t k) const { return weights_[k]; }
    /// Untruncated thermal weight beyond n_max for mode k.
    double discarded_weight(std::size_t k) const { return discarded_[k]; }

    TruncatedBath with_n_max(int n_max) const;

    /// sum_k omega_k a_k^dagger a_k (diagonal).
    RealVector hamiltonian_diagonal() const;
    Matrix coupling_operator(int generator) const;
    /// Diagonal of the product thermal state.
    RealVector thermal_state_diagonal() const;

private:
    std::vector<OracleMode> modes_;
    int n_max_;
    double temperature_;
    std::vector<RealVector> weights_;
    std::vector<double> discarded_;
};

/// H_s (x) I + I (x) H_b + sum_a v_a (x) b_a, system factor leading.
class TotalSystem {
public:
    static constexpr int kMaxDim = 4096;

    TotalSystem(Matrix system_hamiltonian, ErrorGeneratorSet generators, TruncatedBath bath);

    int dim() const { return static_cast<int>(h_.rows()); }
    int system_dim() const { return static_cast<int>(h_s_.rows()); }
    const Matrix& hamiltonian() const { return h_; }
    const Matrix& system_hamiltonian() const { return h_s_; }
    const ErrorGeneratorSet& generators() const { return generators_; }
    const TruncatedBath& bath() const { return bath_; }

    TotalSystem with_n_max(int n_max) const;

private:
    Matrix h_s_;
    ErrorGeneratorSet generators_;
    TruncatedBath bath_;
    Matrix h_;
};

struct ExactOptions {
    bool check_convergence{true};
    double convergence_tolerance{1e-9};
    double trace_tolerance{1e-10};
    double purity_tolerance{1e-10};
};

struct ExactDiagnostics {
    double max_trace_deviation{0.0};
    double max_purity_drift{0.0};
    double convergence_delta{0.0}; // max element change under the n_max check
    int check_n_max{0};            // 0 when the check was skipped
};

/// Reduced trajectory of rho_s0 (x) rho_b under exp(-i H_total t). Throws
/// TruncationError if enlarging n_max moves any reduced element by more than
/// the convergence tolerance, std::runtime_error on trace or purity drift.
tcl::Trajectory evolve_exact(const TotalSystem& total, const DensityOperator& rho_s0,
                             std::span<const double> grid, const ExactOptions& options = {},
                             ExactDiagnostics* diagnostics = nullptr);

/// Tr_b[b(t) b rho_b] for a single-generator bath via exact Heisenberg
/// evolution in the truncated Fock space. Throws TruncationError if doubling
/// n_max changes the value by 1e-9 or more.
Complex bath_correlation_exact(const TruncatedBath& bath, double t);

/// Same on a grid; the truncated operators are built once.
std::vector<Complex> bath_correlation_exact(const TruncatedBath& bath, std::span<const double> times);

} // namespace tclk::oracle
