// tcl.hpp - second-order time-convolutionless master equation and its Markov limit

#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tclk/bath.hpp"
#include "tclk/operators.hpp"
#include "tclk/quadrature.hpp"

namespace tclk::tcl {

/// Second-order collision operator for H = H_s + sum_a v_a (x) b_a.
///
/// With the memory operator L_a(t) = int_0^t du chi_aa(u) v_a(-u), where
/// v(t) = exp(iH_s t) v exp(-iH_s t), the collision term is
///
///   C(t) rho = sum_a [L_a rho, v_a] + [v_a, rho L_a^dagger].
///
/// For the markovian bath chi_ab = gamma_ab delta(t) / 2 and the delta carries
/// full weight at the upper limit, so for t > 0
///
///   C rho = 1/2 sum_ab gamma_ab [v_b rho, v_a] + conj(gamma_ab) [v_a, rho v_b].
class Tcl2Generator {
public:
    Tcl2Generator(SystemHamiltonian hamiltonian, ErrorGeneratorSet generators,
                  bath::BathCorrelation bath, quad::Settings quadrature = {});

    const SystemHamiltonian& hamiltonian() const { return hamiltonian_; }
    const ErrorGeneratorSet& generators() const { return generators_; }
    const bath::BathCorrelation& bath() const { return bath_; }
    const quad::Settings& quadrature() const { return quadrature_; }

    /// Same coupling and bath under a different system Hamiltonian.
    Tcl2Generator with_hamiltonian(SystemHamiltonian hamiltonian) const;

    /// L_a(t) in the computational basis. Not defined for the markovian bath.
    Matrix memory_operator(int a, double t) const;

    /// C(t) rho. Throws std::invalid_argument for t < 0 or a dimension mismatch.
    Matrix collision(double t, const Matrix& rho) const;

private:
    SystemHamiltonian hamiltonian_;
    ErrorGeneratorSet generators_;
    bath::BathCorrelation bath_;
    quad::Settings quadrature_;
    std::vector<HeisenbergOperator> heisenberg_;
};

/// Dissipator 1/2 sum_ab gamma_ab ([v_a rho, v_b] + [v_a, rho v_b]) together with H_s.
class LindbladGenerator {
public:
    LindbladGenerator(SystemHamiltonian hamiltonian, ErrorGeneratorSet generators, Matrix gamma);

    const SystemHamiltonian& hamiltonian() const { return hamiltonian_; }
    const ErrorGeneratorSet& generators() const { return generators_; }
    const Matrix& rates() const { return gamma_; }

    LindbladGenerator with_hamiltonian(SystemHamiltonian hamiltonian) const;

    Matrix dissipator(const Matrix& rho) const;

private:
    SystemHamiltonian hamiltonian_;
    ErrorGeneratorSet generators_;
    Matrix gamma_;
};

Matrix collision_tcl2(const Tcl2Generator& generator, double t, const DensityOperator& rho);

Matrix lindblad_apply(const LindbladGenerator& generator, const DensityOperator& rho);

/// Markov limit of a TCL2 generator built on the markovian bath. The returned
/// rate matrix is gamma^T, which equals gamma for real rates; with it the
/// dissipator reproduces collision(t > 0) exactly.
LindbladGenerator reduce_to_lindblad(const Tcl2Generator& generator);

struct StepDiagnostics {
    double trace_deviation{0.0};
    double hermiticity_deviation{0.0};
    double min_eigenvalue{0.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityOperator> states;
    std::vector<StepDiagnostics> diagnostics;
    long steps_accepted{0};
    long steps_rejected{0};

    std::size_t size() const { return times.size(); }
    double max_trace_deviation() const;
    double max_hermiticity_deviation() const;
    double min_eigenvalue() const;
};

/// H_s replaced by `hamiltonian` from time `start` until the next segment.
struct ControlSegment {
    double start{0.0};
    Matrix hamiltonian;
};

struct IntegratorSettings {
    double tolerance{1e-10};     // local error, mixed absolute/relative per entry
    double initial_step{1e-2};
    double min_step{1e-12};
    double max_step{0.0};        // 0 disables the cap
    long max_steps{5'000'000};
    double trace_abort{1e-8};
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double time)
        : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time)
    {
    }
    double time() const { return time_; }

private:
    double time_;
};

/// Integrates d rho/dt = -i[H_s, rho] + C(t) rho with an embedded
/// Dormand-Prince 5(4) pair, landing exactly on every grid point and control
/// boundary. The grid must start at 0 and increase strictly.
Trajectory integrate(const Tcl2Generator& generator, const DensityOperator& rho0,
                     std::span<const double> grid, std::span<const ControlSegment> controls = {},
                     const IntegratorSettings& settings = {});

Trajectory integrate(const LindbladGenerator& generator, const DensityOperator& rho0,
                     std::span<const double> grid, std::span<const ControlSegment> controls = {},
                     const IntegratorSettings& settings = {});

/// n_points equally spaced times on [0, t_max].
std::vector<double> uniform_grid(double t_max, int n_points);

/// Columns: t, re_i_j, im_i_j for every element in row-major order, trace_dev, min_eig.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

} // namespace tclk::tcl
