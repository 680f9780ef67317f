// tcl.cpp - second-order time-convolutionless master equation

#include "tclk/tcl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <ostream>

namespace tclk::tcl {

namespace {

void check_dims(const SystemHamiltonian& h, const ErrorGeneratorSet& generators)
{
    if (!generators.empty() && generators.dim() != h.dim()) {
        throw std::invalid_argument("generator dimension does not match H_s");
    }
}

void check_rho(const Matrix& rho, int d)
{
    if (rho.rows() != d || rho.cols() != d) {
        throw std::invalid_argument("density matrix dimension does not match H_s");
    }
}

Matrix markov_collision(const ErrorGeneratorSet& v, const Matrix& gamma, const Matrix& rho)
{
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = 0; b < v.size(); ++b) {
            const Complex g = gamma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (g == Complex{}) continue;
            out += 0.5 * g * ops::commutator(v[b] * rho, v[a]);
            out += 0.5 * std::conj(g) * ops::commutator(v[a], rho * v[b]);
        }
    }
    return out;
}

StepDiagnostics diagnose(const Matrix& rho)
{
    StepDiagnostics d;
    d.trace_deviation = std::abs(rho.trace() - Complex{1.0, 0.0});
    d.hermiticity_deviation = ops::hermiticity_deviation(rho);
    d.min_eigenvalue = ops::min_eigenvalue(rho);
    return d;
}

void check_grid(std::span<const double> grid)
{
    if (grid.empty()) throw std::invalid_argument("integrate: time grid is empty");
    if (grid.front() != 0.0) throw std::invalid_argument("integrate: time grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("integrate: time grid must be strictly increasing");
        }
    }
}

using Rhs = std::function<Matrix(double, const Matrix&)>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Builds the right-hand side active from a given time onward.
using RhsFactory = std::function<Rhs(const Matrix* hamiltonian)>;

Trajectory run(const RhsFactory& factory, const DensityOperator& rho0, std::span<const double> grid,
               std::span<const ControlSegment> controls, const IntegratorSettings& settings)
{
    check_grid(grid);
    std::vector<ControlSegment> segments(controls.begin(), controls.end());
    std::sort(segments.begin(), segments.end(),
              [](const ControlSegment& x, const ControlSegment& y) { return x.start < y.start; });
    for (const ControlSegment& s : segments) {
        if (!(s.start >= 0.0)) throw std::invalid_argument("integrate: control start must be >= 0");
    }

    // Active right-hand side for the segment containing t (base H_s before the first start).
    std::size_t next_segment = 0;
    Rhs rhs = factory(nullptr);
    while (next_segment < segments.size() && segments[next_segment].start <= 0.0) {
        rhs = factory(&segments[next_segment].hamiltonian);
        ++next_segment;
    }

    Trajectory traj;
    traj.times.reserve(grid.size());
    traj.states.reserve(grid.size());
    traj.diagnostics.reserve(grid.size());

    Matrix y = rho0.matrix();
    double t = 0.0;
    auto record = [&](double time) {
        StepDiagnostics d = diagnose(y);
        if (d.trace_deviation > settings.trace_abort) {
            throw IntegrationError("trace drift " + std::to_string(d.trace_deviation) +
                                       " exceeds abort threshold",
                                   time);
        }
        traj.times.push_back(time);
        traj.states.push_back(DensityOperator::unchecked(y));
        traj.diagnostics.push_back(d);
    };
    record(0.0);

    double h = settings.initial_step;
    Matrix k1 = rhs(t, y);
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        const double target = grid[gi];
        while (t < target) {
            double stop = target;
            bool at_boundary = false;
            if (next_segment < segments.size() && segments[next_segment].start < stop) {
                stop = segments[next_segment].start;
                at_boundary = true;
            }
            if (settings.max_step > 0.0) h = std::min(h, settings.max_step);
            bool lands = false;
            double hs = h;
            if (t + h >= stop || stop - (t + h) < 1e-12 * std::max(1.0, std::abs(stop))) {
                hs = stop - t;
                lands = true;
            }
            if (traj.steps_accepted + traj.steps_rejected >= settings.max_steps) {
                throw IntegrationError("step budget exhausted", t);
            }

            const Matrix k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
            const Matrix k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
            const Matrix k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            const Matrix k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Matrix k6 =
                rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Matrix y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Matrix k7 = rhs(t + hs, y_new);
            const Matrix err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double err_norm = 0.0;
            for (Eigen::Index i = 0; i < err.size(); ++i) {
                const double scale =
                    settings.tolerance *
                    (1.0 + std::max(std::abs(y.data()[i]), std::abs(y_new.data()[i])));
                err_norm = std::max(err_norm, std::abs(err.data()[i]) / scale);
            }
            if (!std::isfinite(err_norm)) throw IntegrationError("non-finite state", t);

            if (err_norm <= 1.0) {
                t = lands ? stop : t + hs;
                y = y_new;
                k1 = k7;
                ++traj.steps_accepted;
                if (lands && at_boundary) {
                    rhs = factory(&segments[next_segment].hamiltonian);
                    ++next_segment;
                    k1 = rhs(t, y);
                }
                // A step shortened to land on a stop keeps the previous proposal.
                if (!lands) {
                    const double grow = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
                    h *= std::clamp(grow, 0.2, 5.0);
                }
            } else {
                ++traj.steps_rejected;
                h = hs * std::clamp(0.9 * std::pow(err_norm, -0.25), 0.1, 0.5);
                if (h < settings.min_step) throw IntegrationError("step size collapse", t);
            }
        }
        record(target);
    }
    return traj;
}

} // namespace

Tcl2Generator::Tcl2Generator(SystemHamiltonian hamiltonian, ErrorGeneratorSet generators,
                             bath::BathCorrelation bath, quad::Settings quadrature)
    : hamiltonian_(std::move(hamiltonian)), generators_(std::move(generators)),
      bath_(std::move(bath)), quadrature_(quadrature)
{
    check_dims(hamiltonian_, generators_);
    if (bath_.generator_count() != static_cast<int>(generators_.size())) {
        throw std::invalid_argument("Tcl2Generator: bath correlation covers " +
                                    std::to_string(bath_.generator_count()) +
                                    " generators but " + std::to_string(generators_.size()) +
                                    " were given");
    }
    heisenberg_.reserve(generators_.size());
    for (const Matrix& v : generators_.operators()) heisenberg_.emplace_back(v, hamiltonian_);
}

Tcl2Generator Tcl2Generator::with_hamiltonian(SystemHamiltonian hamiltonian) const
{
    return Tcl2Generator(std::move(hamiltonian), generators_, bath_, quadrature_);
}

Matrix Tcl2Generator::memory_operator(int a, double t) const
{
    if (bath_.is_markovian()) {
        throw std::logic_error("memory_operator: undefined for the markovian bath");
    }
    const HeisenbergOperator& v = heisenberg_.at(static_cast<std::size_t>(a));
    const Matrix& ve = v.eigenbasis_matrix();
    const Eigen::MatrixXd& w = v.bohr_frequencies();
    // v(-u)_jk = V_jk exp(-i w_jk u); identical frequencies share one integral.
    std::map<double, Complex> integrals;
    Matrix lam = Matrix::Zero(ve.rows(), ve.cols());
    for (Eigen::Index j = 0; j < ve.rows(); ++j) {
        for (Eigen::Index k = 0; k < ve.cols(); ++k) {
            if (ve(j, k) == Complex{}) continue;
            auto it = integrals.find(w(j, k));
            if (it == integrals.end()) {
                it = integrals.emplace(w(j, k), bath_.damped_integral(a, w(j, k), t, quadrature_)).first;
            }
            lam(j, k) = ve(j, k) * it->second;
        }
    }
    return hamiltonian_.from_eigenbasis(lam);
}

Matrix Tcl2Generator::collision(double t, const Matrix& rho) const
{
    if (!(t >= 0.0)) throw std::invalid_argument("collision: t must be >= 0");
    check_rho(rho, hamiltonian_.dim());
    if (t == 0.0) return Matrix::Zero(rho.rows(), rho.cols());
    if (bath_.is_markovian()) return markov_collision(generators_, bath_.rates(), rho);

    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < generators_.size(); ++a) {
        const Matrix lam = memory_operator(static_cast<int>(a), t);
        const Matrix& v = generators_[a];
        out += ops::commutator(lam * rho, v) + ops::commutator(v, rho * lam.adjoint());
    }
    return out;
}

LindbladGenerator::LindbladGenerator(SystemHamiltonian hamiltonian, ErrorGeneratorSet generators,
                                     Matrix gamma)
    : hamiltonian_(std::move(hamiltonian)), generators_(std::move(generators)),
      gamma_(std::move(gamma))
{
    check_dims(hamiltonian_, generators_);
    if (gamma_.rows() != static_cast<Eigen::Index>(generators_.size()) ||
        gamma_.cols() != gamma_.rows()) {
        throw std::invalid_argument("LindbladGenerator: rate matrix must be n_gen x n_gen");
    }
    // Validates Hermiticity and positivity.
    (void)bath::chi_markovian(gamma_.size() == 0 ? Matrix::Zero(1, 1) : gamma_);
}

LindbladGenerator LindbladGenerator::with_hamiltonian(SystemHamiltonian hamiltonian) const
{
    return LindbladGenerator(std::move(hamiltonian), generators_, gamma_);
}

Matrix LindbladGenerator::dissipator(const Matrix& rho) const
{
    check_rho(rho, hamiltonian_.dim());
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < generators_.size(); ++a) {
        for (std::size_t b = 0; b < generators_.size(); ++b) {
            const Complex g = gamma_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (g == Complex{}) continue;
            const Matrix& va = generators_[a];
            const Matrix& vb = generators_[b];
            out += 0.5 * g * (ops::commutator(va * rho, vb) + ops::commutator(va, rho * vb));
        }
    }
    return out;
}

Matrix collision_tcl2(const Tcl2Generator& generator, double t, const DensityOperator& rho)
{
    return generator.collision(t, rho.matrix());
}

Matrix lindblad_apply(const LindbladGenerator& generator, const DensityOperator& rho)
{
    return generator.dissipator(rho.matrix());
}

LindbladGenerator reduce_to_lindblad(const Tcl2Generator& generator)
{
    if (!generator.bath().is_markovian()) {
        throw std::invalid_argument("reduce_to_lindblad: bath correlation is not markovian");
    }
    return LindbladGenerator(generator.hamiltonian(), generator.generators(),
                             generator.bath().rates().transpose());
}

double Trajectory::max_trace_deviation() const
{
    double m = 0.0;
    for (const auto& d : diagnostics) m = std::max(m, d.trace_deviation);
    return m;
}

double Trajectory::max_hermiticity_deviation() const
{
    double m = 0.0;
    for (const auto& d : diagnostics) m = std::max(m, d.hermiticity_deviation);
    return m;
}

double Trajectory::min_eigenvalue() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& d : diagnostics) m = std::min(m, d.min_eigenvalue);
    return m;
}

Trajectory integrate(const Tcl2Generator& generator, const DensityOperator& rho0,
                     std::span<const double> grid, std::span<const ControlSegment> controls,
                     const IntegratorSettings& settings)
{
    check_rho(rho0.matrix(), generator.hamiltonian().dim());
    RhsFactory factory = [&generator](const Matrix* h) -> Rhs {
        auto gen = std::make_shared<Tcl2Generator>(
            h ? generator.with_hamiltonian(SystemHamiltonian(*h)) : generator);
        // The markovian C(t) is constant for t > 0; its right limit is used at t = 0.
        const bool markov = gen->bath().is_markovian();
        return [gen, markov](double t, const Matrix& rho) {
            const Matrix& hs = gen->hamiltonian().matrix();
            const double tc = (markov && t == 0.0) ? std::numeric_limits<double>::min() : t;
            return Matrix(-I_UNIT * (hs * rho - rho * hs) + gen->collision(tc, rho));
        };
    };
    return run(factory, rho0, grid, controls, settings);
}

Trajectory integrate(const LindbladGenerator& generator, const DensityOperator& rho0,
                     std::span<const double> grid, std::span<const ControlSegment> controls,
                     const IntegratorSettings& settings)
{
    check_rho(rho0.matrix(), generator.hamiltonian().dim());
    RhsFactory factory = [&generator](const Matrix* h) -> Rhs {
        auto gen = std::make_shared<LindbladGenerator>(
            h ? generator.with_hamiltonian(SystemHamiltonian(*h)) : generator);
        return [gen](double, const Matrix& rho) {
            const Matrix& hs = gen->hamiltonian().matrix();
            return Matrix(-I_UNIT * (hs * rho - rho * hs) + gen->dissipator(rho));
        };
    };
    return run(factory, rho0, grid, controls, settings);
}

std::vector<double> uniform_grid(double t_max, int n_points)
{
    if (n_points < 1) throw std::invalid_argument("uniform_grid: need at least one point");
    if (!(t_max >= 0.0)) throw std::invalid_argument("uniform_grid: t_max must be >= 0");
    if (n_points == 1) return {0.0};
    if (t_max == 0.0) throw std::invalid_argument("uniform_grid: t_max must be > 0 for several points");
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) grid[static_cast<std::size_t>(i)] = t_max * i / (n_points - 1);
    return grid;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory)
{
    const int d = trajectory.states.empty() ? 0 : trajectory.states.front().dim();
    os << "t";
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) os << ",re_" << i << "_" << j << ",im_" << i << "_" << j;
    }
    os << ",trace_dev,min_eig\n";
    char buf[40];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    };
    for (std::size_t r = 0; r < trajectory.size(); ++r) {
        num(trajectory.times[r]);
        const Matrix& rho = trajectory.states[r].matrix();
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                os << ',';
                num(rho(i, j).real());
                os << ',';
                num(rho(i, j).imag());
            }
        }
        os << ',';
        num(trajectory.diagnostics[r].trace_deviation);
        os << ',';
        num(trajectory.diagnostics[r].min_eigenvalue);
        os << '\n';
    }
}

} // namespace tclk::tcl
