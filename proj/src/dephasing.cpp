// dephasing.cpp - closed-form single-qubit dephasing channel

#include "tclk/dephasing.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace tclk::dephasing {

DephasingModel::DephasingModel(double splitting_in, bath::BathCorrelation bath_in)
    : splitting(splitting_in), bath(std::move(bath_in))
{
    if (!std::isfinite(splitting)) throw std::invalid_argument("dephasing: splitting must be finite");
    if (bath.generator_count() != 1) {
        throw std::invalid_argument("dephasing: the bath must describe a single generator");
    }
}

SystemHamiltonian DephasingModel::hamiltonian() const
{
    return SystemHamiltonian(0.5 * splitting * ops::pauli_z());
}

ErrorGeneratorSet DephasingModel::generators() const
{
    return ErrorGeneratorSet({ops::pauli_z()});
}

ValidityError::ValidityError(double t, double p)
    : std::domain_error("dephasing: p(t) = " + std::to_string(p) + " outside [0, 1] at t = " +
                        std::to_string(t)),
      t_(t), p_(p)
{
}

double p_of(Complex f) { return 2.0 * f.real() - std::norm(f); }

namespace {

// Rounding may push p a hair below 0 for tiny f.
constexpr double kSlack = 1e-15;

double checked_p(Complex f, double t)
{
    const double p = p_of(f);
    if (!(p >= -kSlack && p <= 1.0 + kSlack)) throw ValidityError(t, p);
    return p;
}

} // namespace

DephasingPoint evaluate(const DephasingModel& model, double t)
{
    if (!(t >= 0.0)) throw std::invalid_argument("dephasing: t must be >= 0");
    DephasingPoint out;
    out.t = t;
    out.f = bath::correlation_f(model.bath, t, 0);
    out.p = checked_p(out.f, t);
    out.coherence = 1.0 - 2.0 * out.p;
    return out;
}

kraus::KrausSet dephasing_kraus_from_f(Complex f, double t)
{
    const double p = checked_p(f, t);
    std::vector<Matrix> k{(Complex{1.0, 0.0} - f) * Matrix::Identity(2, 2),
                          std::sqrt(std::max(p, 0.0)) * ops::pauli_z()};
    return kraus::KrausSet::from_operators(std::move(k), kraus::Picture::interaction, t);
}

kraus::KrausSet dephasing_kraus(const DephasingModel& model, double t)
{
    const DephasingPoint pt = evaluate(model, t);
    return dephasing_kraus_from_f(pt.f, t);
}

DensityOperator dephasing_apply(const DephasingModel& model, double t, const DensityOperator& rho0)
{
    if (rho0.dim() != 2) throw std::invalid_argument("dephasing_apply: qubit state required");
    const DephasingPoint pt = evaluate(model, t);
    Matrix out = rho0.matrix();
    out(0, 1) *= pt.coherence;
    out(1, 0) *= pt.coherence;
    return DensityOperator::unchecked(std::move(out));
}

double validity_limit(const DephasingModel& model, std::span<const double> grid)
{
    double last = 0.0;
    for (double t : grid) {
        try {
            evaluate(model, t);
        } catch (const ValidityError&) {
            return last;
        }
        last = t;
    }
    return last;
}

void write_dephasing_csv(std::ostream& os, const DephasingModel& model, std::span<const double> grid)
{
    os << "t,re_f,im_f,p,coherence\n";
    char buf[160];
    for (double t : grid) {
        const DephasingPoint pt = evaluate(model, t);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t, pt.f.real(), pt.f.imag(),
                      pt.p, pt.coherence);
        os << buf;
    }
}

} // namespace tclk::dephasing
