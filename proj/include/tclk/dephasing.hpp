// dephasing.hpp - closed-form single-qubit dephasing channel

#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tclk/bath.hpp"
#include "tclk/kraus.hpp"
#include "tclk/operators.hpp"

namespace tclk::dephasing {

/// H = eps0/2 sigma_z + H_b + sigma_z (x) b with a single scalar correlation chi(t).
struct DephasingModel {
    double splitting{1.0};
    bath::BathCorrelation bath;

    DephasingModel(double splitting, bath::BathCorrelation bath);

    SystemHamiltonian hamiltonian() const;
    ErrorGeneratorSet generators() const;
};

/// Raised when p(t) = 2 Re f - |f|^2 leaves [0, 1].
class ValidityError : public std::domain_error {
public:
    ValidityError(double t, double p);
    double time() const { return t_; }
    double p() const { return p_; }

private:
    double t_;
    double p_;
};

struct DephasingPoint {
    double t{0.0};
    Complex f;
    double p{0.0};
    double coherence{1.0}; // 1 - 2p
};

/// f(t), p(t) and the coherence factor. Throws ValidityError outside the validity range.
DephasingPoint evaluate(const DephasingModel& model, double t);

/// p = 2 Re f - |f|^2 for a given f.
double p_of(Complex f);

/// K0 = (1 - f) I, K1 = sqrt(p) sigma_z, interaction picture.
kraus::KrausSet dephasing_kraus(const DephasingModel& model, double t);
kraus::KrausSet dephasing_kraus_from_f(Complex f, double t = 0.0);

/// Diagonal kept, off-diagonals scaled by 1 - 2p (interaction picture).
DensityOperator dephasing_apply(const DephasingModel& model, double t, const DensityOperator& rho0);

/// Largest grid time before the first point with p outside [0, 1].
double validity_limit(const DephasingModel& model, std::span<const double> grid);

/// Columns: t, re_f, im_f, p, coherence.
void write_dephasing_csv(std::ostream& os, const DephasingModel& model, std::span<const double> grid);

} // namespace tclk::dephasing
