// kraus.hpp - Born-approximation channel matrix and its canonical Kraus operators

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tclk/bath.hpp"
#include "tclk/operators.hpp"
#include "tclk/quadrature.hpp"

namespace tclk::kraus {

enum class Picture { interaction, schrodinger };

const char* picture_name(Picture p);

/// B_an = sum_ab int_0^t ds int_0^s dtau chi*_ab(tau - s) <a| v_a(s) v_b(tau) |n>
/// expressed in the basis whose vectors are the columns of `basis`.
struct BIntegral {
    double t{0.0};
    Matrix values;
    Matrix basis;
};

/// A_{an,bm} stored as a d^2 x d^2 matrix with row a*d + n and column b*d + m.
struct AIntegral {
    double t{0.0};
    int dim{0};
    Matrix values;
    Matrix basis;

    Complex operator()(int a, int n, int b, int m) const
    {
        return values(a * dim + n, b * dim + m);
    }
};

/// Matrix elements are taken in the H_s eigenbasis.
BIntegral compute_B(double t, const SystemHamiltonian& hamiltonian,
                    const ErrorGeneratorSet& generators, const bath::BathCorrelation& bath,
                    const quad::Settings& settings = {});

/// Both sandwich terms of the second-order expansion: A = X + X^dagger with
/// X_{an,bm} = sum_ab int int chi_ab(tau - s) <a|v_a(s)|n> <b|v_b(tau)|m>*.
AIntegral compute_A(double t, const SystemHamiltonian& hamiltonian,
                    const ErrorGeneratorSet& generators, const bath::BathCorrelation& bath,
                    const quad::Settings& settings = {});

/// M[(a,n),(b,m)] = E^{ab}_{nm}: the channel maps e_nm to sum_ab E^{ab}_{nm} e_ab.
struct ChannelMatrix {
    int dim{0};
    double t{0.0};
    Picture picture{Picture::interaction};
    Matrix values;
    Matrix basis;                     // columns are the basis kets |a>
    double hermiticity_deviation{0.0};
    double b_norm{0.0};               // max|B_an|, sets the CP clipping budget

    /// Channel action on an operator given in the computational basis.
    Matrix apply(const Matrix& rho) const;
};

/// E^{ab}_{nm} = d_an d_bm - B_an d_bm - d_an B*_bm + A_{an,bm}.
ChannelMatrix assemble_channel(const BIntegral& b, const AIntegral& a);

class NotCompletelyPositive : public std::runtime_error {
public:
    NotCompletelyPositive(double eigenvalue, double tolerance);
    double eigenvalue() const { return eigenvalue_; }
    double tolerance() const { return tolerance_; }

private:
    double eigenvalue_;
    double tolerance_;
};

struct KrausOptions {
    /// Negative eigenvalues above -cp_tolerance are clipped; default 1e-8 + 10 b_norm^2.
    std::optional<double> cp_tolerance;
    /// Replace K by K S^{-1/2}, S = sum K^dagger K.
    bool normalize{false};
};

double default_cp_tolerance(double b_norm);

struct KrausSet {
    std::vector<Matrix> operators;   // computational basis
    std::vector<double> eigenvalues; // retained d_a, descending; empty for explicit sets
    std::vector<double> clipped;     // negative eigenvalues that were clipped
    Picture picture{Picture::interaction};
    double t{0.0};
    double completeness_deviation{0.0};
    double channel_hermiticity_deviation{0.0};

    int dim() const { return operators.empty() ? 0 : static_cast<int>(operators.front().rows()); }

    static KrausSet from_operators(std::vector<Matrix> ops, Picture picture, double t);
};

/// max|sum K^dagger K - I|.
double completeness_deviation(const std::vector<Matrix>& operators);

/// Eigendecomposition of the (Hermitized) channel matrix; each retained
/// eigenvector scaled by sqrt(d) and reshaped row-major gives one operator.
/// Throws NotCompletelyPositive if an eigenvalue is below -cp_tolerance.
KrausSet canonical_kraus(const ChannelMatrix& m, const KrausOptions& options = {});

/// K -> exp(-i H_s t) K.
KrausSet to_schrodinger(const KrausSet& k, const SystemHamiltonian& hamiltonian, double t);

DensityOperator apply_channel(const KrausSet& k, const DensityOperator& rho);

/// sum_a K_a[a,n] conj(K_a[b,m]) in the computational basis.
Matrix channel_matrix_of(const KrausSet& k);

/// True iff both sets induce the same channel matrix within tol.
bool kraus_equivalent(const KrausSet& k1, const KrausSet& k2, double tol);

nlohmann::json to_json(const KrausSet& k);

} // namespace tclk::kraus
