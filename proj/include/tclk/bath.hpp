// bath.hpp - reservoir correlation functions chi(t) = Tr_b[b(t) b rho_b]

#pragma once

#include <span>
#include <variant>
#include <vector>

#include "tclk/operators.hpp"
#include "tclk/quadrature.hpp"

namespace tclk::bath {

/// One harmonic mode coupled through b = g a^dagger + g* a.
struct BosonMode {
    Complex g;
    double omega{0.0};
};

/// Bose-Einstein occupation; exactly zero at T = 0.
double thermal_occupation(double omega, double temperature);

/// sum_k |g_k|^2 [ (n_k + 1) exp(-i w_k t) + n_k exp(+i w_k t) ].
/// Throws std::invalid_argument for non-positive frequencies or T < 0.
Complex chi_discrete(double t, std::span<const BosonMode> modes, double temperature);

/// Ohmic spectral density J(w) = eta w exp(-w / cutoff). At T = 0 the closed
/// form eta cutoff^2 / (1 + i cutoff t)^2 is used; otherwise the spectral
/// integral is evaluated by quadrature.
Complex chi_ohmic(double t, double eta, double cutoff, double temperature,
                  const quad::Settings& settings = {});

/// Always evaluates the spectral integral numerically, including at T = 0.
Complex chi_ohmic_quadrature(double t, double eta, double cutoff, double temperature,
                             const quad::Settings& settings = {});

struct Ohmic {
    double eta{0.0};
    double cutoff{1.0};
    double temperature{0.0};
};

struct Discrete {
    std::vector<BosonMode> modes;
    double temperature{0.0};
};

using Spectrum = std::variant<Ohmic, Discrete>;

enum class Model { ohmic, discrete, markovian };

const char* model_name(Model m);

/// Correlation structure chi_ab(t) of the reservoir seen by each error
/// generator.
///
/// Ohmic and discrete baths are diagonal: generator a couples to its own
/// independent reservoir with spectrum `spectra[a]`, so chi_ab = 0 for a != b.
/// The markovian model stores the rate matrix gamma of chi_ab = gamma_ab/2 delta(t);
/// it is distributional and never evaluated pointwise.
class BathCorrelation;
BathCorrelation chi_markovian(const Matrix& gamma);

class BathCorrelation {
public:
    static BathCorrelation diagonal(std::vector<Spectrum> spectra);
    static BathCorrelation discrete(const Discrete& spectrum, int generators = 1);
    static BathCorrelation ohmic(const Ohmic& spectrum, int generators = 1);
    static BathCorrelation markovian(const Matrix& gamma);

    Model model() const { return model_; }
    bool is_markovian() const { return model_ == Model::markovian; }
    int generator_count() const;

    /// chi_ab(t). Throws std::logic_error for the markovian model.
    Complex operator()(int a, int b, double t) const;

    /// chi_aa(t) for a diagonal bath.
    Complex chi(int a, double t) const;

    /// int_0^t du chi_aa(u) exp(-i w u).
    Complex damped_integral(int a, double w, double t, const quad::Settings& settings = {}) const;

    /// Markovian rate matrix gamma. Throws std::logic_error for other models.
    const Matrix& rates() const;

    const Spectrum& spectrum(int a) const;

    /// Scales the system-bath coupling by lambda (g -> lambda g, eta -> lambda^2 eta,
    /// gamma -> lambda^2 gamma).
    BathCorrelation scaled_coupling(double lambda) const;

    const quad::Settings& quadrature() const { return quadrature_; }
    BathCorrelation with_quadrature(const quad::Settings& settings) const;

private:
    friend BathCorrelation chi_markovian(const Matrix& gamma);

    Model model_{Model::discrete};
    std::vector<Spectrum> spectra_;
    Matrix gamma_;
    quad::Settings quadrature_{};
};

/// Markovian correlation from a Hermitian positive-semidefinite rate matrix.
/// Throws std::invalid_argument otherwise.
BathCorrelation chi_markovian(const Matrix& gamma);

/// f(t) = int_0^t ds int_0^s dtau chi*(tau - s), evaluated through the
/// single-integral reduction f(t) = int_0^t du (t - u) chi(u).
///
/// For the markovian model the delta function carries full weight at the
/// upper integration limit, f(t) = gamma_aa t / 2.
Complex correlation_f(const BathCorrelation& chi, double t, int generator = 0);

} // namespace tclk::bath
