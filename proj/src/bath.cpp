// bath.cpp - reservoir correlation functions

#include "tclk/bath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tclk::bath {

namespace {

// Spectral integrals are truncated where exp(-w / cutoff) < 1e-26.
constexpr double kSpectralCutoffFactor = 60.0;

// int_0^t exp(i w u) du with e^{ix} - 1 = -2 sin^2(x/2) + i sin(x) to avoid cancellation.
Complex phase_integral(double w, double t)
{
    if (w == 0.0) return Complex{t, 0.0};
    const double x = w * t;
    const double s = std::sin(0.5 * x);
    const Complex em1{-2.0 * s * s, std::sin(x)};
    return em1 / Complex{0.0, w};
}

void check_temperature(double temperature)
{
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("bath: temperature must be finite and >= 0");
    }
}

void check_modes(std::span<const BosonMode> modes)
{
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (!(modes[k].omega > 0.0) || !std::isfinite(modes[k].omega)) {
            throw std::invalid_argument("bath: mode " + std::to_string(k) +
                                        " must have a positive finite frequency");
        }
    }
}

void check_ohmic(const Ohmic& o)
{
    if (!(o.eta >= 0.0)) throw std::invalid_argument("bath: ohmic coupling eta must be >= 0");
    if (!(o.cutoff > 0.0)) throw std::invalid_argument("bath: ohmic cutoff must be > 0");
    check_temperature(o.temperature);
}

// w (n(w) + 1) and w n(w), finite as w -> 0 at T > 0.
struct WeightedOccupation {
    double emission;
    double absorption;
};

WeightedOccupation ohmic_weights(double w, double eta, double cutoff, double temperature)
{
    const double j = eta * w * std::exp(-w / cutoff);
    const double n = thermal_occupation(w, temperature);
    return {j * (n + 1.0), j * n};
}

} // namespace

double thermal_occupation(double omega, double temperature)
{
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

Complex chi_discrete(double t, std::span<const BosonMode> modes, double temperature)
{
    check_modes(modes);
    check_temperature(temperature);
    Complex acc{};
    for (const BosonMode& m : modes) {
        const double n = thermal_occupation(m.omega, temperature);
        const double g2 = std::norm(m.g);
        acc += g2 * ((n + 1.0) * std::exp(Complex{0.0, -m.omega * t}) +
                     n * std::exp(Complex{0.0, m.omega * t}));
    }
    return acc;
}

Complex chi_ohmic_quadrature(double t, double eta, double cutoff, double temperature,
                             const quad::Settings& settings)
{
    check_ohmic({eta, cutoff, temperature});
    if (eta == 0.0) return {};
    auto integrand = [&](double w) {
        const WeightedOccupation occ = ohmic_weights(w, eta, cutoff, temperature);
        return occ.emission * std::exp(Complex{0.0, -w * t}) +
               occ.absorption * std::exp(Complex{0.0, w * t});
    };
    return quad::integrate(integrand, 0.0, kSpectralCutoffFactor * cutoff, settings).value;
}

Complex chi_ohmic(double t, double eta, double cutoff, double temperature,
                  const quad::Settings& settings)
{
    check_ohmic({eta, cutoff, temperature});
    if (temperature == 0.0) {
        const Complex denom{1.0, cutoff * t};
        return eta * cutoff * cutoff / (denom * denom);
    }
    return chi_ohmic_quadrature(t, eta, cutoff, temperature, settings);
}

const char* model_name(Model m)
{
    switch (m) {
    case Model::ohmic: return "ohmic";
    case Model::discrete: return "discrete";
    case Model::markovian: return "markovian";
    }
    return "unknown";
}

BathCorrelation BathCorrelation::diagonal(std::vector<Spectrum> spectra)
{
    if (spectra.empty()) throw std::invalid_argument("bath: at least one spectrum is required");
    BathCorrelation out;
    bool any_ohmic = false;
    bool any_discrete = false;
    for (const Spectrum& s : spectra) {
        if (const auto* o = std::get_if<Ohmic>(&s)) {
            check_ohmic(*o);
            any_ohmic = true;
        } else {
            const auto& d = std::get<Discrete>(s);
            check_modes(d.modes);
            check_temperature(d.temperature);
            any_discrete = true;
        }
    }
    if (any_ohmic && any_discrete) {
        throw std::invalid_argument("bath: mixing ohmic and discrete spectra is not supported");
    }
    out.model_ = any_ohmic ? Model::ohmic : Model::discrete;
    out.spectra_ = std::move(spectra);
    return out;
}

BathCorrelation BathCorrelation::discrete(const Discrete& spectrum, int generators)
{
    if (generators < 1) throw std::invalid_argument("bath: generator count must be >= 1");
    return diagonal(std::vector<Spectrum>(static_cast<std::size_t>(generators), spectrum));
}

BathCorrelation BathCorrelation::ohmic(const Ohmic& spectrum, int generators)
{
    if (generators < 1) throw std::invalid_argument("bath: generator count must be >= 1");
    return diagonal(std::vector<Spectrum>(static_cast<std::size_t>(generators), spectrum));
}

BathCorrelation BathCorrelation::markovian(const Matrix& gamma)
{
    return chi_markovian(gamma);
}

int BathCorrelation::generator_count() const
{
    return is_markovian() ? static_cast<int>(gamma_.rows()) : static_cast<int>(spectra_.size());
}

Complex BathCorrelation::operator()(int a, int b, double t) const
{
    if (is_markovian()) {
        throw std::logic_error("bath: markovian correlation is a distribution, not a function");
    }
    if (a < 0 || b < 0 || a >= generator_count() || b >= generator_count()) {
        throw std::out_of_range("bath: generator index out of range");
    }
    if (a != b) return {};
    return chi(a, t);
}

Complex BathCorrelation::chi(int a, double t) const
{
    const Spectrum& s = spectrum(a);
    if (const auto* o = std::get_if<Ohmic>(&s)) {
        return chi_ohmic(t, o->eta, o->cutoff, o->temperature, quadrature_);
    }
    const auto& d = std::get<Discrete>(s);
    return chi_discrete(t, d.modes, d.temperature);
}

Complex BathCorrelation::damped_integral(int a, double w, double t,
                                         const quad::Settings& settings) const
{
    const Spectrum& s = spectrum(a);
    if (const auto* d = std::get_if<Discrete>(&s)) {
        Complex acc{};
        for (const BosonMode& m : d->modes) {
            const double n = thermal_occupation(m.omega, d->temperature);
            acc += std::norm(m.g) *
                   ((n + 1.0) * phase_integral(-(m.omega + w), t) + n * phase_integral(m.omega - w, t));
        }
        return acc;
    }
    // Ohmic: exchange the time and frequency integrals so the time integral is exact.
    const auto& o = std::get<Ohmic>(s);
    if (o.eta == 0.0 || t == 0.0) return {};
    auto integrand = [&](double omega) {
        const WeightedOccupation occ = ohmic_weights(omega, o.eta, o.cutoff, o.temperature);
        return occ.emission * phase_integral(-(omega + w), t) +
               occ.absorption * phase_integral(omega - w, t);
    };
    return quad::integrate(integrand, 0.0, kSpectralCutoffFactor * o.cutoff, settings).value;
}

const Matrix& BathCorrelation::rates() const
{
    if (!is_markovian()) throw std::logic_error("bath: rates() requires the markovian model");
    return gamma_;
}

const Spectrum& BathCorrelation::spectrum(int a) const
{
    if (is_markovian()) throw std::logic_error("bath: markovian model has no spectrum");
    if (a < 0 || a >= generator_count()) throw std::out_of_range("bath: generator index out of range");
    return spectra_[static_cast<std::size_t>(a)];
}

BathCorrelation BathCorrelation::scaled_coupling(double lambda) const
{
    BathCorrelation out = *this;
    if (is_markovian()) {
        out.gamma_ *= lambda * lambda;
        return out;
    }
    for (Spectrum& s : out.spectra_) {
        if (auto* o = std::get_if<Ohmic>(&s)) {
            o->eta *= lambda * lambda;
        } else {
            for (BosonMode& m : std::get<Discrete>(s).modes) m.g *= lambda;
        }
    }
    return out;
}

BathCorrelation BathCorrelation::with_quadrature(const quad::Settings& settings) const
{
    BathCorrelation out = *this;
    out.quadrature_ = settings;
    return out;
}

BathCorrelation chi_markovian(const Matrix& gamma)
{
    if (gamma.rows() != gamma.cols() || gamma.rows() == 0) {
        throw std::invalid_argument("chi_markovian: rate matrix must be square and non-empty");
    }
    if (!ops::all_finite(gamma)) throw std::invalid_argument("chi_markovian: non-finite rates");
    const double scale = std::max(ops::max_abs(gamma), 1.0);
    if (ops::hermiticity_deviation(gamma) > 1e-12 * scale) {
        throw std::invalid_argument("chi_markovian: rate matrix is not Hermitian");
    }
    const double lam = ops::min_eigenvalue(gamma);
    if (lam < -1e-12 * scale) {
        throw std::invalid_argument("chi_markovian: rate matrix is not positive semidefinite "
                                    "(min eigenvalue " + std::to_string(lam) + ")");
    }
    BathCorrelation out;
    out.model_ = Model::markovian;
    out.gamma_ = 0.5 * (gamma + gamma.adjoint());
    return out;
}

Complex correlation_f(const BathCorrelation& chi, double t, int generator)
{
    if (!(t >= 0.0)) throw std::invalid_argument("correlation_f: t must be >= 0");
    if (t == 0.0) return {};
    if (chi.is_markovian()) {
        if (generator < 0 || generator >= chi.generator_count()) {
            throw std::out_of_range("correlation_f: generator index out of range");
        }
        return 0.5 * chi.rates()(generator, generator) * t;
    }
    auto integrand = [&](double u) { return (t - u) * chi.chi(generator, u); };
    return quad::integrate(integrand, 0.0, t, chi.quadrature()).value;
}

} // namespace tclk::bath
