// test_kraus.cpp - channel matrix assembly and canonical Kraus extraction

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tclk/dephasing.hpp"
#include "tclk/kraus.hpp"

using namespace tclk;
using oracle_ref::naive_mul;

namespace {

bath::BathCorrelation single_mode(double g, double w, double temperature = 0.0)
{
    return bath::BathCorrelation::discrete({{{Complex{g, 0.0}, w}}, temperature});
}

kraus::ChannelMatrix born_channel(const Matrix& h, const Matrix& v, const bath::BathCorrelation& b, double t)
{
    const SystemHamiltonian hs(h);
    const ErrorGeneratorSet gens({v});
    return kraus::assemble_channel(kraus::compute_B(t, hs, gens, b), kraus::compute_A(t, hs, gens, b));
}

kraus::ChannelMatrix computational(const Matrix& m)
{
    kraus::ChannelMatrix out;
    out.dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
    out.values = m;
    out.basis = Matrix::Identity(out.dim, out.dim);
    return out;
}

// A random channel close to the identity: K_0 ~ I, small K_1, K_2, normalized.
std::vector<Matrix> random_weak_kraus(std::mt19937_64& rng, int d)
{
    std::vector<Matrix> k{Matrix::Identity(d, d) + oracle_ref::random_matrix(rng, d, 0.05),
                          oracle_ref::random_matrix(rng, d, 0.1), oracle_ref::random_matrix(rng, d, 0.1)};
    Matrix s = Matrix::Zero(d, d);
    for (const Matrix& op : k) s += op.adjoint() * op;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Matrix inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                       es.eigenvectors().adjoint();
    for (Matrix& op : k) op = (op * inv).eval();
    return k;
}

} // namespace

TEST_CASE("dephasing B is f on the diagonal")
{
    const double t = 2.0;
    const auto b = single_mode(0.05, 1.0);
    const kraus::BIntegral bi =
        kraus::compute_B(t, SystemHamiltonian(0.5 * ops::pauli_z()), ErrorGeneratorSet({ops::pauli_z()}), b);
    const Complex f = bath::correlation_f(b, t);
    CHECK(std::abs(bi.values(0, 0) - f) <= 1e-12);
    CHECK(std::abs(bi.values(1, 1) - f) <= 1e-12);
    CHECK(std::abs(bi.values(0, 1)) <= 1e-15);
}

TEST_CASE("dephasing A is 2 Re f times the eigenvalue products")
{
    const double t = 2.0;
    const auto b = single_mode(0.05, 1.0);
    const SystemHamiltonian hs(0.5 * ops::pauli_z());
    const kraus::AIntegral ai = kraus::compute_A(t, hs, ErrorGeneratorSet({ops::pauli_z()}), b);
    const double re_f = bath::correlation_f(b, t).real();
    const Matrix lam = hs.to_eigenbasis(ops::pauli_z());
    for (int a = 0; a < 2; ++a)
        for (int n = 0; n < 2; ++n)
            for (int c = 0; c < 2; ++c)
                for (int m = 0; m < 2; ++m) {
                    const double expect = (a == n && c == m) ? 2.0 * re_f * lam(a, a).real() * lam(c, c).real() : 0.0;
                    CHECK(std::abs(ai(a, n, c, m) - expect) <= 1e-12);
                }
}

TEST_CASE("sigma_x coupling: B and A agree with a 400 x 400 Riemann sum")
{
    const double t = 0.5;
    const Matrix h = 0.5 * ops::pauli_z();
    const Matrix v = ops::pauli_x();
    const auto b = single_mode(0.1, 1.0, 0.3);
    const SystemHamiltonian hs(h);
    const kraus::BIntegral bi = kraus::compute_B(t, hs, ErrorGeneratorSet({v}), b);
    const kraus::AIntegral ai = kraus::compute_A(t, hs, ErrorGeneratorSet({v}), b);
    const Matrix p = hs.eigenvectors();

    auto veig = [&](double s) { return Matrix(p.adjoint() * oracle_ref::heisenberg(v, h, s) * p); };
    auto b_integrand = [&](double s, double tau) { return Matrix(b.chi(0, s - tau) * veig(s) * veig(tau)); };
    auto x_integrand = [&](double s, double tau) {
        const Matrix vs = veig(s);
        const Matrix vt = veig(tau);
        Matrix x(4, 4);
        for (int a = 0; a < 2; ++a)
            for (int n = 0; n < 2; ++n)
                for (int c = 0; c < 2; ++c)
                    for (int m = 0; m < 2; ++m) x(a * 2 + n, c * 2 + m) = b.chi(0, tau - s) * vs(a, n) * std::conj(vt(c, m));
        return x;
    };
    const Matrix b_ref = oracle_ref::triangle_riemann(b_integrand, t, 400);
    const Matrix x_ref = oracle_ref::triangle_riemann(x_integrand, t, 400);
    CHECK(ops::max_abs(bi.values - b_ref) <= 1e-6);
    CHECK(ops::max_abs(ai.values - (x_ref + x_ref.adjoint())) <= 1e-6);
}

TEST_CASE("random generator: A agrees with a dense Riemann sum")
{
    std::mt19937_64 rng(41);
    const Matrix h = oracle_ref::random_hermitian(rng, 2, 0.6);
    const Matrix v = oracle_ref::random_hermitian(rng, 2, 0.5);
    const auto b = bath::BathCorrelation::ohmic({0.05, 2.0, 0.0});
    const double t = 0.8;
    const SystemHamiltonian hs(h);
    const kraus::AIntegral ai = kraus::compute_A(t, hs, ErrorGeneratorSet({v}), b);
    const Matrix p = hs.eigenvectors();
    auto x_integrand = [&](double s, double tau) {
        const Matrix vs = p.adjoint() * oracle_ref::heisenberg(v, h, s) * p;
        const Matrix vt = p.adjoint() * oracle_ref::heisenberg(v, h, tau) * p;
        Matrix x(4, 4);
        for (int a = 0; a < 2; ++a)
            for (int n = 0; n < 2; ++n)
                for (int c = 0; c < 2; ++c)
                    for (int m = 0; m < 2; ++m) x(a * 2 + n, c * 2 + m) = b.chi(0, tau - s) * vs(a, n) * std::conj(vt(c, m));
        return x;
    };
    const Matrix x_ref = oracle_ref::triangle_riemann(x_integrand, t, 400);
    CHECK(ops::max_abs(ai.values - (x_ref + x_ref.adjoint())) <= 1e-6);
    CHECK(ops::hermiticity_deviation(ai.values) <= 1e-15);
}

TEST_CASE("markovian B and A agree with direct integration of the delta limit")
{
    const Matrix h = 0.5 * ops::pauli_z();
    const Matrix v = ops::pauli_x();
    const double gamma = 0.4;
    const double t = 1.3;
    const SystemHamiltonian hs(h);
    const auto b = bath::chi_markovian(Matrix::Constant(1, 1, gamma));
    const kraus::BIntegral bi = kraus::compute_B(t, hs, ErrorGeneratorSet({v}), b);
    const kraus::AIntegral ai = kraus::compute_A(t, hs, ErrorGeneratorSet({v}), b);
    const Matrix p = hs.eigenvectors();
    const oracle_ref::GaussLegendre gl(40);
    Matrix b_ref = Matrix::Zero(2, 2);
    Matrix x_ref = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double s = t * gl.x[i];
        const Matrix vs = p.adjoint() * oracle_ref::heisenberg(v, h, s) * p;
        b_ref += gl.w[i] * t * 0.5 * gamma * vs * vs;
        const Vector vv = ops::vec_row_major(vs);
        x_ref += gl.w[i] * t * 0.5 * gamma * vv * vv.adjoint();
    }
    CHECK(ops::max_abs(bi.values - b_ref) <= 1e-13);
    CHECK(ops::max_abs(ai.values - (x_ref + x_ref.adjoint())) <= 1e-13);
}

TEST_CASE("dephasing channel matrix entries")
{
    const double t = 2.0;
    const auto b = single_mode(0.05, 1.0);
    const Complex f = bath::correlation_f(b, t);
    const kraus::ChannelMatrix m = born_channel(0.5 * ops::pauli_z(), ops::pauli_z(), b, t);
    const Matrix lam = SystemHamiltonian(0.5 * ops::pauli_z()).to_eigenbasis(ops::pauli_z());
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const int a = r / 2, n = r % 2, bb = c / 2, mm = c % 2;
            Complex expect{};
            if (a == n && bb == mm) {
                expect = 1.0 - f - std::conj(f) + 2.0 * f.real() * lam(a, a) * lam(bb, bb);
            }
            CHECK(std::abs(m.values(r, c) - expect) <= 1e-12);
        }
    }
}

TEST_CASE("channel action on matrix units matches the direct second-order expansion")
{
    std::mt19937_64 rng(42);
    struct Case {
        Matrix h;
        Matrix v;
    };
    const std::vector<Case> cases{{0.5 * ops::pauli_z(), ops::pauli_z()},
                                  {0.5 * ops::pauli_z(), ops::pauli_x()},
                                  {oracle_ref::random_hermitian(rng, 2, 0.7), oracle_ref::random_hermitian(rng, 2, 0.5)}};
    const auto b = single_mode(0.08, 1.3, 0.4);
    const double t = 1.5;
    for (const Case& c : cases) {
        const kraus::ChannelMatrix m = born_channel(c.h, c.v, b, t);
        for (int n = 0; n < 2; ++n) {
            for (int mm = 0; mm < 2; ++mm) {
                const Matrix e = ops::matrix_unit(2, n, mm);
                const Matrix ref = oracle_ref::born_channel_direct(c.h, c.v, [&](double x) { return b.chi(0, x); }, t,
                                                                   e);
                // The channel matrix lives in the interaction picture, like the expansion.
                CHECK(ops::max_abs(m.apply(e) - ref) <= 1e-8);
            }
        }
    }
}

TEST_CASE("canonical Kraus of the analytic dephasing channel")
{
    const Complex f{0.03, -0.02};
    const kraus::KrausSet pair = dephasing::dephasing_kraus_from_f(f);
    const double p = dephasing::p_of(f);
    const kraus::KrausSet k = kraus::canonical_kraus(computational(kraus::channel_matrix_of(pair)));
    REQUIRE(k.operators.size() == 2);
    // One operator proportional to I, the other to sigma_z.
    for (const Matrix& op : k.operators) {
        CHECK(std::abs(op(0, 1)) <= 1e-12);
        CHECK(std::abs(op(1, 0)) <= 1e-12);
        const bool prop_i = std::abs(op(0, 0) - op(1, 1)) <= 1e-12;
        const bool prop_z = std::abs(op(0, 0) + op(1, 1)) <= 1e-12;
        CHECK((prop_i || prop_z));
    }
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix rho = oracle_ref::random_density(rng, 2);
        const Matrix expect = (1.0 - p) * rho + p * ops::pauli_z() * rho * ops::pauli_z();
        CHECK(ops::max_abs(kraus::apply_channel(k, DensityOperator::unchecked(rho)).matrix() - expect) <= 1e-10);
    }
    CHECK(k.eigenvalues[0] >= k.eigenvalues[1]);
}

TEST_CASE("reconstruction from canonical Kraus operators reproduces the channel matrix")
{
    std::mt19937_64 rng(44);
    for (int d : {2, 3}) {
        const auto ops_in = random_weak_kraus(rng, d);
        const Matrix m = kraus::channel_matrix_of(kraus::KrausSet::from_operators(ops_in, kraus::Picture::interaction, 0.0));
        const kraus::KrausSet k = kraus::canonical_kraus(computational(m));
        CHECK(ops::max_abs(kraus::channel_matrix_of(k) - m) <= 1e-10);
        CHECK(k.completeness_deviation <= 1e-12);
        for (std::size_t i = 1; i < k.eigenvalues.size(); ++i) CHECK(k.eigenvalues[i - 1] >= k.eigenvalues[i]);
        for (const Matrix& op : k.operators) {
            // Largest entry carries a real positive phase.
            Eigen::Index r = 0, c = 0;
            op.cwiseAbs().maxCoeff(&r, &c);
            CHECK(std::abs(op(r, c).imag()) <= 1e-12);
            CHECK(op(r, c).real() > 0.0);
        }
    }
}

TEST_CASE("apply_channel equals the vectorized action of the channel matrix")
{
    std::mt19937_64 rng(45);
    const auto ops_in = random_weak_kraus(rng, 3);
    const kraus::KrausSet k = kraus::KrausSet::from_operators(ops_in, kraus::Picture::interaction, 0.0);
    const Matrix m = kraus::channel_matrix_of(k);
    const Matrix rho = oracle_ref::random_density(rng, 3);
    // rho'_ab = sum_nm M[(a,n),(b,m)] rho_nm, expanded by hand.
    Matrix expect = Matrix::Zero(3, 3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int n = 0; n < 3; ++n)
                for (int mm = 0; mm < 3; ++mm) expect(a, b) += m(a * 3 + n, b * 3 + mm) * rho(n, mm);
    CHECK(ops::max_abs(kraus::apply_channel(k, DensityOperator::unchecked(rho)).matrix() - expect) <= 1e-10);
    CHECK(ops::max_abs(computational(m).apply(rho) - expect) <= 1e-12);
}

TEST_CASE("p = 1/2 dephasing erases coherences")
{
    // 2 Re f - |f|^2 = 1/2 with f real: f = 1 - 1/sqrt(2).
    const Complex f{1.0 - 1.0 / std::sqrt(2.0), 0.0};
    const kraus::KrausSet k = dephasing::dephasing_kraus_from_f(f);
    std::mt19937_64 rng(46);
    const Matrix rho = oracle_ref::random_density(rng, 2);
    const Matrix out = kraus::apply_channel(k, DensityOperator::unchecked(rho)).matrix();
    CHECK(std::abs(out(0, 1)) <= 1e-15);
    CHECK(std::abs(out(0, 0) - rho(0, 0)) <= 1e-15);
}

TEST_CASE("Schrodinger-picture dephasing Kraus operators carry the free phases")
{
    const double e0 = 1.3;
    const double t = 0.9;
    const kraus::KrausSet k = dephasing::dephasing_kraus_from_f(Complex{0.02, 0.01}, t);
    const kraus::KrausSet ks = kraus::to_schrodinger(k, SystemHamiltonian(0.5 * e0 * ops::pauli_z()), t);
    CHECK(ks.picture == kraus::Picture::schrodinger);
    const Complex k0 = k.operators[0](0, 0);
    CHECK(std::abs(ks.operators[0](0, 0) - k0 * std::exp(Complex{0.0, -0.5 * e0 * t})) <= 1e-15);
    CHECK(std::abs(ks.operators[0](1, 1) - k0 * std::exp(Complex{0.0, 0.5 * e0 * t})) <= 1e-15);
    const Matrix rho = Matrix::Constant(2, 2, 0.5);
    const Matrix out = kraus::apply_channel(ks, DensityOperator(rho)).matrix();
    CHECK(std::abs(out(0, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(out(1, 1) - 0.5) <= 1e-15);
    CHECK_THROWS_AS(kraus::to_schrodinger(ks, SystemHamiltonian(0.5 * e0 * ops::pauli_z()), t), std::invalid_argument);
}

TEST_CASE("unitary remixing with zero padding is equivalent")
{
    std::mt19937_64 rng(47);
    const kraus::KrausSet pair = dephasing::dephasing_kraus_from_f(Complex{0.05, 0.02});
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix u = oracle_ref::random_unitary(rng, 3);
        const std::vector<Matrix> padded{pair.operators[0], pair.operators[1], Matrix::Zero(2, 2)};
        std::vector<Matrix> mixed(3, Matrix::Zero(2, 2));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) mixed[static_cast<std::size_t>(i)] += u(i, j) * padded[static_cast<std::size_t>(j)];
        const auto remix = kraus::KrausSet::from_operators(mixed, kraus::Picture::interaction, 0.0);
        CHECK(kraus::kraus_equivalent(pair, remix, 1e-12));
    }
}

TEST_CASE("different dephasing strengths are not equivalent")
{
    auto with_p = [](double p) {
        return kraus::KrausSet::from_operators({std::sqrt(1.0 - p) * Matrix(Matrix::Identity(2, 2)), std::sqrt(p) * ops::pauli_z()},
                                               kraus::Picture::interaction, 0.0);
    };
    CHECK_FALSE(kraus::kraus_equivalent(with_p(0.1), with_p(0.2), 1e-6));
}

TEST_CASE("small negative eigenvalues are clipped and large ones rejected")
{
    Matrix m = kraus::channel_matrix_of(dephasing::dephasing_kraus_from_f(Complex{0.05, 0.0}));
    // Push the sigma_z weight slightly below zero along its eigenvector.
    const Vector z = ops::vec_row_major(ops::pauli_z()) / std::sqrt(2.0);
    const double weight = (z.adjoint() * m * z)(0, 0).real();
    kraus::ChannelMatrix slightly = computational(m - (weight + 1e-9) * z * z.adjoint());
    const kraus::KrausSet k = kraus::canonical_kraus(slightly);
    REQUIRE(k.clipped.size() == 1);
    CHECK(k.clipped[0] == doctest::Approx(-1e-9).epsilon(1e-3));
    CHECK(k.operators.size() == 1);

    kraus::ChannelMatrix badly = computational(m - (weight + 1e-3) * z * z.adjoint());
    CHECK_THROWS_AS(kraus::canonical_kraus(badly), kraus::NotCompletelyPositive);
    kraus::KrausOptions loose;
    loose.cp_tolerance = 1e-2;
    CHECK_NOTHROW(kraus::canonical_kraus(badly, loose));
    CHECK(kraus::default_cp_tolerance(0.1) == doctest::Approx(1e-8 + 0.1));
}

TEST_CASE("optional normalization restores completeness")
{
    const auto b = single_mode(0.1, 1.0);
    const kraus::ChannelMatrix m = born_channel(0.5 * ops::pauli_z(), ops::pauli_x(), b, 4.0);
    const kraus::KrausSet raw = kraus::canonical_kraus(m);
    kraus::KrausOptions opt;
    opt.normalize = true;
    const kraus::KrausSet norm = kraus::canonical_kraus(m, opt);
    CHECK(norm.completeness_deviation <= 1e-13);
    CHECK(raw.completeness_deviation >= norm.completeness_deviation);
}

TEST_CASE("Born channel coherence differs from the analytic Kraus pair by the |f|^2 term")
{
    // The channel matrix keeps terms linear in chi, giving the coherence factor 1 - 4 Re f.
    // The analytic pair gives (1 - 2p) = 1 - 4 Re f + 2 |f|^2.
    const auto b = single_mode(0.05, 1.0);
    const Matrix rho = Matrix::Constant(2, 2, 0.5);
    for (double t : {0.5, 2.0, 5.0}) {
        const kraus::KrausSet k = kraus::canonical_kraus(born_channel(0.5 * ops::pauli_z(), ops::pauli_z(), b, t));
        const Complex f = bath::correlation_f(b, t);
        const Complex pipeline = kraus::apply_channel(k, DensityOperator(rho))(0, 1) / 0.5;
        const double analytic = 1.0 - 2.0 * dephasing::p_of(f);
        CHECK(std::abs(pipeline - (1.0 - 4.0 * f.real())) <= 1e-12);
        CHECK(std::abs((analytic - pipeline) - 2.0 * std::norm(f)) <= 1e-12);
    }
}

TEST_CASE("Kraus set JSON export")
{
    const kraus::KrausSet k = dephasing::dephasing_kraus_from_f(Complex{0.01, 0.0}, 0.5);
    const auto j = kraus::to_json(k);
    CHECK(j.at("t").get<double>() == 0.5);
    CHECK(j.at("picture").get<std::string>() == "interaction");
    CHECK(j.at("operators").size() == 2);
    CHECK(j.contains("completeness_dev"));
    CHECK(j.contains("eigenvalues"));
}

TEST_CASE("channel inputs are validated")
{
    const auto b = single_mode(0.05, 1.0);
    const SystemHamiltonian hs(0.5 * ops::pauli_z());
    CHECK_THROWS_AS(kraus::compute_B(-1.0, hs, ErrorGeneratorSet({ops::pauli_z()}), b), std::invalid_argument);
    CHECK_THROWS_AS(kraus::compute_A(1.0, hs, ErrorGeneratorSet({ops::pauli_z(), ops::pauli_x()}), b),
                    std::invalid_argument);
    const kraus::BIntegral bi = kraus::compute_B(1.0, hs, ErrorGeneratorSet({ops::pauli_z()}), b);
    const kraus::AIntegral ai = kraus::compute_A(2.0, hs, ErrorGeneratorSet({ops::pauli_z()}), b);
    CHECK_THROWS_AS(kraus::assemble_channel(bi, ai), std::invalid_argument);
}
