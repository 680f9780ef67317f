// test_tcl.cpp - TCL2 collision operator, Lindblad limit and the integrator

#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tclk/dephasing.hpp"
#include "tclk/tcl.hpp"

using namespace tclk;

namespace {

bath::BathCorrelation single_mode(double g, double w, double temperature = 0.0)
{
    return bath::BathCorrelation::discrete({{{Complex{g, 0.0}, w}}, temperature});
}

tcl::Tcl2Generator dephasing_generator(double g, double e0 = 1.0)
{
    return tcl::Tcl2Generator(SystemHamiltonian(0.5 * e0 * ops::pauli_z()), ErrorGeneratorSet({ops::pauli_z()}),
                              single_mode(g, 1.0));
}

DensityOperator plus_state() { return DensityOperator(Matrix::Constant(2, 2, 0.5)); }

// sum_ab gamma_ab (v_a rho v_b - {v_b v_a, rho} / 2), written out term by term.
Matrix lindblad_termwise(const std::vector<Matrix>& v, const Matrix& gamma, const Matrix& rho)
{
    using oracle_ref::naive_mul;
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < v.size(); ++a) {
        for (std::size_t b = 0; b < v.size(); ++b) {
            const Complex g = gamma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            const Matrix vbva = naive_mul(v[b], v[a]);
            out += g * (naive_mul(naive_mul(v[a], rho), v[b]) - 0.5 * (naive_mul(vbva, rho) + naive_mul(rho, vbva)));
        }
    }
    return out;
}

} // namespace

TEST_CASE("dephasing collision vanishes on diagonal states")
{
    const auto gen = dephasing_generator(0.05);
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.3;
    rho(1, 1) = 0.7;
    for (double t : {0.0, 0.5, 3.0}) {
        CHECK(ops::max_abs(tcl::collision_tcl2(gen, t, DensityOperator(rho))) == 0.0);
    }
}

TEST_CASE("dephasing collision matches the derivative of the analytic coherence factor")
{
    const double g = 0.05;
    const auto gen = dephasing_generator(g);
    const dephasing::DephasingModel model(1.0, single_mode(g, 1.0));
    for (double t : {0.2, 0.3}) {
        const Matrix c = tcl::collision_tcl2(gen, t, plus_state());
        const double h = 1e-4;
        const double deriv = (dephasing::evaluate(model, t + h).coherence -
                              dephasing::evaluate(model, t - h).coherence) / (2.0 * h);
        CHECK(std::abs(c(0, 1) - 0.5 * deriv) <= 1e-6);
        CHECK(std::abs(c(1, 0) - 0.5 * deriv) <= 1e-6);
    }
}

TEST_CASE("collision matches an independently integrated memory operator")
{
    std::mt19937_64 rng(31);
    const Matrix h = oracle_ref::random_hermitian(rng, 3, 0.7);
    const Matrix v = oracle_ref::random_hermitian(rng, 3, 0.3);
    const auto b = bath::BathCorrelation::discrete({{{Complex{0.2, 0.0}, 1.1}, {Complex{0.1, 0.05}, 0.4}}, 0.5});
    const tcl::Tcl2Generator gen(SystemHamiltonian(h), ErrorGeneratorSet({v}), b);
    const Matrix rho = oracle_ref::random_density(rng, 3);
    const double t = 1.6;

    const oracle_ref::GaussLegendre gl(40);
    Matrix lam = Matrix::Zero(3, 3);
    for (int p = 0; p < 4; ++p) {
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double u = t * (p + gl.x[i]) / 4.0;
            lam += gl.w[i] * t / 4.0 * b.chi(0, u) * oracle_ref::heisenberg(v, h, -u);
        }
    }
    using oracle_ref::naive_mul;
    // [L rho, v] + [v, rho L^dagger]
    const Matrix lr = naive_mul(lam, rho);
    const Matrix rl = naive_mul(rho, lam.adjoint());
    const Matrix ref = naive_mul(lr, v) - naive_mul(v, lr) + naive_mul(v, rl) - naive_mul(rl, v);
    CHECK(ops::max_abs(gen.collision(t, rho) - ref) <= 1e-10);
    CHECK(ops::max_abs(gen.memory_operator(0, t) - lam) <= 1e-10);
}

TEST_CASE("collision is traceless and preserves Hermiticity")
{
    std::mt19937_64 rng(32);
    const tcl::Tcl2Generator gen(SystemHamiltonian(oracle_ref::random_hermitian(rng, 3)),
                                 ErrorGeneratorSet({oracle_ref::random_hermitian(rng, 3)}),
                                 bath::BathCorrelation::ohmic({0.05, 2.0, 0.0}));
    for (int rep = 0; rep < 3; ++rep) {
        const Matrix rho = oracle_ref::random_density(rng, 3);
        const Matrix c = gen.collision(1.0 + rep, rho);
        CHECK(std::abs(c.trace()) <= 1e-14);
        CHECK(ops::hermiticity_deviation(c) <= 1e-14);
    }
}

TEST_CASE("collision rejects negative times and wrong dimensions")
{
    const auto gen = dephasing_generator(0.05);
    CHECK_THROWS_AS(gen.collision(-0.1, Matrix::Identity(2, 2) * 0.5), std::invalid_argument);
    CHECK_THROWS_AS(gen.collision(0.1, Matrix::Identity(3, 3) / 3.0), std::invalid_argument);
}

TEST_CASE("lindblad dephasing rate: gamma0 gives coherence decay 2 gamma0")
{
    const double g0 = 0.3;
    const tcl::LindbladGenerator gen(SystemHamiltonian(0.5 * ops::pauli_z()), ErrorGeneratorSet({ops::pauli_z()}),
                                     Matrix::Constant(1, 1, g0));
    const Matrix l = tcl::lindblad_apply(gen, plus_state());
    CHECK(std::abs(l(0, 1) - (-2.0 * g0 * 0.5)) <= 1e-15);
    CHECK(std::abs(l(0, 0)) <= 1e-15);
    const Matrix ref = lindblad_termwise({ops::pauli_z()}, Matrix::Constant(1, 1, g0), plus_state().matrix());
    CHECK(ops::max_abs(l - ref) <= 1e-15);
}

TEST_CASE("lindblad dissipator matches the termwise double sum")
{
    std::mt19937_64 rng(33);
    Matrix gamma(2, 2);
    gamma << 0.5, Complex{0.1, 0.2}, Complex{0.1, -0.2}, 0.3;
    const std::vector<Matrix> v{oracle_ref::random_hermitian(rng, 3), oracle_ref::random_hermitian(rng, 3)};
    const tcl::LindbladGenerator gen(SystemHamiltonian(oracle_ref::random_hermitian(rng, 3)), ErrorGeneratorSet(v),
                                     gamma);
    const Matrix rho = oracle_ref::random_density(rng, 3);
    CHECK(ops::max_abs(gen.dissipator(rho) - lindblad_termwise(v, gamma, rho)) <= 1e-13);
}

TEST_CASE("markovian collision equals its Lindblad reduction")
{
    std::mt19937_64 rng(34);
    Matrix gamma(2, 2);
    gamma << 0.4, Complex{0.05, 0.02}, Complex{0.05, -0.02}, 0.1;
    const std::vector<Matrix> v{ops::pauli_z(), ops::pauli_x()};
    const tcl::Tcl2Generator gen(SystemHamiltonian(0.5 * ops::pauli_z()), ErrorGeneratorSet(v),
                                 bath::chi_markovian(gamma));
    const tcl::LindbladGenerator lind = tcl::reduce_to_lindblad(gen);
    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator rho(oracle_ref::random_density(rng, 2));
        for (double t : {0.5, 1.0, 2.0}) {
            CHECK(ops::max_abs(tcl::collision_tcl2(gen, t, rho) - tcl::lindblad_apply(lind, rho)) <= 1e-14);
        }
    }
    CHECK(ops::max_abs(lind.rates() - gamma.transpose()) == 0.0);
    CHECK_THROWS_AS(tcl::reduce_to_lindblad(dephasing_generator(0.05)), std::invalid_argument);
}

TEST_CASE("integrated lindblad dephasing matches the analytic solution")
{
    const double g0 = 0.15;
    const double e0 = 1.0;
    const tcl::LindbladGenerator gen(SystemHamiltonian(0.5 * e0 * ops::pauli_z()),
                                     ErrorGeneratorSet({ops::pauli_z()}), Matrix::Constant(1, 1, g0));
    const auto grid = tcl::uniform_grid(6.0, 13);
    const tcl::Trajectory tr = tcl::integrate(gen, plus_state(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex expect = 0.5 * std::exp(Complex{-2.0 * g0 * grid[i], -e0 * grid[i]});
        CHECK(std::abs(tr.states[i](0, 1) - expect) <= 1e-8);
    }
}

TEST_CASE("zero coupling reproduces unitary evolution")
{
    std::mt19937_64 rng(35);
    const Matrix h = oracle_ref::random_hermitian(rng, 3);
    const tcl::Tcl2Generator gen(SystemHamiltonian(h), ErrorGeneratorSet({oracle_ref::random_hermitian(rng, 3)}),
                                 bath::BathCorrelation::discrete({{{Complex{0.0, 0.0}, 1.0}}, 0.0}));
    const Matrix rho0 = oracle_ref::random_density(rng, 3);
    const auto grid = tcl::uniform_grid(5.0, 11);
    const tcl::Trajectory tr = tcl::integrate(gen, DensityOperator(rho0), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Matrix u = oracle_ref::expm(Complex{0.0, -grid[i]} * h);
        CHECK(oracle_ref::trace_distance_svd(tr.states[i].matrix(), u * rho0 * u.adjoint()) <= 1e-9);
    }
}

TEST_CASE("TCL2 dephasing coherence follows the analytic factor with the free phase")
{
    const double g = 0.05;
    const auto gen = dephasing_generator(g);
    const dephasing::DephasingModel model(1.0, single_mode(g, 1.0));
    const auto grid = tcl::uniform_grid(10.0, 21);
    const tcl::Trajectory tr = tcl::integrate(gen, plus_state(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const Complex ratio = tr.states[i](0, 1) / 0.5;
        if (t <= 5.5) {
            const Complex expect = dephasing::evaluate(model, t).coherence * std::exp(Complex{0.0, -t});
            CHECK(std::abs(ratio - expect) <= 5e-3);
        }
        // Pure dephasing is solved exactly at second order.
        CHECK(std::abs(ratio - oracle_ref::single_mode_dephasing_factor(g, 1.0, t) * std::exp(Complex{0.0, -t})) <= 1e-8);
    }
}

TEST_CASE("piecewise-constant control switches the Hamiltonian at the boundary")
{
    const Matrix h0 = 0.5 * ops::pauli_z();
    const Matrix h1 = 0.8 * ops::pauli_x();
    const tcl::LindbladGenerator gen(SystemHamiltonian(h0), ErrorGeneratorSet({ops::pauli_z()}),
                                     Matrix::Zero(1, 1));
    const std::vector<tcl::ControlSegment> controls{{1.0, h1}};
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
    const Matrix rho0 = Matrix::Constant(2, 2, 0.5);
    const tcl::Trajectory tr = tcl::integrate(gen, DensityOperator(rho0), grid, controls);
    const Matrix u1 = oracle_ref::expm(Complex{0.0, -1.0} * h0);
    const Matrix u2 = oracle_ref::expm(Complex{0.0, -1.0} * h1) * u1;
    CHECK(oracle_ref::trace_distance_svd(tr.states[2].matrix(), u1 * rho0 * u1.adjoint()) <= 1e-9);
    CHECK(oracle_ref::trace_distance_svd(tr.states[3].matrix(), u2 * rho0 * u2.adjoint()) <= 1e-9);
}

TEST_CASE("integrator input validation")
{
    const auto gen = dephasing_generator(0.05);
    const std::vector<double> late{0.5, 1.0};
    const std::vector<double> unsorted{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(tcl::integrate(gen, plus_state(), late), std::invalid_argument);
    CHECK_THROWS_AS(tcl::integrate(gen, plus_state(), unsorted), std::invalid_argument);
    CHECK_THROWS_AS(tcl::integrate(gen, DensityOperator(Matrix::Identity(3, 3) / 3.0), tcl::uniform_grid(1.0, 3)),
                    std::invalid_argument);
}

TEST_CASE("trajectory CSV layout")
{
    const auto gen = dephasing_generator(0.05);
    const tcl::Trajectory tr = tcl::integrate(gen, plus_state(), tcl::uniform_grid(1.0, 3));
    std::ostringstream os;
    tcl::write_trajectory_csv(os, tr);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,re_0_0,im_0_0,re_0_1,im_0_1,re_1_0,im_1_0,re_1_1,im_1_1,trace_dev,min_eig");
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == 3);
}
