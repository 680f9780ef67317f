// kraus.cpp - Born-approximation channel matrix and canonical Kraus operators

#include "tclk/kraus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tclk/serialization.hpp"

namespace tclk::kraus {

namespace {

void check_inputs(double t, const SystemHamiltonian& h, const ErrorGeneratorSet& generators,
                  const bath::BathCorrelation& bath)
{
    if (!(t >= 0.0)) throw std::invalid_argument("channel integrals require t >= 0");
    if (!generators.empty() && generators.dim() != h.dim()) {
        throw std::invalid_argument("generator dimension does not match H_s");
    }
    if (bath.generator_count() != static_cast<int>(generators.size())) {
        throw std::invalid_argument("bath correlation does not match the generator count");
    }
}

// int_0^t exp(i w s) ds without cancellation for small w t.
Complex phase_integral(double w, double t)
{
    if (w == 0.0) return Complex{t, 0.0};
    const double half = std::sin(0.5 * w * t);
    return Complex{-2.0 * half * half, std::sin(w * t)} / Complex{0.0, w};
}

// W_a(s) = int_0^s dtau chi_a(s - tau) v_a(tau), the inner integral shared by B and A.
Matrix inner_memory(const bath::BathCorrelation& bath, int a, const HeisenbergOperator& v, double s,
                    const quad::Settings& inner)
{
    auto integrand = [&](double tau) { return Matrix(bath.chi(a, s - tau) * v.at(tau)); };
    return quad::integrate(integrand, 0.0, s, inner).value;
}

quad::Settings inner_settings(const quad::Settings& s)
{
    quad::Settings inner = s;
    inner.rel_tol *= 0.1;
    inner.abs_tol *= 0.1;
    return inner;
}

double norm_max(const Matrix& m) { return ops::max_abs(m); }

} // namespace

const char* picture_name(Picture p)
{
    return p == Picture::interaction ? "interaction" : "schrodinger";
}

BIntegral compute_B(double t, const SystemHamiltonian& hamiltonian,
                    const ErrorGeneratorSet& generators, const bath::BathCorrelation& bath,
                    const quad::Settings& settings)
{
    check_inputs(t, hamiltonian, generators, bath);
    const int d = hamiltonian.dim();
    BIntegral out{t, Matrix::Zero(d, d), hamiltonian.eigenvectors()};
    if (t == 0.0) return out;

    std::vector<HeisenbergOperator> v;
    for (const Matrix& g : generators.operators()) v.emplace_back(g, hamiltonian);

    if (bath.is_markovian()) {
        // chi_ab(s - tau) -> gamma_ab delta / 2 at the upper limit of the tau integral.
        const Eigen::MatrixXd& w = hamiltonian.bohr_frequencies();
        const Matrix& gamma = bath.rates();
        for (std::size_t a = 0; a < v.size(); ++a) {
            for (std::size_t b = 0; b < v.size(); ++b) {
                const Complex g = gamma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (g == Complex{}) continue;
                const Matrix prod = v[a].eigenbasis_matrix() * v[b].eigenbasis_matrix();
                for (int j = 0; j < d; ++j) {
                    for (int k = 0; k < d; ++k) {
                        out.values(j, k) += 0.5 * g * prod(j, k) * phase_integral(w(j, k), t);
                    }
                }
            }
        }
        return out;
    }

    const quad::Settings inner = inner_settings(settings);
    for (std::size_t a = 0; a < v.size(); ++a) {
        auto outer = [&](double s) {
            return Matrix(v[a].at(s) * inner_memory(bath, static_cast<int>(a), v[a], s, inner));
        };
        out.values += quad::integrate(outer, 0.0, t, settings).value;
    }
    return out;
}

AIntegral compute_A(double t, const SystemHamiltonian& hamiltonian,
                    const ErrorGeneratorSet& generators, const bath::BathCorrelation& bath,
                    const quad::Settings& settings)
{
    check_inputs(t, hamiltonian, generators, bath);
    const int d = hamiltonian.dim();
    const int d2 = d * d;
    AIntegral out{t, d, Matrix::Zero(d2, d2), hamiltonian.eigenvectors()};
    if (t == 0.0) return out;

    std::vector<HeisenbergOperator> v;
    for (const Matrix& g : generators.operators()) v.emplace_back(g, hamiltonian);

    Matrix x = Matrix::Zero(d2, d2);
    if (bath.is_markovian()) {
        // X = 1/2 sum_ab conj(gamma_ab) int_0^t ds vec v_a(s) vec v_b(s)^dagger.
        const Eigen::MatrixXd& w = hamiltonian.bohr_frequencies();
        const Matrix& gamma = bath.rates();
        for (std::size_t a = 0; a < v.size(); ++a) {
            for (std::size_t b = 0; b < v.size(); ++b) {
                const Complex g = gamma(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (g == Complex{}) continue;
                const Matrix& va = v[a].eigenbasis_matrix();
                const Matrix& vb = v[b].eigenbasis_matrix();
                for (int i = 0; i < d; ++i) {
                    for (int n = 0; n < d; ++n) {
                        for (int j = 0; j < d; ++j) {
                            for (int m = 0; m < d; ++m) {
                                x(i * d + n, j * d + m) += 0.5 * std::conj(g) * va(i, n) *
                                                           std::conj(vb(j, m)) *
                                                           phase_integral(w(i, n) - w(j, m), t);
                            }
                        }
                    }
                }
            }
        }
    } else {
        const quad::Settings inner = inner_settings(settings);
        for (std::size_t a = 0; a < v.size(); ++a) {
            auto outer = [&](double s) {
                const Vector vs = ops::vec_row_major(v[a].at(s));
                const Vector ws =
                    ops::vec_row_major(inner_memory(bath, static_cast<int>(a), v[a], s, inner));
                return Matrix(vs * ws.adjoint());
            };
            x += quad::integrate(outer, 0.0, t, settings).value;
        }
    }
    out.values = x + x.adjoint();
    return out;
}

Matrix ChannelMatrix::apply(const Matrix& rho) const
{
    if (rho.rows() != dim || rho.cols() != dim) {
        throw std::invalid_argument("ChannelMatrix::apply: dimension mismatch");
    }
    const Matrix rho_b = basis.adjoint() * rho * basis;
    // rho'_ab = sum_nm E^{ab}_{nm} rho_nm = sum_nm M[(a,n),(b,m)] rho_nm
    Matrix out = Matrix::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            Complex acc{};
            for (int n = 0; n < dim; ++n) {
                for (int m = 0; m < dim; ++m) acc += values(a * dim + n, b * dim + m) * rho_b(n, m);
            }
            out(a, b) = acc;
        }
    }
    return basis * out * basis.adjoint();
}

ChannelMatrix assemble_channel(const BIntegral& b, const AIntegral& a)
{
    const int d = static_cast<int>(b.values.rows());
    if (b.values.cols() != d || a.dim != d || a.values.rows() != d * d ||
        a.values.cols() != d * d) {
        throw std::invalid_argument("assemble_channel: B and A dimensions disagree");
    }
    if (b.t != a.t) throw std::invalid_argument("assemble_channel: B and A belong to different times");
    if (b.basis.rows() != d || a.basis.rows() != d || ops::max_abs(b.basis - a.basis) > 0.0) {
        throw std::invalid_argument("assemble_channel: B and A use different bases");
    }
    const Vector e = ops::vec_row_major(Matrix::Identity(d, d));
    const Vector vb = ops::vec_row_major(b.values);

    ChannelMatrix m;
    m.dim = d;
    m.t = b.t;
    m.picture = Picture::interaction;
    m.basis = b.basis;
    m.values = e * e.adjoint() - vb * e.adjoint() - e * vb.adjoint() + a.values;
    m.hermiticity_deviation = ops::hermiticity_deviation(m.values);
    m.b_norm = norm_max(b.values);
    return m;
}

NotCompletelyPositive::NotCompletelyPositive(double eigenvalue, double tolerance)
    : std::runtime_error("not completely positive at this order: eigenvalue " +
                         std::to_string(eigenvalue) + " below -" + std::to_string(tolerance)),
      eigenvalue_(eigenvalue), tolerance_(tolerance)
{
}

double default_cp_tolerance(double b_norm) { return 1e-8 + 10.0 * b_norm * b_norm; }

double completeness_deviation(const std::vector<Matrix>& operators)
{
    if (operators.empty()) return 0.0;
    const Eigen::Index d = operators.front().rows();
    Matrix s = Matrix::Zero(d, d);
    for (const Matrix& k : operators) s += k.adjoint() * k;
    return ops::max_abs(s - Matrix::Identity(d, d));
}

KrausSet KrausSet::from_operators(std::vector<Matrix> ops_in, Picture picture, double t)
{
    if (ops_in.empty()) throw std::invalid_argument("KrausSet: at least one operator is required");
    for (const Matrix& k : ops_in) {
        if (k.rows() != k.cols() || k.rows() != ops_in.front().rows()) {
            throw std::invalid_argument("KrausSet: operators must be square with equal dimension");
        }
    }
    KrausSet out;
    out.completeness_deviation = kraus::completeness_deviation(ops_in);
    out.operators = std::move(ops_in);
    out.picture = picture;
    out.t = t;
    return out;
}

namespace {

// Makes the largest-magnitude entry (first in row-major order on ties) real positive.
void fix_phase(Matrix& k)
{
    const double peak = ops::max_abs(k);
    if (peak == 0.0) return;
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            if (std::abs(k(i, j)) >= peak * (1.0 - 1e-9)) {
                k *= std::conj(k(i, j)) / std::abs(k(i, j));
                return;
            }
        }
    }
}

Matrix inverse_sqrt_psd(const Matrix& s)
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.adjoint()));
    RealVector lam = solver.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (!(lam(i) > 0.0)) throw std::runtime_error("normalize: completeness matrix is singular");
        lam(i) = 1.0 / std::sqrt(lam(i));
    }
    return solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint();
}

} // namespace

KrausSet canonical_kraus(const ChannelMatrix& m, const KrausOptions& options)
{
    const int d = m.dim;
    if (d <= 0 || m.values.rows() != d * d || m.values.cols() != d * d) {
        throw std::invalid_argument("canonical_kraus: malformed channel matrix");
    }
    const double cp_tol = options.cp_tolerance.value_or(default_cp_tolerance(m.b_norm));
    const ops::Hermitized herm = ops::hermitize(m.values);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm.matrix);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("canonical_kraus: eigendecomposition failed");
    }
    const RealVector& lam = solver.eigenvalues();
    const Matrix& u = solver.eigenvectors();

    std::vector<int> order(static_cast<std::size_t>(lam.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return lam(x) > lam(y); });

    KrausSet out;
    out.picture = m.picture;
    out.t = m.t;
    out.channel_hermiticity_deviation = herm.deviation;
    // Eigenvalues this small are numerical zeros of a rank-deficient matrix.
    const double zero_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                              std::max(1.0, std::abs(lam(order.front())));
    for (int idx : order) {
        const double di = lam(idx);
        if (di < -cp_tol) throw NotCompletelyPositive(di, cp_tol);
        if (di < 0.0) {
            out.clipped.push_back(di);
            continue;
        }
        if (di <= zero_floor) continue;
        const Vector col = std::sqrt(di) * u.col(idx);
        Matrix k = m.basis * ops::unvec_row_major(col, d, d) * m.basis.adjoint();
        fix_phase(k);
        out.operators.push_back(std::move(k));
        out.eigenvalues.push_back(di);
    }
    if (out.operators.empty()) {
        throw std::runtime_error("canonical_kraus: channel matrix has no positive eigenvalue");
    }
    if (options.normalize) {
        Matrix s = Matrix::Zero(d, d);
        for (const Matrix& k : out.operators) s += k.adjoint() * k;
        const Matrix inv = inverse_sqrt_psd(s);
        for (Matrix& k : out.operators) k = (k * inv).eval();
    }
    out.completeness_deviation = kraus::completeness_deviation(out.operators);
    return out;
}

KrausSet to_schrodinger(const KrausSet& k, const SystemHamiltonian& hamiltonian, double t)
{
    if (k.picture != Picture::interaction) {
        throw std::invalid_argument("to_schrodinger: Kraus set is not in the interaction picture");
    }
    if (k.dim() != hamiltonian.dim()) throw std::invalid_argument("to_schrodinger: dimension mismatch");
    KrausSet out = k;
    const Matrix u = hamiltonian.propagator(t);
    for (Matrix& op : out.operators) op = (u * op).eval();
    out.picture = Picture::schrodinger;
    out.completeness_deviation = kraus::completeness_deviation(out.operators);
    return out;
}

DensityOperator apply_channel(const KrausSet& k, const DensityOperator& rho)
{
    if (k.dim() != rho.dim()) throw std::invalid_argument("apply_channel: dimension mismatch");
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const Matrix& op : k.operators) out += op * rho.matrix() * op.adjoint();
    return DensityOperator::unchecked(std::move(out));
}

Matrix channel_matrix_of(const KrausSet& k)
{
    const int d = k.dim();
    Matrix m = Matrix::Zero(d * d, d * d);
    for (const Matrix& op : k.operators) {
        const Vector v = ops::vec_row_major(op);
        m += v * v.adjoint();
    }
    return m;
}

bool kraus_equivalent(const KrausSet& k1, const KrausSet& k2, double tol)
{
    if (k1.dim() != k2.dim()) return false;
    return ops::max_abs(channel_matrix_of(k1) - channel_matrix_of(k2)) <= tol;
}

nlohmann::json to_json(const KrausSet& k)
{
    nlohmann::json ops_json = nlohmann::json::array();
    for (const Matrix& op : k.operators) ops_json.push_back(matrix_to_json(op));
    return nlohmann::json{{"t", k.t},
                          {"picture", picture_name(k.picture)},
                          {"completeness_dev", k.completeness_deviation},
                          {"operators", std::move(ops_json)},
                          {"eigenvalues", k.eigenvalues},
                          {"clipped_eigenvalues", k.clipped}};
}

} // namespace tclk::kraus
