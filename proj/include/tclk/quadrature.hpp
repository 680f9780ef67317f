// quadrature.hpp - globally adaptive Gauss-Kronrod (7/15) integration
//
// The integrand may return double, std::complex<double> or an Eigen matrix;
// the error norm is the largest absolute component so matrix-valued
// integrals converge element-wise in one pass.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace tclk::quad {

struct Settings {
    double rel_tol{1e-10};
    double abs_tol{1e-14};
    int max_intervals{4000};
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double lower, double upper, double estimate_norm,
                    double error, int intervals)
        : std::runtime_error(describe(what, lower, upper, estimate_norm, error, intervals)),
          lower_(lower), upper_(upper), error_(error), intervals_(intervals)
    {
    }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double error_estimate() const { return error_; }
    int intervals() const { return intervals_; }

private:
    static std::string describe(const std::string& what, double a, double b, double value,
                                double err, int n)
    {
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b << "]: " << what
           << " (|value| ~ " << value << ", error estimate " << err << ", " << n
           << " intervals)";
        return os.str();
    }

    double lower_;
    double upper_;
    double error_;
    int intervals_;
};

template <class T>
struct Result {
    T value;
    double error{0.0};
    int evaluations{0};
    int intervals{0};
};

inline double norm_of(double x) { return std::abs(x); }
inline double norm_of(const std::complex<double>& z) { return std::abs(z); }

template <class Derived>
double norm_of(const Eigen::MatrixBase<Derived>& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> gauss_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
};

template <class T, class F>
Panel<T> gauss_kronrod(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    using Value = std::decay_t<decltype(f(center))>;
    const Value f_center = f(center);
    Value kronrod = f_center * kronrod_weights[7];
    Value gauss = f_center * gauss_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const Value fl = f(center - dx);
        const Value fr = f(center + dx);
        kronrod += (fl + fr) * kronrod_weights[j];
        if (j % 2 == 1) gauss += (fl + fr) * gauss_weights[j / 2];
    }
    Panel<T> p{a, b, T(kronrod * half), 0.0};
    p.error = norm_of(T((kronrod - gauss) * half));
    return p;
}

template <class T>
struct LargerError {
    bool operator()(const Panel<T>& x, const Panel<T>& y) const { return x.error < y.error; }
};

} // namespace detail

/// Integral of f over [a, b]. Throws QuadratureError when the tolerance
/// max(abs_tol, rel_tol * |I|) cannot be met within max_intervals panels.
template <class F>
auto integrate(F&& f, double a, double b, const Settings& settings = {})
{
    using T = std::decay_t<decltype(f(a))>;
    using detail::Panel;

    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw std::invalid_argument("integrate: limits must be finite");
    }
    Result<T> result{};
    if (a == b) {
        result.value = T(f(a) * 0.0);
        return result;
    }

    std::priority_queue<Panel<T>, std::vector<Panel<T>>, detail::LargerError<T>> panels;
    Panel<T> first = detail::gauss_kronrod<T>(f, a, b);
    T total = first.value;
    double total_error = first.error;
    panels.push(std::move(first));
    result.evaluations = 15;

    const double min_width = std::abs(b - a) * 1e-13;
    auto converged = [&] {
        return total_error <= std::max(settings.abs_tol, settings.rel_tol * norm_of(total));
    };

    while (!converged()) {
        if (static_cast<int>(panels.size()) >= settings.max_intervals) {
            throw QuadratureError("interval budget exhausted", a, b, norm_of(total), total_error,
                                  static_cast<int>(panels.size()));
        }
        Panel<T> worst = panels.top();
        panels.pop();
        if (std::abs(worst.b - worst.a) < min_width) {
            throw QuadratureError("panel width underflow near " + std::to_string(worst.a), a, b,
                                  norm_of(total), total_error, static_cast<int>(panels.size()));
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel<T> left = detail::gauss_kronrod<T>(f, worst.a, mid);
        Panel<T> right = detail::gauss_kronrod<T>(f, mid, worst.b);
        result.evaluations += 30;
        total = T(total - worst.value + left.value + right.value);
        total_error += left.error + right.error - worst.error;
        panels.push(std::move(left));
        panels.push(std::move(right));
    }

    // Re-sum the final panels in position order for a reproducible value.
    std::vector<Panel<T>> done;
    done.reserve(panels.size());
    while (!panels.empty()) {
        done.push_back(panels.top());
        panels.pop();
    }
    std::sort(done.begin(), done.end(),
              [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });
    T sum = done.front().value;
    double err = done.front().error;
    for (std::size_t i = 1; i < done.size(); ++i) {
        sum = T(sum + done[i].value);
        err += done[i].error;
    }
    result.value = std::move(sum);
    result.error = err;
    result.intervals = static_cast<int>(done.size());
    return result;
}

/// Triangle integral  int_0^t ds int_0^s dtau f(s, tau)  by nested adaptive quadrature.
template <class F>
auto integrate_triangle(F&& f, double t, const Settings& settings = {})
{
    Settings inner = settings;
    inner.rel_tol = settings.rel_tol * 0.1;
    inner.abs_tol = settings.abs_tol * 0.1;
    auto outer = [&](double s) {
        return integrate([&](double tau) { return f(s, tau); }, 0.0, s, inner).value;
    };
    return integrate(outer, 0.0, t, settings);
}

} // namespace tclk::quad
