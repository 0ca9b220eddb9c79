#include "spiked/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spiked {

namespace {
constexpr double kPi = std::numbers::pi;
}

double ChebSeries::eval(double x) const {
    if (coeffs.size() == 0) return 0.0;
    const double t = (2.0 * x - (a + b)) / (b - a);
    // Clenshaw recurrence.
    double u1 = 0.0, u2 = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) {
        const double u = 2.0 * t * u1 - u2 + coeffs[k];
        u2 = u1;
        u1 = u;
    }
    return t * u1 - u2 + coeffs[0];
}

ChebSeries cheb_fit(const std::function<double(double)>& f, double a, double b, int n) {
    if (!(b > a)) throw std::invalid_argument("cheb_fit: requires b > a");
    if (n < 1) throw std::invalid_argument("cheb_fit: requires N >= 1");

    Eigen::VectorXd fx(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double t = std::cos(kPi * j / n);
        const double x = 0.5 * (a + b) + 0.5 * (b - a) * t;
        fx[j] = f(x);
        if (!std::isfinite(fx[j])) throw std::domain_error("cheb_fit: non-finite function value");
    }

    ChebSeries s;
    s.a = a;
    s.b = b;
    s.coeffs.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        double acc = 0.5 * (fx[0] + (k % 2 == 0 ? fx[n] : -fx[n]));
        for (int j = 1; j < n; ++j) acc += fx[j] * std::cos(kPi * k * j / n);
        s.coeffs[k] = 2.0 * acc / n;
    }
    s.coeffs[0] *= 0.5;
    s.coeffs[n] *= 0.5;
    return s;
}

ChebSeries cheb_derivative(const ChebSeries& s) {
    ChebSeries d;
    d.a = s.a;
    d.b = s.b;
    const int n = s.degree();
    if (n <= 0) {
        d.coeffs = Eigen::VectorXd::Zero(1);
        return d;
    }
    d.coeffs = Eigen::VectorXd::Zero(n);
    double dkp1 = 0.0, dkp2 = 0.0;  // d_{k+1}, d_{k+2}
    for (int k = n - 1; k >= 0; --k) {
        const double dk = dkp2 + 2.0 * (k + 1) * s.coeffs[k + 1];
        d.coeffs[k] = dk;
        dkp2 = dkp1;
        dkp1 = dk;
    }
    d.coeffs[0] *= 0.5;
    d.coeffs *= 2.0 / (s.b - s.a);
    return d;
}

double pv_hilbert(const ChebSeries& s, double x) {
    if (!(x > s.a && x < s.b)) throw std::domain_error("pv_hilbert: pv point outside support");
    const int n = s.degree();
    // Rewrite sum c_k T_k as sum u_k U_k, then use
    //   P int_{-1}^{1} sqrt(1-t^2) U_k(t) / (s-t) dt = pi T_{k+1}(s).
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
    auto c = [&](int k) { return k <= n ? s.coeffs[k] : 0.0; };
    u[0] = c(0) - 0.5 * c(2);
    for (int k = 1; k <= n; ++k) u[k] = 0.5 * (c(k) - c(k + 2));

    const double h = 0.5 * (s.b - s.a);
    const double t = (2.0 * x - (s.a + s.b)) / (s.b - s.a);
    // Evaluate sum_k u_k T_{k+1}(t) by recurrence.
    double acc = 0.0;
    double tkm1 = 1.0, tk = t;  // T_0, T_1
    for (int k = 0; k <= n; ++k) {
        acc += u[k] * tk;
        const double tkp1 = 2.0 * t * tk - tkm1;
        tkm1 = tk;
        tk = tkp1;
    }
    return h * kPi * acc;
}

double gc2_integrate(const std::function<double(double)>& g, double a, double b, int n) {
    if (n < 2) throw std::invalid_argument("gc2_integrate: requires N >= 2");
    const double m = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double th = kPi * j / (n + 1);
        const double sn = std::sin(th);
        const double gx = g(m + h * std::cos(th));
        if (!std::isfinite(gx)) throw std::domain_error("gc2_integrate: non-finite function value");
        acc += sn * sn * gx;
    }
    return h * h * kPi / (n + 1) * acc;
}

double gc1_integrate(const std::function<double(double)>& g, double a, double b, int n) {
    if (n < 2) throw std::invalid_argument("gc1_integrate: requires N >= 2");
    const double m = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double th = kPi * (2.0 * j - 1.0) / (2.0 * n);
        const double gx = g(m + h * std::cos(th));
        if (!std::isfinite(gx)) throw std::domain_error("gc1_integrate: non-finite function value");
        acc += gx;
    }
    return kPi / n * acc;
}

ContourSpec::ContourSpec(std::complex<double> c, double r, int n) : center(c), radius(r), nodes(n) {
    if (!(radius > 0.0)) throw std::invalid_argument("ContourSpec: radius must be positive");
    if (nodes < 8) throw std::invalid_argument("ContourSpec: requires nodes >= 8");
}

std::complex<double> contour_trapezoid(
    const std::function<std::complex<double>(std::complex<double>)>& g, const ContourSpec& spec) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < spec.nodes; ++j) {
        const double th = 2.0 * kPi * j / spec.nodes;
        const std::complex<double> e{std::cos(th), std::sin(th)};
        acc += g(spec.center + spec.radius * e) * e;
    }
    return spec.radius * acc / static_cast<double>(spec.nodes);
}

}  // namespace spiked
