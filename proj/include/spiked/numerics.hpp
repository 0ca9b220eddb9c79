#ifndef SPIKED_NUMERICS_HPP
#define SPIKED_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace spiked {

/// Truncated Chebyshev expansion sum_k c_k T_k(t) on [a,b], t the affine
/// image of x in [-1,1].  c_0 enters with weight one (no halving).
struct ChebSeries {
    double a = -1.0;
    double b = 1.0;
    Eigen::VectorXd coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double eval(double x) const;
};

/// Degree-N Chebyshev interpolant of f on [a,b] through the N+1 extreme
/// points of T_N (second-kind points).  Spectrally accurate for analytic f.
ChebSeries cheb_fit(const std::function<double(double)>& f, double a, double b, int n);

/// Series of the derivative of the interpolant; degree drops by one.
ChebSeries cheb_derivative(const ChebSeries& s);

/// Cauchy principal value of  P int_a^b s(y) sqrt((b-y)(y-a)) / (x-y) dy
/// for a < x < b, via the closed-form finite Hilbert transform of the
/// second-kind Chebyshev modes.
double pv_hilbert(const ChebSeries& s, double x);

/// Gauss-Chebyshev rule of the second kind:
///   int_a^b g(x) sqrt((b-x)(x-a)) dx,  exact for deg(g) <= 2N-1.
double gc2_integrate(const std::function<double(double)>& g, double a, double b, int n);

/// Gauss-Chebyshev rule of the first kind:
///   int_a^b g(x) / sqrt((b-x)(x-a)) dx,  exact for deg(g) <= 2N-1.
double gc1_integrate(const std::function<double(double)>& g, double a, double b, int n);

/// Circle in the complex plane traversed counter-clockwise by an N-node
/// trapezoid rule.
struct ContourSpec {
    std::complex<double> center{0.0, 0.0};
    double radius = 1.0;
    int nodes = 256;

    ContourSpec() = default;
    ContourSpec(std::complex<double> c, double r, int n);
};

/// (1/2*pi*i) closed contour integral of g over the circle.  Spectrally
/// accurate for integrands analytic in a neighbourhood of the circle.
std::complex<double> contour_trapezoid(
    const std::function<std::complex<double>(std::complex<double>)>& g,
    const ContourSpec& spec);

}  // namespace spiked

#endif
