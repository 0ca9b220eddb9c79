#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spiked/numerics.hpp"

using namespace spiked;

namespace {

constexpr double kPi = std::numbers::pi;

// Adaptive Simpson, test oracle only.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 30) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    auto simpson = [](double fa, double fm, double fb, double h) {
        return h / 6.0 * (fa + 4.0 * fm + fb);
    };
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double a, double m, double b, double fa, double fm, double fb, int d) -> double {
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double whole = simpson(fa, fm, fb, b - a);
        const double left = simpson(fa, flm, fm, m - a);
        const double right = simpson(fm, frm, fb, b - m);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(a, lm, m, fa, flm, fm, d - 1) + rec(m, rm, b, fm, frm, fb, d - 1);
    };
    return rec(a, m, b, fa, fm, fb, depth);
}

// Brute-force principal value by subtracting the singularity, oracle only.
double pv_oracle(const ChebSeries& s, double x) {
    const double a = s.a, b = s.b;
    auto w = [&](double y) { return std::sqrt((b - y) * (y - a)); };
    const double sx = s.eval(x) * w(x);
    auto g = [&](double y) {
        if (y == x) return 0.0;  // removable after subtraction
        return (s.eval(y) * w(y) - sx) / (x - y);
    };
    const double smooth = adaptive_simpson(g, a, b, 1e-12);
    // P int 1/(x-y) dy over [a,b] = ln((x-a)/(b-x))
    return smooth + sx * std::log((x - a) / (b - x));
}

// Exact moments of the Chebyshev weights on [-1,1] (Wallis formula).
double weight_moment_u(int k) {  // int t^k sqrt(1-t^2) dt
    if (k % 2) return 0.0;
    double v = kPi / 2.0;
    for (int j = 2; j <= k; j += 2) v *= static_cast<double>(j - 1) / (j + 2);
    return v;
}

double weight_moment_t(int k) {  // int t^k / sqrt(1-t^2) dt
    if (k % 2) return 0.0;
    double v = kPi;
    for (int j = 2; j <= k; j += 2) v *= static_cast<double>(j - 1) / j;
    return v;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("cheb_fit reproduces linear function coefficients") {
    const ChebSeries s = cheb_fit([](double x) { return x; }, 0.0, 4.0, 4);
    CHECK(s.coeffs[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.coeffs[1] == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(s.coeffs[k]) < 1e-14);
}

TEST_CASE("cheb_fit constant on shifted interval") {
    const ChebSeries s = cheb_fit([](double) { return 1.0; }, 1.0, 9.0, 12);
    CHECK(s.coeffs[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int k = 1; k <= 12; ++k) CHECK(std::abs(s.coeffs[k]) < 1e-15);
}

TEST_CASE("cheb_fit interpolates log to near machine accuracy") {
    const ChebSeries s = cheb_fit([](double x) { return std::log(x); }, 1.0, 9.0, 32);
    CHECK(std::abs(s.eval(5.0) - std::log(5.0)) < 1e-12);
    CHECK(std::abs(s.eval(1.0) - 0.0) < 1e-12);
    CHECK(std::abs(s.eval(9.0) - std::log(9.0)) < 1e-12);
}

TEST_CASE("cheb_fit rejects non-finite samples") {
    CHECK_THROWS_WITH_AS(cheb_fit([](double x) { return 1.0 / (x - 2.0); }, 0.0, 4.0, 8),
                         doctest::Contains("non-finite"), std::domain_error);
}

TEST_CASE("cheb_derivative of x^2 and of a constant") {
    const ChebSeries s = cheb_fit([](double x) { return x * x; }, -1.0, 1.0, 6);
    const ChebSeries d = cheb_derivative(s);
    for (double x : {-0.9, -0.3, 0.0, 0.7}) CHECK(d.eval(x) == doctest::Approx(2.0 * x).epsilon(1e-13));

    const ChebSeries c = cheb_fit([](double) { return 3.5; }, 0.0, 1.0, 5);
    const ChebSeries dc = cheb_derivative(c);
    CHECK(std::abs(dc.eval(0.3)) < 1e-13);
}

TEST_CASE("cheb_derivative matches 1/x for the log interpolant") {
    const ChebSeries s = cheb_fit([](double x) { return std::log(x); }, 1.0, 9.0, 48);
    const ChebSeries d = cheb_derivative(s);
    CHECK(std::abs(d.eval(3.0) - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("pv_hilbert symmetry and closed-form values") {
    const ChebSeries one = cheb_fit([](double) { return 1.0; }, -1.0, 1.0, 8);
    CHECK(std::abs(pv_hilbert(one, 0.0)) < 1e-13);

    const ChebSeries lin = cheb_fit([](double y) { return y; }, -1.0, 1.0, 8);
    CHECK(pv_hilbert(lin, 0.0) == doctest::Approx(-kPi / 2.0).epsilon(1e-12));
    CHECK(pv_hilbert(lin, 0.0) == doctest::Approx(pv_oracle(lin, 0.0)).epsilon(1e-8));
}

TEST_CASE("pv_hilbert rejects points outside the open support") {
    const ChebSeries one = cheb_fit([](double) { return 1.0; }, 0.0, 4.0, 8);
    CHECK_THROWS_WITH_AS(pv_hilbert(one, 5.0), doctest::Contains("outside"), std::domain_error);
    CHECK_THROWS_AS(pv_hilbert(one, 0.0), std::domain_error);
}

TEST_CASE("pv_hilbert agrees with subtraction-of-singularity quadrature") {
    std::mt19937_64 gen(20240811);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0), point(0.05, 0.95);
    for (int trial = 0; trial < 20; ++trial) {
        ChebSeries s;
        s.a = -1.0 + coeff(gen);
        s.b = 1.5 + coeff(gen);
        s.coeffs = Eigen::VectorXd(17);
        for (int k = 0; k <= 16; ++k) s.coeffs[k] = coeff(gen) / (1.0 + k * k);
        const double x = s.a + (s.b - s.a) * point(gen);
        const double fast = pv_hilbert(s, x);
        const double slow = pv_oracle(s, x);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-8));
    }
}

TEST_CASE("gc2 closed-form beta integrals") {
    CHECK(gc2_integrate([](double) { return 1.0; }, 0.0, 4.0, 32) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-13));
    CHECK(std::abs(gc2_integrate([](double x) { return x - 2.0; }, 0.0, 4.0, 32)) < 1e-13);
    CHECK(gc2_integrate([](double) { return 1.0; }, 1.0, 9.0, 32) ==
          doctest::Approx(8.0 * kPi).epsilon(1e-13));
}

TEST_CASE("gc1 closed-form arcsine integrals") {
    CHECK(gc1_integrate([](double) { return 1.0; }, 2.0, 7.0, 16) ==
          doctest::Approx(kPi).epsilon(1e-14));
    CHECK(gc1_integrate([](double x) { return x; }, 0.0, 4.0, 16) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-13));
    CHECK(gc1_integrate([](double x) { return 1.0 / (5.0 - x); }, 0.0, 4.0, 64) ==
          doctest::Approx(kPi / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("gauss rules are exact for polynomials of degree 2N-1") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const int n = 6;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> c(2 * n);  // degree 2N-1
        for (auto& v : c) v = coeff(gen);
        auto poly = [&](double t) {
            double acc = 0.0;
            for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * t + c[k];
            return acc;
        };
        double exact_u = 0.0, exact_t = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            exact_u += c[k] * weight_moment_u(static_cast<int>(k));
            exact_t += c[k] * weight_moment_t(static_cast<int>(k));
        }
        const double got_u = gc2_integrate(poly, -1.0, 1.0, n);
        const double got_t = gc1_integrate(poly, -1.0, 1.0, n);
        CHECK(got_u == doctest::Approx(exact_u).epsilon(1e-12));
        CHECK(got_t == doctest::Approx(exact_t).epsilon(1e-12));
    }
}

TEST_CASE("contour_trapezoid residues") {
    const ContourSpec unit({0.0, 0.0}, 1.0, 128);
    CHECK(std::abs(contour_trapezoid([](std::complex<double> z) { return 1.0 / z; }, unit) -
                   1.0) < 1e-13);
    CHECK(std::abs(contour_trapezoid([](std::complex<double> z) { return z; }, unit)) < 1e-13);
    CHECK(std::abs(contour_trapezoid(
                       [](std::complex<double> z) { return std::exp(z) / (z * z); }, unit) -
                   1.0) < 1e-13);
}

TEST_CASE("contour_trapezoid is stable under node doubling") {
    auto g = [](std::complex<double> z) {
        return (z * z + 2.0) / ((z - 0.3) * (z + std::complex<double>(0.1, 0.4)));
    };
    const auto v1 = contour_trapezoid(g, ContourSpec({0.0, 0.0}, 1.0, 64));
    const auto v2 = contour_trapezoid(g, ContourSpec({0.0, 0.0}, 1.0, 128));
    CHECK(std::abs(v1 - v2) < 1e-10);
}

TEST_CASE("ContourSpec validates its invariants") {
    CHECK_THROWS_AS(ContourSpec({0.0, 0.0}, -1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(ContourSpec({0.0, 0.0}, 1.0, 4), std::invalid_argument);
}

TEST_CASE("cheb_derivative tracks finite differences on an analytic function") {
    const ChebSeries s = cheb_fit([](double x) { return std::exp(x) * std::sin(x); }, 0.0, 2.0, 40);
    const ChebSeries d = cheb_derivative(s);
    const double h = 1e-6;
    for (double x : {0.2, 0.9, 1.7}) {
        const double fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
        CHECK(d.eval(x) == doctest::Approx(fd).epsilon(1e-8));
    }
}

}  // TEST_SUITE
