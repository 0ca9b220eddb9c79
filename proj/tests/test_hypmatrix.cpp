#include <doctest.h>

#include <cmath>
#include <random>

#include "spiked/hypmatrix.hpp"

using namespace spiked;

namespace {

// Series value with X padded by zeros to the ambient dimension.
double series_oracle(const HypgeomSpec& spec, const Eigen::VectorXd& x_nonzero,
                     const Eigen::VectorXd& y, int truncation) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(y.size());
    x.head(x_nonzero.size()) = x_nonzero;
    return mhg_series(spec, x, y, truncation).value;
}

Eigen::VectorXd distinct_y(std::mt19937_64& gen, int n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd y(n);
    for (;;) {
        for (int i = 0; i < n; ++i) y[i] = d(gen);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(y[i] - y[j]) < 0.02) ok = false;
        if (ok) return y;
    }
}

}  // namespace

TEST_SUITE("hypmatrix") {

TEST_CASE("theta_shift values and parity guard") {
    CHECK(theta_shift(5, 2, 1.0) == doctest::Approx(3.0));
    CHECK(theta_shift(3, 3, 1.0) == doctest::Approx(0.0));
    CHECK(theta_shift(6, 1, 2.0) == doctest::Approx(2.0));
    // beta = 1 odd with n - r + 1 odd
    CHECK_THROWS_WITH_AS(theta_shift(5, 3, 2.0), doctest::Contains("theta not integral"),
                         std::domain_error);
    // beta = 1 odd but n - r + 1 even is allowed
    CHECK(theta_shift(6, 3, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("phi_alpha closed forms") {
    CHECK(phi_alpha({}, 1.0, 3, 2.0) == doctest::Approx(1.0));
    CHECK(phi_alpha({4.2, -1.3}, 1.0, 2, 0.0) == doctest::Approx(1.0));
    // Gamma(5)/Gamma(3) = 12 with alpha=1, r=1, theta=2
    CHECK(phi_alpha({5.0}, 1.0, 1, 2.0) == doctest::Approx(12.0));
}

TEST_CASE("residue_entry exponential cases") {
    HypgeomSpec f00;
    Eigen::VectorXd y1(1);
    y1 << 0.73;
    CHECK(residue_entry(f00, 1.2, y1, 0, 60) ==
          doctest::Approx(std::exp(1.2 * 0.73)).epsilon(1e-13));

    Eigen::VectorXd y2(2);
    y2 << 0.3, 0.9;
    const double want = (std::exp(0.5 * 0.3) - std::exp(0.5 * 0.9)) / (0.3 - 0.9);
    CHECK(residue_entry(f00, 0.5, y2, 0, 60) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("residue_entry agrees with contour quadrature") {
    std::mt19937_64 gen(31);
    HypgeomSpec s;
    s.a = {2.7};
    s.b = {4.1};
    const Eigen::VectorXd y = distinct_y(gen, 5, 0.1, 0.9);
    const double x = 0.8;
    for (int power : {0, 2}) {
        const double fast = residue_entry(s, x, y, power, 60);
        const ContourSpec contour({0.5, 0.0}, 0.55, 512);
        const auto slow = contour_trapezoid(
            [&](std::complex<double> z) {
                std::complex<double> den = 1.0;
                for (int i = 0; i < y.size(); ++i) den *= z - y[i];
                std::complex<double> zp = 1.0;
                for (int i = 0; i < power; ++i) zp *= z;
                return scalar_pfq(s, x * z, 60) * zp / den;
            },
            contour);
        CHECK(fast == doctest::Approx(slow.real()).epsilon(1e-10));
    }
}

TEST_CASE("residue_entry rejects coinciding poles") {
    HypgeomSpec s;
    Eigen::VectorXd y(3);
    y << 0.2, 0.5, 0.5;
    CHECK_THROWS_WITH_AS(residue_entry(s, 1.0, y, 0, 30), doctest::Contains("distinct"),
                         std::invalid_argument);
}

TEST_CASE("mhg_det_distinct single spike matches the series oracle") {
    std::mt19937_64 gen(11);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.7);
    Eigen::VectorXd x(1);
    x << 0.65;
    const double det = mhg_det_distinct(f00, x, y, 40);
    const double ser = series_oracle(f00, x, y, 40);
    CHECK(det == doctest::Approx(ser).epsilon(1e-8));
}

TEST_CASE("mhg_det_distinct 0F1 rank two matches the series oracle") {
    std::mt19937_64 gen(12);
    HypgeomSpec s;
    s.b = {4.0};  // Model-B style lower parameter
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.7);
    Eigen::VectorXd x(2);
    x << 0.7, 0.25;
    const double det = mhg_det_distinct(s, x, y, 40);
    const double ser = series_oracle(s, x, y, 40);
    CHECK(det == doctest::Approx(ser).epsilon(1e-6));
}

TEST_CASE("mhg_det_distinct full-rank case (no zero padding)") {
    std::mt19937_64 gen(13);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 3, 0.1, 0.8);
    Eigen::VectorXd x(3);
    x << 0.8, 0.45, 0.2;
    const double det = mhg_det_distinct(f00, x, y, 40);
    const double ser = series_oracle(f00, x, y, 40);
    CHECK(det == doctest::Approx(ser).epsilon(1e-6));
}

TEST_CASE("mhg_det_distinct input validation") {
    HypgeomSpec f00;
    Eigen::VectorXd y(3);
    y << 0.1, 0.4, 0.8;
    Eigen::VectorXd same(2), unsorted(2), zero(1);
    same << 0.5, 0.5;
    unsorted << 0.2, 0.5;
    zero << 0.0;
    CHECK_THROWS_WITH_AS(mhg_det_distinct(f00, same, y, 20), doctest::Contains("mhg_det_mult"),
                         std::invalid_argument);
    CHECK_THROWS_AS(mhg_det_distinct(f00, unsorted, y, 20), std::invalid_argument);
    CHECK_THROWS_AS(mhg_det_distinct(f00, zero, y, 20), std::invalid_argument);
}

TEST_CASE("mhg_det_mult with unit multiplicities equals the distinct path") {
    std::mt19937_64 gen(14);
    HypgeomSpec s;
    s.a = {3.4};
    s.b = {5.2};
    const Eigen::VectorXd y = distinct_y(gen, 5, 0.05, 0.6);
    Eigen::VectorXd x(2);
    x << 0.9, 0.4;
    MultSpectrum ms;
    ms.values = x;
    ms.mults = {1, 1};
    CHECK(mhg_det_mult(s, ms, y, 40) ==
          doctest::Approx(mhg_det_distinct(s, x, y, 40)).epsilon(1e-12));
}

TEST_CASE("mhg_det_mult double spike matches the series oracle") {
    std::mt19937_64 gen(15);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.7);
    MultSpectrum ms;
    ms.values = Eigen::VectorXd::Constant(1, 0.6);
    ms.mults = {2};
    Eigen::VectorXd xfull(2);
    xfull << 0.6, 0.6;
    const double det = mhg_det_mult(f00, ms, y, 40);
    const double ser = series_oracle(f00, xfull, y, 40);
    CHECK(det == doctest::Approx(ser).epsilon(1e-6));
}

TEST_CASE("mhg_det_mult is the confluent limit of mhg_det_distinct") {
    std::mt19937_64 gen(16);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.7);
    MultSpectrum ms;
    ms.values = Eigen::VectorXd::Constant(1, 0.55);
    ms.mults = {2};
    const double mult_val = mhg_det_mult(f00, ms, y, 40);
    const double eps = 1e-4;
    Eigen::VectorXd xp(2);
    xp << 0.55, 0.55 - eps;
    const double dist_val = mhg_det_distinct(f00, xp, y, 40);
    CHECK(std::abs(dist_val - mult_val) < 10.0 * eps * std::abs(mult_val));
}

TEST_CASE("mhg_contour rank one matches the series oracle") {
    std::mt19937_64 gen(17);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 3, 0.1, 0.9);
    Eigen::VectorXd x(1);
    x << 0.5;
    const ContourSpec contour({0.5, 0.0}, 0.85, 256);
    const double lem = mhg_contour(f00, x, 3, y, contour, 40);
    const double ser = series_oracle(f00, x, y, 40);
    CHECK(lem == doctest::Approx(ser).epsilon(1e-6));
}

TEST_CASE("mhg_contour rank two matches the series oracle") {
    std::mt19937_64 gen(18);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.8);
    Eigen::VectorXd x(2);
    x << 0.6, 0.3;
    const ContourSpec contour({0.45, 0.0}, 0.8, 96);
    const double lem = mhg_contour(f00, x, 4, y, contour, 32);
    const double ser = series_oracle(f00, x, y, 32);
    CHECK(lem == doctest::Approx(ser).epsilon(1e-5));
}

TEST_CASE("mhg_contour handles even beta beyond alpha = 1") {
    std::mt19937_64 gen(19);
    HypgeomSpec s;
    s.alpha = 0.5;  // beta = 4
    const Eigen::VectorXd y = distinct_y(gen, 3, 0.2, 0.9);
    Eigen::VectorXd x(1);
    x << 0.4;
    const ContourSpec contour({0.55, 0.0}, 0.75, 384);
    const double lem = mhg_contour(s, x, 3, y, contour, 36);
    const double ser = series_oracle(s, x, y, 36);
    CHECK(lem == doctest::Approx(ser).epsilon(1e-6));
}

TEST_CASE("mhg_contour reduces to the one-argument function at Y = I") {
    HypgeomSpec s;
    s.b = {4.5};
    Eigen::VectorXd x(1), ones = Eigen::VectorXd::Ones(3);
    x << 0.8;
    const ContourSpec contour({1.0, 0.0}, 0.6, 256);
    const double lem = mhg_contour(s, x, 3, ones, contour, 40);
    const double ser = series_oracle(s, x, ones, 40);
    CHECK(lem == doctest::Approx(ser).epsilon(1e-8));
}

TEST_CASE("mhg_contour guards its preconditions") {
    HypgeomSpec f00;
    Eigen::VectorXd x(1), y(3);
    x << 0.5;
    y << 0.2, 0.5, 0.9;
    // odd beta
    HypgeomSpec odd;
    odd.alpha = 2.0;
    CHECK_THROWS_WITH_AS(mhg_contour(odd, x, 3, y, ContourSpec({0.5, 0.0}, 1.0, 64), 20),
                         doctest::Contains("unsupported branch structure"), std::domain_error);
    // contour missing a pole
    CHECK_THROWS_WITH_AS(mhg_contour(f00, x, 3, y, ContourSpec({0.2, 0.0}, 0.4, 64), 20),
                         doctest::Contains("pole outside contour"), std::domain_error);
}

TEST_CASE("contour and determinant paths compute the same integral") {
    std::mt19937_64 gen(20);
    HypgeomSpec s;
    s.b = {5.5};
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.8);
    Eigen::VectorXd x(2);
    x << 0.75, 0.35;
    const double det = mhg_det_distinct(s, x, y, 36);
    const double lem = mhg_contour(s, x, 4, y, ContourSpec({0.45, 0.0}, 0.8, 96), 36);
    CHECK(lem == doctest::Approx(det).epsilon(1e-8));
}

TEST_CASE("scale covariance of the determinant path in the 0F0 case") {
    std::mt19937_64 gen(21);
    HypgeomSpec f00;
    const Eigen::VectorXd y = distinct_y(gen, 4, 0.1, 0.7);
    Eigen::VectorXd x(2);
    x << 0.8, 0.3;
    const double psi = 1.7;
    const double base = mhg_det_distinct(f00, x, y, 44);
    const double scaled = mhg_det_distinct(f00, (x / psi).eval(), (psi * y).eval(), 44);
    CHECK(scaled == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("determinant path is invariant under permutations of y") {
    std::mt19937_64 gen(22);
    HypgeomSpec s;
    s.a = {2.2};
    s.b = {3.9};
    Eigen::VectorXd y(4), yp(4);
    y << 0.12, 0.35, 0.52, 0.77;
    yp << 0.52, 0.12, 0.77, 0.35;
    Eigen::VectorXd x(2);
    x << 0.6, 0.2;
    CHECK(mhg_det_distinct(s, x, y, 36) ==
          doctest::Approx(mhg_det_distinct(s, x, yp, 36)).epsilon(1e-10));
}

TEST_CASE("oracle equivalence across parameter families") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> xv(0.15, 0.7), par(1.5, 6.0);
    for (int pq = 0; pq < 3; ++pq) {
        for (int trial = 0; trial < 3; ++trial) {
            HypgeomSpec s;
            if (pq == 1) s.b = {par(gen)};
            if (pq == 2) {
                s.a = {par(gen)};
                s.b = {par(gen) + 4.0};
            }
            const int n = 4, r = 2;
            const Eigen::VectorXd y = distinct_y(gen, n, 0.05, 0.65);
            Eigen::VectorXd x(r);
            x[0] = xv(gen) + 0.3;
            x[1] = x[0] - 0.25;
            const double det = mhg_det_distinct(s, x, y, 40);
            const double ser = series_oracle(s, x, y, 40);
            CHECK(det == doctest::Approx(ser).epsilon(1e-5));
        }
    }
}

}  // TEST_SUITE
