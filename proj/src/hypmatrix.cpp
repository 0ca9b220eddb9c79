#include "spiked/hypmatrix.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spiked {

namespace {

using Complex = std::complex<double>;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Complex ipow(Complex z, int e) {
    Complex r{1.0, 0.0};
    for (int i = 0; i < e; ++i) r *= z;
    return r;
}

bool near_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) < tol; }

void require_distinct(const Eigen::VectorXd& y) {
    for (int i = 0; i < y.size(); ++i)
        for (int j = i + 1; j < y.size(); ++j)
            if (y[i] == y[j]) throw std::invalid_argument("requires distinct y-spectrum");
}

// Gamma(w + m) / Gamma(w + l) for integers m > l as a product of linear
// factors; never evaluates the gamma function.
double gamma_ratio(double w, int l, int m) {
    double prod = 1.0;
    for (int t = l; t < m; ++t) prod *= w + t;
    return prod;
}

// K(a_{1:p}, b_{1:q}) of the determinant representations.
double det_rep_constant(const HypgeomSpec& spec, int n, int r) {
    double k = 1.0;
    for (int l = 1; l <= r; ++l) {
        k *= factorial(n - l);
        // (b - l)! / (b - n)! = prod_{j=l}^{n-1} (b - j)
        for (double b : spec.b)
            for (int j = l; j <= n - 1; ++j) k *= b - j;
        // (a - n)! / (a - l)! = 1 / prod_{j=l}^{n-1} (a - j)
        for (double a : spec.a)
            for (int j = l; j <= n - 1; ++j) {
                const double f = a - j;
                if (f == 0.0)
                    throw std::domain_error("mhg determinant: parameter pole in K(a, b)");
                k /= f;
            }
    }
    return k;
}

}  // namespace

int MultSpectrum::rank() const {
    int r = 0;
    for (int m : mults) r += m;
    return r;
}

void MultSpectrum::validate() const {
    if (values.size() != static_cast<Eigen::Index>(mults.size()))
        throw std::invalid_argument("MultSpectrum: values and mults must align");
    for (int i = 0; i < blocks(); ++i) {
        if (mults[i] < 1) throw std::invalid_argument("MultSpectrum: multiplicities must be >= 1");
        if (values[i] == 0.0) throw std::invalid_argument("MultSpectrum: values must be nonzero");
        if (i > 0 && !(values[i - 1] > values[i]))
            throw std::invalid_argument("MultSpectrum: values must be strictly decreasing");
    }
}

double theta_shift(int n, int r, double alpha) {
    if (n < r || r < 1) throw std::invalid_argument("theta_shift: requires n >= r >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("theta_shift: requires alpha > 0");
    const double beta = 2.0 / alpha;
    if (!near_integer(beta) || beta < 1.0) throw std::domain_error("theta_shift: theta not integral");
    const long b = std::lround(beta);
    if (b % 2 == 1 && (n - r + 1) % 2 == 1) throw std::domain_error("theta_shift: theta not integral");
    return (n - r + 1 - alpha) / alpha;
}

double phi_alpha(const std::vector<double>& params, double alpha, int r, double theta) {
    if (!near_integer(theta) || theta < -1e-9)
        throw std::invalid_argument("phi_alpha: theta must be a non-negative integer");
    const int th = static_cast<int>(std::lround(theta));
    double prod = 1.0;
    for (double a : params)
        for (int i = 1; i <= r; ++i) {
            // Gamma(w) / Gamma(w - theta) = (w-1)(w-2)...(w-theta)
            const double w = a - (i - 1) / alpha;
            for (int k = 1; k <= th; ++k) prod *= w - k;
        }
    return prod;
}

double mhg_contour(const HypgeomSpec& spec, const Eigen::VectorXd& x_nonzero, int ambient_n,
                  const Eigen::VectorXd& y, const ContourSpec& contour, int truncation) {
    const int r = static_cast<int>(x_nonzero.size());
    const int n = ambient_n;
    if (y.size() != n) throw std::invalid_argument("mhg_contour: y must have length n");
    if (r < 1 || r > n) throw std::invalid_argument("mhg_contour: requires 1 <= r <= n");
    if (r > 3) throw std::invalid_argument("mhg_contour: nested quadrature supports r <= 3");
    for (int j = 0; j < r; ++j)
        if (x_nonzero[j] == 0.0) throw std::invalid_argument("mhg_contour: x_j must be nonzero");

    const double beta = 2.0 / spec.alpha;
    if (!near_integer(beta) || std::lround(beta) % 2 != 0)
        throw std::domain_error("mhg_contour: unsupported branch structure");
    const int half_beta = static_cast<int>(std::lround(beta)) / 2;
    const int int_beta = 2 * half_beta;

    for (int s = 0; s < n; ++s)
        if (!(std::abs(Complex(y[s], 0.0) - contour.center) < contour.radius))
            throw std::domain_error("mhg_contour: pole outside contour");

    if (spec.p() == spec.q() + 1) {
        const double zmax = std::abs(contour.center) + contour.radius;
        if (!(x_nonzero.cwiseAbs().maxCoeff() * zmax < 1.0))
            throw std::domain_error("mhg_contour: inner series divergent on contour");
    }

    const double theta = theta_shift(n, r, spec.alpha);
    const int th = static_cast<int>(std::lround(theta));

    HypgeomSpec inner = spec;
    for (double& a : inner.a) a -= theta;
    for (double& b : inner.b) b -= theta;

    double pref = phi_alpha(spec.b, spec.alpha, r, theta) / phi_alpha(spec.a, spec.alpha, r, theta);
    const double sign_exp = r * (r - 1) / 2.0 / spec.alpha;
    if (!near_integer(sign_exp)) throw std::domain_error("mhg_contour: unsupported branch structure");
    if (std::lround(sign_exp) % 2 != 0) pref = -pref;
    for (int j = 1; j <= r; ++j)
        pref *= std::tgamma((n + 1 - j) / spec.alpha) * std::tgamma(1.0 / spec.alpha) /
                std::tgamma((r + 1 - j) / spec.alpha);
    for (int j = 0; j < r; ++j) pref /= std::pow(x_nonzero[j], th);
    pref /= factorial(r);

    // Nodes, weights (z - c)/N, and pole products shared by every dimension.
    const int nn = contour.nodes;
    std::vector<Complex> node(nn), wgt(nn), pole(nn);
    for (int j = 0; j < nn; ++j) {
        const double t = 2.0 * std::numbers::pi * j / nn;
        const Complex e{std::cos(t), std::sin(t)};
        node[j] = contour.center + contour.radius * e;
        wgt[j] = contour.radius * e / static_cast<double>(nn);
        Complex p{1.0, 0.0};
        for (int s = 0; s < n; ++s) p *= ipow(node[j] - y[s], half_beta);
        pole[j] = 1.0 / p;
    }

    Eigen::VectorXcd xc = x_nonzero.cast<Complex>();
    Eigen::VectorXcd z(r);
    Complex total{0.0, 0.0};
    std::vector<int> idx(r, 0);
    while (true) {
        Complex w{1.0, 0.0};
        for (int t = 0; t < r; ++t) {
            z[t] = node[idx[t]];
            w *= wgt[idx[t]] * pole[idx[t]];
        }
        for (int t = 1; t < r; ++t)
            for (int s = 0; s < t; ++s) w *= ipow(z[t] - z[s], int_beta);
        total += w * mhg_series(inner, xc, z, truncation).value;

        int d = r - 1;
        while (d >= 0 && ++idx[d] == nn) idx[d--] = 0;
        if (d < 0) break;
    }
    return pref * total.real();
}

double residue_entry(const HypgeomSpec& spec, double x, const Eigen::VectorXd& y, int power,
                     int truncation) {
    if (power < 0) throw std::invalid_argument("residue_entry: requires power >= 0");
    require_distinct(y);
    const int n = static_cast<int>(y.size());

    // The residue sum over the poles is a divided difference and cancels
    // catastrophically when the y cluster.  Expand the pFq kernel instead:
    //   (1/2 pi i) oint z^m / prod (z - y_s) dz = h_{m-n+1}(y),
    // the complete homogeneous symmetric polynomial, whose terms do not
    // alternate for positive spectra.  Same truncation degree as the
    // term-by-term residue evaluation.
    const double scale = std::max(1e-300, y.cwiseAbs().maxCoeff());
    const int top = truncation + power - (n - 1);
    if (top < 0) return 0.0;
    std::vector<double> h(top + 1, 0.0);  // h_j(y) / scale^j
    h[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        const double u = y[i] / scale;
        for (int j = 1; j <= top; ++j) h[j] += u * h[j - 1];
    }

    double acc = 0.0;
    double coeff = 1.0;  // prod (a)_k / prod (b)_k * (x*scale)^k / k!
    for (int k = 0; k <= truncation; ++k) {
        const int idx = k + power - (n - 1);
        if (idx >= 0) acc += coeff * h[idx];
        for (double aj : spec.a) coeff *= aj + k;
        if (coeff == 0.0) break;  // numerator terminated
        for (double bj : spec.b) {
            if (bj + k == 0.0) throw std::domain_error("residue_entry: pochhammer pole");
            coeff /= bj + k;
        }
        coeff *= x * scale / (k + 1);
    }
    return acc * std::pow(scale, power - (n - 1));
}

double mhg_det_distinct(const HypgeomSpec& spec, const Eigen::VectorXd& x_desc,
                        const Eigen::VectorXd& y, int truncation) {
    if (spec.alpha != 1.0) throw std::invalid_argument("mhg_det_distinct: requires alpha = 1");
    const int r = static_cast<int>(x_desc.size());
    const int n = static_cast<int>(y.size());
    if (r < 1 || r > n) throw std::invalid_argument("mhg_det_distinct: requires 1 <= r <= n");
    for (int i = 0; i < r; ++i) {
        if (x_desc[i] == 0.0) throw std::invalid_argument("mhg_det_distinct: x must be nonzero");
        if (i > 0 && x_desc[i - 1] == x_desc[i])
            throw std::invalid_argument("mhg_det_distinct: coinciding x (use mhg_det_mult)");
        if (i > 0 && !(x_desc[i - 1] > x_desc[i]))
            throw std::invalid_argument("mhg_det_distinct: x must be strictly decreasing");
    }
    require_distinct(y);

    HypgeomSpec shifted = spec;
    for (double& a : shifted.a) a -= n - 1;
    for (double& b : shifted.b) b -= n - 1;

    Eigen::MatrixXd mat(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) mat(i, j) = residue_entry(shifted, x_desc[i], y, j, truncation);

    double pref = det_rep_constant(spec, n, r);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) pref /= x_desc[i] - x_desc[j];
    for (int j = 0; j < r; ++j) pref /= std::pow(x_desc[j], n - r);
    return pref * mat.determinant();
}

double mhg_det_mult(const HypgeomSpec& spec, const MultSpectrum& x, const Eigen::VectorXd& y,
                    int truncation) {
    if (spec.alpha != 1.0) throw std::invalid_argument("mhg_det_mult: requires alpha = 1");
    x.validate();
    const int m_blocks = x.blocks();
    const int r = x.rank();
    const int n = static_cast<int>(y.size());
    if (r > n) throw std::invalid_argument("mhg_det_mult: requires r <= n");
    require_distinct(y);

    Eigen::MatrixXd mat(r, r);
    double pref = det_rep_constant(spec, n, r);

    int row = 0;
    for (int l = 0; l < m_blocks; ++l) {
        const int kl = x.mults[l];
        for (int i = 1; i <= kl; ++i, ++row) {
            HypgeomSpec shifted = spec;
            for (double& a : shifted.a) a -= n - i;
            for (double& b : shifted.b) b -= n - i;
            // Confluent row: (1/(i-1)!) prod (a')_{i-1} / prod (b')_{i-1}
            // times the (i-1)-th parameter-shifted entries.
            double rowc = 1.0 / factorial(i - 1);
            for (double a : spec.a) rowc *= gamma_ratio(a - n + 1, 0, i - 1);
            for (double b : spec.b) {
                const double g = gamma_ratio(b - n + 1, 0, i - 1);
                if (g == 0.0) throw std::domain_error("mhg_det_mult: parameter pole in block row");
                rowc /= g;
            }
            for (int j = 0; j < r; ++j)
                mat(row, j) = rowc * residue_entry(shifted, x.values[l], y, (i - 1) + j, truncation);
        }
        if (kl % 4 == 2 || kl % 4 == 3) pref = -pref;  // (-1)^{k(k-1)/2} from the confluent limit
        pref /= std::pow(x.values[l], static_cast<double>(kl) * (n - r));
    }
    for (int a = 0; a < m_blocks; ++a)
        for (int b = a + 1; b < m_blocks; ++b)
            pref /= std::pow(x.values[a] - x.values[b], static_cast<double>(x.mults[a]) * x.mults[b]);

    return pref * mat.determinant();
}

}  // namespace spiked
