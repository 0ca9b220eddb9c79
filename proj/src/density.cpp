#include "spiked/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spiked/hypmatrix.hpp"
#include "spiked/jack.hpp"

namespace spiked {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Series length so that the truncated pFq kernels are converged at the
// largest argument the entries see.
int kernel_truncation(double max_arg) {
    const double w = std::abs(max_arg);
    return std::max(60, static_cast<int>(std::ceil(w + 12.0 * std::sqrt(w) + 30.0)));
}

// Natural argument of the spike kernels: t = d/(1+d) for Model A, n*nu for
// Models B and C.
std::vector<double> kernel_arguments(const SpikedModel& model) {
    std::vector<double> w;
    for (const auto& s : model.spikes)
        w.push_back(model.kind == ModelKind::A ? s.value / (1.0 + s.value)
                                               : model.n * s.value);
    return w;
}

// log of the null-ensemble constant: the reciprocal of the cube integral of
// Vandermonde^2 * prod w.
double log_null_const(const SpikedModel& model) {
    const int n = model.n;
    double lg = 0.0;
    if (model.kind == ModelKind::C) {
        for (int j = 0; j < n; ++j)
            lg += log_factorial(model.m1 + model.m2 - n + j) - log_factorial(j + 1) -
                  log_factorial(model.m1 - n + j) - log_factorial(model.m2 - n + j);
    } else {
        lg -= log_factorial(n);
        for (int k = 1; k <= n; ++k) lg -= log_factorial(model.m - k) + log_factorial(n - k);
    }
    return lg;
}

// log K(a_{1:p}, b_{1:q}) of the determinant representation, with the
// unshifted parameter lists of each model's matrix-argument function.
double log_det_rep_const(const SpikedModel& model) {
    const int n = model.n, r = model.rank();
    double lg = 0.0;
    for (int l = 1; l <= r; ++l) {
        lg += log_factorial(n - l);
        switch (model.kind) {
            case ModelKind::A:
                break;
            case ModelKind::B:
                lg += log_factorial(model.m - l) - log_factorial(model.m - n);
                break;
            case ModelKind::C:
                lg += log_factorial(model.m1 - l) - log_factorial(model.m1 - n);
                lg += log_factorial(model.m1 + model.m2 - n) - log_factorial(model.m1 + model.m2 - l);
                break;
        }
    }
    return lg;
}

}  // namespace

double log_norm_const(const SpikedModel& model) {
    model.validate();
    const int n = model.n, r = model.rank();
    const auto w = kernel_arguments(model);
    const int blocks = static_cast<int>(model.spikes.size());

    double lg = log_null_const(model) + log_det_rep_const(model);

    for (int l = 0; l < blocks; ++l) {
        const int kl = model.spikes[l].multiplicity;
        lg += kl * (r - n) * std::log(w[l]);
        if (model.kind == ModelKind::A)
            lg -= kl * model.m * std::log1p(model.spikes[l].value);
        else
            lg -= kl * static_cast<double>(model.n) * model.spikes[l].value;
    }
    for (int a = 0; a < blocks; ++a)
        for (int b = a + 1; b < blocks; ++b)
            lg -= model.spikes[a].multiplicity * model.spikes[b].multiplicity *
                  std::log(w[a] - w[b]);
    return lg;
}

double joint_density(const SpikedModel& model, const Eigen::VectorXd& eigs_in) {
    model.validate();
    const int n = model.n, r = model.rank();
    if (eigs_in.size() != n) throw std::invalid_argument("joint_density: needs n eigenvalues");

    // Canonical ascending order: permutations of the input take the exact
    // same arithmetic path.
    Eigen::VectorXd eigs = eigs_in;
    std::sort(eigs.data(), eigs.data() + n);

    for (int i = 0; i < n; ++i) {
        if (model.kind == ModelKind::C) {
            if (!(eigs[i] > 0.0 && eigs[i] < 1.0)) return 0.0;
        } else {
            if (!(eigs[i] > 0.0)) return 0.0;
        }
        for (int j = i + 1; j < n; ++j)
            if (eigs[i] == eigs[j]) throw std::invalid_argument("joint_density: coinciding eigenvalues");
    }

    double lg = log_norm_const(model);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) lg += 2.0 * std::log(std::abs(eigs[j] - eigs[i]));
    for (int i = 0; i < n; ++i) {
        if (model.kind == ModelKind::C)
            lg += (model.m1 - n) * std::log(eigs[i]) + (model.m2 - n) * std::log1p(-eigs[i]);
        else
            lg += (model.m - n) * std::log(eigs[i]) - eigs[i];
    }

    // Spike determinant: stacked confluent blocks of residue entries, rows
    // ordered with descending parameter shift inside each block.
    double det = 1.0;
    if (r > 0) {
        const auto w = kernel_arguments(model);
        const double wmax = *std::max_element(w.begin(), w.end());
        // Kernel growth bound: exp for A, Bessel-type for B, and Kummer on a
        // bounded argument for C.  Skip the determinant where the weights
        // already make the density vanish.
        double growth = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = wmax * eigs[i];
            growth += model.kind == ModelKind::B ? 2.0 * std::sqrt(std::max(0.0, z)) : z;
        }
        if (lg + growth < -60.0) return 0.0;
        if (growth > 680.0) throw std::overflow_error("joint_density: spike kernel overflows");

        double max_arg = 0.0;
        for (double wl : w) max_arg = std::max(max_arg, std::abs(wl) * eigs.cwiseAbs().maxCoeff());
        const int trunc = kernel_truncation(max_arg);

        Eigen::MatrixXd mat(r, r);
        int row = 0;
        for (std::size_t l = 0; l < model.spikes.size(); ++l) {
            const int kl = model.spikes[l].multiplicity;
            for (int i = kl; i >= 1; --i, ++row) {
                HypgeomSpec spec;
                double rowc = 1.0 / std::tgamma(static_cast<double>(i));  // 1/(i-1)!
                switch (model.kind) {
                    case ModelKind::A:
                        break;
                    case ModelKind::B: {
                        const double c = model.m - n + 1.0;
                        spec.b = {c + (i - 1)};
                        for (int t = 0; t < i - 1; ++t) rowc /= c + t;
                        break;
                    }
                    case ModelKind::C: {
                        const double ca = model.m1 + model.m2 - n + 1.0;
                        const double cb = model.m1 - n + 1.0;
                        spec.a = {ca + (i - 1)};
                        spec.b = {cb + (i - 1)};
                        for (int t = 0; t < i - 1; ++t) rowc *= (ca + t) / (cb + t);
                        break;
                    }
                }
                for (int j = 0; j < r; ++j)
                    mat(row, j) = rowc * residue_entry(spec, w[l], eigs, (i - 1) + j, trunc);
            }
        }
        det = mat.determinant();
    }

    if (det == 0.0) return 0.0;
    return (det > 0.0 ? 1.0 : -1.0) * std::exp(lg + std::log(std::abs(det)));
}

double joint_density_x(const SpikedModel& model, const Eigen::VectorXd& eigs) {
    if (model.kind != ModelKind::C) return joint_density(model, eigs);
    Eigen::VectorXd f(eigs.size());
    double log_jac = 0.0;
    for (int i = 0; i < eigs.size(); ++i) {
        if (!(eigs[i] > 0.0)) return 0.0;
        f[i] = eigs[i] / (1.0 + eigs[i]);
        log_jac -= 2.0 * std::log1p(eigs[i]);
    }
    return joint_density(model, f) * std::exp(log_jac);
}

}  // namespace spiked
