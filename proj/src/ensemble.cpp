#include "spiked/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spiked {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

Eigen::MatrixXcd gaussian_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXcd g(rows, cols);
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            g(i, j) = std::complex<double>(s * rng.gaussian(), s * rng.gaussian());
    return g;
}

Eigen::MatrixXcd noncentral_factor(int n, int m, const std::vector<Spike>& spikes, Rng& rng) {
    Eigen::MatrixXcd x = gaussian_matrix(n, m, rng);
    int row = 0;
    for (const auto& s : spikes)
        for (int i = 0; i < s.multiplicity; ++i, ++row)
            x(row, row) += std::sqrt(static_cast<double>(n) * s.value);
    return x;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed;
    (void)splitmix64(sm);
    sm ^= 0xd1b54a32d192ed03ULL * (stream + 1);
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    // 53-bit mantissa, strictly inside (0, 1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("hermitian_eigenvalues: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    return solver.eigenvalues();
}

Eigen::VectorXd sample_model_a(int n, int m, const std::vector<Spike>& spikes, Rng& rng) {
    if (m < n) throw std::invalid_argument("sample_model_a: requires m >= n");
    Eigen::MatrixXcd x = gaussian_matrix(n, m, rng);
    int row = 0;
    for (const auto& s : spikes) {
        const double sd = std::sqrt(1.0 + s.value);
        for (int i = 0; i < s.multiplicity; ++i, ++row) x.row(row) *= sd;
    }
    return hermitian_eigenvalues(x * x.adjoint());
}

Eigen::VectorXd sample_model_b(int n, int m, const std::vector<Spike>& spikes, Rng& rng) {
    if (m < n) throw std::invalid_argument("sample_model_b: requires m >= n");
    const Eigen::MatrixXcd x = noncentral_factor(n, m, spikes, rng);
    return hermitian_eigenvalues(x * x.adjoint());
}

Eigen::VectorXd sample_model_c(int n, int m1, int m2, const std::vector<Spike>& spikes, Rng& rng,
                               int* resample_count) {
    if (m1 <= n || m2 <= n) throw std::invalid_argument("sample_model_c: requires m1 > n, m2 > n");
    if (resample_count) *resample_count = 0;
    for (;;) {
        const Eigen::MatrixXcd x1 = noncentral_factor(n, m1, spikes, rng);
        const Eigen::MatrixXcd x2 = gaussian_matrix(n, m2, rng);
        const Eigen::MatrixXcd w1 = x1 * x1.adjoint();
        const Eigen::MatrixXcd w2 = x2 * x2.adjoint();
        Eigen::LLT<Eigen::MatrixXcd> llt(w2);
        if (llt.info() != Eigen::Success) {
            if (resample_count) ++(*resample_count);
            continue;
        }
        // Spectrum of W1 W2^{-1} via the Hermitian pencil L^{-1} W1 L^{-dag}.
        const Eigen::MatrixXcd li = llt.matrixL().solve(Eigen::MatrixXcd::Identity(n, n));
        return hermitian_eigenvalues(li * w1 * li.adjoint());
    }
}

Eigen::VectorXd sample_model(const SpikedModel& model, Rng& rng) {
    switch (model.kind) {
        case ModelKind::A: return sample_model_a(model.n, model.m, model.spikes, rng);
        case ModelKind::B: return sample_model_b(model.n, model.m, model.spikes, rng);
        case ModelKind::C: return sample_model_c(model.n, model.m1, model.m2, model.spikes, rng);
    }
    throw std::logic_error("sample_model: bad kind");
}

double lss(const Eigen::VectorXd& eigs, const LinearStatistic& f, ModelKind kind) {
    double acc = 0.0;
    for (int i = 0; i < eigs.size(); ++i) {
        const double x = kind == ModelKind::C ? eigs[i] : eigs[i] / eigs.size();
        if (f.form() == LinearStatistic::Form::Log && !(x > 0.0)) {
            std::ostringstream os;
            os << "lss: statistic undefined at eigenvalue " << x;
            throw std::domain_error(os.str());
        }
        acc += f.eval(x);
    }
    return acc;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_pvalue(double statistic, int n_samples) {
    if (n_samples < 1) return 1.0;
    const double rn = std::sqrt(static_cast<double>(n_samples));
    const double lam = (rn + 0.12 + 0.11 / rn) * statistic;
    if (lam < 1e-8) return 1.0;
    if (lam < 1.18) {
        // theta-function form of the Kolmogorov CDF, fast for small lambda
        const double pi = std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double e = (2.0 * k - 1.0) * pi / lam;
            const double term = std::exp(-e * e / 8.0);
            cdf += term;
            if (term < 1e-18) break;
        }
        cdf *= std::sqrt(2.0 * pi) / lam;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
        sum += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

MCReport run_mc(const MCConfig& cfg) {
    cfg.model.validate();
    if (cfg.trials < 1) throw std::invalid_argument("run_mc: requires trials >= 1");
    const int workers = std::max(1, cfg.workers);

    MCReport rep;
    rep.trials = cfg.trials;
    rep.prediction = clt_params(cfg.model, cfg.statistic, cfg.quad_n);
    rep.predicted_mean = rep.prediction.predicted_mean(cfg.model.n);
    rep.predicted_var = rep.prediction.predicted_var();

    std::vector<double> samples(cfg.trials);
    auto worker = [&](int first, int last) {
        for (int t = first; t < last; ++t) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(t));
            const Eigen::VectorXd eigs = sample_model(cfg.model, rng);
            samples[t] = lss(eigs, cfg.statistic, cfg.model.kind);
        }
    };
    if (workers == 1) {
        worker(0, cfg.trials);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const int chunk = (cfg.trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int first = w * chunk, last = std::min(cfg.trials, first + chunk);
            if (first < last)
                pool.emplace_back([&, w, first, last] {
                    try {
                        worker(first, last);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= cfg.trials;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);

    rep.empirical_mean = mean;
    rep.variance_defined = cfg.trials > 1;
    rep.empirical_var = rep.variance_defined ? var / (cfg.trials - 1)
                                             : std::numeric_limits<double>::quiet_NaN();
    const double sd = rep.variance_defined ? std::sqrt(rep.empirical_var) : 0.0;
    rep.mean_std_error = rep.variance_defined ? sd / std::sqrt(static_cast<double>(cfg.trials))
                                              : std::numeric_limits<double>::quiet_NaN();
    rep.var_std_error = rep.variance_defined
                            ? rep.empirical_var * std::sqrt(2.0 / (cfg.trials - 1))
                            : std::numeric_limits<double>::quiet_NaN();
    rep.mean_z_score = rep.variance_defined && rep.mean_std_error > 0.0
                           ? (rep.empirical_mean - rep.predicted_mean) / rep.mean_std_error
                           : std::numeric_limits<double>::quiet_NaN();
    rep.var_ratio = rep.predicted_var > 0.0 && rep.variance_defined
                        ? rep.empirical_var / rep.predicted_var
                        : std::numeric_limits<double>::quiet_NaN();

    // KS test of the standardized samples against the standard normal.
    if (rep.variance_defined && rep.predicted_var > 0.0) {
        std::vector<double> z(samples);
        const double psd = std::sqrt(rep.predicted_var);
        for (double& v : z) v = (v - rep.predicted_mean) / psd;
        std::sort(z.begin(), z.end());
        double d = 0.0;
        for (int i = 0; i < cfg.trials; ++i) {
            const double cdf = normal_cdf(z[i]);
            d = std::max(d, std::abs(cdf - static_cast<double>(i) / cfg.trials));
            d = std::max(d, std::abs(static_cast<double>(i + 1) / cfg.trials - cdf));
        }
        rep.ks_statistic = d;
        rep.ks_pvalue = ks_pvalue(d, cfg.trials);
    } else {
        rep.ks_statistic = std::numeric_limits<double>::quiet_NaN();
        rep.ks_pvalue = std::numeric_limits<double>::quiet_NaN();
    }

    if (cfg.keep_samples) rep.samples = std::move(samples);
    return rep;
}

}  // namespace spiked
