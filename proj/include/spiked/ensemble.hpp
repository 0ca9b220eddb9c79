#ifndef SPIKED_ENSEMBLE_HPP
#define SPIKED_ENSEMBLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "spiked/clt.hpp"
#include "spiked/models.hpp"
#include "spiked/statistic.hpp"

namespace spiked {

/// Deterministic splittable generator: xoshiro256** seeded through
/// splitmix64, with a Box-Muller normal.  Bit-identical streams across
/// platforms for a given (seed, stream).
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform();   // (0, 1)
    double gaussian();  // standard normal

  private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Eigenvalues (ascending) of a spiked central complex Wishart X X^dag,
/// X n x m with columns CN(0, Sigma), Sigma = I + diag(spikes).
Eigen::VectorXd sample_model_a(int n, int m, const std::vector<Spike>& spikes, Rng& rng);

/// Eigenvalues of the non-central (M + G)(M + G)^dag with M M^dag carrying
/// eigenvalues n*nu per spike.
Eigen::VectorXd sample_model_b(int n, int m, const std::vector<Spike>& spikes, Rng& rng);

/// Eigenvalues of F = W1 W2^{-1} with W1 non-central spiked, W2 central.
Eigen::VectorXd sample_model_c(int n, int m1, int m2, const std::vector<Spike>& spikes, Rng& rng,
                               int* resample_count = nullptr);

Eigen::VectorXd sample_model(const SpikedModel& model, Rng& rng);

/// Full spectrum of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h);

/// The linear spectral statistic: sum f(x/n) for Models A/B, sum f(x) for
/// Model C.
double lss(const Eigen::VectorXd& eigs, const LinearStatistic& f, ModelKind kind);

struct MCConfig {
    SpikedModel model;
    LinearStatistic statistic = LinearStatistic::power(1);
    int trials = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    int quad_n = 128;
    bool keep_samples = false;
};

struct MCReport {
    int trials = 0;
    double empirical_mean = 0.0;
    double empirical_var = 0.0;
    double mean_std_error = 0.0;
    double var_std_error = 0.0;
    double predicted_mean = 0.0;
    double predicted_var = 0.0;
    double mean_z_score = 0.0;
    double var_ratio = 0.0;
    double ks_statistic = 0.0;
    double ks_pvalue = 0.0;
    bool variance_defined = true;
    CLTResult prediction;
    std::vector<double> samples;  // kept only on request
};

/// Seeded Monte Carlo comparison of sampled LSS values against the CLT
/// prediction.  Reproducible: trial k draws from stream (seed, k) so the
/// report is independent of worker count.
MCReport run_mc(const MCConfig& cfg);

/// Upper tail of the Kolmogorov distribution (two-sided KS p-value).
double ks_pvalue(double statistic, int n_samples);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace spiked

#endif
