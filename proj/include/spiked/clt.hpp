#ifndef SPIKED_CLT_HPP
#define SPIKED_CLT_HPP

#include <vector>

#include "spiked/models.hpp"
#include "spiked/statistic.hpp"

namespace spiked {

struct SupportInterval {
    double a = 0.0;
    double b = 0.0;
};

enum class SpikeRegime { Subcritical, Critical, Supercritical };

std::string to_string(SpikeRegime r);

/// Saddlepoint of the spike-dependent contour integrand, with the signed
/// square root of (z0 - a)(z0 - b) fixed by the closed-form branch rules.
struct SaddleInfo {
    double z0 = 0.0;
    double sqrt_branch = 0.0;
    SpikeRegime regime = SpikeRegime::Subcritical;
    bool near_critical = false;
};

struct SpikeContribution {
    double value = 0.0;
    int multiplicity = 1;
    SaddleInfo saddle;
    double mu_bar = 0.0;
};

struct CLTResult {
    double mu = 0.0;
    double sigma2 = 0.0;
    std::vector<SpikeContribution> spikes;

    /// One entry per spike counted with multiplicity.
    std::vector<double> expanded_mu_bars() const;
    double mu_bar_total() const;
    double predicted_mean(int n) const { return n * mu + mu_bar_total(); }
    double predicted_var() const { return sigma2; }
};

/// Limiting spectral support [a, b] from the model's dimension ratios.
SupportInterval support(const SpikedModel& model);

/// Saddlepoint and signed square-root branch for spike block `ell`.
SaddleInfo saddlepoint(const SpikedModel& model, int ell);

/// Marcenko-Pastur-type limit density on [a, b] (Models A/B scaling).
double mp_density(double x, const SupportInterval& support);

/// Spike-independent mean coefficient mu.
double mean_mu(const LinearStatistic& f, const SpikedModel& model, int quad_n = 128);

/// Limiting variance via the Chebyshev / finite-Hilbert-transform pipeline.
double var_sigma2(const LinearStatistic& f, const SpikedModel& model, int quad_n = 128);

/// Same variance via the Chebyshev-coefficient identity (1/4) sum k c_k^2;
/// cross-check path only.
double var_sigma2_cheb(const LinearStatistic& f, const SpikedModel& model, int fit_n = 128);

/// O(1) mean correction contributed by one spike.
double mu_bar(const LinearStatistic& f, const SpikedModel& model, const SaddleInfo& sp,
              int quad_n = 128);

/// Spike correction kernel rho~_2(x, z0) on the open support.
double rho_tilde2(double x, const SaddleInfo& sp, const SupportInterval& support);

/// Assembled CLT prediction for the linear statistic under the model.
CLTResult clt_params(const SpikedModel& model, const LinearStatistic& f, int quad_n = 128);

}  // namespace spiked

#endif
