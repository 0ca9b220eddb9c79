#include "spiked/clt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spiked/numerics.hpp"

namespace spiked {

namespace {

constexpr double kPi = std::numbers::pi;

// The engine works with the statistic as seen on the support: f itself for
// Models A/B, f(x / (1 - x)) for Model C.
struct EffectiveStatistic {
    const LinearStatistic* f;
    bool compose;

    double eval(double x) const { return compose ? f->eval(x / (1.0 - x)) : f->eval(x); }
    double deriv(double x) const {
        if (!compose) return f->deriv(x);
        const double w = 1.0 - x;
        return f->deriv(x / w) / (w * w);
    }
};

EffectiveStatistic effective(const LinearStatistic& f, const SpikedModel& model) {
    return EffectiveStatistic{&f, model.kind == ModelKind::C};
}

void check_admissible(const LinearStatistic& f, const SpikedModel& model,
                      const SupportInterval& s) {
    const bool ok = model.kind == ModelKind::C
                        ? f.admissible_on(s.a / (1.0 - s.a), s.b / (1.0 - s.b))
                        : f.admissible_on(s.a, s.b);
    if (!ok) throw std::domain_error("statistic singular at support edge");
}

}  // namespace

std::string to_string(SpikeRegime r) {
    switch (r) {
        case SpikeRegime::Subcritical: return "subcritical";
        case SpikeRegime::Critical: return "critical";
        case SpikeRegime::Supercritical: return "supercritical";
    }
    return "?";
}

std::vector<double> CLTResult::expanded_mu_bars() const {
    std::vector<double> out;
    for (const auto& s : spikes)
        for (int i = 0; i < s.multiplicity; ++i) out.push_back(s.mu_bar);
    return out;
}

double CLTResult::mu_bar_total() const {
    double acc = 0.0;
    for (const auto& s : spikes) acc += s.multiplicity * s.mu_bar;
    return acc;
}

SupportInterval support(const SpikedModel& model) {
    model.validate();
    SupportInterval s;
    if (model.kind == ModelKind::C) {
        const double c1 = model.ratio_c1(), c2 = model.ratio_c2();
        if (!(c1 > 1.0 && c2 > 1.0))
            throw std::domain_error("support: model C requires c1 > 1 and c2 > 1");
        const double num = c1 * (c1 + c2 - 1.0) + c2;
        const double root = 2.0 * std::sqrt(c1 * c2 * (c1 + c2 - 1.0));
        const double den = (c1 + c2) * (c1 + c2);
        s.a = (num - root) / den;
        s.b = (num + root) / den;
    } else {
        const double c = model.ratio_c();
        if (!(c >= 1.0)) throw std::domain_error("support: models A/B require c >= 1");
        const double rc = std::sqrt(c);
        s.a = (1.0 - rc) * (1.0 - rc);
        s.b = (1.0 + rc) * (1.0 + rc);
    }
    return s;
}

SaddleInfo saddlepoint(const SpikedModel& model, int ell) {
    model.validate();
    if (ell < 0 || ell >= static_cast<int>(model.spikes.size()))
        throw std::invalid_argument("saddlepoint: spike index out of range");
    const double v = model.spikes[ell].value;

    SaddleInfo sp;
    switch (model.kind) {
        case ModelKind::A: {
            const double c = model.ratio_c();
            sp.z0 = (1.0 + c * v) * (1.0 + v) / v;
            sp.sqrt_branch = (1.0 - c * v * v) / v;
            break;
        }
        case ModelKind::B: {
            const double c = model.ratio_c();
            sp.z0 = (1.0 + v) * (c + v) / v;
            sp.sqrt_branch = c / v - v;
            break;
        }
        case ModelKind::C: {
            const double c1 = model.ratio_c1(), c2 = model.ratio_c2();
            sp.z0 = (1.0 + v) * (c1 + v) / (v * (c1 + c2 + v));
            sp.sqrt_branch = (c1 * (c1 + c2) + 2.0 * c1 * v - (c2 - 1.0) * v * v) /
                             (v * (c1 + c2 + v) * (c1 + c2));
            break;
        }
    }

    const SupportInterval s = support(model);
    const double scale = s.b - s.a;
    if (std::abs(sp.sqrt_branch) < 1e-12 * scale)
        sp.regime = SpikeRegime::Critical;
    else
        sp.regime = sp.sqrt_branch > 0.0 ? SpikeRegime::Subcritical : SpikeRegime::Supercritical;
    sp.near_critical = std::abs(sp.z0 - s.b) < 1e-6 * scale;
    return sp;
}

double mp_density(double x, const SupportInterval& s) {
    if (x < s.a || x > s.b) return 0.0;
    return std::sqrt((s.b - x) * (x - s.a)) / (2.0 * kPi * x);
}

double mean_mu(const LinearStatistic& f, const SpikedModel& model, int quad_n) {
    const SupportInterval s = support(model);
    check_admissible(f, model, s);
    const EffectiveStatistic g = effective(f, model);
    // The full weight (b-x)(x-a) is absorbed into a first-kind rule; the
    // 1/x pole at a support edge touching zero (c = 1) then cancels against
    // the (x-a) factor instead of degrading the rule.
    if (model.kind == ModelKind::C) {
        const double c12 = model.ratio_c1() + model.ratio_c2();
        return c12 / (2.0 * kPi) *
               gc1_integrate(
                   [&](double x) { return g.eval(x) * (s.b - x) * (x - s.a) / (x * (1.0 - x)); },
                   s.a, s.b, quad_n);
    }
    if (f.form() == LinearStatistic::Form::Log && !(s.a > 0.0))
        throw std::domain_error("statistic singular at support edge");
    return gc1_integrate([&](double x) { return g.eval(x) * (s.b - x) * (x - s.a) / x; }, s.a, s.b,
                         quad_n) /
           (2.0 * kPi);
}

double var_sigma2(const LinearStatistic& f, const SpikedModel& model, int quad_n) {
    const SupportInterval s = support(model);
    check_admissible(f, model, s);
    const EffectiveStatistic g = effective(f, model);
    const ChebSeries dfit = cheb_fit([&](double x) { return g.deriv(x); }, s.a, s.b, quad_n);
    const double val = gc1_integrate(
        [&](double x) { return g.eval(x) * pv_hilbert(dfit, x); }, s.a, s.b, quad_n);
    return val / (2.0 * kPi * kPi);
}

double var_sigma2_cheb(const LinearStatistic& f, const SpikedModel& model, int fit_n) {
    const SupportInterval s = support(model);
    check_admissible(f, model, s);
    const EffectiveStatistic g = effective(f, model);
    const ChebSeries fit = cheb_fit([&](double x) { return g.eval(x); }, s.a, s.b, fit_n);
    double acc = 0.0;
    for (int k = 1; k <= fit.degree(); ++k) acc += k * fit.coeffs[k] * fit.coeffs[k];
    return 0.25 * acc;
}

double mu_bar(const LinearStatistic& f, const SpikedModel& model, const SaddleInfo& sp,
              int quad_n) {
    const SupportInterval s = support(model);
    check_admissible(f, model, s);
    const EffectiveStatistic g = effective(f, model);

    if (sp.regime == SpikeRegime::Critical) {
        // Limit value as the branch vanishes and z0 meets b: the vanishing
        // square root kills the resolvent term except for its endpoint mass,
        // which contributes half the continuation jump.
        const double base = -gc1_integrate([&](double x) { return g.eval(x); }, s.a, s.b, quad_n) /
                            (2.0 * kPi);
        return base + 0.5 * g.eval(s.b);
    }

    double val = gc1_integrate(
                     [&](double x) { return g.eval(x) * (sp.sqrt_branch / (sp.z0 - x) - 1.0); },
                     s.a, s.b, quad_n) /
                 (2.0 * kPi);
    // On the second sheet (negative branch) the continuation of the
    // resolvent integral through the cut picks up the residue at z0.
    if (sp.regime == SpikeRegime::Supercritical) val += g.eval(sp.z0);
    return val;
}

double rho_tilde2(double x, const SaddleInfo& sp, const SupportInterval& s) {
    if (!(x > s.a && x < s.b)) throw std::domain_error("rho_tilde2: point outside open support");
    const double w = std::sqrt((s.b - x) * (x - s.a));
    return (sp.sqrt_branch / (sp.z0 - x) - 1.0) / (2.0 * kPi * w);
}

CLTResult clt_params(const SpikedModel& model, const LinearStatistic& f, int quad_n) {
    CLTResult out;
    out.mu = mean_mu(f, model, quad_n);
    out.sigma2 = var_sigma2(f, model, quad_n);
    for (std::size_t l = 0; l < model.spikes.size(); ++l) {
        SpikeContribution sc;
        sc.value = model.spikes[l].value;
        sc.multiplicity = model.spikes[l].multiplicity;
        sc.saddle = saddlepoint(model, static_cast<int>(l));
        sc.mu_bar = mu_bar(f, model, sc.saddle, quad_n);
        out.spikes.push_back(sc);
    }
    return out;
}

}  // namespace spiked
