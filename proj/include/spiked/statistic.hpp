#ifndef SPIKED_STATISTIC_HPP
#define SPIKED_STATISTIC_HPP

#include <string>
#include <vector>

#include "spiked/numerics.hpp"

namespace spiked {

/// Analytic test function f for linear spectral statistics, with an
/// analytic derivative.
class LinearStatistic {
  public:
    enum class Form { Linear, Power, Log, Exp, Poly, Cheb };

    static LinearStatistic linear(double a0, double a1);
    static LinearStatistic power(int k);
    static LinearStatistic log();
    static LinearStatistic exponential(double t);
    static LinearStatistic poly(std::vector<double> coeffs);
    static LinearStatistic cheb(ChebSeries series);

    double eval(double x) const;
    double deriv(double x) const;

    Form form() const { return form_; }
    bool is_constant() const;
    /// True when f is defined and analytic on a neighbourhood of [a, b].
    bool admissible_on(double a, double b) const;
    std::string describe() const;

  private:
    LinearStatistic() = default;

    Form form_ = Form::Poly;
    std::vector<double> coeffs_;  // Poly; Linear/Power are stored as Poly
    double param_ = 0.0;          // Exp rate
    ChebSeries series_;           // Cheb
    ChebSeries series_deriv_;
};

}  // namespace spiked

#endif
