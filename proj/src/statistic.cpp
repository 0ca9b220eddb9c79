#include "spiked/statistic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spiked {

LinearStatistic LinearStatistic::linear(double a0, double a1) {
    LinearStatistic f;
    f.form_ = Form::Linear;
    f.coeffs_ = {a0, a1};
    return f;
}

LinearStatistic LinearStatistic::power(int k) {
    if (k < 0) throw std::invalid_argument("LinearStatistic::power: requires k >= 0");
    LinearStatistic f;
    f.form_ = Form::Power;
    f.coeffs_.assign(k + 1, 0.0);
    f.coeffs_[k] = 1.0;
    return f;
}

LinearStatistic LinearStatistic::log() {
    LinearStatistic f;
    f.form_ = Form::Log;
    return f;
}

LinearStatistic LinearStatistic::exponential(double t) {
    LinearStatistic f;
    f.form_ = Form::Exp;
    f.param_ = t;
    return f;
}

LinearStatistic LinearStatistic::poly(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    LinearStatistic f;
    f.form_ = Form::Poly;
    f.coeffs_ = std::move(coeffs);
    return f;
}

LinearStatistic LinearStatistic::cheb(ChebSeries series) {
    LinearStatistic f;
    f.form_ = Form::Cheb;
    f.series_deriv_ = cheb_derivative(series);
    f.series_ = std::move(series);
    return f;
}

double LinearStatistic::eval(double x) const {
    switch (form_) {
        case Form::Log:
            return std::log(x);
        case Form::Exp:
            return std::exp(param_ * x);
        case Form::Cheb:
            return series_.eval(x);
        default: {
            double acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
            return acc;
        }
    }
}

double LinearStatistic::deriv(double x) const {
    switch (form_) {
        case Form::Log:
            return 1.0 / x;
        case Form::Exp:
            return param_ * std::exp(param_ * x);
        case Form::Cheb:
            return series_deriv_.eval(x);
        default: {
            double acc = 0.0;
            for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k)
                acc = acc * x + k * coeffs_[k];
            return acc;
        }
    }
}

bool LinearStatistic::is_constant() const {
    switch (form_) {
        case Form::Log:
            return false;
        case Form::Exp:
            return param_ == 0.0;
        case Form::Cheb: {
            for (int k = 1; k <= series_.degree(); ++k)
                if (series_.coeffs[k] != 0.0) return false;
            return true;
        }
        default: {
            for (std::size_t k = 1; k < coeffs_.size(); ++k)
                if (coeffs_[k] != 0.0) return false;
            return true;
        }
    }
}

bool LinearStatistic::admissible_on(double a, double b) const {
    if (form_ == Form::Log) return a > 0.0;
    if (form_ == Form::Cheb) return a >= series_.a && b <= series_.b;
    return true;
}

std::string LinearStatistic::describe() const {
    std::ostringstream os;
    switch (form_) {
        case Form::Log:
            os << "log";
            break;
        case Form::Exp:
            os << "exp:" << param_;
            break;
        case Form::Cheb:
            os << "cheb[deg " << series_.degree() << "]";
            break;
        case Form::Linear:
        case Form::Power:
        case Form::Poly:
            os << "poly:";
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                if (k) os << ",";
                os << coeffs_[k];
            }
            break;
    }
    return os.str();
}

}  // namespace spiked
