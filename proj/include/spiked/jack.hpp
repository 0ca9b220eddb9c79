#ifndef SPIKED_JACK_HPP
#define SPIKED_JACK_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace spiked {

/// Integer partition with weakly decreasing positive parts.
struct Partition {
    std::vector<int> parts;

    Partition() = default;
    explicit Partition(std::vector<int> p);

    int weight() const;
    int length() const { return static_cast<int>(parts.size()); }
    int part(int i) const { return i < length() ? parts[i] : 0; }

    /// True if *this <= other in dominance order (same weight required).
    bool dominated_by(const Partition& other) const;

    bool operator==(const Partition& other) const { return parts == other.parts; }
    /// Descending lexicographic order; a linear extension of dominance on
    /// partitions of equal weight.
    bool lex_less(const Partition& other) const;
};

/// All partitions of weight exactly k with at most max_len parts.
std::vector<Partition> partitions_of(int k, int max_len);

/// All partitions of each weight 0..k with at most max_len parts.
std::vector<Partition> partitions_up_to(int k, int max_len);

/// Generalized Pochhammer symbol (a)_kappa^(alpha) as a finite product of
/// linear factors.
double gen_pochhammer(double a, const Partition& kappa, double alpha);

/// C-normalized Jack polynomial C_kappa^(alpha) evaluated at a spectrum.
/// Returns 0 when the partition is longer than the spectrum.
double jack_c(const Partition& kappa, const Eigen::VectorXd& x, double alpha);
std::complex<double> jack_c(const Partition& kappa, const Eigen::VectorXcd& x, double alpha);

/// Parameters of pFq^(alpha); p and q are implicit in the list sizes.
struct HypgeomSpec {
    std::vector<double> a;
    std::vector<double> b;
    double alpha = 1.0;

    int p() const { return static_cast<int>(a.size()); }
    int q() const { return static_cast<int>(b.size()); }
};

template <typename Scalar>
struct MhgSum {
    Scalar value{};
    double tail = 0.0;  // magnitude of the last degree shell
};

/// Truncated Jack-series evaluation of pFq^(alpha)(a; b; X, Y), summing all
/// partitions of weight <= K.  The slow, trusted oracle.
MhgSum<double> mhg_series(const HypgeomSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y, int truncation);
MhgSum<std::complex<double>> mhg_series(const HypgeomSpec& spec, const Eigen::VectorXcd& x,
                                        const Eigen::VectorXcd& y, int truncation);

/// Classical one-variable pFq power series truncated at degree K.
std::complex<double> scalar_pfq(const HypgeomSpec& spec, std::complex<double> z, int truncation);

}  // namespace spiked

#endif
