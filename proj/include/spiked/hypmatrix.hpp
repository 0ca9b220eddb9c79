#ifndef SPIKED_HYPMATRIX_HPP
#define SPIKED_HYPMATRIX_HPP

#include <Eigen/Dense>

#include "spiked/jack.hpp"
#include "spiked/numerics.hpp"

namespace spiked {

/// Strictly decreasing distinct values with multiplicities.
struct MultSpectrum {
    Eigen::VectorXd values;
    std::vector<int> mults;

    int blocks() const { return static_cast<int>(values.size()); }
    int rank() const;
    void validate() const;
};

/// theta = (n - r + 1 - alpha) / alpha.  Requires 2/alpha to be a positive
/// integer; when that integer is odd, n - r + 1 must be even.
double theta_shift(int n, int r, double alpha);

/// Product of gamma ratios  prod_j prod_i Gamma(a_j - (i-1)/alpha) /
/// Gamma(a_j - theta - (i-1)/alpha), as finite products of linear factors.
double phi_alpha(const std::vector<double>& params, double alpha, int r, double theta);

/// r-fold contour-quadrature evaluation of pFq^(alpha) of two n x n
/// arguments where X has rank r, reduced to an r x r inner series.  Valid
/// for even 2/alpha.
double mhg_contour(const HypgeomSpec& spec, const Eigen::VectorXd& x_nonzero, int ambient_n,
                  const Eigen::VectorXd& y, const ContourSpec& contour, int truncation);

/// Exact residue evaluation of
///   (1/2*pi*i) oint pFq(spec; x z) z^power / prod_s (z - y_s) dz
/// over simple poles at the y_s.  The spec carries already-shifted
/// parameters.
double residue_entry(const HypgeomSpec& spec, double x, const Eigen::VectorXd& y, int power,
                     int truncation);

/// Determinant form of pFq^(1) for distinct nonzero x (rank r) against a
/// distinct spectrum y of length n.
double mhg_det_distinct(const HypgeomSpec& spec, const Eigen::VectorXd& x_desc,
                        const Eigen::VectorXd& y, int truncation);

/// Determinant form allowing eigenvalue multiplicities in the rank-r
/// argument.
double mhg_det_mult(const HypgeomSpec& spec, const MultSpectrum& x, const Eigen::VectorXd& y,
                    int truncation);

}  // namespace spiked

#endif
