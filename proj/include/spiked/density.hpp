#ifndef SPIKED_DENSITY_HPP
#define SPIKED_DENSITY_HPP

#include <Eigen/Dense>

#include "spiked/models.hpp"

namespace spiked {

/// Natural log of the constant multiplying
///   Vandermonde(x)^2 * prod_k w(x_k) * det(A)
/// in the exact joint eigenvalue density; computed with log-factorials.
double log_norm_const(const SpikedModel& model);

/// Exact joint eigenvalue density at desk scale (n <= ~6).  Models A/B take
/// eigenvalue coordinates on (0, inf); Model C takes f = x/(1+x) coordinates
/// on (0, 1).  Unordered density: permutation symmetric, integrates to one
/// over the full cube.
double joint_density(const SpikedModel& model, const Eigen::VectorXd& eigs);

/// Model C density against raw F eigenvalues (applies the f = x/(1+x)
/// Jacobian).  For Models A and B this is joint_density itself.
double joint_density_x(const SpikedModel& model, const Eigen::VectorXd& eigs);

}  // namespace spiked

#endif
