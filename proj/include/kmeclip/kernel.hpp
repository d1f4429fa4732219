#pragma once

#include <vector>

#include <Eigen/Dense>

namespace kmeclip {

enum class KernelKind { Gaussian };

/// Gaussian kernel k(u,v) = exp(-||u-v||^2 / 2 sigma^2). k(u,u) = 1, so the
/// sup of k on the diagonal is K = 1.
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  double sigma = 1.0;

  explicit KernelSpec(double sigma_in);

  // Trainable reparameterization: tau = 1 / sigma^2.
  double tau() const { return 1.0 / (sigma * sigma); }

  bool operator==(const KernelSpec& other) const {
    return kind == other.kind && sigma == other.sigma;
  }
};

double kernel_eval(const KernelSpec& kernel, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v);

/// log k(u,v), computed without the exp/log round trip.
double log_kernel_eval(const KernelSpec& kernel, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v);

/// A finite expansion f = sum_i c_i k(u_i, .) in the RKHS of `kernel`.
/// Coefficients may have any sign; points and coefficients must have equal
/// length (m >= 0, empty expansion is the zero function).
struct RkhsExpansion {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> coefficients;
  KernelSpec kernel;

  RkhsExpansion(std::vector<Eigen::VectorXd> points_in,
                std::vector<double> coefficients_in, KernelSpec kernel_in);

  std::size_t size() const { return points.size(); }
};

/// <f, g>_H by the reproducing property: sum_ij c_i^f c_j^g k(u_i^f, u_j^g).
/// Throws if the two expansions carry different kernels or dimensions.
double rkhs_inner(const RkhsExpansion& f, const RkhsExpansion& g);

/// <f, f>_H. Values in [-1e-10, 0) are clamped to 0 (Gram roundoff); values
/// below -1e-10 indicate an inconsistent Gram matrix and throw.
double rkhs_norm_sq(const RkhsExpansion& f);

}  // namespace kmeclip
