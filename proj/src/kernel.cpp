#include "kmeclip/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace kmeclip {

KernelSpec::KernelSpec(double sigma_in) : sigma(sigma_in) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("KernelSpec: sigma must be positive");
}

double log_kernel_eval(const KernelSpec& kernel, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  if (u.size() == 0)
    throw std::invalid_argument("kernel_eval: empty vectors");
  const double d2 = (u - v).squaredNorm();
  return -d2 / (2.0 * kernel.sigma * kernel.sigma);
}

double kernel_eval(const KernelSpec& kernel, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) {
  return std::exp(log_kernel_eval(kernel, u, v));
}

RkhsExpansion::RkhsExpansion(std::vector<Eigen::VectorXd> points_in,
                             std::vector<double> coefficients_in,
                             KernelSpec kernel_in)
    : points(std::move(points_in)),
      coefficients(std::move(coefficients_in)),
      kernel(kernel_in) {
  if (points.size() != coefficients.size())
    throw std::invalid_argument(
        "RkhsExpansion: points and coefficients differ in length");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != points[0].size())
      throw std::invalid_argument("RkhsExpansion: inconsistent dimensions");
  }
}

double rkhs_inner(const RkhsExpansion& f, const RkhsExpansion& g) {
  if (!(f.kernel == g.kernel))
    throw std::invalid_argument("rkhs_inner: kernel mismatch");
  if (!f.points.empty() && !g.points.empty() &&
      f.points[0].size() != g.points[0].size())
    throw std::invalid_argument("rkhs_inner: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      total += f.coefficients[i] * g.coefficients[j] *
               kernel_eval(f.kernel, f.points[i], g.points[j]);
    }
  }
  return total;
}

double rkhs_norm_sq(const RkhsExpansion& f) {
  const double value = rkhs_inner(f, f);
  if (value < -1e-10)
    throw std::runtime_error(
        "rkhs_norm_sq: Gram quadratic form is negative beyond tolerance");
  return value < 0.0 ? 0.0 : value;
}

}  // namespace kmeclip
