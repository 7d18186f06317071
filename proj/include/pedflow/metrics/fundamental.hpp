#ifndef PEDFLOW_METRICS_FUNDAMENTAL_HPP
#define PEDFLOW_METRICS_FUNDAMENTAL_HPP

#include <Eigen/Core>

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace pedflow::metrics {

enum class FundamentalModel { linear, logarithmic, exponential, greenberg, bell };

std::string_view to_string(FundamentalModel m);
std::optional<FundamentalModel> parse_model(std::string_view name);

/// Speed-density model fitted by OLS on a linearising transform.
///
/// Coefficients by model:
///   linear       u = c0 + c1·k            (m_f = c0, psi = -c1)
///   logarithmic  u = c0 + c1·ln k
///   greenberg    u = c0·ln(c1/k)          (u_c, k_j)
///   exponential  u = c0·exp(-k/c1)        (m_f, k_c)
///   bell         u = c0·exp(-(k/c1)²/2)   (m_f, k_c)
struct FundamentalFit {
  FundamentalModel model = FundamentalModel::linear;
  double c0 = 0.0;
  double c1 = 0.0;
  /// On the untransformed (k, u) scale.
  double r2 = 0.0;
  /// Standard errors of the transformed-scale intercept and slope.
  Eigen::Vector2d std_error = Eigen::Vector2d::Zero();
  std::optional<double> m_f;
  std::optional<double> k_j;
  std::optional<double> capacity;

  double predict(double k) const;
};

/// Points are (k, u). Needs three or more; log transforms need positive
/// inputs and throw DomainError listing the offending points otherwise.
FundamentalFit fit_fundamental(const std::vector<std::pair<double, double>>& points,
                               FundamentalModel model);

/// y = a·x^b fitted on log-log scale; r² on the original scale.
struct PowerFit {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
};
PowerFit fit_power(const std::vector<std::pair<double, double>>& points);

/// Walkway level of service A..F from the area module in m²/ped.
char level_of_service(double area_module);

}  // namespace pedflow::metrics

#endif  // PEDFLOW_METRICS_FUNDAMENTAL_HPP
