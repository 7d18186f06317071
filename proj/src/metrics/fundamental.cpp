#include "pedflow/metrics/fundamental.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "pedflow/errors.hpp"
#include "pedflow/ols.hpp"
#include "pedflow/text.hpp"

namespace pedflow::metrics {

std::string_view to_string(FundamentalModel m) {
  switch (m) {
    case FundamentalModel::linear: return "linear";
    case FundamentalModel::logarithmic: return "logarithmic";
    case FundamentalModel::exponential: return "exponential";
    case FundamentalModel::greenberg: return "greenberg";
    case FundamentalModel::bell: return "bell";
  }
  return "linear";
}

std::optional<FundamentalModel> parse_model(std::string_view name) {
  for (const auto m : {FundamentalModel::linear, FundamentalModel::logarithmic,
                       FundamentalModel::exponential, FundamentalModel::greenberg,
                       FundamentalModel::bell}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

double FundamentalFit::predict(double k) const {
  switch (model) {
    case FundamentalModel::linear: return c0 + c1 * k;
    case FundamentalModel::logarithmic: return c0 + c1 * std::log(k);
    case FundamentalModel::greenberg: return c0 * std::log(c1 / k);
    case FundamentalModel::exponential: return c0 * std::exp(-k / c1);
    case FundamentalModel::bell: return c0 * std::exp(-0.5 * (k / c1) * (k / c1));
  }
  return 0.0;
}

namespace {

void require_positive(const std::vector<std::pair<double, double>>& points, bool check_k,
                      bool check_u, std::string_view model) {
  std::ostringstream bad;
  int count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [k, u] = points[i];
    if ((check_k && !(k > 0.0)) || (check_u && !(u > 0.0))) {
      bad << (count++ ? "; " : "") << "#" << i << " (k=" << text::format_double(k)
          << ", u=" << text::format_double(u) << ")";
    }
  }
  if (count) {
    throw DomainError(std::string(model) + " fit needs positive " +
                      (check_k ? "density" : "speed") + "; offending points: " + bad.str());
  }
}

double r2_original(const std::vector<std::pair<double, double>>& points,
                   const std::function<double(double)>& f) {
  double mean = 0.0;
  for (const auto& [k, u] : points) mean += u;
  mean /= static_cast<double>(points.size());
  double rss = 0.0, sst = 0.0;
  for (const auto& [k, u] : points) {
    rss += (u - f(k)) * (u - f(k));
    sst += (u - mean) * (u - mean);
  }
  return sst > 0.0 ? 1.0 - rss / sst : std::nan("");
}

}  // namespace

FundamentalFit fit_fundamental(const std::vector<std::pair<double, double>>& points,
                               FundamentalModel model) {
  if (points.size() < 3) throw DomainError("fundamental fit needs at least 3 points");
  const auto name = to_string(model);
  const bool log_k = model == FundamentalModel::logarithmic || model == FundamentalModel::greenberg;
  const bool log_u = model == FundamentalModel::exponential || model == FundamentalModel::bell;
  if (log_k) require_positive(points, true, false, name);
  if (log_u) require_positive(points, false, true, name);

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [k, u] = points[static_cast<std::size_t>(i)];
    double x = k;
    if (log_k) x = std::log(k);
    if (model == FundamentalModel::bell) x = k * k;
    X.row(i) << 1.0, x;
    y(i) = log_u ? std::log(u) : u;
  }
  const auto fit = ols(X, y);
  const double a = fit.beta(0);
  const double b = fit.beta(1);

  FundamentalFit out;
  out.model = model;
  out.std_error = fit.std_error;
  switch (model) {
    case FundamentalModel::linear:
      out.c0 = a;
      out.c1 = b;
      out.m_f = a;
      if (b < 0.0) {
        out.k_j = a / -b;
        out.capacity = a * *out.k_j / 4.0;
      }
      break;
    case FundamentalModel::logarithmic:
      out.c0 = a;
      out.c1 = b;
      break;
    case FundamentalModel::greenberg:
      out.c0 = -b;
      out.c1 = std::exp(a / -b);
      out.k_j = out.c1;
      break;
    case FundamentalModel::exponential:
      out.c0 = std::exp(a);
      out.c1 = -1.0 / b;
      out.m_f = out.c0;
      break;
    case FundamentalModel::bell:
      out.c0 = std::exp(a);
      out.c1 = b < 0.0 ? std::sqrt(-0.5 / b) : std::nan("");
      out.m_f = out.c0;
      break;
  }
  out.r2 = r2_original(points, [&](double k) { return out.predict(k); });
  return out;
}

PowerFit fit_power(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("power fit needs at least 3 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [x, v] = points[static_cast<std::size_t>(i)];
    if (!(x > 0.0) || !(v > 0.0)) throw DomainError("power fit needs positive x and y");
    X.row(i) << 1.0, std::log(x);
    y(i) = std::log(v);
  }
  const auto fit = ols(X, y);
  PowerFit out{std::exp(fit.beta(0)), fit.beta(1), 0.0};
  out.r2 = r2_original(points, [&](double x) { return out.a * std::pow(x, out.b); });
  return out;
}

char level_of_service(double m) {
  if (!(m >= 0.0)) throw DomainError("area module must be non-negative");
  if (m >= 12.077) return 'A';
  if (m >= 3.716) return 'B';
  if (m >= 2.230) return 'C';
  if (m >= 1.394) return 'D';
  if (m >= 0.557) return 'E';
  return 'F';
}

}  // namespace pedflow::metrics
