#ifndef PEDFLOW_METRICS_STATS_HPP
#define PEDFLOW_METRICS_STATS_HPP

#include <vector>

namespace pedflow::metrics {

/// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` > 0 degrees of freedom.
double student_t_cdf(double t, double df);

struct SampleSummary {
  double mean = 0.0;
  double var = 0.0;  ///< sample variance
  double n = 0.0;
};

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_one_tail = 1.0;
  double p_two_tail = 1.0;
};

/// Two-sample t-test assuming unequal variances. Throws DomainError when
/// either n < 2, a variance is negative, or both variances are zero.
WelchResult welch_t_test(const SampleSummary& a, const SampleSummary& b);

SampleSummary summarize_sample(const std::vector<double>& xs);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pedflow::metrics

#endif  // PEDFLOW_METRICS_STATS_HPP
