#include "didlab/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <limits>

namespace didlab::stats {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}

double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

double student_t_cdf(double x, double dof) {
    if (!std::isfinite(dof) || dof > 1e8) return normal_cdf(x);
    boost::math::students_t_distribution<double> d(dof);
    return boost::math::cdf(d, x);
}

double two_sided_p(double t, double dof) {
    if (!std::isfinite(t)) return 0.0;
    const double p = 2.0 * (1.0 - student_t_cdf(std::abs(t), dof));
    return std::clamp(p, 0.0, 1.0);
}

double t_critical(double level, double dof) {
    if (!std::isfinite(dof) || dof > 1e8) return normal_quantile(1.0 - level / 2.0);
    boost::math::students_t_distribution<double> d(dof);
    return boost::math::quantile(d, 1.0 - level / 2.0);
}

}  // namespace didlab::stats
