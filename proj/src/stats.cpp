#include "morl/stats.hpp"

#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "morl/core.hpp"

namespace morl {

double student_t_two_sided(double t, double df) {
    require(df > 0.0, "degrees of freedom must be positive");
    if (!std::isfinite(t)) return 0.0;
    // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    const double x = df / (df + t * t);
    return boost::math::ibeta(0.5 * df, 0.5, x);
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw undefined_test("welch t-test needs two values per sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = std::pow(sample_stddev(a), 2) / na;
    const double vb = std::pow(sample_stddev(b), 2) / nb;
    if (va + vb <= 0.0) throw undefined_test("welch t-test on two zero-variance samples");

    const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
    const double df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    return {t, student_t_two_sided(t, df), df};
}

} // namespace morl
