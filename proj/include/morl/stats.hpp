#pragma once

#include <span>

namespace morl {

struct WelchResult {
    double t;
    double p;  // two-sided
    double df; // Welch-Satterthwaite degrees of freedom
};

/// Two-sided Welch unequal-variance t-test. Throws undefined_test when a
/// sample has fewer than two values or both samples have zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided Student-t tail probability P(|T| >= |t|) with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

} // namespace morl
