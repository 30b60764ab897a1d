#pragma once

#include "arsgs/rng.hpp"

namespace arsgs {

double normal_pdf(double x);
double normal_cdf(double x);       // erfc-based, accurate in both tails
double normal_quantile(double p);  // Wichura AS241, double precision

// Standard normal conditioned on [a, b]. Inverse-CDF in the central regime;
// exponential tail rejection once the interval sits beyond five standard
// deviations. Throws NumericalUnderflow when the interval mass is below
// 1e-300.
double sample_truncated_std_normal(double a, double b, RngStream& rng);

}  // namespace arsgs
