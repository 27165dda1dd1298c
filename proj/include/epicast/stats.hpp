#pragma once

#include <vector>

namespace epicast::stats {

// One-sample Kolmogorov-Smirnov statistic against Exp(rate).
double ks_statistic_exponential(std::vector<double> samples, double rate);

// Asymptotic Kolmogorov distribution: P(sqrt(n) D > x).
double ks_p_value(double statistic, std::size_t n);

// Upper tail of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, double k);

} // namespace epicast::stats
