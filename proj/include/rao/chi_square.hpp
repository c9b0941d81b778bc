#pragma once

namespace rao {

// Upper tail P(X > x) for X ~ chi^2_df, i.e. the regularized incomplete
// gamma Q(df/2, x/2). Throws DomainError for x < 0 or df < 1.
double chi_square_sf(double x, int df);

// Lower tail P(X <= x) = P(df/2, x/2).
double chi_square_cdf(double x, int df);

}  // namespace rao
