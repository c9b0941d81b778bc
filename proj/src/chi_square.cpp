#include "rao/chi_square.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

#include "rao/errors.hpp"

namespace rao {

namespace {

void check_args(double x, int df) {
  if (df < 1) throw DomainError("chi-square degrees of freedom must be >= 1");
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << "chi-square argument must be nonnegative, got " << x;
    throw DomainError(os.str());
  }
}

}  // namespace

double chi_square_sf(double x, int df) {
  check_args(x, df);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi_square_cdf(double x, int df) {
  check_args(x, df);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

}  // namespace rao
