#include "aloha/special_fn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aloha {
namespace {

// e split into a head exactly representable in double and a tail, so that
// e*x + 1 can be formed without cancellation near x = -1/e.
constexpr double kEHi = 2.718281828459045090795598298427648842334747314453125;
constexpr double kELo = 1.4456468917292501578e-16;

// sqrt(2 (e x + 1)), the natural expansion variable at the branch point.
double branch_distance(double x) {
  const double t = std::fma(kEHi, x, 1.0) + kELo * x;
  return std::sqrt(2.0 * std::max(t, 0.0));
}

// Series of W about -1/e in p = +-sqrt(2(ex+1)); sign selects the branch.
double branch_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 +
         p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

// Halley update on f(w) = w e^w - x.
double halley(double x, double w) {
  for (int i = 0; i < 64; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0 || f == 0.0) return w;
    const double denom = ew * wp1 - (wp1 + 1.0) * f / (2.0 * wp1);
    const double dw = f / denom;
    const double next = w - dw;
    if (!std::isfinite(next)) return w;
    if (std::abs(dw) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next)) {
      return next;
    }
    w = next;
  }
  return w;
}

// Fritsch-Shafer-Crowley iteration; works in the log domain so it stays
// accurate where e^w under- or overflows.
double fritsch(double x, double w) {
  for (int i = 0; i < 8; ++i) {
    const double z = std::log(x / w) - w;
    const double wp1 = 1.0 + w;
    const double q = 2.0 * wp1 * (wp1 + 2.0 * z / 3.0);
    const double e = z / wp1 * (q - z) / (q - 2.0 * z);
    w *= 1.0 + e;
    if (std::abs(e) <= 2.0 * std::numeric_limits<double>::epsilon()) break;
  }
  return w;
}

[[noreturn]] void domain_fail(const char* name, double x) {
  throw std::domain_error(std::string(name) + ": argument " + std::to_string(x) +
                          " outside the real branch domain");
}

}  // namespace

double lambert_w0(double x) {
  if (std::isnan(x)) domain_fail("lambert_w0", x);
  if (x < kMinusInvE) {
    if (x < kMinusInvE - kBranchPointSlack) domain_fail("lambert_w0", x);
    return -1.0;
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  const double p = branch_distance(x);
  if (p < 0.3) return halley(x, branch_series(p));
  if (std::abs(x) < 1e-4) {
    // W0(x) = x - x^2 + 3/2 x^3 - ...
    return x * (1.0 - x * (1.0 - 1.5 * x));
  }
  double w;
  if (x < 3.0) {
    const double l = std::log1p(x);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  return fritsch(x, w);
}

double lambert_wm1(double x) {
  if (std::isnan(x) || x >= 0.0) domain_fail("lambert_wm1", x);
  if (x < kMinusInvE) {
    if (x < kMinusInvE - kBranchPointSlack) domain_fail("lambert_wm1", x);
    return -1.0;
  }
  const double p = branch_distance(x);
  if (p < 0.3) return halley(x, branch_series(-p));
  double w;
  if (x > -0.25) {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  } else {
    w = branch_series(-p);
  }
  return fritsch(x, w);
}

double lambert_w(WBranch branch, double x) {
  return branch == WBranch::principal ? lambert_w0(x) : lambert_wm1(x);
}

}  // namespace aloha
