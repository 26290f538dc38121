#pragma once

namespace aloha {

/// Arguments this far below -1/e are treated as rounding noise and clamped
/// to the branch point instead of raising a domain error.
inline constexpr double kBranchPointSlack = 1e-15;

/// -1/e, the common endpoint of both real branches.
inline constexpr double kMinusInvE = -0.36787944117144232159552377016146;

enum class WBranch { principal, lower };

/// Principal branch W0 on [-1/e, inf). Result is >= -1.
/// Throws std::domain_error below -1/e - kBranchPointSlack.
double lambert_w0(double x);

/// Lower branch W-1 on [-1/e, 0). Result is <= -1.
/// Throws std::domain_error outside the branch domain.
double lambert_wm1(double x);

double lambert_w(WBranch branch, double x);

}  // namespace aloha
