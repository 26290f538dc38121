#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "aloha/model.hpp"

namespace aloha {

enum class Winner { pb, cb, tie };
enum class PairRegime { both_saturated, both_unsaturated, mixed };

std::string_view to_string(Winner w);
std::string_view to_string(PairRegime r);

/// Unconstrained (T0 = 0) comparison of the two schemes carrying the same
/// traffic. U_cb counts delivered data in request-slot units (M per
/// connection), U_pb counts packets; the closed-form inequality compares
/// exactly these two quantities.
struct ComparisonVerdict {
  Winner winner = Winner::tie;  ///< from the direct optimum comparison
  PairRegime regime = PairRegime::mixed;
  double u_pb = 0.0;
  double u_cb = 0.0;
  double lhs = 0.0;  ///< NaN for mixed regimes
  double rhs = 0.0;
  bool inequality_favors_pb = false;  ///< lhs < rhs
};

/// Relative gap below which two optima count as a tie.
inline constexpr double kTieTolerance = 1e-9;

/// `energy` is normalized by the request slot sigma_N; the packet-based side
/// gets the same battery in its own slot unit. Throws std::invalid_argument
/// when the two networks sit in different regimes, or when `declared` is
/// given and disagrees with the computed regime.
ComparisonVerdict pb_beats_cb(const CouplingParams& c, const EnergyProfile& energy, int n,
                              std::optional<PairRegime> declared = std::nullopt);

/// Right-hand side of the both-saturated inequality; depends only on n and
/// P_T/P_W.
double saturated_comparison_rhs(int n, double power_ratio);

struct MapSpec {
  std::vector<int> ks;
  std::vector<double> packet_lens;
  int n = 100;
  double sigma_n = 2.0;
  double pb_overhead = 2.0;
  double delta = 4.0;
  double lambda_n = 0.0;
  EnergyProfile energy{1.0, 100.0, 1.0};
};

struct MapCell {
  int k = 0;
  double packet_len = 0.0;
  double m = 0.0;
  bool valid = false;  ///< false when K*L_P < sigma_N
  ComparisonVerdict verdict;
};

/// Row-major over ks x packet_lens. Mixed cells carry a direct verdict and
/// NaN inequality sides.
std::vector<MapCell> regime_map(const MapSpec& spec);

/// Two-step vs four-step random-access small data transmission, times in ms
/// and powers in mW.
struct RaSdtSetting {
  double pb_overhead = 6.0;  ///< Delta_{S,P}
  double cb_overhead = 8.0;  ///< Delta_{S,N}; delta = cb_overhead / sigma_n
  double sigma_n = 2.0;
  double p_tx = 300.0;
  double p_wait = 3.0;
  int n = 100;

  double delta() const { return cb_overhead / sigma_n; }
};

/// Saturated threshold L_N < numerator / (L_P + offset).
struct ThresholdFit {
  double numerator = 0.0;
  double offset = 0.0;
  double at(double packet_len) const { return numerator / (packet_len + offset); }
};

ThresholdFit rasdt_fit(const RaSdtSetting& s = {});

/// Connection payload length L_N below which the packet-based scheme has the
/// larger saturated lifetime throughput, found by root-finding the
/// both-saturated inequality in L_N to the relative bracket width `rel_tol`.
/// +inf when packet-based always wins.
double rasdt_threshold(double packet_len, const RaSdtSetting& s = {}, double rel_tol = 1e-12);

}  // namespace aloha
