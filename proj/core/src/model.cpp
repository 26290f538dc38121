#include "aloha/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aloha {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view to_string(Scheme s) { return s == Scheme::cb ? "cb" : "pb"; }

void validate(const CbParams& p) {
  require(p.n >= 1, "n must be >= 1");
  require(finite(p.m) && p.m >= 1.0, "m must be >= 1");
  require(finite(p.delta) && p.delta >= 0.0, "delta must be >= 0");
  require(finite(p.sigma) && p.sigma > 0.0, "sigma must be > 0");
  require(finite(p.lambda) && p.lambda >= 0.0, "lambda must be >= 0");
  require(finite(p.q) && p.q >= 0.0 && p.q <= 1.0, "q must lie in [0, 1]");
}

void validate(const PbParams& p) {
  require(p.n >= 1, "n must be >= 1");
  require(finite(p.sigma) && p.sigma > 0.0, "sigma must be > 0");
  require(finite(p.lambda) && p.lambda >= 0.0, "lambda must be >= 0");
  require(finite(p.q) && p.q >= 0.0 && p.q <= 1.0, "q must lie in [0, 1]");
}

void validate(const EnergyProfile& e) {
  require(finite(e.budget) && e.budget > 0.0, "energy budget must be > 0");
  require(finite(e.p_tx) && e.p_tx > 0.0, "transmit power must be > 0");
  require(finite(e.p_wait) && e.p_wait > 0.0, "waiting power must be > 0");
  require(e.p_wait <= e.p_tx, "waiting power must not exceed transmit power");
}

void validate(const CouplingParams& c) {
  require(c.k >= 1, "k must be >= 1");
  require(finite(c.packet_len) && c.packet_len > 0.0, "packet length must be > 0");
  require(finite(c.pb_overhead) && c.pb_overhead >= 0.0, "packet overhead must be >= 0");
  require(finite(c.sigma_n) && c.sigma_n > 0.0, "sigma_n must be > 0");
  require(finite(c.delta) && c.delta >= 0.0, "delta must be >= 0");
  require(finite(c.lambda_n) && c.lambda_n >= 0.0, "lambda must be >= 0");
}

CoupledParams couple(const CouplingParams& c, int n) {
  validate(c);
  CoupledParams out;
  out.connection_len = c.k * c.packet_len;
  const double m = out.connection_len / c.sigma_n;
  if (m < 1.0 - 1e-12) {
    throw std::invalid_argument("coupling gives M = " + std::to_string(m) +
                                " < 1: K * L_P must cover at least one request slot");
  }
  out.integral_m = std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, m);

  out.cb.n = n;
  out.cb.m = std::max(m, 1.0);
  out.cb.delta = c.delta;
  out.cb.sigma = c.sigma_n;
  out.cb.lambda = c.lambda_n;

  out.pb.n = n;
  out.pb.sigma = c.packet_len + c.pb_overhead;
  out.pb.lambda = c.lambda_n * out.pb.sigma / c.sigma_n;
  return out;
}

EnergyProfile rescale_budget(const EnergyProfile& e, double from_sigma, double to_sigma) {
  return {e.budget * from_sigma / to_sigma, e.p_tx, e.p_wait};
}

CbParams as_connection_based(const PbParams& p) {
  CbParams cb;
  cb.n = p.n;
  cb.m = 1.0;
  cb.delta = 0.0;
  cb.sigma = p.sigma;
  cb.lambda = p.lambda;
  cb.q = p.q;
  return cb;
}

}  // namespace aloha
