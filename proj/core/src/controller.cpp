#include "covspec/controller.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>

#include "covspec/error.hpp"

namespace covspec {

GateDecision gate(double margin, double gamma) noexcept {
  return GateDecision{margin, gamma, !(margin >= gamma)};
}

void ControllerParams::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) fail(Errc::kConfigError, "eta must lie in (0, 1)");
  if (!(p_low >= 0.0 && p_up <= 1.0 && p_low < p_up)) {
    fail(Errc::kConfigError, "need 0 <= p_low < p_up <= 1");
  }
  if (!(scale > 1.0) || !std::isfinite(scale)) fail(Errc::kConfigError, "scale_s must exceed 1");
  if (!(t_ref_s >= 0.0)) fail(Errc::kConfigError, "t_ref_s must be nonnegative");
  if (k_min < 1 || k_min > k_max) fail(Errc::kConfigError, "need 1 <= k_min <= k_max");
  if (k_init < k_min || k_init > k_max) fail(Errc::kConfigError, "k_init must lie in [k_min, k_max]");
}

long long round_half_even(double x) noexcept {
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x);
  std::fesetround(saved);
  return static_cast<long long>(r);
}

int phi(double p_hat, double t_rej_s, const ControllerParams& params) noexcept {
  if (p_hat <= params.p_low) return -1;
  if (p_hat >= params.p_up && t_rej_s <= params.t_ref_s) return 1;
  return 0;
}

LengthController::LengthController(const ControllerParams& params)
    : params_(params), k_(params.k_init) {
  params_.validate();
}

void LengthController::observe(bool accepted) noexcept {
  p_hat_ = (1.0 - params_.eta) * p_hat_ + params_.eta * (accepted ? 1.0 : 0.0);
  p_hat_ = std::clamp(p_hat_, 0.0, 1.0);
}

std::size_t LengthController::update(std::size_t n_acc, std::size_t k_used, double t_rej_s) {
  if (n_acc > k_used) fail(Errc::kPreconditionViolation, "accepted length exceeds draft length");
  for (std::size_t i = 0; i < n_acc; ++i) observe(true);
  for (std::size_t i = n_acc; i < k_used; ++i) observe(false);
  last_phi_ = phi(p_hat_, t_rej_s, params_);
  const double scaled = static_cast<double>(k_) * std::pow(params_.scale, last_phi_);
  const long long rounded = round_half_even(scaled);
  const auto lo = static_cast<long long>(params_.k_min);
  const auto hi = static_cast<long long>(params_.k_max);
  k_ = static_cast<std::size_t>(std::clamp(rounded, lo, hi));
  return k_;
}

}  // namespace covspec
