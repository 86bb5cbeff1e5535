#pragma once

#include <cstddef>

#include "covspec/probcore.hpp"

namespace covspec {

/// Gate verdict for one drafted token. `verify` is false when the margin
/// clears the threshold and the token is committed without the edge.
struct GateDecision {
  double margin = 0.0;
  double gamma = 0.0;
  bool verify = true;
};

GateDecision gate(double margin, double gamma) noexcept;
inline GateDecision gate(const ProbDist& p_d, double gamma) { return gate(margin(p_d), gamma); }

struct ControllerParams {
  double eta = 0.1;
  double p_low = 0.4;
  double p_up = 0.8;
  double t_ref_s = 0.05;
  double scale = 2.0;
  std::size_t k_init = 4;
  std::size_t k_min = 1;
  std::size_t k_max = 16;

  /// eta in (0, 1), 0 <= p_low < p_up <= 1, scale > 1, t_ref >= 0,
  /// 1 <= k_min <= k_init <= k_max. Throws kConfigError.
  void validate() const;
};

/// Nearest integer, halves to even.
long long round_half_even(double x) noexcept;

/// Length direction: -1 when acceptance is poor, +1 when acceptance is high and
/// a rejection is cheap, 0 otherwise.
int phi(double p_hat, double t_rej_s, const ControllerParams& params) noexcept;

/// EMA acceptance tracker driving the draft length.
class LengthController {
 public:
  explicit LengthController(const ControllerParams& params);

  double p_hat() const noexcept { return p_hat_; }
  std::size_t k() const noexcept { return k_; }
  int last_phi() const noexcept { return last_phi_; }
  const ControllerParams& params() const noexcept { return params_; }

  /// One EMA step with outcome a in {0, 1}.
  void observe(bool accepted) noexcept;

  /// Applies n_acc accepts then (k_used - n_acc) rejects, rescales k by
  /// scale^phi and clips to [k_min, k_max]. Returns the new k. Throws
  /// kPreconditionViolation when n_acc > k_used.
  std::size_t update(std::size_t n_acc, std::size_t k_used, double t_rej_s);

 private:
  ControllerParams params_;
  double p_hat_ = 1.0;
  std::size_t k_;
  int last_phi_ = 0;
};

}  // namespace covspec
