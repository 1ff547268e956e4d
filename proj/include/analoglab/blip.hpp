#pragma once

// A computable signal f whose derivative encodes membership in A.
//
//   phi(x)    = exp(-x^2 / (1 - x^2)) on |x| < 1, 0 elsewhere
//   psi_n(x)  = 4^-a(n) * phi((x - 2^-a(n)) / 2^-(n + a(n) + 2))
//   Phi_n(x)  = integral of psi_n from 0 to x
//   f(x)      = sum_n Phi_n(x)
//
// so that f'(2^-j) = 4^-j when j is in A and 0 otherwise, while reading that
// derivative off a finite-resolution instrument needs a time resolution on
// the order of the blip width 2^-(nu(j) + j + 1).

#include <analoglab/common.hpp>
#include <analoglab/precision.hpp>
#include <analoglab/resets.hpp>

#include <optional>
#include <vector>

namespace analoglab::blip {

double phi(double x);

/// Integral of phi over [-1, 1], computed once to 1e-15.
double phi_integral();

/// Integral of phi from 0 to u (odd in u, saturating at |u| >= 1).
double phi_primitive(double u, double tol);

struct BlipSpec {
  Natural n = 0;
  Natural a = 0;

  double center() const;      // 2^-a
  double height() const;      // 4^-a
  double half_width() const;  // 2^-(n + a + 2)
  double lo() const { return center() - half_width(); }
  double hi() const { return center() + half_width(); }
  /// Value of Phi_n past the support: height * half_width * phi_integral().
  double step_height() const;
};

double psi(const BlipSpec& spec, double x);

/// Phi_n(x) to absolute tolerance `tol`. Zero left of the support and the
/// exact step height right of it; adaptive Simpson only inside the support.
double step_Phi(const BlipSpec& spec, double x, double tol);

struct SignalValue {
  double value = 0.0;
  /// Certified bound on |f - f_N| for the omitted tail, 2^(1 - N).
  double tail_bound = 0.0;
};

/// Partial sum of the steps Phi_n for n < N over a materialized enumeration
/// prefix. Silent enumeration steps contribute nothing.
class SignalF {
 public:
  explicit SignalF(std::vector<std::optional<Natural>> prefix);
  SignalF(std::vector<std::optional<Natural>> prefix, Natural n_terms);
  static SignalF from_table(const resets::WaitingTimeTable& table);

  Natural terms() const { return n_terms_; }
  const std::vector<BlipSpec>& blips() const { return blips_; }

  SignalValue f_partial(double x, double tol) const;
  double tail_bound() const;

  /// Sum of psi_n at x; by support disjointness at most one term is nonzero.
  double f_prime_exact(double x) const;

  /// The blip whose support contains x, if any.
  const BlipSpec* blip_at(double x) const;

  /// f with the step that emitted j removed. Throws NotInSetWithinBudget when
  /// j was not emitted among the first N terms.
  SignalF perturbed(Natural j) const;
  const std::vector<Natural>& removed_indices() const { return removed_; }

 private:
  std::vector<std::optional<Natural>> prefix_;
  Natural n_terms_;
  std::vector<BlipSpec> blips_;
  std::vector<Natural> removed_;
};

/// Signal in, reading out: the input clock and output meter are CVQs.
struct DifferentiatorSim {
  precision::Cvq time;
  precision::Cvq amplitude;
  double fd_step;
  double threshold_factor = 0.5;

  /// Throws Error when fd_step is below the time resolution or the
  /// threshold factor is outside (0, 1).
  void validate() const;
};

struct DifferentiatorReading {
  double t_obs = 0.0;
  double t_minus = 0.0;
  double t_plus = 0.0;
  double derivative = 0.0;
  precision::Reading amplitude;
  Answer answer = Answer::No;
};

/// Observes the differentiator output at the quantized instant 2^-j using a
/// central difference on quantized stencil points, then quantizes the
/// output. YES iff |reading| > threshold_factor * 4^-j.
DifferentiatorReading run_differentiator(const DifferentiatorSim& sim, const SignalF& signal,
                                         Natural j, double tol = 1e-13);

}  // namespace analoglab::blip
