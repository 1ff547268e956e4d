#include <analoglab/blip.hpp>

#include <analoglab/quadrature.hpp>

#include <algorithm>
#include <cmath>

namespace analoglab::blip {

namespace {

// Normalized-coordinate tolerance never looser than this, however loose the
// caller's absolute tolerance becomes after scaling by a tiny step height.
constexpr double kMaxRelativeTol = 1e-10;

}  // namespace

double phi(double x) {
  if (!(std::fabs(x) < 1.0)) return 0.0;
  const double x2 = x * x;
  return std::exp(-x2 / (1.0 - x2));
}

double phi_primitive(double u, double tol) {
  if (u == 0.0) return 0.0;
  const double upper = std::min(std::fabs(u), 1.0);
  const auto r = quadrature::adaptive_simpson(phi, 0.0, upper, tol);
  return std::copysign(r.value, u);
}

double phi_integral() {
  static const double value = 2.0 * phi_primitive(1.0, 5e-16);
  return value;
}

double BlipSpec::center() const { return std::ldexp(1.0, -static_cast<int>(a)); }
double BlipSpec::height() const { return std::ldexp(1.0, -2 * static_cast<int>(a)); }
double BlipSpec::half_width() const { return std::ldexp(1.0, -static_cast<int>(n + a + 2)); }
double BlipSpec::step_height() const { return height() * half_width() * phi_integral(); }

double psi(const BlipSpec& spec, double x) {
  return spec.height() * phi((x - spec.center()) / spec.half_width());
}

double step_Phi(const BlipSpec& spec, double x, double tol) {
  if (!(tol > 0.0)) throw ToleranceNotMet("step_Phi tolerance must be positive");
  if (x <= spec.lo()) return 0.0;
  if (x >= spec.hi()) return spec.step_height();
  const double scale = spec.height() * spec.half_width();
  const double u = (x - spec.center()) / spec.half_width();
  const double norm_tol = std::min(tol / scale, kMaxRelativeTol);
  return scale * (0.5 * phi_integral() + phi_primitive(u, norm_tol));
}

// ---------------------------------------------------------------------------

SignalF::SignalF(std::vector<std::optional<Natural>> prefix)
    : SignalF(prefix, static_cast<Natural>(prefix.size())) {}

SignalF::SignalF(std::vector<std::optional<Natural>> prefix, Natural n_terms)
    : prefix_(std::move(prefix)), n_terms_(n_terms) {
  if (n_terms_ > prefix_.size())
    throw Error("signal asks for " + std::to_string(n_terms_) + " terms but the enumeration has " +
                std::to_string(prefix_.size()));
  for (Natural n = 0; n < n_terms_; ++n)
    if (prefix_[n]) blips_.push_back({n, *prefix_[n]});
}

SignalF SignalF::from_table(const resets::WaitingTimeTable& table) {
  return SignalF(table.prefix());
}

double SignalF::tail_bound() const { return std::ldexp(1.0, 1 - static_cast<int>(n_terms_)); }

SignalValue SignalF::f_partial(double x, double tol) const {
  const double per_term = tol / static_cast<double>(std::max<std::size_t>(1, blips_.size()));
  double sum = 0.0;
  for (const auto& b : blips_) sum += step_Phi(b, x, per_term);
  return {sum, tail_bound()};
}

const BlipSpec* SignalF::blip_at(double x) const {
  for (const auto& b : blips_)
    if (x > b.lo() && x < b.hi()) return &b;
  return nullptr;
}

double SignalF::f_prime_exact(double x) const {
  const auto* b = blip_at(x);
  return b ? psi(*b, x) : 0.0;
}

SignalF SignalF::perturbed(Natural j) const {
  for (Natural n = 0; n < n_terms_; ++n) {
    if (prefix_[n] && *prefix_[n] == j) {
      auto prefix = prefix_;
      prefix[n].reset();
      SignalF out(std::move(prefix), n_terms_);
      out.removed_ = removed_;
      out.removed_.push_back(n);
      return out;
    }
  }
  throw NotInSetWithinBudget("j = " + std::to_string(j) + " not emitted among the first " +
                             std::to_string(n_terms_) + " terms");
}

// ---------------------------------------------------------------------------

void DifferentiatorSim::validate() const {
  if (!(fd_step >= time.resolution()))
    throw Error("finite-difference step must be at least the time resolution");
  if (!(threshold_factor > 0.0 && threshold_factor < 1.0))
    throw Error("detection threshold factor must lie in (0, 1)");
}

DifferentiatorReading run_differentiator(const DifferentiatorSim& sim, const SignalF& signal,
                                         Natural j, double tol) {
  sim.validate();
  DifferentiatorReading r;
  const double instant = std::ldexp(1.0, -static_cast<int>(j));
  r.t_obs = precision::quantize(sim.time, instant).value;
  r.t_minus = precision::quantize(sim.time, r.t_obs - sim.fd_step).value;
  r.t_plus = precision::quantize(sim.time, r.t_obs + sim.fd_step).value;
  const double span = r.t_plus - r.t_minus;
  if (span > 0.0) {
    const double hi = signal.f_partial(r.t_plus, tol).value;
    const double lo = signal.f_partial(r.t_minus, tol).value;
    r.derivative = (hi - lo) / span;
  }
  r.amplitude = precision::quantize(sim.amplitude, r.derivative);
  const double nominal = std::ldexp(1.0, -2 * static_cast<int>(j));
  r.answer = std::fabs(r.amplitude.value) > sim.threshold_factor * nominal ? Answer::Yes : Answer::No;
  return r;
}

}  // namespace analoglab::blip
