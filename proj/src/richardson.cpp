#include <analoglab/richardson.hpp>

#include <analoglab/blip.hpp>
#include <analoglab/kernels.hpp>

#include <cmath>
#include <numbers>

namespace analoglab::richardson {

double rho(RhoVariant variant, double x) {
  if (variant == RhoVariant::Smooth) return blip::phi(x);
  return 0.5 * (std::fabs(x - 1.0) - (x - 1.0));
}

// ---------------------------------------------------------------------------

namespace {

std::size_t arity_of(const Expr::Node& n) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, node::Add> || std::is_same_v<T, node::Mul>)
          return std::max(v.l->arity(), v.r->arity());
        else if constexpr (std::is_same_v<T, node::Sin> || std::is_same_v<T, node::Rho>)
          return v.arg->arity();
        else if constexpr (std::is_same_v<T, node::Var>)
          return v.index + 1;
        else
          return 0;
      },
      n);
}

double eval_unchecked(const Expr& e, std::span<const double> x) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, node::Add>)
          return eval_unchecked(*v.l, x) + eval_unchecked(*v.r, x);
        else if constexpr (std::is_same_v<T, node::Mul>)
          return eval_unchecked(*v.l, x) * eval_unchecked(*v.r, x);
        else if constexpr (std::is_same_v<T, node::Sin>)
          return std::sin(eval_unchecked(*v.arg, x));
        else if constexpr (std::is_same_v<T, node::Var>)
          return x[v.index];
        else if constexpr (std::is_same_v<T, node::Rational>)
          return static_cast<double>(v.p) / static_cast<double>(v.q);
        else if constexpr (std::is_same_v<T, node::Pi>)
          return std::numbers::pi;
        else
          return rho(v.variant, eval_unchecked(*v.arg, x));
      },
      e.node());
}

auto share(const Expr& e) { return std::make_shared<const Expr>(e); }

}  // namespace

Expr::Expr(Node n) : node_(std::move(n)), arity_(arity_of(node_)) {}

Expr operator+(const Expr& l, const Expr& r) { return Expr(node::Add{share(l), share(r)}); }
Expr operator*(const Expr& l, const Expr& r) { return Expr(node::Mul{share(l), share(r)}); }
Expr sin(const Expr& arg) { return Expr(node::Sin{share(arg)}); }
Expr var(std::size_t index) { return Expr(node::Var{index}); }
Expr rational(long long p, long long q) {
  if (q == 0) throw Error("rational constant with zero denominator");
  return Expr(node::Rational{p, q});
}
Expr pi() { return Expr(node::Pi{}); }
Expr rho(RhoVariant variant, const Expr& arg) { return Expr(node::Rho{variant, share(arg)}); }

Expr power(const Expr& base, unsigned exponent) {
  if (exponent == 0) return rational(1, 1);
  Expr out = base;
  for (unsigned i = 1; i < exponent; ++i) out = out * base;
  return out;
}

double eval_expr(const Expr& e, std::span<const double> x) {
  if (x.size() < e.arity())
    throw ArityMismatch("expression uses " + std::to_string(e.arity()) + " variables, got " +
                        std::to_string(x.size()));
  return eval_unchecked(e, x);
}

// ---------------------------------------------------------------------------

Natural nearest_natural(double y) {
  if (!(y > 0.0)) return 0;
  return static_cast<Natural>(std::floor(y + 0.5));
}

FDevice::FDevice(std::shared_ptr<const resets::DiophantineVerifier> verifier,
                 RhoVariant rho_variant)
    : verifier_(std::move(verifier)), rho_variant_(rho_variant) {
  if (!verifier_) throw Error("F device needs a verifier");
}

double FDevice::F(Natural j, std::span<const double> x) const {
  const std::size_t k = this->k();
  if (x.size() != k)
    throw ArityMismatch("F expects " + std::to_string(k) + " coordinates, got " +
                        std::to_string(x.size()));
  // Small fixed arities keep this allocation-free on the hot path.
  Natural small[8];
  std::vector<Natural> big;
  std::span<Natural> rounded;
  if (k <= 8) {
    rounded = std::span<Natural>(small, k);
  } else {
    big.resize(k);
    rounded = big;
  }
  double mask = 1.0;
  double spread = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double y = x[i] * x[i];
    rounded[i] = nearest_natural(y);
    // sin^2 and cos^2 of pi*y have period 1; reduce first for accuracy.
    const double r = std::numbers::pi * (y - std::nearbyint(y));
    const double s = std::sin(r);
    const double c = std::cos(r);
    mask *= c * c;
    spread += s * s;
  }
  const auto v = static_cast<double>(verifier_->verify(j, rounded));
  return 2.0 * v * mask + 4.0 * static_cast<double>(k) * spread;
}

double FDevice::H(Natural j, std::span<const double> x) const { return rho(rho_variant_, F(j, x)); }

// ---------------------------------------------------------------------------

DecodingFamily::DecodingFamily(std::size_t k) : k_(k) {
  if (k_ == 0) throw Error("decoding family needs k >= 1");
}

double DecodingFamily::decode(double t, std::size_t i) const {
  if (i < 1 || i > k_)
    throw IndexOutOfRange("decoding index " + std::to_string(i) + " outside [1, " +
                          std::to_string(k_) + "]");
  const int exponent = static_cast<int>(2 * i - 1);
  double p = t;
  for (int e = 1; e < exponent; ++e) p *= t;
  return t * std::sin(p);
}

std::vector<double> DecodingFamily::decode_all(double t) const {
  std::vector<double> out(k_);
  for (std::size_t i = 1; i <= k_; ++i) out[i - 1] = decode(t, i);
  return out;
}

Expr DecodingFamily::as_expr(std::size_t i) const {
  if (i < 1 || i > k_)
    throw IndexOutOfRange("decoding index " + std::to_string(i) + " outside [1, " +
                          std::to_string(k_) + "]");
  const Expr t = var(0);
  return t * sin(power(t, static_cast<unsigned>(2 * i - 1)));
}

double DecodingFamily::phase_rate_bound(double t_max) const {
  const double e = static_cast<double>(2 * k_ - 1);
  return 2.0 * std::numbers::pi * t_max * (1.0 + e * std::pow(t_max, e));
}

double B(const FDevice& dev, const DecodingFamily& fam, Natural j, double t) {
  if (fam.k() != dev.k())
    throw ArityMismatch("decoding family has k = " + std::to_string(fam.k()) +
                        " but the device has k = " + std::to_string(dev.k()));
  double x[8];
  if (fam.k() <= 8) {
    for (std::size_t i = 1; i <= fam.k(); ++i) x[i - 1] = fam.decode(t, i);
    return dev.H(j, std::span<const double>(x, fam.k()));
  }
  const auto xs = fam.decode_all(t);
  return dev.H(j, xs);
}

std::optional<double> find_decoding_parameter(const DecodingFamily& fam,
                                              std::span<const double> target, double eps,
                                              double t_max, double step) {
  if (target.size() != fam.k()) throw ArityMismatch("target arity differs from decoding family");
  const auto count = static_cast<Natural>(std::floor(t_max / step));
  for (Natural n = 0; n <= count; ++n) {
    const double t = static_cast<double>(n) * step;
    bool ok = true;
    for (std::size_t i = 1; i <= fam.k() && ok; ++i)
      ok = std::fabs(target[i - 1] - fam.decode(t, i)) < eps;
    if (ok) return t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double cutoff(Cutoff kind, double t) {
  return kind == Cutoff::Exponential ? std::exp(-t) : 1.0 / (1.0 + t * t);
}

double cutoff_tail(Cutoff kind, double from) {
  return kind == Cutoff::Exponential ? std::exp(-from)
                                     : 0.5 * std::numbers::pi - std::atan(from);
}

KResult K(const FDevice& dev, const DecodingFamily& fam, const CutoffIntegral& cut, Natural j) {
  const double upper = cut.upper_limit;
  if (!(upper > 0.0) || !std::isfinite(upper)) throw Error("K needs a positive finite upper limit");
  if (!(cut.tol > 0.0)) throw Error("K needs a positive tolerance");
  if (fam.k() != dev.k()) throw ArityMismatch("decoding family and device disagree on k");

  const double k = static_cast<double>(fam.k());
  const double innermost = (2.0 * k - 1.0) * std::pow(upper, 2.0 * k - 2.0);
  const double first_step = std::min(2.0 * std::numbers::pi / innermost, upper / 16.0);
  const double resolve_step = 2.0 * std::numbers::pi / fam.phase_rate_bound(upper) / 16.0;

  auto integrand = [&](double t) { return B(dev, fam, j, t) * cutoff(cut.gamma, t); };
  auto sum = [&](double start, double step, Natural count) {
    return cut.parallel ? kernels::sample_sum_parallel(integrand, start, step, count)
                        : kernels::sample_sum_serial(integrand, start, step, count);
  };

  Natural intervals = static_cast<Natural>(std::ceil(upper / first_step));
  double h = upper / static_cast<double>(intervals);
  KResult r;
  r.truncation_bound = cutoff_tail(cut.gamma, upper);
  double interior = intervals > 1 ? sum(h, h, intervals - 1) : 0.0;
  const double ends = 0.5 * (integrand(0.0) + integrand(upper));
  double T = h * (ends + interior);
  r.samples = intervals + 1;

  for (;;) {
    if (2 * intervals + 1 > cut.max_samples)
      throw NonConvergentQuadrature("K(" + std::to_string(j) + ") did not settle below tolerance " +
                                    std::to_string(cut.tol) + " within " +
                                    std::to_string(cut.max_samples) + " samples");
    const double mid = sum(0.5 * h, h, intervals);
    interior += mid;
    intervals *= 2;
    h *= 0.5;
    r.samples += intervals / 2;
    ++r.levels;
    const double next = h * (ends + interior);
    const double change = std::fabs(next - T);
    T = next;
    if (h <= resolve_step && change < cut.tol) break;
  }
  r.value = T;
  r.step = h;
  return r;
}

Natural bound_beta_from_upper_limit(double upper_limit) {
  if (!(upper_limit >= 1.0) || !std::isfinite(upper_limit))
    throw Error("upper limit must be a finite number >= 1");
  return static_cast<Natural>(std::ceil(upper_limit * upper_limit)) + 1;
}

}  // namespace analoglab::richardson
