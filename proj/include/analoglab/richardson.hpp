#pragma once

// Elementary-function encoding of membership in A.
//
// A surrogate F(j, x_1..x_k) built on top of a Diophantine verifier V:
//
//   F = 2 V(j, <x_1^2>, ..., <x_k^2>) prod cos^2(pi x_i^2) + 4k sum sin^2(pi x_i^2)
//
// where <y> is the natural number nearest to y (halves round up). F is even in
// every x_i, nonnegative, continuous (the cos^2 mask vanishes on every
// rounding seam), at least 2 everywhere when V has no zero, and F <= 1 forces
// V(<x^2>) = 0. Each evaluation calls the verifier.
//
// H = rho(F) turns "F <= 1 somewhere" into a nonzero signal; B_j(t) feeds H a
// one-parameter decoding curve; K(j) integrates B_j against a cutoff.

#include <analoglab/common.hpp>
#include <analoglab/resets.hpp>

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace analoglab::richardson {

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

enum class RhoVariant { Smooth, Piecewise };

/// Smooth: the bump phi. Piecewise: (|x - 1| - (x - 1)) / 2.
/// Both give rho(0) = 1 and rho(x) = 0 for x >= 1.
double rho(RhoVariant variant, double x);

// ---------------------------------------------------------------------------
// Expression trees over +, *, sin, projections, rational and pi constants,
// and the two rho switches.
// ---------------------------------------------------------------------------

class Expr;

namespace node {
struct Add { std::shared_ptr<const Expr> l, r; };
struct Mul { std::shared_ptr<const Expr> l, r; };
struct Sin { std::shared_ptr<const Expr> arg; };
struct Var { std::size_t index; };
struct Rational { long long p; long long q; };
struct Pi {};
struct Rho { RhoVariant variant; std::shared_ptr<const Expr> arg; };
}  // namespace node

class Expr {
 public:
  using Node = std::variant<node::Add, node::Mul, node::Sin, node::Var, node::Rational, node::Pi,
                            node::Rho>;

  explicit Expr(Node n);

  const Node& node() const { return node_; }
  /// Smallest arity that covers every projection in the tree.
  std::size_t arity() const { return arity_; }

 private:
  Node node_;
  std::size_t arity_;
};

Expr operator+(const Expr& l, const Expr& r);
Expr operator*(const Expr& l, const Expr& r);
Expr sin(const Expr& arg);
Expr var(std::size_t index);
/// Throws Error when q == 0.
Expr rational(long long p, long long q);
Expr pi();
Expr rho(RhoVariant variant, const Expr& arg);
Expr power(const Expr& base, unsigned exponent);

/// Recursive evaluation. Throws ArityMismatch when x has fewer components
/// than the expression's arity.
double eval_expr(const Expr& e, std::span<const double> x);

// ---------------------------------------------------------------------------

/// Nearest natural to y >= 0, ties rounded up.
Natural nearest_natural(double y);

class FDevice {
 public:
  FDevice(std::shared_ptr<const resets::DiophantineVerifier> verifier,
          RhoVariant rho_variant = RhoVariant::Piecewise);

  std::size_t k() const { return verifier_->arity(); }
  RhoVariant rho_variant() const { return rho_variant_; }
  const resets::DiophantineVerifier& verifier() const { return *verifier_; }

  /// Throws ArityMismatch when x.size() != k().
  double F(Natural j, std::span<const double> x) const;
  double H(Natural j, std::span<const double> x) const;

 private:
  std::shared_ptr<const resets::DiophantineVerifier> verifier_;
  RhoVariant rho_variant_;
};

/// (t)_i = t sin(t^(2i - 1)), i = 1..k, so |(t)_i| <= t.
class DecodingFamily {
 public:
  explicit DecodingFamily(std::size_t k);

  std::size_t k() const { return k_; }
  /// Throws IndexOutOfRange unless 1 <= i <= k.
  double decode(double t, std::size_t i) const;
  std::vector<double> decode_all(double t) const;
  /// The same curve as an expression in one variable.
  Expr as_expr(std::size_t i) const;

  /// Upper bound on d/dt of pi (t)_i^2 over [0, t_max], the fastest phase
  /// the surrogate F sees along the curve.
  double phase_rate_bound(double t_max) const;

 private:
  std::size_t k_;
};

/// B_j(t) = H_j((t)_1, ..., (t)_k). Throws ArityMismatch when the family and
/// device disagree on k.
double B(const FDevice& dev, const DecodingFamily& fam, Natural j, double t);

/// Dense scan of t in [0, t_max] for the first t with |x_i - (t)_i| < eps for
/// every i.
std::optional<double> find_decoding_parameter(const DecodingFamily& fam,
                                              std::span<const double> target, double eps,
                                              double t_max, double step);

enum class Cutoff { Exponential, Lorentzian };

double cutoff(Cutoff kind, double t);
/// Integral of the cutoff over [from, infinity).
double cutoff_tail(Cutoff kind, double from);

struct CutoffIntegral {
  Cutoff gamma = Cutoff::Exponential;
  double upper_limit = 1.0;
  double tol = 1e-9;
  /// Refinement stops with NonConvergentQuadrature past this many samples.
  Natural max_samples = Natural{1} << 26;
  bool parallel = true;
};

struct KResult {
  double value = 0.0;
  double step = 0.0;
  int levels = 0;
  Natural samples = 0;
  /// Mass of the cutoff beyond the upper limit; bounds the truncation error.
  double truncation_bound = 0.0;
};

/// Trapezoid rule on [0, upper_limit] with step halving. The first step is at
/// most 2 pi / ((2k - 1) B^(2k - 2)); refinement continues until the step
/// resolves the phase rate of F along the curve (16 samples per period) and
/// two successive levels differ by less than tol.
KResult K(const FDevice& dev, const DecodingFamily& fam, const CutoffIntegral& cut, Natural j);

/// ceil(B^2) + 1: any j with B_j nonzero somewhere on [0, B] has nu(j) at
/// most this. Requires B >= 1.
Natural bound_beta_from_upper_limit(double upper_limit);

}  // namespace analoglab::richardson
