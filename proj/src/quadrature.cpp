#include <analoglab/quadrature.hpp>

#include <analoglab/common.hpp>

#include <cmath>
#include <string>

namespace analoglab::quadrature {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int min_depth;
  int max_depth;
  long evaluations = 0;
  double error = 0.0;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= min_depth && std::fabs(delta) <= 15.0 * tol) {
      error += std::fabs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth || m <= a || m >= b)
      throw ToleranceNotMet("adaptive Simpson could not reach tolerance " + std::to_string(tol) +
                            " on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

AdaptiveSimpsonResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                       double tol, int min_depth, int max_depth) {
  if (!(tol > 0.0)) throw ToleranceNotMet("tolerance must be positive");
  if (a == b) return {};
  if (b < a) {
    auto r = adaptive_simpson(f, b, a, tol, min_depth, max_depth);
    r.value = -r.value;
    return r;
  }
  Simpson s{f, min_depth, max_depth};
  const double fa = s.eval(a);
  const double fb = s.eval(b);
  const double m = 0.5 * (a + b);
  const double fm = s.eval(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = s.recurse(a, b, fa, fm, fb, whole, tol, 0);
  return {v, s.error, s.evaluations};
}

}  // namespace analoglab::quadrature
