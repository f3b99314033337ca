#include "qrabi/quadrature.hpp"

#include <cmath>
#include <map>

#include "qrabi/error.hpp"

namespace qrabi {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  std::map<double, double> cache;
  std::vector<SimpsonPanel> panels;
  double error = 0.0;

  double eval(double x) {
    if (auto it = cache.find(x); it != cache.end()) return it->second;
    const double v = f(x);
    if (!std::isfinite(v)) throw Error("integrand is not finite");
    cache.emplace(x, v);
    return v;
  }

  static double rule(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = rule(a, m, fa, flm, fm);
    const double right = rule(m, b, fm, frm, fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
      if (depth <= 0 && std::abs(diff) > 15.0 * tol) {
        throw Error("adaptive Simpson reached its depth limit");
      }
      panels.push_back({a, m, fa, flm, fm});
      panels.push_back({m, b, fm, frm, fb});
      error += std::abs(diff) / 15.0;
      return left + right + diff / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, int max_depth) {
  if (!(b > a)) throw ConfigError("integration interval must have b > a");
  if (!(rel_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  Simpson s{f, {}, {}, 0.0};
  const double fa = s.eval(a);
  const double fb = s.eval(b);
  const double fm = s.eval(0.5 * (a + b));
  const double whole = Simpson::rule(a, b, fa, fm, fb);
  // a coarse magnitude turns the relative target into an absolute one
  const double scale = std::abs(whole) > 0.0 ? std::abs(whole) : 1.0;

  QuadratureResult out;
  out.value = s.recurse(a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
  out.error_estimate = s.error;
  out.evaluations = s.cache.size();
  out.panels = std::move(s.panels);
  return out;
}

double simpson_on_panels(const std::vector<SimpsonPanel>& panels,
                         const std::function<double(double)>& f) {
  double acc = 0.0;
  for (const auto& p : panels) {
    const double m = 0.5 * (p.a + p.b);
    acc += (p.b - p.a) / 6.0 * (f(p.a) + 4.0 * f(m) + f(p.b));
  }
  return acc;
}

}  // namespace qrabi
