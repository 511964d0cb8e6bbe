#include "mobrelay/convex/bisect.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {
namespace {

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

BisectResult bisect(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iters) {
  if (lo > hi) throw DomainError(fmt::format("bisect: lo {} > hi {}", lo, hi));
  BisectResult out;
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, true, 0};
  if (fhi == 0.0) return {hi, true, 0};
  if (sign(flo) == sign(fhi)) {
    out.point = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    return out;
  }
  out.crossed = true;
  while (hi - lo > tol && out.iterations < max_iters) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    ++out.iterations;
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (sign(fm) == sign(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  out.point = 0.5 * (lo + hi);
  return out;
}

IntBisectResult bisect_int(const std::function<double(long)>& f, long lo, long hi) {
  if (lo > hi) throw DomainError(fmt::format("bisect_int: lo {} > hi {}", lo, hi));
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, lo, true};
  if (sign(flo) == sign(fhi)) {
    const long p = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    return {p, p, false};
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid, true};
    if (sign(fm) == sign(flo)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi, true};
}

}  // namespace mobrelay
