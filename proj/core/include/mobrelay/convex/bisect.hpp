#pragma once

#include <functional>

namespace mobrelay {

struct BisectResult {
  double point = 0.0;
  bool crossed = false;  // false: no sign change, point is the endpoint with the smaller |f|
  int iterations = 0;
};

// Root of a monotone f on [lo, hi] to within tol in the argument.
BisectResult bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
                    int max_iters = 200);

struct IntBisectResult {
  long below = 0;  // last integer on the lo side of the sign change
  long above = 0;  // first integer on the hi side (== below when not crossed)
  bool crossed = false;
};

// Integer version: locates the adjacent pair across which a monotone f changes sign.
IntBisectResult bisect_int(const std::function<double(long)>& f, long lo, long hi);

}  // namespace mobrelay
