// SPDX-License-Identifier: Apache-2.0

#include "sirm/csv.hpp"

#include <cmath>
#include <cstdio>

namespace sirm
{

std::string csv_number(double v)
{
  if (std::isnan(v))
    return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    // Try shorter forms that still round-trip.
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      std::sscanf(shorter, "%lf", &back);
      if (back == v)
        return shorter;
    }
  }
  return buf;
}

}  // namespace sirm
