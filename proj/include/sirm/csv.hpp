// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_CSV_HPP
#define SIRM_CSV_HPP

#include <string>

namespace sirm
{

// Shortest round-trip decimal form of a double, so repeated runs produce
// byte-identical files. NaN renders as an empty field.
std::string csv_number(double v);

}  // namespace sirm

#endif  // SIRM_CSV_HPP
