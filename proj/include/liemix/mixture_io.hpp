#pragma once

#include <iosfwd>

#include "liemix/cgd.hpp"

namespace liemix {

/**
 * Plain-text mixture format:
 *
 *     format_version 1
 *     group <name>
 *     components <N>
 *     component <weight>
 *     mean <n*n numbers, row-major>
 *     cov <p*p numbers, row-major>
 *     ...
 *
 * `n` is the matrix dimension and `p` the tangent dimension of the group.
 * Numbers are written with 17 significant digits, so reading back a written
 * mixture is lossless; blank lines and lines starting with '#' are ignored.
 */
void write_mixture(std::ostream& os, const Mixture& m);
Mixture read_mixture(std::istream& is);

}  // namespace liemix
