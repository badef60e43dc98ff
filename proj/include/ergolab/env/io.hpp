#pragma once

#include <iosfwd>
#include <string>

#include "ergolab/env/environment.hpp"

namespace ergolab::env {

// Plain-text environment format.
//
//   d L kappa model seed
//   # atoms N
//   id x1 .. xd n          (N lines)
//   # edges M
//   id_from id_to rate     (M lines, one per stored bond, rate = r_{from,to})
//
// Lines starting with '#' other than the two counters are comments. The
// reverse rate is derived from detailed balance and the displacement from the
// minimal image, so bonds of length exactly L/2 are read back with the
// negative orientation.
void write_environment(std::ostream& out, const Environment& env);
Environment read_environment(std::istream& in);

void save_environment(const std::string& path, const Environment& env);
Environment load_environment(const std::string& path);

}  // namespace ergolab::env
