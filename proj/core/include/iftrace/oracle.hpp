#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "iftrace/ast.hpp"

namespace iftrace {

class OracleScopeExceeded : public std::runtime_error {
 public:
  explicit OracleScopeExceeded(const std::string& why);
};

// Exact influence set of `seed_signal` by exhaustive simulation: every
// non-input signal whose value differs between two input assignments that
// differ only in the seed's bits. Limited to combinational modules (no
// edge-triggered blocks, no instances) with at most 16 total input bits.
std::set<std::string> influence_oracle(const ModuleDecl& m, const std::string& seed_signal);

}  // namespace iftrace
