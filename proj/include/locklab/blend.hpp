#pragma once

#include <string>
#include <unordered_map>

#include "locklab/netlist.hpp"
#include "locklab/rng.hpp"

namespace locklab {

struct BlendResult {
  Circuit circuit;
  /// Old signal name -> name of a signal with the same function in `circuit`.
  /// Signals that were swept away as dead logic are absent.
  std::unordered_map<std::string, std::string> renamed;
};

/// Dissolves module boundaries: decomposes into 2-input gates with structural
/// hashing, applies `rounds` passes of random local rewrites (De Morgan, XOR
/// expansion, double negation), drops dead logic and renames every internal
/// signal. PI and PO names and orders are kept.
BlendResult structural_blend(const Circuit& c, Rng& rng, unsigned rounds);

}  // namespace locklab
