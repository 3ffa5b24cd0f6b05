#pragma once

#include <string>
#include <vector>

#include "locklab/netlist.hpp"

namespace locklab::detail {

// Positions of a locked circuit's inputs and outputs relative to a reference
// interface (an oracle or the original circuit).
struct KeyedInterface {
  std::vector<SignalId> data;         // non-key PIs, locked order
  std::vector<SignalId> keys;         // key PIs, key order
  std::vector<std::size_t> ref_in;    // data[i] is reference PI ref_in[i]
  std::vector<std::size_t> ref_out;   // locked PO j is reference PO ref_out[j]
};

// Throws InterfaceError when a key is unknown or repeated, or when the data PIs
// and POs do not match the reference by name.
KeyedInterface match_interface(const Circuit& locked, const std::vector<std::string>& key_names,
                               const std::vector<std::string>& ref_inputs, const std::vector<std::string>& ref_outputs);

// Only the key side; data PIs keep locked order and ref maps are identity.
KeyedInterface split_keys(const Circuit& locked, const std::vector<std::string>& key_names);

// Word of exhaustive-enumeration pattern bits for data input `i` in block `block`:
// pattern p = block * 64 + bit sets input i to bit i of p.
std::uint64_t enumeration_word(std::size_t i, std::uint64_t block);

}  // namespace locklab::detail
