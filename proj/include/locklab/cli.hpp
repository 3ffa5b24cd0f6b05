#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "locklab/netlist.hpp"

namespace locklab::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,    ///< verify found a counterexample
  kUsage = 2,       ///< parse, I/O, interface or validation error
  kInfeasible = 3,  ///< lock request the circuit cannot satisfy
  kTimeout = 4,
  kNoSolution = 5,
};

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// --seed if given, else LOCKLAB_SEED, else kDefaultSeed. Throws Error on a
/// malformed environment value.
std::uint64_t effective_seed(const std::optional<std::uint64_t>& flag);

/// Key inputs of a locked circuit: PIs named keyinput<digits>, in PI order.
std::vector<std::string> detect_key_inputs(const Circuit& c);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace locklab::cli
