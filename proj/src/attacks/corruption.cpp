#include "interface.hpp"
#include "locklab/attacks.hpp"
#include "locklab/error.hpp"

namespace locklab {
namespace {

// Patterns among the 64 of `data_words` (masked) on which some PO differs.
std::uint64_t count_block(const Circuit& locked, const Circuit& original, const detail::KeyedInterface& io,
                          std::vector<std::uint64_t>& locked_in, std::vector<std::uint64_t>& ref_in,
                          std::uint64_t mask) {
  const auto got = simulate_words(locked, locked_in);
  const auto want = simulate_words(original, ref_in);
  std::uint64_t diff = 0;
  for (std::size_t j = 0; j < locked.num_outputs(); ++j) {
    diff |= got[locked.output_ids()[j]] ^ want[original.output_ids()[io.ref_out[j]]];
  }
  return static_cast<std::uint64_t>(__builtin_popcountll(diff & mask));
}

detail::KeyedInterface prepare(const Circuit& locked, const std::vector<std::string>& key_names, const BitVector& key,
                               const Circuit& original, std::vector<std::uint64_t>& locked_in) {
  auto io = detail::match_interface(locked, key_names, original.inputs(), original.outputs());
  if (key.width() != io.keys.size()) {
    throw InterfaceError("key has " + std::to_string(key.width()) + " bits for " + std::to_string(io.keys.size()) +
                         " key inputs");
  }
  locked_in.assign(locked.num_inputs(), 0);
  for (std::size_t i = 0; i < io.keys.size(); ++i) locked_in[io.keys[i]] = key[i] ? ~0ull : 0;
  return io;
}

}  // namespace

CorruptionStats corruption_exhaustive(const Circuit& locked, const std::vector<std::string>& key_names,
                                      const BitVector& key, const Circuit& original) {
  std::vector<std::uint64_t> locked_in;
  const auto io = prepare(locked, key_names, key, original, locked_in);
  if (io.data.size() > 20) {
    throw SizeGuardError("exhaustive corruption limited to 20 data inputs, got " + std::to_string(io.data.size()));
  }
  std::vector<std::uint64_t> ref_in(original.num_inputs());
  const std::uint64_t patterns = 1ull << io.data.size();
  const std::uint64_t blocks = (patterns + 63) / 64;
  CorruptionStats s;
  s.exhaustive = true;
  s.total = patterns;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < io.data.size(); ++i) {
      locked_in[io.data[i]] = ref_in[io.ref_in[i]] = detail::enumeration_word(i, b);
    }
    const std::uint64_t mask = patterns >= 64 ? ~0ull : (1ull << patterns) - 1;
    s.differing += count_block(locked, original, io, locked_in, ref_in, mask);
  }
  return s;
}

CorruptionStats corruption_sampled(const Circuit& locked, const std::vector<std::string>& key_names,
                                   const BitVector& key, const Circuit& original, std::uint64_t count, Rng& rng) {
  std::vector<std::uint64_t> locked_in;
  const auto io = prepare(locked, key_names, key, original, locked_in);
  std::vector<std::uint64_t> ref_in(original.num_inputs());
  CorruptionStats s;
  s.total = count;
  for (std::uint64_t done = 0; done < count; done += 64) {
    for (std::size_t i = 0; i < io.data.size(); ++i) locked_in[io.data[i]] = ref_in[io.ref_in[i]] = rng.next();
    const std::uint64_t left = count - done;
    const std::uint64_t mask = left >= 64 ? ~0ull : (1ull << left) - 1;
    s.differing += count_block(locked, original, io, locked_in, ref_in, mask);
  }
  return s;
}

}  // namespace locklab
