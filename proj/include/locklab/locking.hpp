#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "locklab/bitvector.hpp"
#include "locklab/netlist.hpp"
#include "locklab/rng.hpp"

namespace locklab {

enum class TechniqueKind { Rll, AntiSat, SarLock, TtLock, Cac, DoubleCac, Cac2 };

std::string_view to_string(TechniqueKind kind);
/// Accepts the CLI spellings: rll, antisat, sarlock, ttlock, cac, dcac, cac2.
std::optional<TechniqueKind> technique_from_string(std::string_view name);

struct Technique {
  TechniqueKind kind = TechniqueKind::Cac;
  std::size_t n = 0;  ///< protected bits (RLL: key bits)
  std::size_t m = 0;  ///< second-lock bits, Double CAC / CAC2 only
  bool classic = false;  ///< CAC restore without the hardwired disjunct
  std::size_t rll_bits = 0;  ///< extra RLL key gates layered on top

  /// Key-schedule arithmetic, independent of any circuit.
  std::size_t key_count() const;
  /// Throws Error when the parameters are out of range for the kind.
  void validate() const;
};

struct LockMeta {
  std::vector<std::string> protected_pis;    ///< first lock (PPI1)
  std::vector<std::string> protected_pis_2;  ///< second lock (PPI2)
  std::vector<std::string> decoys_1;
  std::vector<std::string> decoys_2;
  std::vector<std::string> obf_keys;         ///< OK1 then OK2
  std::vector<std::string> keys_1;           ///< K1 (or KA for Anti-SAT)
  std::vector<std::string> keys_2;           ///< K2 (or KB for Anti-SAT)
  std::string target_po;
  std::string target_node_2;   ///< internal node guarded by the second lock
  std::string locked_node_2;   ///< signal carrying the second lock's restored value
  std::string flip_signal;     ///< single-flip techniques: the spliced flip
  std::string restore_1;       ///< restore condition of the first lock
  std::string restore_2;
  BitVector pattern_1;         ///< protected pattern (SK / SK1)
  BitVector pattern_2;         ///< SK2
  std::size_t relock_attempts = 0;
  bool blended = false;
  /// Per protected bit, the gates of the restore comparators that read the PPI.
  /// Only meaningful before blending.
  std::vector<std::vector<std::string>> restore_taps_1;
  std::vector<std::vector<std::string>> restore_taps_2;
};

struct LockedDesign {
  Circuit circuit;
  std::vector<std::string> key_inputs;
  BitVector secret_key;
  Technique technique;
  LockMeta meta;
};

struct LockOptions {
  bool blend = true;
  unsigned blend_rounds = 2;
  bool classic_cac = false;
};

struct Comparator {
  std::string output;
  /// taps[i]: gates of the comparator that read signals[i].
  std::vector<std::vector<std::string>> taps;
};

/// Equality test of `signals` against a constant: AND tree over literals.
Comparator build_comparator(CircuitBuilder& b, const std::vector<std::string>& signals, const BitVector& pattern);
/// Equality test of `signals` against key inputs: AND tree over XNOR(signal, key).
Comparator build_comparator(CircuitBuilder& b, const std::vector<std::string>& signals,
                            const std::vector<std::string>& keys);
std::pair<Circuit, std::string> build_comparator(const Circuit& c, const std::vector<std::string>& signals,
                                                 const BitVector& pattern);
std::pair<Circuit, std::string> build_comparator(const Circuit& c, const std::vector<std::string>& signals,
                                                 const std::vector<std::string>& keys);

LockedDesign lock_rll(const Circuit& c, std::size_t bits, Rng& rng, const LockOptions& opt = {});
LockedDesign lock_antisat(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt = {});
LockedDesign lock_sarlock(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt = {});
LockedDesign lock_ttlock(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt = {});
/// CAC at `target` (default: a PO picked by select_target).
LockedDesign lock_cac(const Circuit& c, std::size_t n, Rng& rng, const LockOptions& opt = {},
                      const std::optional<std::string>& target = std::nullopt);
LockedDesign lock_double_cac(const Circuit& c, std::size_t n, std::size_t m, Rng& rng, const LockOptions& opt = {});
/// Routes the restore comparators of lock `which` (1 or 2) through key-selected
/// multiplexers between each protected input and a decoy. Needs an unblended design.
LockedDesign obfuscate_ppi(const LockedDesign& ld, const Circuit& original, int which, Rng& rng,
                           const LockOptions& opt = {});
LockedDesign lock_cac2(const Circuit& c, std::size_t n, std::size_t m, Rng& rng, const LockOptions& opt = {});

/// Dispatch on `t.kind`, then layer `t.rll_bits` RLL gates, then blend once.
LockedDesign lock(const Circuit& c, const Technique& t, Rng& rng, const LockOptions& opt = {});

/// Largest n the circuit supports for `kind` (0 if none).
std::size_t max_feasible_n(const Circuit& c, TechniqueKind kind);

/// Blend (if requested) and remap the meta signal names.
void finalize_design(LockedDesign& ld, Rng& rng, const LockOptions& opt);

/// Locked circuit with its key inputs tied to constants, keeping every other PI.
Circuit apply_key(const LockedDesign& ld, const BitVector& key);

// ---------------------------------------------------------------------------
// Key files

struct KeyFile {
  std::vector<std::string> names;
  BitVector bits;
  /// `# key=value` metadata lines, in file order.
  std::vector<std::pair<std::string, std::string>> metadata;
};

std::string write_keyfile(const LockedDesign& ld, const std::vector<std::pair<std::string, std::string>>& extra = {});
std::string write_keyfile(const KeyFile& kf);
KeyFile read_keyfile(std::string_view text);
/// Throws KeyFileError unless the names equal `ld.key_inputs` in order.
void check_keyfile(const KeyFile& kf, const std::vector<std::string>& key_inputs);

}  // namespace locklab
