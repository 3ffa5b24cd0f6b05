#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "locklab/bitvector.hpp"
#include "locklab/rng.hpp"

namespace locklab {

enum class GateKind : std::uint8_t { And, Or, Nand, Nor, Xor, Xnor, Not, Buff, Const0, Const1 };

/// Upper-case bench keyword ("AND", "BUFF", ...). CONST0/CONST1 have no bench keyword
/// and print as "CONST0"/"CONST1".
std::string_view to_string(GateKind kind);

/// Case-insensitive bench keyword lookup; "BUF" is accepted as an alias of BUFF.
std::optional<GateKind> gate_kind_from_string(std::string_view keyword);

/// Allowed fanin count for `kind`: Not/Buff exactly 1, constants 0, everything else >= 2.
bool arity_ok(GateKind kind, std::size_t fanins);

struct Gate {
  std::string name;
  GateKind kind;
  std::vector<std::string> fanins;

  friend bool operator==(const Gate&, const Gate&) = default;
};

using SignalId = std::uint32_t;

/// Signal name -> value. When used as a circuit input it must cover every PI.
using Assignment = std::map<std::string, bool>;

/// Immutable combinational netlist.
///
/// Signals are numbered with primary inputs first (in declaration order) and gates
/// after them (in gate-list order). Construction validates names, arity, fanin
/// resolution and acyclicity, and throws NetlistError on any violation. Copies share
/// the underlying storage, so passing circuits by value is cheap and thread-safe.
class Circuit {
public:
  Circuit();
  Circuit(std::vector<std::string> inputs, std::vector<std::string> outputs, std::vector<Gate> gates);

  const std::vector<std::string>& inputs() const { return data_->inputs; }
  const std::vector<std::string>& outputs() const { return data_->outputs; }
  const std::vector<Gate>& gates() const { return data_->gates; }

  std::size_t num_inputs() const { return data_->inputs.size(); }
  std::size_t num_outputs() const { return data_->outputs.size(); }
  std::size_t num_gates() const { return data_->gates.size(); }
  std::size_t num_signals() const { return data_->names.size(); }

  bool has(std::string_view name) const { return find(name).has_value(); }
  std::optional<SignalId> find(std::string_view name) const;
  /// Like find() but throws NetlistError for unknown names.
  SignalId id(std::string_view name) const;
  const std::string& name(SignalId s) const { return data_->names[s]; }

  bool is_input(SignalId s) const { return s < data_->inputs.size(); }
  bool is_output(SignalId s) const { return data_->is_output[s] != 0; }
  /// Gate driving `s`. Precondition: !is_input(s).
  const Gate& gate(SignalId s) const { return data_->gates[s - data_->inputs.size()]; }
  GateKind kind(SignalId s) const { return data_->kinds[s]; }

  std::span<const SignalId> fanins(SignalId s) const;
  std::span<const SignalId> fanouts(SignalId s) const;
  std::span<const SignalId> output_ids() const { return data_->output_ids; }

  /// Gate signals in a topological order (fanins first).
  std::span<const SignalId> topo() const { return data_->topo; }

  /// Structural identity: same PI/PO order, gate list, names, kinds and fanin orders.
  friend bool operator==(const Circuit& a, const Circuit& b);

private:
  struct Data {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Gate> gates;
    std::vector<std::string> names;
    std::unordered_map<std::string, SignalId> index;
    std::vector<GateKind> kinds;
    std::vector<std::uint32_t> fanin_offset;
    std::vector<SignalId> fanin_ids;
    std::vector<std::uint32_t> fanout_offset;
    std::vector<SignalId> fanout_ids;
    std::vector<SignalId> output_ids;
    std::vector<std::uint8_t> is_output;
    std::vector<SignalId> topo;
  };
  std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------
// Bench I/O

Circuit parse_bench(std::string_view text);
Circuit read_bench_file(const std::string& path);

/// Bench text. Header comments become leading `#` lines. CONST0/CONST1 gates are
/// lowered to XOR(s, s) / XNOR(s, s) over the first primary input.
std::string write_bench(const Circuit& c, const std::vector<std::string>& header_comments = {});

// ---------------------------------------------------------------------------
// Evaluation

std::vector<std::string> topo_order(const Circuit& c);

Assignment simulate(const Circuit& c, const Assignment& input);

/// Positional form: `input` is in PI order, the result in PO order.
BitVector simulate(const Circuit& c, const BitVector& input);

std::vector<Assignment> simulate_batch(const Circuit& c, std::span<const Assignment> inputs);
std::vector<BitVector> simulate_batch(const Circuit& c, std::span<const BitVector> inputs);

/// 64 patterns per pass: `input_words[i]` holds the values of PI i, one pattern per
/// bit. Returns one word per signal (indexed by SignalId).
std::vector<std::uint64_t> simulate_words(const Circuit& c, std::span<const std::uint64_t> input_words);

/// Same, with `forced` signals pinned to a constant word before their consumers read them.
std::vector<std::uint64_t> simulate_words(const Circuit& c, std::span<const std::uint64_t> input_words,
                                          std::span<const std::pair<SignalId, std::uint64_t>> forced);

std::uint64_t eval_gate_word(GateKind kind, std::span<const std::uint64_t> fanin_words);

// ---------------------------------------------------------------------------
// Cone analysis

struct Cone {
  std::vector<std::string> gates;   ///< in circuit gate order
  std::vector<std::string> inputs;  ///< in circuit PI order
};

Cone fanin_cone(const Circuit& c, std::string_view node);

/// Number of primary inputs in the fanin cone of every signal (indexed by SignalId).
std::vector<std::size_t> cone_input_counts(const Circuit& c);

/// Per-signal PI membership sets as packed bitsets, `words_per_signal` words each.
struct ConeSets {
  std::size_t words_per_signal = 0;
  std::vector<std::uint64_t> bits;

  bool contains(SignalId s, std::size_t input_index) const {
    return (bits[s * words_per_signal + input_index / 64] >> (input_index % 64)) & 1;
  }
  std::size_t count(SignalId s) const;
};
ConeSets cone_input_sets(const Circuit& c);

/// Primary output whose cone holds at least `min_cone_pis` PIs, uniformly at random
/// among eligible POs. Throws InfeasibleError carrying the widest cone otherwise.
std::string select_target(const Circuit& c, std::size_t min_cone_pis, Rng& rng);

// ---------------------------------------------------------------------------
// Construction and rewriting

/// Deterministic generator of `g<seq>` names that skips names already taken.
class NameGen {
public:
  explicit NameGen(std::string prefix = "g") : prefix_(std::move(prefix)) {}
  template <typename Taken>
  std::string next(const Taken& taken) {
    for (;;) {
      std::string candidate = prefix_ + std::to_string(counter_++);
      if (!taken(candidate)) return candidate;
    }
  }

private:
  std::string prefix_;
  std::uint64_t counter_ = 0;
};

/// Mutable netlist used by the transforms. Names are the only identity; build()
/// validates and produces an immutable Circuit.
class CircuitBuilder {
public:
  CircuitBuilder() = default;
  explicit CircuitBuilder(const Circuit& c);

  bool has(std::string_view name) const;
  bool is_input(std::string_view name) const;
  bool is_output(std::string_view name) const;
  const Gate* gate(std::string_view name) const;

  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<Gate>& gates() const { return gates_; }

  void add_input(const std::string& name);
  void add_output(const std::string& name);

  /// Adds a gate; generates a `g<seq>` name when `name` is empty. Returns the name.
  std::string add_gate(GateKind kind, std::vector<std::string> fanins, std::string name = {});

  std::string fresh_name();

  /// Renames a gate output. References elsewhere are left untouched, so readers of
  /// the old name will resolve to whatever takes that name next.
  void rename_gate(const std::string& from, const std::string& to);

  /// Replaces `from` by `to` in the fanin list of gate `gate_name`.
  void replace_fanin(const std::string& gate_name, const std::string& from, const std::string& to);

  /// Every gate reading `from` (except `skip`) reads `to` instead.
  void rewire_consumers(const std::string& from, const std::string& to, const std::string& skip = {});

  /// Forces a gate to a constant (drops its fanins).
  void make_constant(const std::string& gate_name, bool value);

  /// True when `node` lies in the fanin cone of `signal` (or equals it).
  bool depends_on(const std::string& signal, const std::string& node) const;

  Circuit build() const;

private:
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<Gate> gates_;
  std::unordered_map<std::string, std::size_t> gate_index_;
  std::unordered_map<std::string, std::size_t> input_index_;
  NameGen names_;
};

/// Inserts `fresh = KIND(node, other)` (KIND is XOR unless `kind` says XNOR) and
/// moves every consumer of `node` onto it. When `node` is a primary output the
/// names are swapped instead, so the PO keeps its name: the old driver becomes
/// `fresh` and the new gate takes the PO name. Returns the name of the signal that
/// now carries the spliced value.
std::string splice_xor(CircuitBuilder& b, const std::string& node, const std::string& other,
                       const std::string& fresh, GateKind kind = GateKind::Xor);

Circuit splice_xor(const Circuit& c, const std::string& node, const std::string& other,
                   const std::string& fresh);

}  // namespace locklab
