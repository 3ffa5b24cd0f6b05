#include "locklab/blend.hpp"

#include <algorithm>
#include <unordered_set>

#include "locklab/error.hpp"

namespace locklab {
namespace {

enum class Op : std::uint8_t { Input, Const0, Const1, Not, And, Or, Xor, Nand, Nor, Xnor };

struct Node {
  Op op;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

bool is_binary(Op op) { return op >= Op::And; }

// Two-input graph with structural hashing and light constant folding.
class Graph {
public:
  std::vector<Node> nodes;

  std::uint32_t input() { return push({Op::Input, 0, 0}); }

  std::uint32_t constant(bool v) { return lookup({v ? Op::Const1 : Op::Const0, 0, 0}); }

  // `simplify` folds NOT(NOT x) back to x; inserted double negations pass false.
  std::uint32_t negate(std::uint32_t x, bool simplify = true) {
    const Node& n = nodes[x];
    if (n.op == Op::Const0) return constant(true);
    if (n.op == Op::Const1) return constant(false);
    if (simplify && n.op == Op::Not) return n.a;
    return lookup({Op::Not, x, 0});
  }

  std::uint32_t binary(Op op, std::uint32_t a, std::uint32_t b) {
    switch (op) {
      case Op::Nand: return negate(binary(Op::And, a, b));
      case Op::Nor: return negate(binary(Op::Or, a, b));
      case Op::Xnor: return negate(binary(Op::Xor, a, b));
      default: break;
    }
    if (a > b) std::swap(a, b);
    if (a == b) return op == Op::Xor ? constant(false) : a;
    if (is_const(b)) std::swap(a, b);
    if (is_const(a)) {
      const bool one = nodes[a].op == Op::Const1;
      if (op == Op::And) return one ? b : a;
      if (op == Op::Or) return one ? a : b;
      return one ? negate(b) : b;
    }
    return lookup({op, a, b});
  }

  // Keeps NAND/NOR/XNOR as single nodes (no folding into AND+NOT).
  std::uint32_t binary_raw(Op op, std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    if (a == b || is_const(a) || is_const(b)) return binary(op, a, b);
    return lookup({op, a, b});
  }

  bool is_const(std::uint32_t x) const { return nodes[x].op == Op::Const0 || nodes[x].op == Op::Const1; }

private:
  std::unordered_map<std::uint64_t, std::uint32_t> hash_;

  std::uint32_t push(Node n) {
    nodes.push_back(n);
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }

  std::uint32_t lookup(Node n) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(n.op) << 58) | (static_cast<std::uint64_t>(n.a) << 29) | n.b;
    auto [it, inserted] = hash_.emplace(key, static_cast<std::uint32_t>(nodes.size()));
    if (inserted) nodes.push_back(n);
    return it->second;
  }
};

Op op_of(GateKind k) {
  switch (k) {
    case GateKind::And: return Op::And;
    case GateKind::Or: return Op::Or;
    case GateKind::Nand: return Op::Nand;
    case GateKind::Nor: return Op::Nor;
    case GateKind::Xor: return Op::Xor;
    case GateKind::Xnor: return Op::Xnor;
    default: return Op::Input;
  }
}

GateKind kind_of(Op op) {
  switch (op) {
    case Op::And: return GateKind::And;
    case Op::Or: return GateKind::Or;
    case Op::Nand: return GateKind::Nand;
    case Op::Nor: return GateKind::Nor;
    case Op::Xor: return GateKind::Xor;
    case Op::Xnor: return GateKind::Xnor;
    case Op::Not: return GateKind::Not;
    case Op::Const0: return GateKind::Const0;
    case Op::Const1: return GateKind::Const1;
    case Op::Input: break;
  }
  return GateKind::Buff;
}

Op base_op(Op op) {
  switch (op) {
    case Op::Nand: return Op::And;
    case Op::Nor: return Op::Or;
    case Op::Xnor: return Op::Xor;
    default: return op;
  }
}

struct Loaded {
  Graph graph;
  std::vector<std::uint32_t> signal_node;  // indexed by SignalId
  std::vector<std::uint32_t> outputs;
};

Loaded load(const Circuit& c) {
  Loaded l;
  l.signal_node.assign(c.num_signals(), 0);
  for (SignalId i = 0; i < c.num_inputs(); ++i) l.signal_node[i] = l.graph.input();
  for (SignalId s : c.topo()) {
    auto fis = c.fanins(s);
    const GateKind k = c.kind(s);
    std::uint32_t v = 0;
    switch (k) {
      case GateKind::Buff: v = l.signal_node[fis[0]]; break;
      case GateKind::Not: v = l.graph.negate(l.signal_node[fis[0]]); break;
      case GateKind::Const0: v = l.graph.constant(false); break;
      case GateKind::Const1: v = l.graph.constant(true); break;
      default: {
        const Op op = op_of(k);
        const Op chain = base_op(op);
        v = l.signal_node[fis[0]];
        for (std::size_t i = 1; i + 1 < fis.size(); ++i) v = l.graph.binary_raw(chain, v, l.signal_node[fis[i]]);
        v = l.graph.binary_raw(op, v, l.signal_node[fis.back()]);
      }
    }
    l.signal_node[s] = v;
  }
  for (SignalId po : c.output_ids()) l.outputs.push_back(l.signal_node[po]);
  return l;
}

// One rewriting pass: rebuilds `g` into a fresh graph, rewriting a random sample
// of nodes. Returns the old->new node map.
std::vector<std::uint32_t> rewrite_round(const Graph& g, Graph& out, Rng& rng) {
  std::vector<std::uint32_t> map(g.nodes.size(), 0);
  for (std::uint32_t id = 0; id < g.nodes.size(); ++id) {
    const Node& n = g.nodes[id];
    const bool pick = n.op != Op::Input && n.op != Op::Const0 && n.op != Op::Const1 && rng.chance(35, 100);
    std::uint32_t v = 0;
    switch (n.op) {
      case Op::Input: v = out.input(); break;
      case Op::Const0: v = out.constant(false); break;
      case Op::Const1: v = out.constant(true); break;
      case Op::Not:
        if (pick && g.nodes[n.a].op == Op::Not && rng.coin()) {
          map[id] = map[g.nodes[n.a].a];
          continue;
        }
        v = out.negate(map[n.a], false);
        break;
      default: {
        const std::uint32_t a = map[n.a];
        const std::uint32_t b = map[n.b];
        if (!pick || rng.chance(1, 3)) {
          v = out.binary_raw(n.op, a, b);
          break;
        }
        switch (n.op) {
          case Op::And: v = out.negate(out.binary(Op::Or, out.negate(a), out.negate(b))); break;
          case Op::Or: v = out.negate(out.binary(Op::And, out.negate(a), out.negate(b))); break;
          case Op::Nand: v = out.binary(Op::Or, out.negate(a), out.negate(b)); break;
          case Op::Nor: v = out.binary(Op::And, out.negate(a), out.negate(b)); break;
          case Op::Xor:
            if (rng.coin()) {
              v = out.binary(Op::Or, out.binary(Op::And, a, out.negate(b)), out.binary(Op::And, out.negate(a), b));
            } else {
              v = out.binary(Op::And, out.binary(Op::Or, a, b), out.binary_raw(Op::Nand, a, b));
            }
            break;
          case Op::Xnor:
            v = out.binary(Op::Or, out.binary(Op::And, a, b), out.binary(Op::And, out.negate(a), out.negate(b)));
            break;
          default: break;
        }
      }
    }
    if (pick && n.op != Op::Not && rng.chance(1, 4)) v = out.negate(out.negate(v, false), false);
    map[id] = v;
  }
  return map;
}

}  // namespace

BlendResult structural_blend(const Circuit& c, Rng& rng, unsigned rounds) {
  Loaded l = load(c);
  Graph graph = std::move(l.graph);
  std::vector<std::uint32_t> signal_node = std::move(l.signal_node);
  std::vector<std::uint32_t> outputs = std::move(l.outputs);
  for (unsigned r = 0; r < rounds; ++r) {
    Graph next;
    auto map = rewrite_round(graph, next, rng);
    for (auto& v : signal_node) v = map[v];
    for (auto& v : outputs) v = map[v];
    graph = std::move(next);
  }

  const auto& nodes = graph.nodes;
  const std::size_t total = nodes.size();
  std::vector<std::uint8_t> live(total, 0);
  std::vector<std::uint32_t> stack(outputs.begin(), outputs.end());
  while (!stack.empty()) {
    std::uint32_t v = stack.back();
    stack.pop_back();
    if (live[v]) continue;
    live[v] = 1;
    const Node& n = nodes[v];
    if (n.op == Op::Not) stack.push_back(n.a);
    if (is_binary(n.op)) {
      stack.push_back(n.a);
      stack.push_back(n.b);
    }
  }

  // Input nodes are 0..num_inputs-1 in every round.
  std::vector<std::string> name(total);
  std::unordered_set<std::string> taken;
  for (std::size_t i = 0; i < c.num_inputs(); ++i) {
    name[i] = c.inputs()[i];
    taken.insert(name[i]);
  }
  for (const auto& po : c.outputs()) taken.insert(po);

  std::vector<std::string> buffers_for;  // PO names needing a BUFF
  std::vector<std::uint32_t> buffer_src;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    const std::string& po = c.outputs()[j];
    const std::uint32_t v = outputs[j];
    if (name[v] == po) continue;
    if (name[v].empty()) {
      name[v] = po;
    } else {
      buffers_for.push_back(po);
      buffer_src.push_back(v);
    }
  }

  // Random topological order of the live gates.
  std::vector<std::uint32_t> pending(total, 0);
  std::vector<std::vector<std::uint32_t>> users(total);
  std::vector<std::uint32_t> ready;
  std::size_t gate_count = 0;
  for (std::uint32_t v = 0; v < total; ++v) {
    if (!live[v] || nodes[v].op == Op::Input) continue;
    ++gate_count;
    const Node& n = nodes[v];
    std::vector<std::uint32_t> fis;
    if (n.op == Op::Not) fis = {n.a};
    if (is_binary(n.op)) fis = {n.a, n.b};
    for (auto f : fis) {
      if (nodes[f].op == Op::Input) continue;
      ++pending[v];
      users[f].push_back(v);
    }
    if (pending[v] == 0) ready.push_back(v);
  }

  std::vector<std::string> fresh;
  {
    NameGen gen;
    std::size_t unnamed = 0;
    for (std::uint32_t v = 0; v < total; ++v) {
      if (live[v] && name[v].empty()) ++unnamed;
    }
    while (fresh.size() < unnamed) fresh.push_back(gen.next([&](const std::string& s) { return taken.count(s) > 0; }));
    rng.shuffle(fresh);
  }

  std::vector<Gate> gates;
  gates.reserve(gate_count + buffers_for.size());
  std::size_t next_fresh = 0;
  while (!ready.empty()) {
    const std::size_t pick = rng.below(ready.size());
    const std::uint32_t v = ready[pick];
    ready[pick] = ready.back();
    ready.pop_back();
    if (name[v].empty()) name[v] = fresh[next_fresh++];
    const Node& n = nodes[v];
    Gate g{name[v], kind_of(n.op), {}};
    if (n.op == Op::Not) g.fanins = {name[n.a]};
    if (is_binary(n.op)) g.fanins = {name[n.a], name[n.b]};
    gates.push_back(std::move(g));
    for (auto u : users[v]) {
      if (--pending[u] == 0) ready.push_back(u);
    }
  }
  if (gates.size() != gate_count) throw NetlistError("structural_blend: internal ordering failure");
  for (std::size_t i = 0; i < buffers_for.size(); ++i) {
    gates.push_back(Gate{buffers_for[i], GateKind::Buff, {name[buffer_src[i]]}});
  }

  BlendResult result{Circuit(c.inputs(), c.outputs(), std::move(gates)), {}};
  for (SignalId s = 0; s < c.num_signals(); ++s) {
    const std::uint32_t v = signal_node[s];
    if (live[v] || nodes[v].op == Op::Input) result.renamed[c.name(s)] = name[v];
  }
  return result;
}

}  // namespace locklab
