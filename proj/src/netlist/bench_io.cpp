#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "locklab/error.hpp"
#include "locklab/netlist.hpp"

namespace locklab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\f\v");
  return s.substr(first, last - first + 1);
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (ch == '(' || ch == ')' || ch == ',' || ch == '=' || ch == '#' || ch == ' ' || ch == '\t') return false;
  }
  return true;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

// "KEYWORD(arg, arg, ...)" -> keyword and argument list.
bool split_call(std::string_view text, std::string_view& keyword, std::vector<std::string_view>& args) {
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') return false;
  keyword = trim(text.substr(0, open));
  std::string_view inner = trim(text.substr(open + 1, text.size() - open - 2));
  args.clear();
  if (inner.empty()) return true;
  std::size_t start = 0;
  for (;;) {
    const auto comma = inner.find(',', start);
    args.push_back(trim(inner.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return true;
}

}  // namespace

Circuit parse_bench(std::string_view text) {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Gate> gates;
  std::unordered_map<std::string, std::size_t> defined_at;
  std::vector<std::pair<std::string, std::size_t>> output_lines;
  std::vector<std::size_t> gate_lines;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    std::string_view keyword;
    std::vector<std::string_view> args;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      if (!split_call(line, keyword, args) || args.size() != 1 || !valid_identifier(args[0])) {
        throw ParseError(line_no, "expected INPUT(name), OUTPUT(name) or name = GATE(...)");
      }
      std::string name(args[0]);
      if (iequals(keyword, "INPUT")) {
        if (!defined_at.emplace(name, line_no).second) {
          throw ParseError(line_no, "duplicate signal definition: " + name);
        }
        inputs.push_back(std::move(name));
      } else if (iequals(keyword, "OUTPUT")) {
        output_lines.emplace_back(name, line_no);
        outputs.push_back(std::move(name));
      } else {
        throw ParseError(line_no, "unknown declaration '" + std::string(keyword) + "'");
      }
      continue;
    }

    std::string_view lhs = trim(line.substr(0, eq));
    std::string_view rhs = trim(line.substr(eq + 1));
    if (!valid_identifier(lhs)) throw ParseError(line_no, "invalid signal name '" + std::string(lhs) + "'");
    if (!split_call(rhs, keyword, args)) throw ParseError(line_no, "expected GATE(fanins) after '='");
    auto kind = gate_kind_from_string(keyword);
    if (!kind) throw ParseError(line_no, "unsupported gate keyword '" + std::string(keyword) + "'");
    Gate g{std::string(lhs), *kind, {}};
    for (auto a : args) {
      if (!valid_identifier(a)) throw ParseError(line_no, "invalid fanin name '" + std::string(a) + "'");
      g.fanins.emplace_back(a);
    }
    if (!arity_ok(g.kind, g.fanins.size())) {
      throw ParseError(line_no, std::string(to_string(g.kind)) + " cannot take " + std::to_string(g.fanins.size()) +
                                    " fanins");
    }
    if (!defined_at.emplace(g.name, line_no).second) {
      throw ParseError(line_no, "duplicate signal definition: " + g.name);
    }
    gates.push_back(std::move(g));
    gate_lines.push_back(line_no);
  }

  for (std::size_t i = 0; i < gates.size(); ++i) {
    for (const auto& f : gates[i].fanins) {
      if (!defined_at.count(f)) throw ParseError(gate_lines[i], "undefined fanin " + f + " of gate " + gates[i].name);
    }
  }
  for (const auto& [name, line] : output_lines) {
    if (!defined_at.count(name)) throw ParseError(line, "undefined primary output " + name);
  }
  return Circuit(std::move(inputs), std::move(outputs), std::move(gates));
}

Circuit read_bench_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bench(ss.str());
}

std::string write_bench(const Circuit& c, const std::vector<std::string>& header_comments) {
  std::string out;
  for (const auto& h : header_comments) {
    out += "# ";
    out += h;
    out += '\n';
  }
  for (const auto& pi : c.inputs()) out += "INPUT(" + pi + ")\n";
  for (const auto& po : c.outputs()) out += "OUTPUT(" + po + ")\n";
  for (const auto& g : c.gates()) {
    out += g.name;
    out += " = ";
    if ((g.kind == GateKind::Const0 || g.kind == GateKind::Const1) && c.num_inputs() > 0) {
      const std::string& s = c.inputs().front();
      out += g.kind == GateKind::Const0 ? "XOR(" : "XNOR(";
      out += s + ", " + s + ")\n";
      continue;
    }
    out += to_string(g.kind);
    out += '(';
    for (std::size_t i = 0; i < g.fanins.size(); ++i) {
      if (i) out += ", ";
      out += g.fanins[i];
    }
    out += ")\n";
  }
  return out;
}

}  // namespace locklab
