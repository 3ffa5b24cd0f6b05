#include <sstream>

#include "locklab/error.hpp"
#include "locklab/locking.hpp"

namespace locklab {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string write_keyfile(const KeyFile& kf) {
  if (kf.names.size() != kf.bits.width()) throw KeyFileError("key file has mismatched names and bits");
  std::ostringstream out;
  for (const auto& [k, v] : kf.metadata) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < kf.names.size(); ++i) out << kf.names[i] << '=' << (kf.bits[i] ? '1' : '0') << '\n';
  return out.str();
}

std::string write_keyfile(const LockedDesign& ld, const std::vector<std::pair<std::string, std::string>>& extra) {
  KeyFile kf;
  kf.names = ld.key_inputs;
  kf.bits = ld.secret_key;
  kf.metadata.emplace_back("technique", std::string(to_string(ld.technique.kind)));
  kf.metadata.emplace_back("n", std::to_string(ld.technique.n));
  kf.metadata.emplace_back("m", std::to_string(ld.technique.m));
  kf.metadata.insert(kf.metadata.end(), extra.begin(), extra.end());
  kf.metadata.emplace_back("keys", std::to_string(ld.key_inputs.size()));
  return write_keyfile(kf);
}

KeyFile read_keyfile(std::string_view text) {
  KeyFile kf;
  std::vector<bool> bits;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) kf.metadata.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    const auto eq = line.find('=');
    const std::string name = eq == std::string::npos ? std::string() : trim(line.substr(0, eq));
    const std::string value = eq == std::string::npos ? std::string() : trim(line.substr(eq + 1));
    if (name.empty() || (value != "0" && value != "1")) {
      throw KeyFileError("line " + std::to_string(line_no) + ": expected name=0|1, got '" + line + "'");
    }
    kf.names.push_back(name);
    bits.push_back(value == "1");
  }
  kf.bits = BitVector(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) kf.bits.set(i, bits[i]);
  for (const auto& [k, v] : kf.metadata) {
    if (k == "keys" && v != std::to_string(bits.size())) {
      throw KeyFileError("key file declares " + v + " keys but lists " + std::to_string(bits.size()));
    }
  }
  return kf;
}

void check_keyfile(const KeyFile& kf, const std::vector<std::string>& key_inputs) {
  if (kf.names.size() != key_inputs.size()) {
    throw KeyFileError("key file has " + std::to_string(kf.names.size()) + " bits, design has " +
                       std::to_string(key_inputs.size()) + " key inputs");
  }
  for (std::size_t i = 0; i < key_inputs.size(); ++i) {
    if (kf.names[i] != key_inputs[i]) {
      throw KeyFileError("key bit " + std::to_string(i) + " is '" + kf.names[i] + "', design expects '" +
                         key_inputs[i] + "'");
    }
  }
}

}  // namespace locklab
