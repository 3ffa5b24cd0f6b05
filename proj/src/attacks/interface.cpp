#include "interface.hpp"

#include <unordered_map>
#include <unordered_set>

#include "locklab/error.hpp"

namespace locklab::detail {

KeyedInterface split_keys(const Circuit& locked, const std::vector<std::string>& key_names) {
  KeyedInterface io;
  std::unordered_set<std::string> seen;
  for (const auto& k : key_names) {
    const auto id = locked.find(k);
    if (!id || !locked.is_input(*id)) throw InterfaceError("key " + k + " is not a primary input");
    if (!seen.insert(k).second) throw InterfaceError("key " + k + " listed twice");
    io.keys.push_back(*id);
  }
  for (SignalId i = 0; i < locked.num_inputs(); ++i) {
    if (!seen.count(locked.name(i))) io.data.push_back(i);
  }
  for (std::size_t i = 0; i < io.data.size(); ++i) io.ref_in.push_back(i);
  for (std::size_t j = 0; j < locked.num_outputs(); ++j) io.ref_out.push_back(j);
  return io;
}

KeyedInterface match_interface(const Circuit& locked, const std::vector<std::string>& key_names,
                               const std::vector<std::string>& ref_inputs, const std::vector<std::string>& ref_outputs) {
  KeyedInterface io = split_keys(locked, key_names);
  if (io.data.size() != ref_inputs.size()) {
    throw InterfaceError("locked circuit has " + std::to_string(io.data.size()) + " data inputs, reference has " +
                         std::to_string(ref_inputs.size()));
  }
  if (locked.num_outputs() != ref_outputs.size()) {
    throw InterfaceError("locked circuit has " + std::to_string(locked.num_outputs()) + " outputs, reference has " +
                         std::to_string(ref_outputs.size()));
  }
  std::unordered_map<std::string, std::size_t> in_pos, out_pos;
  for (std::size_t i = 0; i < ref_inputs.size(); ++i) in_pos[ref_inputs[i]] = i;
  for (std::size_t j = 0; j < ref_outputs.size(); ++j) out_pos[ref_outputs[j]] = j;
  for (std::size_t i = 0; i < io.data.size(); ++i) {
    auto it = in_pos.find(locked.name(io.data[i]));
    if (it == in_pos.end()) throw InterfaceError("input " + locked.name(io.data[i]) + " is unknown to the reference");
    io.ref_in[i] = it->second;
  }
  for (std::size_t j = 0; j < locked.num_outputs(); ++j) {
    auto it = out_pos.find(locked.outputs()[j]);
    if (it == out_pos.end()) throw InterfaceError("output " + locked.outputs()[j] + " is unknown to the reference");
    io.ref_out[j] = it->second;
  }
  return io;
}

std::uint64_t enumeration_word(std::size_t i, std::uint64_t block) {
  static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                                            0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  if (i < 6) return kLow[i];
  return ((block >> (i - 6)) & 1) ? ~0ull : 0;
}

}  // namespace locklab::detail
