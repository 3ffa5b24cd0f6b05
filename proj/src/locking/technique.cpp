#include <algorithm>
#include <array>

#include "locklab/error.hpp"
#include "locklab/locking.hpp"

namespace locklab {

namespace {
constexpr std::array<std::pair<TechniqueKind, std::string_view>, 7> kNames = {{
    {TechniqueKind::Rll, "rll"},
    {TechniqueKind::AntiSat, "antisat"},
    {TechniqueKind::SarLock, "sarlock"},
    {TechniqueKind::TtLock, "ttlock"},
    {TechniqueKind::Cac, "cac"},
    {TechniqueKind::DoubleCac, "dcac"},
    {TechniqueKind::Cac2, "cac2"},
}};
}  // namespace

std::string_view to_string(TechniqueKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<TechniqueKind> technique_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (const auto& [k, n] : kNames) {
    if (n == lower) return k;
  }
  return std::nullopt;
}

std::size_t Technique::key_count() const {
  std::size_t k = 0;
  switch (kind) {
    case TechniqueKind::Rll:
    case TechniqueKind::SarLock:
    case TechniqueKind::TtLock:
    case TechniqueKind::Cac: k = n; break;
    case TechniqueKind::AntiSat: k = 2 * n; break;
    case TechniqueKind::DoubleCac: k = n + m; break;
    case TechniqueKind::Cac2: k = 2 * (n + m); break;
  }
  return k + rll_bits;
}

void Technique::validate() const {
  if (n < 1) throw Error("n must be at least 1");
  const bool two_locks = kind == TechniqueKind::DoubleCac || kind == TechniqueKind::Cac2;
  if (two_locks) {
    if (m < 1 || m > n) throw Error("m must satisfy 1 <= m <= n (got n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  } else if (m != 0) {
    throw Error("m applies only to dcac and cac2");
  }
  if (classic && kind != TechniqueKind::Cac && !two_locks) throw Error("classic mode applies only to CAC-based techniques");
}

}  // namespace locklab
