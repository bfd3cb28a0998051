#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace entangle::qkd {

// One bit per element, values 0 or 1.
using BitString = std::vector<std::uint8_t>;

enum class Basis : std::uint8_t { key, check };

enum class SecurityVerdict : std::uint8_t { secure, insecure, inconclusive };

constexpr std::string_view to_string(SecurityVerdict v) {
  switch (v) {
    case SecurityVerdict::secure: return "SECURE";
    case SecurityVerdict::insecure: return "INSECURE";
    case SecurityVerdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

}  // namespace entangle::qkd
