#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlpath {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using ProtocolId = std::uint16_t;

// Protocol sets are bitmasks; the alphabet is capped accordingly.
inline constexpr std::size_t kMaxProtocols = 64;

enum class FunctionKind : std::uint8_t { Conversion = 0, Encapsulation = 1, Decapsulation = 2 };

// Conversion(a,b) is (a->b), passive when a == b.
// Encapsulation(a,b) is (a->ab): a is wrapped inside carrier b.
// Decapsulation(a,b) is the inverse of (a->ab): a is unwrapped from carrier b.
struct AdaptationFunction {
  FunctionKind kind = FunctionKind::Conversion;
  ProtocolId from = 0;
  ProtocolId to = 0;

  static constexpr AdaptationFunction conversion(ProtocolId a, ProtocolId b) {
    return {FunctionKind::Conversion, a, b};
  }
  static constexpr AdaptationFunction passive(ProtocolId a) { return conversion(a, a); }
  static constexpr AdaptationFunction encapsulation(ProtocolId a, ProtocolId b) {
    return {FunctionKind::Encapsulation, a, b};
  }
  static constexpr AdaptationFunction decapsulation(ProtocolId a, ProtocolId b) {
    return {FunctionKind::Decapsulation, a, b};
  }

  /// Protocol the node must receive to apply this function.
  constexpr ProtocolId input() const { return kind == FunctionKind::Decapsulation ? to : from; }
  /// Protocol the node sends after applying it.
  constexpr ProtocolId output() const { return kind == FunctionKind::Decapsulation ? from : to; }

  constexpr auto operator<=>(const AdaptationFunction&) const = default;
};

/// Dense code of a function over an alphabet of at most kMaxProtocols symbols.
constexpr std::uint32_t function_code(const AdaptationFunction& f) {
  return (static_cast<std::uint32_t>(f.kind) * kMaxProtocols + f.from) * kMaxProtocols + f.to;
}

inline std::string_view kind_name(FunctionKind k) {
  switch (k) {
    case FunctionKind::Conversion: return "conv";
    case FunctionKind::Encapsulation: return "encap";
    case FunctionKind::Decapsulation: return "decap";
  }
  return "?";
}

inline FunctionKind parse_kind(std::string_view s) {
  if (s == "conv") return FunctionKind::Conversion;
  if (s == "encap") return FunctionKind::Encapsulation;
  if (s == "decap") return FunctionKind::Decapsulation;
  throw std::invalid_argument("unknown function kind '" + std::string(s) + "'");
}

enum class SymbolTag : std::uint8_t { Plain = 0, Push = 1, Pop = 2 };

/// One letter of a trace: a (Plain), a-bar (Push) or a-underbar (Pop).
struct TaggedProtocol {
  ProtocolId protocol = 0;
  SymbolTag tag = SymbolTag::Plain;

  static constexpr TaggedProtocol plain(ProtocolId a) { return {a, SymbolTag::Plain}; }
  static constexpr TaggedProtocol push(ProtocolId a) { return {a, SymbolTag::Push}; }
  static constexpr TaggedProtocol pop(ProtocolId a) { return {a, SymbolTag::Pop}; }

  constexpr auto operator<=>(const TaggedProtocol&) const = default;
};

using Trace = std::vector<TaggedProtocol>;

/// Bitmask set of protocol ids.
class ProtocolSet {
 public:
  constexpr ProtocolSet() = default;
  constexpr explicit ProtocolSet(std::uint64_t bits) : bits_(bits) {}

  constexpr void insert(ProtocolId p) { bits_ |= std::uint64_t{1} << p; }
  constexpr bool contains(ProtocolId p) const { return (bits_ >> p) & 1U; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr std::uint64_t bits() const { return bits_; }

  std::vector<ProtocolId> to_vector() const {
    std::vector<ProtocolId> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(static_cast<ProtocolId>(std::countr_zero(b)));
    }
    return out;
  }

  constexpr bool operator==(const ProtocolSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

}  // namespace mlpath
