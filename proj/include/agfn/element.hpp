//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_ELEMENT_HPP_
#define AGFN_ELEMENT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace agfn {

// Heavy-atom vocabulary. Order is fixed: it is the row order of every element
// embedding table and of every serialized element list.
enum class Element : std::uint8_t { C, S, P, N, O, F, Cl, Br, I };

inline constexpr int kNumElements = 9;

inline constexpr double kHydrogenMass = 1.008;

struct ElementData {
  std::string_view symbol;
  std::array<int, 3> valences;  // ascending, padded with 0
  int num_valences;
  double mass;
  int atomic_number;

  constexpr std::span<const int> allowed_valences() const {
    return {valences.data(), static_cast<std::size_t>(num_valences)};
  }
  constexpr int min_valence() const { return valences[0]; }
  constexpr int max_valence() const { return valences[num_valences - 1]; }
};

namespace internal {
// IUPAC 2007 standard atomic weights rounded to three decimals.
inline constexpr std::array<ElementData, kNumElements> kElementTable = {{
    {"C", {4, 0, 0}, 1, 12.011, 6},
    {"S", {2, 4, 6}, 3, 32.065, 16},
    {"P", {3, 5, 0}, 2, 30.974, 15},
    {"N", {3, 0, 0}, 1, 14.007, 7},
    {"O", {2, 0, 0}, 1, 15.999, 8},
    {"F", {1, 0, 0}, 1, 18.998, 9},
    {"Cl", {1, 0, 0}, 1, 35.453, 17},
    {"Br", {1, 0, 0}, 1, 79.904, 35},
    {"I", {1, 0, 0}, 1, 126.904, 53},
}};
}  // namespace internal

constexpr const ElementData &element_data(Element e) {
  return internal::kElementTable[static_cast<std::size_t>(e)];
}

constexpr int element_index(Element e) { return static_cast<int>(e); }

constexpr Element element_from_index(int i) { return static_cast<Element>(i); }

constexpr std::string_view symbol(Element e) { return element_data(e).symbol; }

inline std::optional<Element> element_from_symbol(std::string_view sym) {
  for (int i = 0; i < kNumElements; ++i) {
    if (internal::kElementTable[i].symbol == sym)
      return element_from_index(i);
  }
  return std::nullopt;
}

constexpr bool is_halogen(Element e) {
  return e == Element::F || e == Element::Cl || e == Element::Br
         || e == Element::I;
}

}  // namespace agfn

#endif  // AGFN_ELEMENT_HPP_
