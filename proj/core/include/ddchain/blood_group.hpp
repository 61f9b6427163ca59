#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace ddchain {

// Iteration order is fixed as O < A < B < AB.
enum class BloodGroup : std::uint8_t { O = 0, A = 1, B = 2, AB = 3 };

inline constexpr std::array<BloodGroup, 4> kBloodGroups = {
    BloodGroup::O, BloodGroup::A, BloodGroup::B, BloodGroup::AB};

inline constexpr std::size_t index_of(BloodGroup g) {
  return static_cast<std::size_t>(g);
}

// ABO rule: O gives to all, A to {A, AB}, B to {B, AB}, AB only to AB.
constexpr bool abo_compatible(BloodGroup donor, BloodGroup recipient) {
  switch (donor) {
    case BloodGroup::O:
      return true;
    case BloodGroup::A:
      return recipient == BloodGroup::A || recipient == BloodGroup::AB;
    case BloodGroup::B:
      return recipient == BloodGroup::B || recipient == BloodGroup::AB;
    case BloodGroup::AB:
      return recipient == BloodGroup::AB;
  }
  return false;
}

std::string_view to_string(BloodGroup g);

// Throws InputError on anything other than "O", "A", "B", "AB".
BloodGroup parse_blood_group(std::string_view text);

}  // namespace ddchain
