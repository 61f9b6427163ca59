#include "ddchain/blood_group.hpp"

#include <string>

#include "ddchain/errors.hpp"

namespace ddchain {

std::string_view to_string(BloodGroup g) {
  switch (g) {
    case BloodGroup::O:
      return "O";
    case BloodGroup::A:
      return "A";
    case BloodGroup::B:
      return "B";
    case BloodGroup::AB:
      return "AB";
  }
  return "?";
}

BloodGroup parse_blood_group(std::string_view text) {
  if (text == "O") return BloodGroup::O;
  if (text == "A") return BloodGroup::A;
  if (text == "B") return BloodGroup::B;
  if (text == "AB") return BloodGroup::AB;
  throw InputError("unknown blood group '" + std::string(text) + "'");
}

}  // namespace ddchain
