#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ddchain/blood_group.hpp"

namespace ddchain {

using NodeId = std::int64_t;

enum class Registry : std::uint8_t { P, PWL };

// The participant categories of the merged registry.
enum class Role : std::uint8_t {
  DD,   // deceased donor kidney
  P,    // incompatible pair, exchange registry only
  PWL,  // incompatible pair, also on the deceased-donor wait-list
  CN,   // compatible pair looking for a better-matched kidney
  WL,   // wait-list patient without a living donor
};

std::string_view to_string(Role r);
Role parse_role(std::string_view text);

struct Donor {
  int id = 0;  // local to the owning node
  BloodGroup blood_group = BloodGroup::O;

  friend bool operator==(const Donor&, const Donor&) = default;
};

struct DeceasedDonor {
  BloodGroup blood_group = BloodGroup::O;

  friend bool operator==(const DeceasedDonor&, const DeceasedDonor&) = default;
};

struct Pair {
  BloodGroup recipient = BloodGroup::O;
  std::vector<Donor> donors;
  Registry registry = Registry::P;
  int arrival_round = 0;

  friend bool operator==(const Pair&, const Pair&) = default;
};

struct CompatiblePair {
  BloodGroup recipient = BloodGroup::O;
  std::vector<Donor> donors;
  double self_weight = 1.0;
  int arrival_round = 0;

  friend bool operator==(const CompatiblePair&, const CompatiblePair&) = default;
};

struct WaitListPatient {
  BloodGroup recipient = BloodGroup::O;

  friend bool operator==(const WaitListPatient&, const WaitListPatient&) = default;
};

using NodeKind = std::variant<DeceasedDonor, Pair, CompatiblePair, WaitListPatient>;

struct Node {
  NodeId id = 0;
  NodeKind kind;

  static Node deceased(NodeId id, BloodGroup donor);
  static Node pair(NodeId id, BloodGroup recipient, BloodGroup donor,
                   Registry registry = Registry::P, int arrival_round = 0);
  static Node pair(NodeId id, BloodGroup recipient, std::vector<Donor> donors,
                   Registry registry = Registry::P, int arrival_round = 0);
  static Node compatible_pair(NodeId id, BloodGroup recipient, BloodGroup donor,
                              double self_weight, int arrival_round = 0);
  static Node wait_list(NodeId id, BloodGroup recipient);

  Role role() const;

  // Living donors, or the single deceased donor (id 0). Empty for WL.
  std::vector<Donor> donors() const;

  // Empty for DD nodes.
  std::optional<BloodGroup> recipient() const;

  std::optional<int> arrival_round() const;

  friend bool operator==(const Node&, const Node&) = default;
};

// Checks per-node invariants: pairs have donors, compatible pairs have a
// compatible donor, donor ids are unique within the node.
void validate_node(const Node& node);

}  // namespace ddchain
