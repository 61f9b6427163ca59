#include "ddchain/node.hpp"

#include <algorithm>
#include <string>

#include "ddchain/errors.hpp"

namespace ddchain {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::DD:
      return "DD";
    case Role::P:
      return "P";
    case Role::PWL:
      return "PWL";
    case Role::CN:
      return "CN";
    case Role::WL:
      return "WL";
  }
  return "?";
}

Role parse_role(std::string_view text) {
  if (text == "DD") return Role::DD;
  if (text == "P") return Role::P;
  if (text == "PWL") return Role::PWL;
  if (text == "CN") return Role::CN;
  if (text == "WL") return Role::WL;
  throw InputError("unknown node kind '" + std::string(text) + "'");
}

Node Node::deceased(NodeId id, BloodGroup donor) { return Node{id, DeceasedDonor{donor}}; }

Node Node::pair(NodeId id, BloodGroup recipient, BloodGroup donor, Registry registry,
                int arrival_round) {
  return pair(id, recipient, std::vector<Donor>{Donor{0, donor}}, registry, arrival_round);
}

Node Node::pair(NodeId id, BloodGroup recipient, std::vector<Donor> donors, Registry registry,
                int arrival_round) {
  return Node{id, Pair{recipient, std::move(donors), registry, arrival_round}};
}

Node Node::compatible_pair(NodeId id, BloodGroup recipient, BloodGroup donor, double self_weight,
                           int arrival_round) {
  return Node{id, CompatiblePair{recipient, {Donor{0, donor}}, self_weight, arrival_round}};
}

Node Node::wait_list(NodeId id, BloodGroup recipient) { return Node{id, WaitListPatient{recipient}}; }

Role Node::role() const {
  return std::visit(Overloaded{
                        [](const DeceasedDonor&) { return Role::DD; },
                        [](const Pair& p) { return p.registry == Registry::PWL ? Role::PWL : Role::P; },
                        [](const CompatiblePair&) { return Role::CN; },
                        [](const WaitListPatient&) { return Role::WL; },
                    },
                    kind);
}

std::vector<Donor> Node::donors() const {
  return std::visit(Overloaded{
                        [](const DeceasedDonor& d) { return std::vector<Donor>{Donor{0, d.blood_group}}; },
                        [](const Pair& p) { return p.donors; },
                        [](const CompatiblePair& c) { return c.donors; },
                        [](const WaitListPatient&) { return std::vector<Donor>{}; },
                    },
                    kind);
}

std::optional<BloodGroup> Node::recipient() const {
  return std::visit(Overloaded{
                        [](const DeceasedDonor&) -> std::optional<BloodGroup> { return std::nullopt; },
                        [](const Pair& p) -> std::optional<BloodGroup> { return p.recipient; },
                        [](const CompatiblePair& c) -> std::optional<BloodGroup> { return c.recipient; },
                        [](const WaitListPatient& w) -> std::optional<BloodGroup> { return w.recipient; },
                    },
                    kind);
}

std::optional<int> Node::arrival_round() const {
  if (const auto* p = std::get_if<Pair>(&kind)) return p->arrival_round;
  if (const auto* c = std::get_if<CompatiblePair>(&kind)) return c->arrival_round;
  return std::nullopt;
}

void validate_node(const Node& node) {
  const std::string where = "node " + std::to_string(node.id) + ": ";
  auto check_donors = [&](const std::vector<Donor>& donors) {
    if (donors.empty()) throw InputError(where + "pair without donors");
    for (std::size_t i = 0; i < donors.size(); ++i)
      for (std::size_t j = i + 1; j < donors.size(); ++j)
        if (donors[i].id == donors[j].id) throw InputError(where + "duplicate donor id");
  };
  if (const auto* p = std::get_if<Pair>(&node.kind)) {
    check_donors(p->donors);
  } else if (const auto* c = std::get_if<CompatiblePair>(&node.kind)) {
    check_donors(c->donors);
    const bool any = std::any_of(c->donors.begin(), c->donors.end(), [&](const Donor& d) {
      return abo_compatible(d.blood_group, c->recipient);
    });
    if (!any) throw InputError(where + "compatible pair without an ABO-compatible donor");
    if (!(c->self_weight >= 0.0)) throw InputError(where + "negative self weight");
  }
}

}  // namespace ddchain
