#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ddchain/graph.hpp"
#include "ddchain/scenario.hpp"

namespace ddchain {

enum class Policy : std::uint8_t { CP, DDIC };

inline constexpr std::array<Policy, 2> kPolicies = {Policy::CP, Policy::DDIC};

std::string_view to_string(Policy p);

// Pair ids count up from 1 in arrival order; deceased donor ids live in a
// separate range so pair ids do not depend on DD arrivals.
inline constexpr NodeId kDeceasedIdBase = 1'000'000'000;
// Synthetic wait-list sinks for a round are numbered from here.
inline constexpr NodeId kSinkIdBase = 2'000'000'000;

struct RoundArrivals {
  std::vector<Node> pairs;
  std::vector<Node> deceased;
};

// Independent streams for pair and deceased-donor arrivals, so changing the
// DD rate leaves the pair stream untouched.
class ArrivalStream {
 public:
  ArrivalStream(const ScenarioConfig& cfg, std::uint64_t replication_seed);

  // Draws the arrivals of `round`; rounds must be requested in order.
  RoundArrivals next(int round);

 private:
  ScenarioConfig cfg_;
  std::mt19937_64 pair_rng_;
  std::mt19937_64 dd_rng_;
  NodeId next_pair_id_ = 1;
  NodeId next_dd_id_ = kDeceasedIdBase;
};

// Per-round draw: pair count from kep_arrival, pair groups from the pair
// model, PWL tag with probability pwl_fraction; DD count from dd_arrival,
// groups from dd_bg_distribution.
RoundArrivals generate_arrivals(const ScenarioConfig& cfg, int round, std::mt19937_64& pair_rng,
                                std::mt19937_64& dd_rng, NodeId& next_pair_id, NodeId& next_dd_id);

// Draws one (recipient, donor) pair of groups from the model.
std::pair<BloodGroup, BloodGroup> draw_pair_groups(const PairBloodGroupModel& m, std::mt19937_64& rng);

BloodGroup draw_group(const GroupDistribution& d, std::mt19937_64& rng);

struct GroupTally {
  std::int64_t arrived = 0;
  std::int64_t matched = 0;
  std::int64_t dropped = 0;
  std::int64_t active = 0;
  // Months in the registry, summed over every pair that arrived: until the
  // match, until the dropout, or until the final round for those still
  // waiting.
  std::int64_t wait_all = 0;
  // Months from arrival to match, summed over matched pairs.
  std::int64_t wait_matched = 0;
};

struct RoundRecord {
  int matched = 0;       // KEP recipients transplanted this round
  int dropouts = 0;
  int wl_transplants = 0;
  int active = 0;        // pairs still waiting after the round
};

// One policy's registry over one replication.
class RegistryState {
 public:
  RegistryState(Policy policy, const ScenarioConfig& cfg, std::uint64_t replication_seed);

  Policy policy() const { return policy_; }
  const std::vector<Node>& active() const { return active_; }
  const std::array<GroupTally, 4>& groups() const { return groups_; }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  std::int64_t wl_transplants() const { return wl_transplants_; }

  // Adds arrivals, runs the policy's allocation, applies dropouts.
  void run_round(int round, const RoundArrivals& arrivals);

  // Closes the books at the horizon: still-active pairs get their censored
  // waiting time.
  void finish();

 private:
  struct Outcome {
    std::vector<std::size_t> matched;  // positions in active_
    int wl_transplants = 0;
  };
  Outcome allocate(const std::vector<Node>& deceased) const;
  void remove_matched(int round, const std::vector<std::size_t>& positions);
  void apply_dropouts(int round);

  Policy policy_;
  const ScenarioConfig* cfg_;
  std::uint64_t seed_;
  std::vector<Node> active_;
  std::array<GroupTally, 4> groups_{};
  std::vector<RoundRecord> rounds_;
  std::int64_t wl_transplants_ = 0;
  int last_round_ = -1;
  bool finished_ = false;
};

// Cycles-only KEP solve; both kidneys of every DD go to the wait-list.
void run_round_cp(RegistryState& state, int round, const RoundArrivals& arrivals);
// Kidney 1 to the wait-list, kidney 2 seeds a chain in one combined solve.
void run_round_ddic(RegistryState& state, int round, const RoundArrivals& arrivals);

// Optimal transplant counts of a single round for one registry snapshot:
// cycles only plus 2 WL kidneys per DD, versus the combined DDIC solve.
struct RoundComparison {
  int cp = 0;
  int ddic = 0;
  int cp_pairs = 0;
  int ddic_pairs = 0;
};
RoundComparison compare_single_round(const std::vector<Node>& pairs, const std::vector<Node>& deceased, int k,
                                     bool require_wl_terminus = false, double knockout_prob = 0.0,
                                     std::uint64_t knockout_seed = 0);

// Interchangeable pairs (same registry and blood groups) beyond what could
// possibly be matched in one solve are dropped from the solver input, oldest
// kept first. Exact for unit weights without tissue knockout. `sinks` are
// wait-list nodes available this round.
std::vector<std::size_t> prune_pool(const std::vector<Node>& pairs, const std::vector<Node>& deceased,
                                    const std::vector<Node>& sinks);

struct ReplicationResult {
  std::array<std::vector<RoundRecord>, 2> rounds;  // by policy
  std::array<std::array<GroupTally, 4>, 2> groups;
  std::array<std::int64_t, 2> wl_transplants{};
  std::int64_t deceased_arrived = 0;
};

ReplicationResult run_replication(const ScenarioConfig& cfg, int replication);

struct SimulationResult {
  ScenarioConfig config;
  std::vector<ReplicationResult> replications;
};

// Runs every replication for both policies on shared arrival streams.
// Replication i uses seed rng_seed ^ i. `threads` <= 1 runs sequentially.
SimulationResult run_scenario(const ScenarioConfig& cfg, int threads = 1);

}  // namespace ddchain
