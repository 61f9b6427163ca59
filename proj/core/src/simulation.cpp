#include "ddchain/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "ddchain/errors.hpp"
#include "ddchain/rng.hpp"
#include "ddchain/solvers.hpp"

namespace ddchain {

std::string_view to_string(Policy p) { return p == Policy::CP ? "CP" : "DDIC"; }

BloodGroup draw_group(const GroupDistribution& d, std::mt19937_64& rng) {
  std::discrete_distribution<int> dist(d.begin(), d.end());
  return kBloodGroups[dist(rng)];
}

std::pair<BloodGroup, BloodGroup> draw_pair_groups(const PairBloodGroupModel& m, std::mt19937_64& rng) {
  if (m.kind == PairModelKind::Table) {
    std::vector<double> flat;
    for (const auto& row : m.table) flat.insert(flat.end(), row.begin(), row.end());
    std::discrete_distribution<int> dist(flat.begin(), flat.end());
    const int cell = dist(rng);
    return {kBloodGroups[cell / 4], kBloodGroups[cell % 4]};
  }
  for (;;) {
    const BloodGroup recipient = draw_group(m.population, rng);
    const BloodGroup donor = draw_group(m.population, rng);
    if (!abo_compatible(donor, recipient)) return {recipient, donor};
  }
}

RoundArrivals generate_arrivals(const ScenarioConfig& cfg, int round, std::mt19937_64& pair_rng,
                                std::mt19937_64& dd_rng, NodeId& next_pair_id, NodeId& next_dd_id) {
  RoundArrivals out;
  const int pairs = std::uniform_int_distribution<int>(cfg.kep_arrival.lo, cfg.kep_arrival.hi)(pair_rng);
  std::bernoulli_distribution pwl(cfg.pwl_fraction);
  for (int i = 0; i < pairs; ++i) {
    const auto [recipient, donor] = draw_pair_groups(cfg.pair_bg_model, pair_rng);
    const Registry registry = pwl(pair_rng) ? Registry::PWL : Registry::P;
    out.pairs.push_back(Node::pair(next_pair_id++, recipient, donor, registry, round));
  }
  const int deceased = std::uniform_int_distribution<int>(cfg.dd_arrival.lo, cfg.dd_arrival.hi)(dd_rng);
  for (int i = 0; i < deceased; ++i)
    out.deceased.push_back(Node::deceased(next_dd_id++, draw_group(cfg.dd_bg_distribution, dd_rng)));
  return out;
}

ArrivalStream::ArrivalStream(const ScenarioConfig& cfg, std::uint64_t replication_seed)
    : cfg_(cfg), pair_rng_(hash_key({replication_seed, 1})), dd_rng_(hash_key({replication_seed, 2})) {}

RoundArrivals ArrivalStream::next(int round) {
  return generate_arrivals(cfg_, round, pair_rng_, dd_rng_, next_pair_id_, next_dd_id_);
}

namespace {

// Everything that makes two nodes interchangeable in a unit-weight graph.
using ClassKey = std::tuple<int, int, std::vector<int>, double>;

ClassKey class_key(const Node& n) {
  std::vector<int> donors;
  for (const Donor& d : n.donors()) donors.push_back(static_cast<int>(index_of(d.blood_group)));
  std::sort(donors.begin(), donors.end());
  const auto recipient = n.recipient();
  double self = 0.0;
  if (const auto* cn = std::get_if<CompatiblePair>(&n.kind)) self = cn->self_weight;
  return {static_cast<int>(n.role()), recipient ? static_cast<int>(index_of(*recipient)) : -1, std::move(donors),
          self};
}

struct NodeClass {
  Role role = Role::P;
  std::vector<BloodGroup> donors;
  std::optional<BloodGroup> recipient;
  std::vector<std::size_t> members;  // positions in the pair list, id order
  std::int64_t cap = 0;
};

bool class_arc(const NodeClass& from, const NodeClass& to) {
  if (!to.recipient || from.role == Role::WL || to.role == Role::DD) return false;
  return std::any_of(from.donors.begin(), from.donors.end(),
                     [&](BloodGroup d) { return abo_compatible(d, *to.recipient); });
}

// Pair positions of one solve's matched KEP recipients and the number of
// kidneys the wait-list receives from chain ends.
struct SolveOutcome {
  std::vector<std::size_t> matched;
  int chain_wl = 0;
  int used_deceased = 0;
  int pair_transplants = 0;
  int edges = 0;
};

SolveOutcome solve_pool(const std::vector<Node>& pairs, const std::vector<std::size_t>& keep,
                        const std::vector<Node>& deceased, const std::vector<Node>& sinks, int k,
                        bool require_wl_terminus, double knockout_prob, std::uint64_t knockout_seed) {
  std::vector<Node> nodes;
  nodes.reserve(keep.size() + deceased.size() + sinks.size());
  std::unordered_map<NodeId, std::size_t> position;
  for (std::size_t p : keep) {
    nodes.push_back(pairs[p]);
    position.emplace(pairs[p].id, p);
  }
  nodes.insert(nodes.end(), deceased.begin(), deceased.end());
  nodes.insert(nodes.end(), sinks.begin(), sinks.end());
  const ExchangeGraph g =
      build_graph(std::move(nodes), WeightPolicy::unit(), GraphOptions{knockout_prob, knockout_seed});
  const MatchPlan plan = solve_packing(g, SolveOptions{k, true, require_wl_terminus});

  SolveOutcome out;
  for (const Exchange& x : plan.exchanges) {
    out.edges += static_cast<int>(x.edges.size());
    if (x.kind == ExchangeKind::Chain) {
      out.used_deceased++;
      if (g.role(x.nodes.back()) == Role::WL) out.chain_wl++;
    }
    for (EdgeIndex e : x.edges) {
      const NodeIndex to = g.edge(e).to;
      if (g.role(to) == Role::WL) continue;
      out.pair_transplants++;
      out.matched.push_back(position.at(g.node(to).id));
    }
  }
  std::sort(out.matched.begin(), out.matched.end());
  return out;
}

std::vector<Node> make_sinks(std::size_t deceased) {
  std::vector<Node> sinks;
  NodeId id = kSinkIdBase;
  for (std::size_t i = 0; i < deceased; ++i)
    for (BloodGroup b : kBloodGroups) sinks.push_back(Node::wait_list(id++, b));
  return sinks;
}

std::vector<std::size_t> all_positions(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

std::vector<std::size_t> prune_pool(const std::vector<Node>& pairs, const std::vector<Node>& deceased,
                                    const std::vector<Node>& sinks) {
  std::map<ClassKey, std::size_t> index;
  std::vector<NodeClass> classes;
  auto add = [&](const Node& n, std::optional<std::size_t> position) {
    auto [it, fresh] = index.emplace(class_key(n), classes.size());
    if (fresh) {
      NodeClass c;
      c.role = n.role();
      for (const Donor& d : n.donors()) c.donors.push_back(d.blood_group);
      c.recipient = n.recipient();
      classes.push_back(std::move(c));
    }
    NodeClass& c = classes[it->second];
    c.cap++;
    if (position) c.members.push_back(*position);
  };
  std::vector<std::size_t> order = all_positions(pairs.size());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].id < pairs[b].id; });
  for (std::size_t p : order) add(pairs[p], p);
  for (const Node& n : deceased) add(n, std::nullopt);
  for (const Node& n : sinks) add(n, std::nullopt);

  const std::size_t m = classes.size();
  std::vector<std::vector<std::size_t>> in(m), out(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (class_arc(classes[a], classes[b])) {
        out[a].push_back(b);
        in[b].push_back(a);
      }

  // Caps only shrink; each pass bounds a class by what could flow in and,
  // where receiving forces giving, by what could flow out.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t c = 0; c < m; ++c) {
      NodeClass& cls = classes[c];
      std::int64_t bound = cls.cap;
      auto sum = [&](const std::vector<std::size_t>& list) {
        std::int64_t s = 0;
        for (std::size_t d : list) s += classes[d].cap;
        return s;
      };
      if (cls.role != Role::DD) bound = std::min(bound, sum(in[c]));
      if (cls.role == Role::P || cls.role == Role::CN || cls.role == Role::DD) bound = std::min(bound, sum(out[c]));
      if (bound < cls.cap) {
        cls.cap = bound;
        changed = true;
      }
    }
  }

  std::vector<std::size_t> keep;
  for (const NodeClass& c : classes)
    for (std::size_t i = 0; i < c.members.size() && static_cast<std::int64_t>(i) < c.cap; ++i)
      keep.push_back(c.members[i]);
  std::sort(keep.begin(), keep.end());
  return keep;
}

RoundComparison compare_single_round(const std::vector<Node>& pairs, const std::vector<Node>& deceased, int k,
                                     bool require_wl_terminus, double knockout_prob,
                                     std::uint64_t knockout_seed) {
  const auto everyone = all_positions(pairs.size());
  const SolveOutcome cp =
      solve_pool(pairs, everyone, {}, {}, k, require_wl_terminus, knockout_prob, knockout_seed);
  const SolveOutcome ddic = solve_pool(pairs, everyone, deceased, make_sinks(deceased.size()), k,
                                       require_wl_terminus, knockout_prob, knockout_seed);
  const int dd = static_cast<int>(deceased.size());
  RoundComparison r;
  r.cp = cp.edges + 2 * dd;
  r.cp_pairs = cp.pair_transplants;
  r.ddic = dd + ddic.edges + (dd - ddic.used_deceased);
  r.ddic_pairs = ddic.pair_transplants;
  return r;
}

RegistryState::RegistryState(Policy policy, const ScenarioConfig& cfg, std::uint64_t replication_seed)
    : policy_(policy), cfg_(&cfg), seed_(replication_seed) {}

RegistryState::Outcome RegistryState::allocate(const std::vector<Node>& deceased) const {
  const bool ddic = policy_ == Policy::DDIC;
  const std::vector<Node> sinks = ddic ? make_sinks(deceased.size()) : std::vector<Node>{};
  const std::vector<Node> donors = ddic ? deceased : std::vector<Node>{};
  const bool exact_twins = cfg_->tissue_knockout_prob == 0.0;
  const std::vector<std::size_t> keep =
      exact_twins ? prune_pool(active_, donors, sinks) : all_positions(active_.size());
  const SolveOutcome s = solve_pool(active_, keep, donors, sinks, cfg_->k, cfg_->require_wl_terminus,
                                    cfg_->tissue_knockout_prob, seed_);
  Outcome out;
  out.matched = s.matched;
  const int dd = static_cast<int>(deceased.size());
  out.wl_transplants = ddic ? dd + s.chain_wl + (dd - s.used_deceased) : 2 * dd;
  return out;
}

void RegistryState::remove_matched(int round, const std::vector<std::size_t>& positions) {
  std::vector<char> gone(active_.size(), 0);
  for (std::size_t p : positions) {
    if (gone[p]) throw InvariantError("pair matched twice in one round");
    gone[p] = 1;
    const Node& n = active_[p];
    GroupTally& t = groups_[index_of(*n.recipient())];
    const int wait = round - *n.arrival_round();
    t.matched++;
    t.active--;
    t.wait_all += wait;
    t.wait_matched += wait;
  }
  std::size_t w = 0;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (gone[i]) continue;
    if (w != i) active_[w] = std::move(active_[i]);
    ++w;
  }
  active_.resize(w);
}

void RegistryState::apply_dropouts(int round) {
  if (cfg_->dropout_prob <= 0.0) return;
  std::size_t w = 0;
  int dropped = 0;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    const Node& n = active_[i];
    if (hash_uniform({seed_, static_cast<std::uint64_t>(n.id), static_cast<std::uint64_t>(round)}) <
        cfg_->dropout_prob) {
      GroupTally& t = groups_[index_of(*n.recipient())];
      t.dropped++;
      t.active--;
      t.wait_all += round - *n.arrival_round();
      ++dropped;
      continue;
    }
    if (w != i) active_[w] = std::move(active_[i]);
    ++w;
  }
  active_.resize(w);
  rounds_.back().dropouts = dropped;
}

void RegistryState::run_round(int round, const RoundArrivals& arrivals) {
  if (finished_ || round != last_round_ + 1) throw InvariantError("rounds must run in order");
  last_round_ = round;
  for (const Node& n : arrivals.pairs) {
    GroupTally& t = groups_[index_of(*n.recipient())];
    t.arrived++;
    t.active++;
    active_.push_back(n);
  }
  const Outcome o = allocate(arrivals.deceased);
  remove_matched(round, o.matched);
  wl_transplants_ += o.wl_transplants;
  rounds_.push_back(RoundRecord{static_cast<int>(o.matched.size()), 0, o.wl_transplants, 0});
  apply_dropouts(round);
  rounds_.back().active = static_cast<int>(active_.size());
}

void RegistryState::finish() {
  if (finished_) return;
  finished_ = true;
  for (const Node& n : active_) groups_[index_of(*n.recipient())].wait_all += last_round_ - *n.arrival_round();
}

void run_round_cp(RegistryState& state, int round, const RoundArrivals& arrivals) {
  if (state.policy() != Policy::CP) throw InvariantError("state does not follow CP");
  state.run_round(round, arrivals);
}

void run_round_ddic(RegistryState& state, int round, const RoundArrivals& arrivals) {
  if (state.policy() != Policy::DDIC) throw InvariantError("state does not follow DDIC");
  state.run_round(round, arrivals);
}

ReplicationResult run_replication(const ScenarioConfig& cfg, int replication) {
  const std::uint64_t seed = cfg.rng_seed ^ static_cast<std::uint64_t>(replication);
  ArrivalStream stream(cfg, seed);
  RegistryState cp(Policy::CP, cfg, seed), ddic(Policy::DDIC, cfg, seed);
  ReplicationResult r;
  for (int round = 0; round < cfg.rounds; ++round) {
    const RoundArrivals a = stream.next(round);
    r.deceased_arrived += static_cast<std::int64_t>(a.deceased.size());
    run_round_cp(cp, round, a);
    run_round_ddic(ddic, round, a);
  }
  cp.finish();
  ddic.finish();
  for (const RegistryState* s : {&cp, &ddic}) {
    const auto p = static_cast<std::size_t>(s->policy());
    r.rounds[p] = s->rounds();
    r.groups[p] = s->groups();
    r.wl_transplants[p] = s->wl_transplants();
  }
  return r;
}

SimulationResult run_scenario(const ScenarioConfig& cfg, int threads) {
  validate(cfg);
  SimulationResult result;
  result.config = cfg;
  result.replications.resize(static_cast<std::size_t>(cfg.replications));
  const int workers = std::clamp(threads, 1, cfg.replications);
  if (workers == 1) {
    for (int i = 0; i < cfg.replications; ++i) result.replications[i] = run_replication(result.config, i);
    return result;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < cfg.replications; i = next++) result.replications[i] = run_replication(result.config, i);
    });
  for (std::thread& t : pool) t.join();
  return result;
}

}  // namespace ddchain
