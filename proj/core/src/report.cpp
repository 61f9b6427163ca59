#include "ddchain/report.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "ddchain/errors.hpp"

namespace ddchain {

namespace {

std::string num(double v) { return fmt::format("{:.6f}", v); }

std::size_t slot(Policy p) { return static_cast<std::size_t>(p); }

}  // namespace

const GroupSummary& ReportTables::group(BloodGroup g, Policy p) const {
  return groups.at(index_of(g) * 2 + slot(p));
}

ReportTables summarize(const SimulationResult& result, const std::string& scenario) {
  ReportTables t;
  t.scenario = scenario.empty() ? cell_name(result.config) : scenario;
  t.config = result.config;
  const auto& reps = result.replications;
  const double n = reps.empty() ? 1.0 : static_cast<double>(reps.size());
  const int rounds = result.config.rounds;

  std::array<std::vector<double>, 2> cum_matched, cum_transplants;
  for (Policy p : kPolicies) {
    cum_matched[slot(p)].assign(reps.size(), 0.0);
    cum_transplants[slot(p)].assign(reps.size(), 0.0);
  }
  for (int r = 0; r < rounds; ++r) {
    for (Policy p : kPolicies) {
      RoundSummary s;
      s.round = r;
      s.policy = p;
      for (std::size_t i = 0; i < reps.size(); ++i) {
        const RoundRecord& rec = reps[i].rounds[slot(p)].at(r);
        cum_matched[slot(p)][i] += rec.matched;
        cum_transplants[slot(p)][i] += rec.matched + rec.wl_transplants;
        s.matched += rec.matched;
        s.dropouts += rec.dropouts;
        s.transplants += rec.matched + rec.wl_transplants;
        s.wl_transplants += rec.wl_transplants;
        s.active += rec.active;
        s.cumulative_matched += cum_matched[slot(p)][i];
        s.cumulative_transplants += cum_transplants[slot(p)][i];
      }
      s.matched /= n;
      s.dropouts /= n;
      s.transplants /= n;
      s.wl_transplants /= n;
      s.active /= n;
      s.cumulative_matched /= n;
      s.cumulative_transplants /= n;
      t.rounds.push_back(s);
    }
  }
  for (Policy p : kPolicies) {
    for (std::size_t i = 0; i < reps.size(); ++i) {
      t.total_transplants[slot(p)] += cum_transplants[slot(p)][i] / n;
      t.total_matched[slot(p)] += cum_matched[slot(p)][i] / n;
    }
  }
  for (std::size_t i = 0; i < reps.size(); ++i)
    t.transplant_gap.push_back(cum_transplants[slot(Policy::DDIC)][i] - cum_transplants[slot(Policy::CP)][i]);

  for (BloodGroup g : kBloodGroups) {
    for (Policy p : kPolicies) {
      GroupSummary s;
      s.group = g;
      s.policy = p;
      int with_matches = 0;
      double rate_sum = 0.0;
      for (const ReplicationResult& rep : reps) {
        const GroupTally& tally = rep.groups[slot(p)][index_of(g)];
        s.pairs += static_cast<double>(tally.arrived) / n;
        s.total_dropouts += static_cast<double>(tally.dropped) / n;
        t.total_dropouts[slot(p)] += static_cast<double>(tally.dropped) / n;
        if (tally.arrived == 0) continue;
        s.replications_with_pairs++;
        s.mean_wait += static_cast<double>(tally.wait_all) / static_cast<double>(tally.arrived);
        rate_sum += static_cast<double>(tally.matched) / static_cast<double>(tally.arrived);
        if (tally.matched > 0) {
          ++with_matches;
          s.mean_wait_matched += static_cast<double>(tally.wait_matched) / static_cast<double>(tally.matched);
        }
      }
      if (s.replications_with_pairs > 0) {
        s.mean_wait /= s.replications_with_pairs;
        s.match_rate = rate_sum / s.replications_with_pairs;
      }
      if (with_matches > 0) s.mean_wait_matched /= with_matches;
      t.groups.push_back(s);
    }
  }
  return t;
}

void write_rounds_csv(const ReportTables& t, std::ostream& out) {
  out << "round,policy,matched,dropouts,transplants,wl_transplants,active,cumulative_matched,"
         "cumulative_transplants\n";
  for (const RoundSummary& s : t.rounds)
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", s.round, to_string(s.policy), num(s.matched), num(s.dropouts),
                       num(s.transplants), num(s.wl_transplants), num(s.active), num(s.cumulative_matched),
                       num(s.cumulative_transplants));
}

void write_waiting_csv(const ReportTables& t, std::ostream& out) {
  out << "blood_group,policy,mean_wait_months,mean_wait_matched_months,match_rate,pairs\n";
  for (const GroupSummary& s : t.groups)
    out << fmt::format("{},{},{},{},{},{}\n", to_string(s.group), to_string(s.policy), num(s.mean_wait),
                       num(s.mean_wait_matched), num(s.match_rate), num(s.pairs));
}

void write_dropouts_csv(const ReportTables& t, std::ostream& out) {
  out << "blood_group,policy,total\n";
  for (const GroupSummary& s : t.groups)
    out << fmt::format("{},{},{}\n", to_string(s.group), to_string(s.policy), num(s.total_dropouts));
}

std::string summary_json(const ReportTables& t) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["scenario"] = t.scenario;
  j["config"] = ordered_json::parse(scenario_to_json(t.config));
  for (Policy p : kPolicies) {
    ordered_json& pj = j["policies"][std::string(to_string(p))];
    pj["total_transplants"] = t.total_transplants[slot(p)];
    pj["total_matched"] = t.total_matched[slot(p)];
    pj["total_dropouts"] = t.total_dropouts[slot(p)];
    for (BloodGroup g : kBloodGroups) {
      const GroupSummary& s = t.group(g, p);
      pj["groups"][std::string(to_string(g))] = {{"mean_wait_months", s.mean_wait},
                                                 {"mean_wait_matched_months", s.mean_wait_matched},
                                                 {"match_rate", s.match_rate},
                                                 {"pairs", s.pairs},
                                                 {"total_dropouts", s.total_dropouts}};
    }
  }
  j["transplant_gap"] = t.transplant_gap;
  return j.dump(2) + "\n";
}

void write_report(const ReportTables& t, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw InputError(fmt::format("cannot write {}/{}", dir, name));
    return f;
  };
  {
    auto f = open("rounds.csv");
    write_rounds_csv(t, f);
  }
  {
    auto f = open("waiting.csv");
    write_waiting_csv(t, f);
  }
  {
    auto f = open("dropouts.csv");
    write_dropouts_csv(t, f);
  }
  auto f = open("summary.json");
  f << summary_json(t);
}

}  // namespace ddchain
