#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddchain/simulation.hpp"

namespace ddchain {

// Means over replications of one round's figures.
struct RoundSummary {
  int round = 0;
  Policy policy = Policy::CP;
  double matched = 0.0;
  double dropouts = 0.0;
  double transplants = 0.0;  // KEP recipients plus wait-list kidneys
  double wl_transplants = 0.0;
  double active = 0.0;
  double cumulative_matched = 0.0;
  double cumulative_transplants = 0.0;
};

struct GroupSummary {
  BloodGroup group = BloodGroup::O;
  Policy policy = Policy::CP;
  // Mean months in the registry per arrived pair (matched, dropped or still
  // waiting at the horizon), averaged over replications with arrivals.
  double mean_wait = 0.0;
  // Mean months from arrival to match over matched pairs only.
  double mean_wait_matched = 0.0;
  double match_rate = 0.0;
  double pairs = 0.0;          // mean arrivals per replication
  double total_dropouts = 0.0;  // mean per replication
  int replications_with_pairs = 0;
};

struct ReportTables {
  std::string scenario;
  ScenarioConfig config;
  std::vector<RoundSummary> rounds;  // round-major, CP before DDIC
  std::vector<GroupSummary> groups;  // group-major, CP before DDIC
  std::array<double, 2> total_transplants{};  // by policy, mean per replication
  std::array<double, 2> total_matched{};
  std::array<double, 2> total_dropouts{};
  // DDIC minus CP total transplants, one entry per replication.
  std::vector<double> transplant_gap;

  const GroupSummary& group(BloodGroup g, Policy p) const;
};

ReportTables summarize(const SimulationResult& result, const std::string& scenario = {});

// Plain CSV with fixed precision so equal inputs give equal bytes.
void write_rounds_csv(const ReportTables& t, std::ostream& out);
void write_waiting_csv(const ReportTables& t, std::ostream& out);
void write_dropouts_csv(const ReportTables& t, std::ostream& out);
std::string summary_json(const ReportTables& t);

// Writes rounds.csv, waiting.csv, dropouts.csv and summary.json into `dir`.
void write_report(const ReportTables& t, const std::string& dir);

}  // namespace ddchain
