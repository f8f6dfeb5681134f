#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "nrc/serialization.hpp"

namespace nrc {

struct Column {
  std::string name;
  std::string unit;
  std::string description;
};

// Numeric table; one CSV file per table.
struct Table {
  std::string file;  // e.g. "fig1_scan.csv"
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::size_t fock_dim = 0;  // largest truncation used, 0 if none

  std::size_t column(const std::string& name) const;  // throws InvalidArgument
  std::vector<double> values(const std::string& name) const;
};

struct RunOutput {
  std::vector<Table> tables;
  std::vector<std::string> warnings;
  nlohmann::json summary = nlohmann::json::object();
};

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Two-level single-channel scan over g4: O_z, A_z and fidelity, sorted by O_z.
RunOutput run_tls_single(const ExperimentConfig& c);

// Two-channel scan over (G extra, B extra): O_z, O_x, weighted O, fidelity.
RunOutput run_tls_dual(const ExperimentConfig& c);

// r6 scan with r7 re-solved for the g-phase: S0, normalized S0, fidelity,
// plus omega(t) traces of the best and worst rows.
RunOutput run_ho_coherent(const ExperimentConfig& c);

// t_f sweep for constant-mu, standard and improved protocols: fidelity and
// average power.
RunOutput run_ho_thermal(const ExperimentConfig& c);

// Single protocol from the config's protocol block under its channels.
RunOutput run_custom(const ExperimentConfig& c);

RunOutput run_experiment(const ExperimentConfig& c);

// Control trace of a protocol: Delta, Omega, G, B (two-level) or omega (trap).
Table control_trace(const ProtocolDoc& d, std::size_t grid = default_grid_points);

// Measures of a protocol under the given channels: O and A per channel for
// two-level protocols, S_0..S_3 for polynomial oscillator protocols.
nlohmann::json measure_protocol(const ProtocolDoc& d, std::span<const NoiseChannel> channels,
                                std::size_t grid = default_grid_points);

// CSV text with a '#'-prefixed header (config hash, units, truncation).
std::string to_csv(const Table& t, const ExperimentConfig& c);

// Writes every table, schema.json, summary.json and the resolved config.
void write_outputs(const RunOutput& out, const ExperimentConfig& c, const std::string& dir);

nlohmann::json schema_json(const RunOutput& out);

}  // namespace nrc
