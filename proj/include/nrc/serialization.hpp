#pragma once

#include "json.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nrc/dynamics.hpp"
#include "nrc/optimizer.hpp"
#include "nrc/protocols.hpp"

namespace nrc {

// ---------------------------------------------------------------- protocols

enum class ProtocolKind { tls_inversion, ho_coherent, ho_thermal, ho_constant_mu };

std::string to_string(ProtocolKind k);
ProtocolKind protocol_kind_from_string(const std::string& s);

// Persistable description of one protocol.  Two-level fields are in ms and
// ms^-1, oscillator fields in us, rad/us and hbar*us/A^2.
struct ProtocolDoc {
  ProtocolKind kind = ProtocolKind::tls_inversion;
  double t_f = 0.5;
  // two-level
  double delta0 = 10.0;
  std::vector<double> g_extra;
  std::vector<double> b_extra;
  double b0 = units::pi / 2;
  double bf = units::pi / 2;
  std::optional<double> b_dot0;
  std::optional<double> b_dotf;
  // oscillator
  double omega0 = 0.0;
  double omega_f = 0.0;
  double mass = units::default_ion_mass;
  RhoForm form = RhoForm::inverse_sqrt_poly;
  std::vector<double> r_extra;
  double nbar = 0.0;
  std::complex<double> alpha{0.0, 0.0};

  bool operator==(const ProtocolDoc&) const = default;
};

// Throws Error(config) when the coefficient vectors do not fit the kind.
void validate(const ProtocolDoc& doc);

nlohmann::json to_json(const ProtocolDoc& doc);
ProtocolDoc protocol_from_json(const nlohmann::json& j);

TlsProtocol build_tls(const ProtocolDoc& doc, std::size_t grid = default_grid_points);
HoProtocol build_ho(const ProtocolDoc& doc, std::size_t grid = default_grid_points);
ConstantMuProtocol build_constant_mu(const ProtocolDoc& doc);

// Trap schedule for any oscillator kind.
TrapSchedule build_trap(const ProtocolDoc& doc, std::size_t grid = default_grid_points);

// ---------------------------------------------------------------- experiments

enum class ExperimentId { tls_single, tls_dual, ho_coherent, ho_thermal, custom };

std::string to_string(ExperimentId e);
ExperimentId experiment_from_string(const std::string& s);

// Noise channel as written in a config: strength in the quoted unit.
//   sigma_z, sigma_x : "kHz"      (two-level, ms^-1)
//   q                : "Hz/A^2"
//   q2               : "Hz/A^4"
struct ChannelConfig {
  NoiseOperator op = NoiseOperator::sigma_z;
  double eta = 0.0;
  std::string unit;

  bool operator==(const ChannelConfig&) const = default;
};

std::string expected_unit(NoiseOperator op);

// Internal strength (per ms or per us) of a configured channel.
NoiseChannel to_channel(const ChannelConfig& c);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::tls_single;

  // two-level: Delta0 in kHz, t_f in ms
  double delta0_khz = 10.0;
  // oscillator: nu0 in MHz, t_f in us, omega_f = ratio * omega0
  double nu0_mhz = 15.92;
  double omega_ratio = 0.01;
  double mass_u = 100.0 * units::calcium40_mass_u;
  std::string rho_form = "inverse_sqrt_poly";
  double alpha_re = 1.0;
  double alpha_im = 1.0;
  double g_target_us = 50.5;
  double nbar = 12.58;
  double T0_mK = 10.0;  // metadata only

  double t_f = 0.5;
  std::vector<double> t_f_list;  // thermal sweep

  std::vector<ChannelConfig> channels;
  std::vector<ScanAxis> axes;
  // thermal: r6 candidates for the improved protocol
  ScanAxis improved_axis{"r6", -2000.0, 2000.0, 81};
  bool optimize = false;
  bool fock_uhlmann = false;
  bool traces = true;

  std::optional<ProtocolDoc> protocol;  // custom runs and single-protocol verbs

  std::string out_dir = "out";
  std::size_t grid = default_grid_points;
  double tol = 1e-9;
  std::size_t fock_dim = 0;  // 0: adaptive
  std::size_t workers = 0;   // 0: hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;
};

// Defaults reproducing the four figure-level experiments.
ExperimentConfig default_config(ExperimentId e);

// Parse with field-level diagnostics (Error kind config).  Missing fields
// take the defaults of the named experiment.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

// Required fields present and units consistent with channel tags.
void validate(const ExperimentConfig& c);

// FNV-1a 64 over the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& c);

// Default protocol of an experiment (standard STA shape, no extras).
ProtocolDoc default_protocol(const ExperimentConfig& c);

OdeOptions ode_options(const ExperimentConfig& c);

}  // namespace nrc
