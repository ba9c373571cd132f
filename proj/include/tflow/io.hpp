#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tflow/diagnostics.hpp"
#include "tflow/model.hpp"
#include "tflow/state.hpp"
#include "tflow/stepper.hpp"

namespace tflow {

/// Config text or value rejected; message carries the line number.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read, written, or decoded.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Initial-condition recipe; presets: constant, cosine_mode,
/// tanh_interface, random_spinodal, thrombus_blob.
struct InitialSpec {
    std::string phi_preset = "constant";
    double value = 0.0;        // constant level
    int mode_k = 1;            // cosine_mode wavenumber (phi ~ cos(k pi x / lx))
    double amplitude = 0.0;    // cosine_mode/tanh/random/blob amplitude
    double width = 0.1;        // tanh/blob interface width
    std::string orientation = "x";  // tanh_interface axis
    double radius = 0.25;           // blob radius
    double center_x = 0.5, center_y = 0.5;  // blob center, as fractions
    std::uint64_t seed = 1;    // random_spinodal

    std::string u_preset = "zero";  // zero | shear
    double u_amplitude = 0.0;

    std::string psi_preset = "constant";  // constant | sine
    double psi_x = 0.0, psi_y = 0.0;
    double psi_amplitude = 0.0;
};

struct RunConfig {
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    ModelParams params;
    SolverConfig solver;
    double t_end = 0.02;
    int cadence = 1;
    std::string output_dir = "out";
    InitialSpec initial;

    Grid2D make_grid() const { return Grid2D(nx, ny, lx, ly); }
    void validate() const;
};

/// Parses the sectioned key = value text; throws ConfigError carrying the
/// first offending line.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Builds the initial state: phi preset (|phi0| <= 1 - xi enforced), psi
/// preset, velocity preset projected to the divergence-free space, mu
/// consistent with (phi, psi), pi = 0, t = 0.
State build_initial_state(const RunConfig& cfg);

/// Binary snapshot, little-endian: "TFLD1", version u32, nx u32, ny u32,
/// lx f64, ly f64, t f64, then u_x, u_y, phi, psi_x, psi_y, mu, pi as
/// nx*ny f64 row-major each.
void write_snapshot(const State& s, const std::string& path);
State read_snapshot(const std::string& path);

/// CSV with one header row; columns are the EnergyReport fields in order.
std::string csv_header();
std::string csv_row(const EnergyReport& r);

}  // namespace tflow
