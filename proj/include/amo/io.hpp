#pragma once

#include <string>
#include <vector>

#include "json.hpp"  // vendored nlohmann/json

#include "amo/dynamics.hpp"
#include "amo/lattice.hpp"
#include "amo/params.hpp"
#include "amo/trajectories.hpp"

namespace amo::io {

using json = nlohmann::json;

json load_json_file(const std::string& path);

// Angular-frequency entry: either `<key>` in rad/s or `<key>_2pi_hz`
// meaning omega = 2 pi * value.
double read_angular(const json& j, const std::string& key, double fallback);

params::PhysicalConfig parse_physical_config(const json& root);
fock::HilbertDims parse_dims(const json& root);
dynamics::SimControl parse_sim_control(const json& root);
trajectories::TrajectoryConfig parse_trajectory_config(const json& root);
lattice::LatticeSpec parse_lattice_spec(const json& root);
lattice::DisorderConfig parse_disorder_config(const json& root);

// Effective model from a config: an explicit "model" block wins, otherwise
// the "physical" block is mapped through the parameter derivation.
fock::ModelParams parse_model(const json& root, const dynamics::SimControl& ctrl);

std::string format_double(double v);  // full double precision, deterministic

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);
void write_text(const std::string& path, const std::string& content);
void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& resolved_config, std::uint64_t seed);

// Minimal static renderings.
std::string svg_line_plot(const std::vector<double>& x,
                          const std::vector<std::vector<double>>& ys,
                          const std::string& x_label, const std::string& y_label);
std::string svg_heatmap(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& values,  // row-major over xs, ys
                        const std::string& title);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace amo::io
