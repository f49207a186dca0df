#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermoscope/imaging.hpp"
#include "thermoscope/inference.hpp"
#include "thermoscope/params.hpp"

namespace thermoscope {

// Batch glue shared by the CLI and the end-to-end tests: a scan description,
// frame synthesis over the scan, and width analysis back to a dataset.

struct ScanSpec {
  ScanKind kind = ScanKind::rabi_scan;
  double fixed_value = 0.0;          // [rad/s]
  std::vector<double> controls;      // [rad/s]
  double zeta = 0.0;                 // ground-truth anomalous rate [quanta/s]
  std::uint64_t photons = 200000;    // per frame

  void validate() const;
};

ScanSpec scan_spec_from_json_text(const std::string& text, const ExperimentParams& p);
ScanSpec load_scan_spec(const std::string& path, const ExperimentParams& p);

struct SimulatedPoint {
  double control = 0.0;      // [rad/s]
  double t_eq = 0.0;         // [K]
  double nbar = 0.0;
  double sigma_ion = 0.0;    // [m]
  double sigma_camera = 0.0; // composite width [m]
  std::uint64_t frame_seed = 0;
  ImageFrame frame;
};

// One frame per control value; per-frame seeds derive deterministically from
// the base seed and the point index.
std::vector<SimulatedPoint> simulate_scan(const ScanSpec& spec, const ExperimentParams& p,
                                          const ImagingConfig& cfg, std::uint64_t seed);

// Writes frame_NNN.pgm files plus manifest.json (all generating parameters,
// ground truth and per-frame seeds) into out_dir.  Returns the manifest path.
std::string write_simulation(const std::vector<SimulatedPoint>& points, const ScanSpec& spec,
                             const ExperimentParams& p, const ImagingConfig& cfg,
                             std::uint64_t seed, const std::string& out_dir);

struct AnalyzedScan {
  ScanDataset dataset;
  std::vector<std::string> failures;  // one message per frame that failed to fit
};

// measure_width over in-memory frames.
AnalyzedScan analyze_points(const std::vector<SimulatedPoint>& points, ScanKind kind,
                            double fixed_value);

// measure_width over the frames recorded in a simulation manifest.
AnalyzedScan analyze_manifest(const std::string& manifest_path);

}  // namespace thermoscope
