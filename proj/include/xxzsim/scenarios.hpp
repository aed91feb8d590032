#pragma once

#include <string>
#include <vector>

#include "xxzsim/analysis.hpp"
#include "xxzsim/config.hpp"
#include "xxzsim/couplings.hpp"
#include "xxzsim/dtwa.hpp"

namespace xxzsim::scenarios {

dtwa::EngineConfig engine_config(const RunConfig& cfg);
LatticeGeometry lattice_from(const RunConfig& cfg);
SpinCouplings couplings_from(const RunConfig& cfg);
analysis::CurveOptions curve_options(const RunConfig& cfg);

/// `params`: derive spin couplings from the Hubbard inputs; returns the
/// one-line record (JSON by default) and optionally writes it under out_dir.
std::string run_params(const RunConfig& cfg, bool csv_format = false,
                       const std::string& out_dir = {});

/// `dtwa`: ensemble run -> squeezing curve CSV (+ raw dump when cfg.dump).
std::vector<analysis::CurvePoint> run_dtwa(const RunConfig& cfg,
                                           const std::string& out_dir = {});

/// `oracle`: exact evolution on the same grid and CSV schema.
std::vector<analysis::CurvePoint> run_oracle(const RunConfig& cfg,
                                             const std::string& out_dir = {});

/// `analyze`: re-analyze a raw trajectory dump, with optional phase noise.
std::vector<analysis::CurvePoint> run_analyze(const RunConfig& cfg,
                                              const std::string& input_path,
                                              const std::string& out_dir = {});

struct ImagingSummary {
    double injected = 0.0;       // normalized spin variance put into the shots
    double recovered = 0.0;      // after PCA + quadrants + shot-noise subtraction
    double recovered_err = 0.0;  // jackknife sigma
    double var_atoms = 0.0;      // Var[S_a - S_b photon estimate], atom shots
    double var_noatoms = 0.0;    // same for no-atom shots
    double n_estimate = 0.0;     // atom number from the all-up reference
    double residual_rms_rel = 0.0; // PCA residual rms / mean, no-atom probe
    int shots = 0;
};

/// `imaging-demo`: synthetic polarization-contrast round trip.
ImagingSummary run_imaging_demo(const RunConfig& cfg, const std::string& out_dir = {});

} // namespace xxzsim::scenarios
