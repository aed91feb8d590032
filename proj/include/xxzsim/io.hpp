#pragma once

#include <string>
#include <vector>

#include "xxzsim/analysis.hpp"
#include "xxzsim/dtwa.hpp"

namespace xxzsim::io {

/// Curve CSV schema: t,Sx_mean,Sx_err,var_min,var_max,theta_min,xi2,xi2_err
/// (Sx_mean is the normalized spin length 2<Sx>/N, variances are 4Var/N).
void write_curve_csv(const std::string& path, const std::vector<analysis::CurvePoint>& curve);

/// Raw per-trajectory dump consumed by the analyze scenario. Header comments
/// carry dt and n_sites; columns are
/// traj,t,n_atoms,n_a,n_b,Sx,Sy,Sz,Sx_a,Sy_a,Sz_a,Sx_b,Sy_b,Sz_b.
void write_dump_csv(const std::string& path,
                    const std::vector<dtwa::TrajectoryResult>& results, double dt,
                    int n_sites);

struct DumpData {
    std::vector<dtwa::TrajectoryResult> results;
    double dt = 0.0;
    int n_sites = 0;
};

DumpData read_dump_csv(const std::string& path);

std::string format_double(double v);

} // namespace xxzsim::io
