#include "xxzsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "xxzsim/errors.hpp"

namespace xxzsim::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_curve_csv(const std::string& path, const std::vector<analysis::CurvePoint>& curve) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "t,Sx_mean,Sx_err,var_min,var_max,theta_min,xi2,xi2_err\n";
    for (const auto& p : curve) {
        out << format_double(p.t) << ',' << format_double(p.spin_length) << ','
            << format_double(p.spin_length_err) << ',' << format_double(p.var_min) << ','
            << format_double(p.var_max) << ',' << format_double(p.theta_min) << ','
            << format_double(p.xi2) << ',' << format_double(p.xi2_err) << '\n';
    }
    if (!out) throw NumericError("failed writing " + path);
}

void write_dump_csv(const std::string& path,
                    const std::vector<dtwa::TrajectoryResult>& results, double dt,
                    int n_sites) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "# xxzsim trajectory dump v1\n";
    out << "# dt=" << format_double(dt) << "\n";
    out << "# n_sites=" << n_sites << "\n";
    out << "traj,t,n_atoms,n_a,n_b,Sx,Sy,Sz,Sx_a,Sy_a,Sz_a,Sx_b,Sy_b,Sz_b\n";
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        for (size_t k = 0; k < r.records.size(); ++k) {
            const auto& rec = r.records[k];
            out << i << ',' << format_double(double(k) * dt) << ',' << r.n_atoms << ','
                << r.n_a << ',' << r.n_b << ',' << format_double(rec.full.sx) << ','
                << format_double(rec.full.sy) << ',' << format_double(rec.full.sz) << ','
                << format_double(rec.a.sx) << ',' << format_double(rec.a.sy) << ','
                << format_double(rec.a.sz) << ',' << format_double(rec.b.sx) << ','
                << format_double(rec.b.sy) << ',' << format_double(rec.b.sz) << '\n';
        }
    }
    if (!out) throw NumericError("failed writing " + path);
}

DumpData read_dump_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dump file: " + path);
    DumpData data;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto parse_meta = [&](const std::string& tag) -> std::string {
                const size_t at = line.find(tag);
                if (at == std::string::npos) return {};
                return line.substr(at + tag.size());
            };
            if (auto v = parse_meta("dt="); !v.empty()) data.dt = std::stod(v);
            if (auto v = parse_meta("n_sites="); !v.empty()) data.n_sites = std::stoi(v);
            continue;
        }
        if (!header_seen) { // column header
            header_seen = true;
            if (line.rfind("traj,", 0) != 0)
                throw ConfigError("unexpected dump header in " + path);
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 14)
            throw ConfigError("malformed dump row in " + path + ": " + line);
        const size_t traj = size_t(vals[0]);
        if (traj >= data.results.size()) data.results.resize(traj + 1);
        auto& r = data.results[traj];
        r.n_atoms = int(vals[2]);
        r.n_a = int(vals[3]);
        r.n_b = int(vals[4]);
        dtwa::StepRecord rec;
        rec.full = {vals[5], vals[6], vals[7]};
        rec.a = {vals[8], vals[9], vals[10]};
        rec.b = {vals[11], vals[12], vals[13]};
        r.records.push_back(rec);
    }
    if (data.results.empty()) throw ConfigError("dump file has no rows: " + path);
    if (data.dt == 0.0) throw ConfigError("dump file missing dt header: " + path);
    return data;
}

} // namespace xxzsim::io
