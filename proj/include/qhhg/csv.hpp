#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qhhg/common.hpp"
#include "qhhg/focal.hpp"
#include "qhhg/propagation.hpp"
#include "qhhg/spectrum.hpp"

namespace qhhg {

// Fixed-schema CSV writers/readers for the sweep outputs. Numbers are printed
// with 17 significant digits so files round-trip doubles exactly and reruns
// diff clean.

namespace csvdetail {

inline std::string fmt(double v) {
    if (!is_defined(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double num(const std::string& s) {
    if (s == "nan" || s == "-nan") return undefined_value();
    return std::strtod(s.c_str(), nullptr);
}

}  // namespace csvdetail

inline const char* kSweepHeader =
    "I_Wcm2,E0_au,n_i,n_j,self4_i,self4_j,cross4,g2_ii,g2_jj,g2_ij,R,Q_i,Q_j,"
    "projection_weight,params_hash";

inline void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << kSweepHeader << "\n";
    using csvdetail::fmt;
    for (const SweepRow& r : rows) {
        out << fmt(r.intensity) << ',' << fmt(r.e0) << ',' << fmt(r.c.n_i) << ',' << fmt(r.c.n_j)
            << ',' << fmt(r.c.self4_i) << ',' << fmt(r.c.self4_j) << ',' << fmt(r.c.cross4) << ','
            << fmt(r.c.g2_ii) << ',' << fmt(r.c.g2_jj) << ',' << fmt(r.c.g2_ij) << ','
            << fmt(r.c.r) << ',' << fmt(r.c.q_i) << ',' << fmt(r.c.q_j) << ','
            << fmt(r.projection_weight) << ',' << hash_hex(r.params_hash) << "\n";
    }
}

inline std::vector<SweepRow> read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty sweep file '" + path + "'");
    if (csvdetail::split(line).size() != 15 || line.rfind("I_Wcm2,", 0) != 0)
        throw io_error("'" + path + "' does not look like a sweep table");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csvdetail::split(line);
        if (f.size() != 15) throw io_error("malformed sweep row in '" + path + "'");
        SweepRow r;
        using csvdetail::num;
        r.intensity = num(f[0]);
        r.e0 = num(f[1]);
        r.c = ratios_from_raw(num(f[2]), num(f[3]), num(f[4]), num(f[5]), num(f[6]));
        r.projection_weight = num(f[13]);
        r.params_hash = std::strtoull(f[14].c_str(), nullptr, 16);
        rows.push_back(r);
    }
    return rows;
}

inline const char* kFocalHeader =
    "I0_Wcm2,n_i,n_j,self4_i,self4_j,cross4,g2_ii,g2_jj,g2_ij,R_av,params_hash";

inline void write_focal_csv(const std::string& path, std::span<const FocalCurvePoint> curve,
                            std::uint64_t config_hash) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << kFocalHeader << "\n";
    using csvdetail::fmt;
    for (const FocalCurvePoint& p : curve) {
        out << fmt(p.i0) << ',' << fmt(p.c.n_i) << ',' << fmt(p.c.n_j) << ',' << fmt(p.c.self4_i)
            << ',' << fmt(p.c.self4_j) << ',' << fmt(p.c.cross4) << ',' << fmt(p.c.g2_ii) << ','
            << fmt(p.c.g2_jj) << ',' << fmt(p.c.g2_ij) << ',' << fmt(p.c.r) << ','
            << hash_hex(config_hash) << "\n";
    }
}

inline std::vector<FocalCurvePoint> read_focal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("I0_Wcm2,", 0) != 0)
        throw io_error("'" + path + "' does not look like a focal table");
    std::vector<FocalCurvePoint> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csvdetail::split(line);
        if (f.size() != 11) throw io_error("malformed focal row in '" + path + "'");
        FocalCurvePoint p;
        using csvdetail::num;
        p.i0 = num(f[0]);
        p.c = ratios_from_raw(num(f[1]), num(f[2]), num(f[3]), num(f[4]), num(f[5]));
        out.push_back(p);
    }
    return out;
}

/// Two-column dipole export: time and <x>(t).
inline void write_dipole_csv(const std::string& path, const DipoleRecord& record) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "t,dipole_x\n";
    for (std::size_t m = 0; m < record.times.size(); ++m)
        out << csvdetail::fmt(record.times[m]) << ',' << csvdetail::fmt(record.dipole[m]) << "\n";
}

inline DipoleRecord read_dipole_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
        throw io_error("'" + path + "' does not look like a dipole record");
    DipoleRecord rec;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csvdetail::split(line);
        if (f.size() < 2) throw io_error("malformed dipole row in '" + path + "'");
        rec.times.push_back(csvdetail::num(f[0]));
        rec.dipole.push_back(csvdetail::num(f[1]));
        rec.norm.push_back(1.0);
    }
    return rec;
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    out << "harmonic_order,power\n";
    for (std::size_t m = 0; m < spec.harmonic_order.size(); ++m)
        out << csvdetail::fmt(spec.harmonic_order[m]) << ',' << csvdetail::fmt(spec.power[m])
            << "\n";
}

}  // namespace qhhg
