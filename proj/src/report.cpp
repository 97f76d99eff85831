#include "overwarp/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace overwarp {

bool VerificationReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass)
            return false;
    return true;
}

void VerificationReport::add(CheckRow row) { rows.push_back(std::move(row)); }

CheckRow& VerificationReport::add_quadrature(const QuadratureReport& q, double tolerance,
                                             std::string note) {
    CheckRow row;
    row.name = q.name;
    row.lhs = q.lhs;
    row.rhs = q.rhs;
    row.residual = q.residual;
    row.h = q.grid_spacing;
    row.order_estimate = q.convergence_order_estimate;
    row.tolerance = tolerance;
    row.pass = q.residual < tolerance;
    row.note = std::move(note);
    rows.push_back(std::move(row));
    return rows.back();
}

std::string VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["config"] = config_echo;
    j["all_pass"] = all_pass();
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["name"] = r.name;
        row["lhs"] = r.lhs;
        row["rhs"] = r.rhs;
        row["residual"] = r.residual;
        row["h"] = r.h;
        if (r.order_estimate)
            row["order_estimate"] = *r.order_estimate;
        else
            row["order_estimate"] = nullptr;
        row["tolerance"] = r.tolerance;
        row["pass"] = r.pass;
        if (!r.note.empty())
            row["note"] = r.note;
        jrows.push_back(std::move(row));
    }
    j["rows"] = std::move(jrows);
    return j.dump(2) + "\n";
}

void atomic_write(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("atomic_write: cannot open " + tmp);
        os << text;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic_write: rename failed for " + path);
}

namespace {

void append_num(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string profile_to_csv(const RadialProfile& p) {
    std::string out = "r,u,du,d2u\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        append_num(out, p.r[i]);
        out += ',';
        append_num(out, p.u[i]);
        out += ',';
        append_num(out, p.du[i]);
        out += ',';
        append_num(out, p.d2u[i]);
        out += '\n';
    }
    return out;
}

std::string mask_to_csv(const DomainMask& m) {
    const Grid2D& g = m.grid;
    std::string out = "r,theta,inside,frac_rm,frac_rp,frac_tm,frac_tp\n";
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j) {
            const int idx = g.node(i, j);
            if (!m.is_inside(idx))
                continue;
            append_num(out, g.r(i));
            out += ',';
            append_num(out, g.theta(j));
            out += ",1";
            for (int d = 0; d < 4; ++d) {
                out += ',';
                append_num(out, m.frac[idx][d]);
            }
            out += '\n';
        }
    return out;
}

std::string field_to_csv(const ScalarField2D& f) {
    const Grid2D& g = f.mask->grid;
    std::string out = "r,theta,value\n";
    for (int idx : f.mask->nodes) {
        append_num(out, g.r(g.node_i(idx)));
        out += ',';
        append_num(out, g.theta(g.node_j(idx)));
        out += ',';
        append_num(out, f.values[idx]);
        out += '\n';
    }
    return out;
}

std::string path_to_csv(const GeodesicPath& p) {
    std::string out = "t,r,theta\n";
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        append_num(out, p.t[i]);
        out += ',';
        append_num(out, p.r[i]);
        out += ',';
        append_num(out, p.theta[i]);
        out += '\n';
    }
    return out;
}

} // namespace overwarp
