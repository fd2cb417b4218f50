#include "hemi/report_io.hpp"

#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace hemi::io {

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

double eigen_at(const InequalityReport& r, std::size_t i) {
    return i < r.eigenvalues.size() ? r.eigenvalues[i] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_report(std::ostream& out, const InequalityReport& r) {
    out << "dim=" << r.dim << '\n';
    out << "kind=" << to_string(r.kind) << '\n';
    out << "mesh_h=" << fmt(r.mesh_h) << '\n';
    out << "refinements=" << r.refinements << '\n';
    out << "vertices=" << r.vertices << '\n';
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) out << "mu" << i << '=' << fmt(r.eigenvalues[i]) << '\n';
    out << "domain_volume=" << fmt(r.domain_volume) << '\n';
    out << "mesh_volume=" << fmt(r.mesh_volume) << '\n';
    out << "equivalent_gamma=" << fmt(r.equivalent_gamma) << '\n';
    out << "mu1_cap=" << fmt(r.mu1_cap) << '\n';
    out << "cap_attained_by_l1=" << flag(r.cap_attained_by_l1) << '\n';
    out << "lhs=" << fmt(r.lhs) << '\n';
    out << "rhs=" << fmt(r.rhs) << '\n';
    out << "margin=" << fmt(r.margin) << '\n';
    out << "harmonic_lhs=" << fmt(r.harmonic_lhs) << '\n';
    out << "harmonic_rhs=" << fmt(r.harmonic_rhs) << '\n';
    out << "tolerance=" << fmt(r.tolerance) << '\n';
    out << "passed=" << flag(r.passed) << '\n';
    if (!r.proof) return;
    const auto& p = *r.proof;
    out << "balance_pole_colatitude=" << fmt(p.balance.rotation.colatitude) << '\n';
    out << "balance_pole_longitude=" << fmt(p.balance.rotation.longitude) << '\n';
    out << "balance_residual=" << fmt(p.balance.residual) << '\n';
    out << "balance_target=" << fmt(p.balance.target) << '\n';
    out << "balance_success=" << flag(p.balance.success) << '\n';
    out << "energy_lhs=" << fmt(p.energy_lhs) << '\n';
    out << "energy_rhs=" << fmt(p.energy_rhs) << '\n';
    out << "rearrangement_max=" << fmt(p.rearrangement_residual) << '\n';
    out << "rearrangement_holds=" << flag(p.holds_rearrangement) << '\n';
    out << "sin_weighted_omega=" << fmt(p.omega_G2_over_sin2) << '\n';
    out << "sin_weighted_cap=" << fmt(p.cap_g2_over_sin2) << '\n';
    out << "sin_weighted_residual=" << fmt(p.sin_weighted_residual) << '\n';
    out << "sin_weighted_holds=" << flag(p.holds_sin_weighted) << '\n';
    out << "mass_omega=" << fmt(p.omega_G2) << '\n';
    out << "mass_cap=" << fmt(p.cap_g2) << '\n';
    out << "mass_residual=" << fmt(p.mass_residual) << '\n';
    out << "mass_holds=" << flag(p.holds_mass) << '\n';
    for (std::size_t i = 0; i < p.test_bounds.size(); ++i) {
        out << "test_bound_lhs_" << i + 1 << '=' << fmt(p.test_bounds[i].lhs) << '\n';
        out << "test_bound_rhs_" << i + 1 << '=' << fmt(p.test_bounds[i].rhs) << '\n';
    }
    for (std::size_t i = 0; i < p.orthogonality.size(); ++i)
        for (std::size_t j = 0; j < p.orthogonality[i].size(); ++j)
            out << "orthogonality_" << i + 1 << '_' << j + 1 << '=' << fmt(p.orthogonality[i][j]) << '\n';
}

std::string report_csv_header() {
    return "dim,kind,mesh_h,refinements,vertices,domain_volume,mesh_volume,equivalent_gamma,mu1_cap,mu1,mu2,mu3,"
           "lhs,rhs,margin,tolerance,passed";
}

std::string report_csv_row(const InequalityReport& r) {
    std::ostringstream s;
    s << r.dim << ',' << to_string(r.kind) << ',' << fmt(r.mesh_h) << ',' << r.refinements << ',' << r.vertices << ','
      << fmt(r.domain_volume) << ',' << fmt(r.mesh_volume) << ',' << fmt(r.equivalent_gamma) << ',' << fmt(r.mu1_cap)
      << ',' << fmt(eigen_at(r, 1)) << ',' << fmt(eigen_at(r, 2)) << ',' << fmt(eigen_at(r, 3)) << ',' << fmt(r.lhs)
      << ',' << fmt(r.rhs) << ',' << fmt(r.margin) << ',' << fmt(r.tolerance) << ',' << flag(r.passed);
    return s.str();
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& parameter, bool cap_only) {
    if (cap_only) {
        out << "index," << parameter << ",status,mu1,mu_11,mu_02,attained_by_l1,error\n";
        for (const auto& row : rows) {
            out << row.index << ',' << fmt(row.value) << ',' << row.status << ',';
            if (row.cap)
                out << fmt(row.cap->mu1) << ',' << fmt(row.cap->mu_11) << ',' << fmt(row.cap->mu_02) << ','
                    << flag(row.cap->attained_by_l1);
            else
                out << ",,,";
            out << ',' << csv_escape(row.error) << '\n';
        }
        return;
    }
    out << "index," << parameter << ",status," << report_csv_header() << ",error\n";
    for (const auto& row : rows) {
        out << row.index << ',' << fmt(row.value) << ',' << row.status << ',';
        if (row.report)
            out << report_csv_row(*row.report);
        else
            out << std::string(16, ',');
        out << ',' << csv_escape(row.error) << '\n';
    }
}

void write_cap_table(std::ostream& out, const std::vector<cap::RadialEigenpair>& pairs) {
    out << "dim,gamma,l,k,mu,ode_residual\n";
    for (const auto& p : pairs)
        out << p.dim << ',' << fmt(p.gamma) << ',' << p.mode_l << ',' << p.k << ',' << fmt(p.mu) << ','
            << fmt(p.ode_residual) << '\n';
}

}  // namespace hemi::io
