#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hemi/cap_spectrum.hpp"
#include "hemi/verifier.hpp"

namespace hemi::io {

/// Shortest round-trip text for a double (17 significant digits).
std::string fmt(double value);

/// `key=value` lines.
void write_report(std::ostream& out, const InequalityReport& report);

std::string report_csv_header();
std::string report_csv_row(const InequalityReport& report);

/// Sweep output; cap-only sweeps use a different column set.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& parameter, bool cap_only);

/// `l,k,mu` table rows of solve_mode results.
void write_cap_table(std::ostream& out, const std::vector<cap::RadialEigenpair>& pairs);

}  // namespace hemi::io
