#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kfree/asymptotics.hpp"
#include "kfree/diffraction.hpp"

namespace kfree::io {

// Shortest decimal text that parses back to the same double; "." decimal
// point regardless of locale.
std::string format_double(double v);
double parse_double(const std::string& text);

// Ordered "# key=value" provenance lines written ahead of a CSV header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kScanHeader = "x_exact,x_decimal,z_value,tail_bound,cutoff_qbar,log10_x,log10_z";
inline constexpr const char* kSpectrumHeader = "m,q,z_decimal,z_exact,intensity";

void write_scan_csv(std::ostream& out, const ScanTable& table, const Metadata& meta);
void write_scan_json(std::ostream& out, const ScanTable& table, const Metadata& meta);

struct ScanFile {
  ScanTable table;
  Metadata meta;
};

// Reads either format back (JSON if the first non-blank character is '{').
// The table's k and rel_tol come from the "k" and "rel_tol" metadata keys.
ScanFile read_scan(std::istream& in);

void write_spectrum_csv(std::ostream& out, const SupportListing& listing, const Metadata& meta);
void write_spectrum_json(std::ostream& out, const SupportListing& listing, const Metadata& meta);

}  // namespace kfree::io
