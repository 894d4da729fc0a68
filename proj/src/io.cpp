#include "kfree/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "kfree/errors.hpp"

namespace kfree::io {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string lookup(const Metadata& meta, const std::string& key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  throw DomainError("scan table is missing metadata key '" + key + "'");
}

ordered_json meta_json(const Metadata& meta) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

void fill_table_settings(ScanFile& file) {
  file.table.k = std::stoi(lookup(file.meta, "k"));
  file.table.rel_tol = parse_double(lookup(file.meta, "rel_tol"));
}

ScanFile read_scan_json(std::istream& in) {
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed scan JSON: ") + e.what());
  }
  ScanFile file;
  try {
    for (const auto& [k, v] : j.at("meta").items()) file.meta.emplace_back(k, v.get<std::string>());
    fill_table_settings(file);
    for (const auto& r : j.at("rows")) {
      ZValue z;
      z.x = Rational::parse(r.at("x_exact").get<std::string>());
      z.value = r.at("z_value").get<double>();
      z.tail_bound = r.at("tail_bound").get<double>();
      z.cutoff_qbar = r.at("cutoff_qbar").get<std::uint32_t>();
      file.table.rows.push_back(z);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed scan JSON: ") + e.what());
  }
  return file;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& text) {
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DomainError("malformed number '" + text + "'");
  }
  return v;
}

void write_scan_csv(std::ostream& out, const ScanTable& table, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  out << kScanHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.x.str() << ',' << format_double(r.x.to_double()) << ',' << format_double(r.value) << ','
        << format_double(r.tail_bound) << ',' << r.cutoff_qbar << ',' << format_double(std::log10(r.x.to_double()))
        << ',' << format_double(std::log10(r.value)) << '\n';
  }
}

void write_scan_json(std::ostream& out, const ScanTable& table, const Metadata& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["rows"] = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json row;
    row["x_exact"] = r.x.str();
    row["x_decimal"] = r.x.to_double();
    row["z_value"] = r.value;
    row["tail_bound"] = r.tail_bound;
    row["cutoff_qbar"] = r.cutoff_qbar;
    row["log10_x"] = std::log10(r.x.to_double());
    row["log10_z"] = r.value > 0.0 ? ordered_json(std::log10(r.value)) : ordered_json(nullptr);
    j["rows"].push_back(row);
  }
  out << j.dump(2) << '\n';
}

ScanFile read_scan(std::istream& in) {
  in >> std::ws;
  if (in.peek() == '{') return read_scan_json(in);

  ScanFile file;
  std::string line;
  bool header_seen = false;
  std::vector<std::string> columns;
  auto column = [&](const std::vector<std::string>& cells, const std::string& name) -> const std::string& {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) {
        if (i >= cells.size()) throw DomainError("scan row is missing column '" + name + "'");
        return cells[i];
      }
    }
    throw DomainError("scan header lacks column '" + name + "'");
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw DomainError("malformed metadata line: " + line);
      file.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (!header_seen) {
      columns = split_commas(line);
      header_seen = true;
      continue;
    }
    const auto cells = split_commas(line);
    ZValue z;
    z.x = Rational::parse(column(cells, "x_exact"));
    z.value = parse_double(column(cells, "z_value"));
    z.tail_bound = parse_double(column(cells, "tail_bound"));
    z.cutoff_qbar = static_cast<std::uint32_t>(std::stoul(column(cells, "cutoff_qbar")));
    file.table.rows.push_back(z);
  }
  if (!header_seen) throw DomainError("scan table has no header row");
  fill_table_settings(file);
  return file;
}

void write_spectrum_csv(std::ostream& out, const SupportListing& listing, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  out << kSpectrumHeader << '\n';
  for (const auto& p : listing.points) {
    out << p.m << ',' << p.q << ',' << format_double(p.z.to_double()) << ',' << p.m << '/' << p.q << ','
        << format_double(p.intensity) << '\n';
  }
}

void write_spectrum_json(std::ostream& out, const SupportListing& listing, const Metadata& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["qbar_min"] = listing.qbar_min;
  j["omitted_intensity_bound"] = listing.omitted_intensity_bound;
  j["points"] = ordered_json::array();
  for (const auto& p : listing.points) {
    ordered_json row;
    row["m"] = p.m;
    row["q"] = p.q;
    row["z_decimal"] = p.z.to_double();
    row["z_exact"] = std::to_string(p.m) + "/" + std::to_string(p.q);
    row["intensity"] = p.intensity;
    j["points"].push_back(row);
  }
  out << j.dump(2) << '\n';
}

}  // namespace kfree::io
