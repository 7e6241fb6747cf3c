#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "timebin/csv.hpp"
#include "timebin/errors.hpp"

namespace timebin {

namespace {

const char* kBaseHeader = "scan_value,duration_s,singles_a,singles_b,coincidences_raw";
const char* kCorrectedSuffix = ",coincidences_corrected,corrected_sigma,clamped";

std::string unit_name(ScanUnit u) {
  switch (u) {
    case ScanUnit::Volts: return "volts";
    case ScanUnit::Radians: return "radians";
    case ScanUnit::Seconds: return "seconds";
  }
  return "radians";
}

ScanUnit unit_from_name(const std::string& s) {
  if (s == "volts") return ScanUnit::Volts;
  if (s == "radians") return ScanUnit::Radians;
  if (s == "seconds") return ScanUnit::Seconds;
  throw DataError("unknown scan unit '" + s + "' in CSV directive");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "CSV line " << line_no << ": cannot parse " << what << " from '" << s << "'";
    throw DataError(os.str());
  }
}

std::uint64_t parse_count(const std::string& s, int line_no, const char* what) {
  try {
    // stoull would wrap a leading minus around instead of failing
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s[0])))
      throw std::invalid_argument(s);
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << "CSV line " << line_no << ": cannot parse " << what << " from '" << s << "'";
    throw DataError(os.str());
  }
}

}  // namespace

std::string count_records_to_csv(const std::vector<CountRecord>& records) {
  bool corrected = !records.empty() && records.front().coincidences_corrected.has_value();
  for (const CountRecord& r : records) {
    if (r.coincidences_corrected.has_value() != corrected)
      throw DataError("cannot serialize a mix of corrected and uncorrected records");
  }

  std::ostringstream os;
  const ScanUnit unit = records.empty() ? ScanUnit::Radians : records.front().unit;
  os << "# unit=" << unit_name(unit) << "\n";
  os << kBaseHeader << (corrected ? kCorrectedSuffix : "") << "\n";
  for (const CountRecord& r : records) {
    if (r.unit != unit)
      throw DataError("cannot serialize records with mixed scan units");
    os << fmt(r.scan_value) << ',' << fmt(r.duration) << ',' << r.singles_a << ','
       << r.singles_b << ',' << r.coincidences_raw;
    if (corrected) {
      os << ',' << fmt(*r.coincidences_corrected) << ','
         << fmt(r.corrected_sigma.value_or(0.0)) << ',' << (r.clamped ? 1 : 0);
    }
    os << "\n";
  }
  return os.str();
}

std::vector<CountRecord> count_records_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  ScanUnit unit = ScanUnit::Radians;
  bool saw_header = false;
  bool corrected = false;
  std::vector<CountRecord> out;

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty()) continue;
    if (trimmed[0] == '#') {
      const std::string directive = trimmed.substr(1);
      const auto eq = directive.find('=');
      if (eq != std::string::npos) {
        std::string key = directive.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key == "unit") {
          std::string val = directive.substr(eq + 1);
          val.erase(0, val.find_first_not_of(" \t"));
          val.erase(val.find_last_not_of(" \t") + 1);
          unit = unit_from_name(val);
        }
      }
      continue;
    }
    if (!saw_header) {
      if (trimmed == std::string(kBaseHeader)) {
        corrected = false;
      } else if (trimmed == std::string(kBaseHeader) + kCorrectedSuffix) {
        corrected = true;
      } else {
        std::ostringstream os;
        os << "CSV line " << line_no << ": unrecognized header '" << trimmed << "'";
        throw DataError(os.str());
      }
      saw_header = true;
      continue;
    }

    const std::vector<std::string> f = split_fields(trimmed);
    const std::size_t expect = corrected ? 8 : 5;
    if (f.size() != expect) {
      std::ostringstream os;
      os << "CSV line " << line_no << ": expected " << expect << " fields, got "
         << f.size();
      throw DataError(os.str());
    }

    CountRecord r;
    r.unit = unit;
    r.scan_value = parse_double(f[0], line_no, "scan_value");
    r.duration = parse_double(f[1], line_no, "duration_s");
    r.singles_a = parse_count(f[2], line_no, "singles_a");
    r.singles_b = parse_count(f[3], line_no, "singles_b");
    r.coincidences_raw = parse_count(f[4], line_no, "coincidences_raw");
    if (corrected) {
      r.coincidences_corrected = parse_double(f[5], line_no, "coincidences_corrected");
      r.corrected_sigma = parse_double(f[6], line_no, "corrected_sigma");
      const std::uint64_t flag = parse_count(f[7], line_no, "clamped");
      if (flag > 1) {
        std::ostringstream os;
        os << "CSV line " << line_no << ": clamped flag must be 0 or 1";
        throw DataError(os.str());
      }
      r.clamped = flag == 1;
    }
    out.push_back(r);
  }

  if (!saw_header) throw DataError("CSV has no header row");
  return out;
}

void write_count_records(const std::filesystem::path& path,
                         const std::vector<CountRecord>& records) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open " + path.string() + " for writing");
  f << count_records_to_csv(records);
  if (!f) throw DataError("failed while writing " + path.string());
}

std::vector<CountRecord> read_count_records(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path.string() + " for reading");
  std::ostringstream os;
  os << f.rdbuf();
  return count_records_from_csv(os.str());
}

}  // namespace timebin
