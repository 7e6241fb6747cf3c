#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "timebin/events.hpp"

namespace timebin {

// Serializes count records as CSV. Layout:
//
//   # unit=<volts|radians|seconds>
//   scan_value,duration_s,singles_a,singles_b,coincidences_raw
//
// with three extra columns (coincidences_corrected, corrected_sigma,
// clamped) appended when the records carry an accidental correction.
// Either every record has the correction or none does; a mixed set is
// rejected. Floating-point fields are written with enough digits to
// round-trip exactly.
std::string count_records_to_csv(const std::vector<CountRecord>& records);

// Parses the format above. Blank lines and '#' comments are skipped
// (the unit directive is honored; unknown directives are ignored).
// Throws DataError naming the offending line on malformed input.
std::vector<CountRecord> count_records_from_csv(const std::string& text);

void write_count_records(const std::filesystem::path& path,
                         const std::vector<CountRecord>& records);
std::vector<CountRecord> read_count_records(const std::filesystem::path& path);

}  // namespace timebin
