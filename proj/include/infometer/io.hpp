#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "infometer/core.hpp"

namespace infometer {

/// CSV with a header row of column names and one observation per line.
SampleMatrix read_csv(std::istream& in, bool time_ordered = false);
/// JSON container {"columns": [...], "data": [[...], ...]} with one inner array per row.
SampleMatrix read_json_samples(const Json& doc, bool time_ordered = false);

/// Dispatches on extension (.json, otherwise CSV).
SampleMatrix load_samples(const std::filesystem::path& path, bool time_ordered = false);

void write_csv(std::ostream& out, const SampleMatrix& samples);

}  // namespace infometer
