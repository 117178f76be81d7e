#include "infometer/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace infometer {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    fail(ErrorKind::InvalidInput,
         "line " + std::to_string(line_no) + ": '" + s + "' is not a number (missing values are rejected)");
  }
  return v;
}

}  // namespace

SampleMatrix read_csv(std::istream& in, bool time_ordered) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split(line);
  }
  require(!header.empty(), ErrorKind::InvalidInput, "CSV has no header row");
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    require(fields.size() == header.size(), ErrorKind::InvalidInput,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                " fields, got " + std::to_string(fields.size()));
    for (const auto& f : fields) data.push_back(parse_double(f, line_no));
    ++rows;
  }
  require(rows >= 1, ErrorKind::InvalidInput, "CSV has no data rows");
  const std::size_t cols = header.size();
  return SampleMatrix(rows, cols, std::move(data), std::move(header), time_ordered);
}

SampleMatrix read_json_samples(const Json& doc, bool time_ordered) {
  require(doc.is_object() && doc.contains("columns") && doc.contains("data"),
          ErrorKind::InvalidInput, "JSON samples need 'columns' and 'data'");
  std::vector<std::string> names;
  for (const auto& c : doc.at("columns")) names.push_back(c.get<std::string>());
  std::vector<double> data;
  std::size_t rows = 0;
  for (const auto& row : doc.at("data")) {
    require(row.is_array() && row.size() == names.size(), ErrorKind::InvalidInput,
            "row " + std::to_string(rows) + " has the wrong width");
    for (const auto& v : row) {
      require(v.is_number(), ErrorKind::InvalidInput,
              "row " + std::to_string(rows) + " has a non-numeric entry");
      data.push_back(v.get<double>());
    }
    ++rows;
  }
  const std::size_t cols = names.size();
  return SampleMatrix(rows, cols, std::move(data), std::move(names), time_ordered);
}

SampleMatrix load_samples(const std::filesystem::path& path, bool time_ordered) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot open " + path.string());
  if (path.extension() == ".json") {
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::InvalidInput, path.string() + ": " + e.what());
    }
    return read_json_samples(doc, time_ordered);
  }
  return read_csv(in, time_ordered);
}

void write_csv(std::ostream& out, const SampleMatrix& samples) {
  const auto& names = samples.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    for (std::size_t c = 0; c < samples.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, samples(r, c));
      out << (c ? "," : "") << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace infometer
