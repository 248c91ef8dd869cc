#include "epool/scenario.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "epool/error.hpp"

namespace epool {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + field + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + field + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
}

std::string strip_bom(std::string text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.erase(0, 3);
  }
  return text;
}

}  // namespace

ProbabilityVector::ProbabilityVector(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  EPOOL_REQUIRE(weights_.size() > 0, InvalidArgument, "probability vector is empty");
  for (Eigen::Index j = 0; j < weights_.size(); ++j) {
    if (!std::isfinite(weights_[j]) || weights_[j] < 0.0) {
      throw InvalidArgument("probability weight " + std::to_string(j) + " is negative or non-finite");
    }
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
    throw InvalidArgument("probability weights sum to " + format_double(total) + ", not 1");
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t size) {
  EPOOL_REQUIRE(size > 0, InvalidArgument, "probability vector is empty");
  return ProbabilityVector(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(size), 1.0 / static_cast<double>(size)));
}

ProbabilityVector ProbabilityVector::renormalized(Eigen::VectorXd weights, double tolerance) {
  EPOOL_REQUIRE(weights.size() > 0, InvalidArgument, "probability vector is empty");
  const double total = weights.sum();
  if (!std::isfinite(total) || std::abs(total - 1.0) > tolerance) {
    throw InvalidArgument("probability weights sum to " + format_double(total) +
                          ", outside renormalization tolerance");
  }
  const double rounding = static_cast<double>(weights.size()) * std::numeric_limits<double>::epsilon();
  if (std::abs(total - 1.0) > rounding) weights /= total;
  return ProbabilityVector(std::move(weights));
}

ScenarioPanel::ScenarioPanel(std::vector<std::string> factor_names, Eigen::MatrixXd data)
    : names_(std::move(factor_names)), data_(std::move(data)) {
  EPOOL_REQUIRE(data_.rows() >= 2, InvalidArgument, "scenario panel needs at least 2 scenarios");
  EPOOL_REQUIRE(data_.cols() >= 1, InvalidArgument, "scenario panel needs at least 1 factor");
  EPOOL_REQUIRE(static_cast<Eigen::Index>(names_.size()) == data_.cols(), InvalidArgument,
                "factor name count does not match panel width");
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    EPOOL_REQUIRE(!name.empty(), InvalidArgument, "empty factor name");
    EPOOL_REQUIRE(seen.insert(name).second, InvalidArgument, "duplicate factor name '" + name + "'");
  }
  EPOOL_REQUIRE(data_.allFinite(), InvalidArgument, "scenario panel contains non-finite entries");
}

std::size_t ScenarioPanel::factor_index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw InvalidArgument("unknown factor '" + name + "'");
}

bool ScenarioPanel::has_factor(const std::string& name) const noexcept {
  for (const auto& n : names_) {
    if (n == name) return true;
  }
  return false;
}

Eigen::VectorXd ScenarioPanel::column(const std::string& name) const {
  return data_.col(static_cast<Eigen::Index>(factor_index(name)));
}

std::size_t ViewPanel::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw InvalidArgument("unknown view column '" + label + "'");
}

ScenarioPanel parse_panel_csv(const std::string& raw) {
  const std::string text = strip_bom(raw);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    header = split_csv_line(line);
  }
  if (header.empty()) throw ParseError("panel CSV has no header row");

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    for (const auto& f : fields) values.push_back(parse_number(f, line_no));
    ++rows;
  }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(header.size()));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * header.size() + c];
    }
  }
  try {
    return ScenarioPanel(std::move(header), std::move(data));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

ScenarioPanel read_panel_csv(const std::filesystem::path& path) { return parse_panel_csv(read_file(path)); }

std::string format_panel_csv(const ScenarioPanel& panel) {
  std::string out;
  const auto& names = panel.factor_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  out += '\n';
  const auto& d = panel.data();
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
      if (c) out += ',';
      out += format_double(d(r, c));
    }
    out += '\n';
  }
  return out;
}

void write_panel_csv(const ScenarioPanel& panel, const std::filesystem::path& path) {
  write_file(path, format_panel_csv(panel));
}

ProbabilityVector parse_probabilities(const std::string& raw, std::size_t expected_size) {
  std::istringstream in(strip_bom(raw));
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto field = trim(line);
    if (field.empty()) continue;
    values.push_back(parse_number(field, line_no));
  }
  if (values.size() != expected_size) {
    throw ParseError("probability file has " + std::to_string(values.size()) + " weights, expected " +
                     std::to_string(expected_size));
  }
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  if ((w.array() < 0.0).any()) throw ParseError("probability file contains a negative weight");
  try {
    return ProbabilityVector::renormalized(std::move(w), kProbabilityFileTolerance);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

ProbabilityVector read_probabilities(const std::filesystem::path& path, std::size_t expected_size) {
  return parse_probabilities(read_file(path), expected_size);
}

std::string format_probabilities(const ProbabilityVector& p) {
  std::string out;
  out.reserve(p.size() * 24);
  for (std::size_t j = 0; j < p.size(); ++j) {
    out += format_double(p[j]);
    out += '\n';
  }
  return out;
}

void write_probabilities(const ProbabilityVector& p, const std::filesystem::path& path) {
  write_file(path, format_probabilities(p));
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace epool
