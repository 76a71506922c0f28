#include "densemem/patterns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "densemem/error.hpp"
#include "densemem/rng.hpp"

namespace densemem {

PointSet::PointSet(std::vector<double> values, std::size_t rows, std::size_t dim)
    : values_(std::move(values)), rows_(rows), dim_(dim) {
  if (rows_ == 0 || dim_ == 0) throw InvalidArgument("point set needs at least one row and column");
  if (values_.size() != rows_ * dim_) {
    throw InvalidArgument("point set has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(rows_ * dim_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("non-finite entry at row " + std::to_string(i / dim_));
    }
  }
  columns_.resize(values_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t d = 0; d < dim_; ++d) columns_[d * rows_ + i] = values_[i * dim_ + d];
  }
}

PatternSet sample_unit_circle(std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("sample_unit_circle: k must be >= 1");
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> values(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    const double phi = angle(engine);
    values[2 * i] = std::cos(phi);
    values[2 * i + 1] = std::sin(phi);
  }
  return PatternSet(std::move(values), k, 2, "unit_circle", seed);
}

std::vector<PatternSet> nested_subsets(const PatternSet& full, std::span<const std::size_t> sizes,
                                       std::uint64_t seed) {
  if (sizes.empty()) throw InvalidArgument("nested_subsets: no sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw InvalidArgument("nested_subsets: size 0 requested");
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw InvalidArgument("nested_subsets: sizes must be strictly ascending (" +
                            std::to_string(sizes[i - 1]) + " then " + std::to_string(sizes[i]) + ")");
    }
  }
  if (sizes.back() > full.k()) {
    throw InvalidArgument("nested_subsets: size " + std::to_string(sizes.back()) + " exceeds K=" +
                          std::to_string(full.k()));
  }
  std::vector<std::size_t> order(full.k());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  std::shuffle(order.begin(), order.end(), engine);

  std::vector<PatternSet> subsets;
  subsets.reserve(sizes.size());
  for (std::size_t size : sizes) {
    std::vector<double> values;
    values.reserve(size * full.n());
    for (std::size_t i = 0; i < size; ++i) {
      auto row = full.row(order[i]);
      values.insert(values.end(), row.begin(), row.end());
    }
    subsets.emplace_back(std::move(values), size, full.n(), full.label(), seed);
  }
  return subsets;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void write_rows(std::ostream& out, const PointSet& set) {
  for (std::size_t i = 0; i < set.rows(); ++i) {
    auto row = set.row(i);
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (d != 0) out << ',';
      out << format_double(row[d]);
    }
    out << '\n';
  }
}

struct ParsedCsv {
  std::map<std::string, std::string> header;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t dim = 0;
};

std::uint64_t header_uint(const ParsedCsv& csv, const std::string& key) {
  auto it = csv.header.find(key);
  if (it == csv.header.end()) throw ParseError(0, "header is missing '" + key + "='");
  std::uint64_t value = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(0, "header value '" + key + "=" + s + "' is not an unsigned integer");
  }
  return value;
}

ParsedCsv parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  ParsedCsv csv;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (seen_header || csv.rows != 0) continue;
      seen_header = true;
      std::istringstream tokens(line.substr(1));
      std::string token;
      while (tokens >> token) {
        auto eq = token.find('=');
        if (eq != std::string::npos) csv.header[token.substr(0, eq)] = token.substr(eq + 1);
      }
      if (csv.header.count("n")) csv.dim = header_uint(csv, "n");
      continue;
    }
    const std::size_t row_index = csv.rows + 1;
    std::size_t fields = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const char* first = p;
      while (first < comma && *first == ' ') ++first;
      auto [ptr, ec] = std::from_chars(first, comma, v);
      if (ec != std::errc() || ptr != comma) {
        throw ParseError(row_index, "field " + std::to_string(fields + 1) + " is not a number");
      }
      csv.values.push_back(v);
      ++fields;
      if (comma == end) break;
      p = comma + 1;
    }
    if (csv.dim == 0) {
      csv.dim = fields;
    } else if (fields != csv.dim) {
      throw ParseError(row_index, "has " + std::to_string(fields) + " fields, expected " +
                                      std::to_string(csv.dim));
    }
    ++csv.rows;
  }
  if (!seen_header) throw ParseError(0, "missing '# k=... n=...' header in '" + path.string() + "'");
  if (csv.rows == 0) throw ParseError(0, "'" + path.string() + "' contains no rows");
  const auto n = header_uint(csv, "n");
  const auto k = header_uint(csv, "k");
  if (csv.dim != n) {
    throw ParseError(1, "has " + std::to_string(csv.dim) + " fields, expected n=" + std::to_string(n));
  }
  if (csv.rows != k) {
    throw ParseError(csv.rows, "file has " + std::to_string(csv.rows) + " rows but header says k=" +
                                   std::to_string(k));
  }
  return csv;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void save_patterns(const std::filesystem::path& path, const PatternSet& patterns,
                   const std::string& extra_header) {
  auto out = open_for_write(path);
  out << "# k=" << patterns.k() << " n=" << patterns.n() << " seed=" << patterns.seed();
  if (!extra_header.empty()) out << ' ' << extra_header;
  out << '\n';
  write_rows(out, patterns);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

PatternSet load_patterns(const std::filesystem::path& path) {
  auto csv = parse_csv(path);
  const auto seed = csv.header.count("seed") ? header_uint(csv, "seed") : 0;
  std::string label = csv.header.count("label") ? csv.header["label"] : path.stem().string();
  return PatternSet(std::move(csv.values), csv.rows, csv.dim, std::move(label), seed);
}

void save_samples(const std::filesystem::path& path, const SampleSet& samples,
                  const std::string& extra_header) {
  auto out = open_for_write(path);
  out << "# k=" << samples.m() << " n=" << samples.n() << " seed=" << samples.seed()
      << " schedule_id=" << samples.schedule_id() << " source_k=" << samples.source_k();
  if (!extra_header.empty()) out << ' ' << extra_header;
  out << '\n';
  write_rows(out, samples);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

SampleSet load_samples(const std::filesystem::path& path) {
  auto csv = parse_csv(path);
  const auto seed = header_uint(csv, "seed");
  const auto source_k = header_uint(csv, "source_k");
  auto it = csv.header.find("schedule_id");
  if (it == csv.header.end()) throw ParseError(0, "header is missing 'schedule_id='");
  return SampleSet(std::move(csv.values), csv.rows, csv.dim, source_k, it->second, seed);
}

}  // namespace densemem
