#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "postadc/errors.hpp"
#include "postadc/harness.hpp"
#include "postadc/rng.hpp"

namespace postadc {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    cells.push_back(cell.substr(b));
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("load_real_csv: non-numeric cell at " + where + ": '" +
                      cell + "'");
  }
}

}  // namespace

RealDataset load_real_csv(const std::string& path,
                          const std::vector<std::string>& feature_columns,
                          const std::string& response_column,
                          int max_candidates, std::uint64_t seed) {
  if (feature_columns.empty()) {
    throw ConfigError("load_real_csv: no feature columns given");
  }
  if (max_candidates < 1) {
    throw ConfigError("load_real_csv: max_candidates must be >= 1");
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("load_real_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("load_real_csv: empty file " + path);
  }
  const std::vector<std::string> header = split_row(line);
  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError("load_real_csv: missing column '" + name + "'");
    }
    return static_cast<int>(it - header.begin());
  };
  std::vector<int> feature_idx;
  for (const std::string& name : feature_columns) {
    feature_idx.push_back(column_index(name));
  }
  const int response_idx = column_index(response_column);
  const int d = static_cast<int>(feature_idx.size());

  std::vector<std::vector<double>> features;
  std::vector<double> responses;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_row(line);
    std::vector<double> row(d);
    for (int j = 0; j < d; ++j) {
      if (feature_idx[j] >= static_cast<int>(cells.size())) {
        throw ConfigError("load_real_csv: short row at line " +
                          std::to_string(lineno));
      }
      row[j] = parse_cell(cells[feature_idx[j]],
                          "line " + std::to_string(lineno));
    }
    if (response_idx >= static_cast<int>(cells.size())) {
      throw ConfigError("load_real_csv: short row at line " +
                        std::to_string(lineno));
    }
    features.push_back(std::move(row));
    responses.push_back(
        parse_cell(cells[response_idx], "line " + std::to_string(lineno)));
  }
  if (features.empty()) {
    throw ConfigError("load_real_csv: no data rows in " + path);
  }

  // Min-max rescale each feature over the whole file; a constant feature
  // maps to 0.
  for (int j = 0; j < d; ++j) {
    double lo = features[0][j], hi = features[0][j];
    for (const auto& row : features) {
      lo = std::min(lo, row[j]);
      hi = std::max(hi, row[j]);
    }
    for (auto& row : features) {
      row[j] = hi > lo ? (row[j] - lo) / (hi - lo) : 0.0;
    }
  }

  // Deduplicate feature vectors into candidates, keeping first-seen order.
  std::map<std::vector<double>, int> index_of;
  std::vector<std::vector<double>> candidate_rows;
  std::vector<std::vector<double>> grouped;
  for (std::size_t r = 0; r < features.size(); ++r) {
    auto [it, inserted] = index_of.try_emplace(
        features[r], static_cast<int>(candidate_rows.size()));
    if (inserted) {
      candidate_rows.push_back(features[r]);
      grouped.emplace_back();
    }
    grouped[it->second].push_back(responses[r]);
  }

  std::vector<int> keep(candidate_rows.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);
  if (static_cast<int>(candidate_rows.size()) > max_candidates) {
    SplitMix64 rng(seed);
    keep = sample_without_replacement(static_cast<int>(candidate_rows.size()),
                                      max_candidates, rng);
    std::sort(keep.begin(), keep.end());
  }

  RealDataset out;
  out.candidates.dim = d;
  out.candidates.points.resize(keep.size(), d);
  out.responses.resize(keep.size());
  int rows = 0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      out.candidates.points(i, j) = candidate_rows[keep[i]][j];
    }
    out.responses[i] = grouped[keep[i]];
    rows += static_cast<int>(out.responses[i].size());
  }
  out.total_rows = rows;
  return out;
}

}  // namespace postadc
