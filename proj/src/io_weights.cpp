/*
 * Copyright 2026 The epialign Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "io.hpp"

namespace epialign::io {

namespace {

constexpr const char* kWeightsHeader =
    "pair_index,corr_index,frame_i,frame_j,residual_px,density,weight";

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseCsvNumber(const std::string& token, std::size_t line_no,
                      const std::string& column) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (token.empty() || *end != '\0') {
    throw Error(ErrorCode::kParseError,
                "weights CSV line " + std::to_string(line_no) + ": bad " + column +
                    " '" + token + "'");
  }
  return value;
}

}  // namespace

void SaveWeightsCsv(const MatchSet& matches, std::span<const double> residuals,
                    const ResidualHistogram* histogram,
                    const WeightTable& weights, const std::filesystem::path& path) {
  const std::size_t total = matches.TotalCorrespondences();
  if (weights.weights.size() != total || (!residuals.empty() && residuals.size() != total)) {
    throw Error(ErrorCode::kInvalidArgument,
                "weights table does not cover the match set");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "' for writing");
  }
  out << kWeightsHeader << "\n";
  char buffer[160];
  std::size_t flat = 0;
  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    const PairMatches& pair = matches.pairs[p];
    for (std::size_t c = 0; c < pair.correspondences.size(); ++c, ++flat) {
      const double residual = residuals.empty() ? std::nan("") : residuals[flat];
      const double density = histogram && std::isfinite(residual)
                                 ? histogram->Density(residual)
                                 : std::nan("");
      std::snprintf(buffer, sizeof(buffer), "%zu,%zu,%zu,%zu,%.17g,%.17g,%.17g\n", p, c,
                    std::size_t{pair.frame_i}, std::size_t{pair.frame_j}, residual, density,
                    weights.weights[flat]);
      out << buffer;
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
}

WeightTable LoadWeightsCsv(const std::filesystem::path& path, const MatchSet& matches) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParseError, path.string() + ": empty weights CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitCsv(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t k = 0; k < header.size(); ++k) column[header[k]] = k;
  for (const char* required : {"pair_index", "corr_index", "weight"}) {
    if (!column.count(required)) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": weights CSV lacks column '" + required + "'");
    }
  }

  std::vector<std::size_t> offsets(matches.pairs.size() + 1, 0);
  for (std::size_t p = 0; p < matches.pairs.size(); ++p) {
    offsets[p + 1] = offsets[p] + matches.pairs[p].correspondences.size();
  }
  WeightTable table;
  table.weights.assign(offsets.back(), 0.0);
  std::vector<bool> seen(offsets.back(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitCsv(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    const double p_raw = ParseCsvNumber(fields[column["pair_index"]], line_no, "pair_index");
    const double c_raw = ParseCsvNumber(fields[column["corr_index"]], line_no, "corr_index");
    const double w = ParseCsvNumber(fields[column["weight"]], line_no, "weight");
    if (p_raw < 0 || p_raw >= double(matches.pairs.size()) || p_raw != std::floor(p_raw)) {
      throw Error(ErrorCode::kFrameMismatch,
                  path.string() + ": line " + std::to_string(line_no) +
                      " references pair " + fields[column["pair_index"]] +
                      " outside the match set");
    }
    const auto p = static_cast<std::size_t>(p_raw);
    const PairMatches& pair = matches.pairs[p];
    if (c_raw < 0 || c_raw >= double(pair.correspondences.size()) ||
        c_raw != std::floor(c_raw)) {
      throw Error(ErrorCode::kFrameMismatch,
                  path.string() + ": line " + std::to_string(line_no) +
                      " references correspondence " + fields[column["corr_index"]] +
                      " outside pair " + std::to_string(p));
    }
    for (const char* name : {"frame_i", "frame_j"}) {
      if (!column.count(name)) continue;
      const double f = ParseCsvNumber(fields[column[name]], line_no, name);
      const std::size_t expected = name[6] == 'i' ? pair.frame_i : pair.frame_j;
      if (f != double(expected)) {
        throw Error(ErrorCode::kFrameMismatch,
                    path.string() + ": line " + std::to_string(line_no) + " " + name +
                        " disagrees with the match file");
      }
    }
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": line " + std::to_string(line_no) +
                      ": weight must be finite and non-negative");
    }
    const std::size_t flat = offsets[p] + static_cast<std::size_t>(c_raw);
    if (seen[flat]) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ": line " + std::to_string(line_no) +
                      " duplicates an earlier row");
    }
    seen[flat] = true;
    table.weights[flat] = w;
  }
  return table;
}

void SaveHistogramCsv(const ResidualHistogram& histogram,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "' for writing");
  }
  out << "bin,lower_px,upper_px,count,density\n";
  char buffer[128];
  for (std::size_t b = 0; b < histogram.n_bins(); ++b) {
    std::snprintf(buffer, sizeof(buffer), "%zu,%.17g,%.17g,%zu,%.17g\n", b,
                  histogram.bin_edges[b], histogram.bin_edges[b + 1],
                  histogram.counts[b], histogram.densities[b]);
    out << buffer;
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
}

}  // namespace epialign::io
