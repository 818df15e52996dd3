// Text interchange: whitespace-separated matrix blocks, fixed-precision
// formatting, and the metric mini-grammar "kind:key=val,...".
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spdgeo/metric_model.hpp"

namespace spdgeo {

// One matrix per block, rows on consecutive lines, blocks separated by blank
// lines; the dimension is inferred from the first block. Throws
// std::invalid_argument on malformed input.
std::vector<Matrix> parse_matrix_blocks(std::istream& in);
std::vector<Matrix> read_matrix_file(const std::string& path);

// Fixed-point with `precision` decimals; entries separated by single spaces,
// one row per line.
std::string format_scalar(double v, int precision);
std::string format_matrix(const Matrix& m, int precision);

// Parsed form of a metric specification string. Classical selectors
// ("e", "le", "ai", "bw", "bkm", "pa", with optional alpha/beta) expose a
// MetricId for closed-form operations; kernel-family forms ("kernel:",
// "bost:", "mean:", "sep:") only build models and triples.
struct ParsedMetric {
  std::string spec;
  std::optional<MetricId> id;

  MetricModelPtr model(Index n) const;
  MetricTriple triple(Index n) const;

  // implementation detail of the grammar
  std::string family;
  std::map<std::string, std::string> kv;
};

ParsedMetric parse_metric(const std::string& spec);

// Seed for randomized validation sampling: SPDGEO_SEED when set, else a fixed
// default.
unsigned long long sampling_seed();

}  // namespace spdgeo
