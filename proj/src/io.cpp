#include "spdgeo/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace spdgeo {

std::vector<Matrix> parse_matrix_blocks(std::istream& in) {
  std::vector<std::vector<std::vector<double>>> blocks;
  std::vector<std::vector<double>> current;
  std::string line;
  auto flush = [&]() {
    if (!current.empty()) {
      blocks.push_back(current);
      current.clear();
    }
  };
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw std::invalid_argument("matrix parse: non-numeric token in '" + line + "'");
    if (row.empty()) {
      flush();
    } else {
      current.push_back(row);
    }
  }
  flush();
  if (blocks.empty()) throw std::invalid_argument("matrix parse: no data");

  const size_t n = blocks.front().size();
  std::vector<Matrix> out;
  for (const auto& b : blocks) {
    if (b.size() != n) {
      throw std::invalid_argument("matrix parse: block with " + std::to_string(b.size()) +
                                  " rows, expected " + std::to_string(n));
    }
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) {
      if (b[i].size() != n) {
        throw std::invalid_argument("matrix parse: row with " + std::to_string(b[i].size()) +
                                    " entries, expected " + std::to_string(n));
      }
      for (size_t j = 0; j < n; ++j) m(i, j) = b[i][j];
    }
    out.push_back(m);
  }
  return out;
}

std::vector<Matrix> read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file '" + path + "'");
  return parse_matrix_blocks(in);
}

std::string format_scalar(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string format_matrix(const Matrix& m, int precision) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_scalar(m(i, j), precision);
    }
    out += '\n';
  }
  return out;
}

namespace {

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key, double dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  size_t pos = 0;
  const double v = std::stod(it->second, &pos);
  if (pos != it->second.size()) {
    throw std::invalid_argument("metric spec: bad numeric value for '" + key + "'");
  }
  return v;
}

std::string kv_str(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

}  // namespace

ParsedMetric parse_metric(const std::string& spec) {
  ParsedMetric pm;
  pm.spec = spec;
  const size_t colon = spec.find(':');
  pm.family = spec.substr(0, colon);
  if (colon != std::string::npos) {
    std::istringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const size_t eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("metric spec: expected key=value, got '" + item + "'");
      }
      pm.kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }

  const double alpha = kv_num(pm.kv, "alpha", 1.0);
  const double beta = kv_num(pm.kv, "beta", 0.0);
  if (pm.family == "e" || pm.family == "euclidean") {
    pm.id = MetricId::euclidean(alpha, beta);
  } else if (pm.family == "le" || pm.family == "log_euclidean") {
    pm.id = MetricId::log_euclidean(alpha, beta);
  } else if (pm.family == "ai" || pm.family == "affine_invariant") {
    pm.id = MetricId::affine_invariant(alpha, beta);
  } else if (pm.family == "bw" || pm.family == "bures_wasserstein") {
    pm.id = MetricId::bures_wasserstein();
  } else if (pm.family == "bkm") {
    pm.id = MetricId::bkm();
  } else if (pm.family == "pa" || pm.family == "polar_affine") {
    pm.id = MetricId::polar_affine(alpha, beta);
  } else if (pm.family == "kernel" || pm.family == "bost" || pm.family == "mean" ||
             pm.family == "sep") {
    // validated lazily in model()/triple()
  } else {
    throw std::invalid_argument("metric spec: unknown family '" + pm.family + "'");
  }
  return pm;
}

namespace {

SeparableSpec separable_from_kv(const std::map<std::string, std::string>& kv) {
  const KernelSpec base = builtin_kernel(kv_str(kv, "psi", "affine_invariant"));
  const double c1 = kv_num(kv, "c1", 0.5), q1 = kv_num(kv, "q1", 0.0);
  const double c2 = kv_num(kv, "c2", 0.5), q2 = kv_num(kv, "q2", 0.0);
  const BivariateFn phi = base.phi;
  return SeparableSpec{
      [phi](double x, double y) { return 1.0 / std::sqrt(phi(x, y)); },
      [c1, q1](double t) { return c1 * std::pow(t, q1); },
      [c2, q2](double t) { return c2 * std::pow(t, q2); },
      "sep(" + base.name + ")"};
}

}  // namespace

MetricModelPtr ParsedMetric::model(Index n) const {
  if (id) return make_model(*id, n);
  if (family == "kernel") {
    return make_model(builtin_kernel(kv_str(kv, "name", "affine_invariant")), n);
  }
  if (family == "bost") {
    return make_model(BostSpec(builtin_kernel(kv_str(kv, "name", "affine_invariant")),
                               kv_num(kv, "alpha", 1.0), kv_num(kv, "beta", 0.0), n));
  }
  if (family == "mean") {
    MeanKernelSpec mk;
    mk.mean_name = kv_str(kv, "m", "geometric");
    mk.m = builtin_mean(mk.mean_name);
    mk.theta = kv_num(kv, "theta", 2.0);
    mk.a = kv_num(kv, "a", 1.0);
    return make_model(mk.to_kernel(), n);
  }
  if (family == "sep") {
    return make_model(separable_from_kv(kv), n);
  }
  throw std::invalid_argument("metric spec: no model for family '" + family + "'");
}

MetricTriple ParsedMetric::triple(Index n) const {
  if (id) {
    switch (id->kind) {
      case MetricKind::BuresWasserstein:
        return triple_from_kernel(builtin_kernel("bures_wasserstein"), n);
      case MetricKind::Bkm:
        return triple_from_kernel(builtin_kernel("bkm"), n);
      case MetricKind::Euclidean:
        return triple_from_bost(BostSpec(builtin_kernel("euclidean"), id->alpha(), id->beta(), n));
      case MetricKind::LogEuclidean:
        return triple_from_bost(
            BostSpec(builtin_kernel("log_euclidean"), id->alpha(), id->beta(), n));
      case MetricKind::AffineInvariant:
        return triple_from_bost(
            BostSpec(builtin_kernel("affine_invariant"), id->alpha(), id->beta(), n));
      case MetricKind::PolarAffine:
        return triple_from_bost(
            BostSpec(pullback_kernel(builtin_kernel("affine_invariant"), fn_pow(2.0)),
                     id->alpha(), id->beta(), n));
    }
  }
  if (family == "kernel") {
    return triple_from_kernel(builtin_kernel(kv_str(kv, "name", "affine_invariant")), n);
  }
  if (family == "bost") {
    return triple_from_bost(BostSpec(builtin_kernel(kv_str(kv, "name", "affine_invariant")),
                                     kv_num(kv, "alpha", 1.0), kv_num(kv, "beta", 0.0), n));
  }
  if (family == "mean") {
    MeanKernelSpec mk;
    mk.mean_name = kv_str(kv, "m", "geometric");
    mk.m = builtin_mean(mk.mean_name);
    mk.theta = kv_num(kv, "theta", 2.0);
    mk.a = kv_num(kv, "a", 1.0);
    return triple_from_kernel(mk.to_kernel(), n);
  }
  if (family == "sep") {
    return triple_from_separable(separable_from_kv(kv), n);
  }
  throw std::invalid_argument("metric spec: no triple for family '" + family + "'");
}

unsigned long long sampling_seed() {
  if (const char* env = std::getenv("SPDGEO_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0xC0FFEEULL;
}

}  // namespace spdgeo
