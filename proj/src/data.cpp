// Copyright (C) 2026 The TAL Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tal/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include "tal/error.hpp"

namespace tal {

namespace {

using Rng = std::mt19937_64;

Vector random_unit(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Rejection-samples `count` centers on the sphere of radius `separation`
// with pairwise distance at least `separation`.
std::vector<Vector> draw_centers(Rng& rng, std::size_t count, std::size_t dim, double separation) {
  constexpr int kMaxAttempts = 100000;
  std::vector<Vector> centers;
  int attempts = 0;
  while (centers.size() < count) {
    if (++attempts > kMaxAttempts) {
      throw InvalidInputError("cannot place " + std::to_string(count) +
                              " well-separated centers in " + std::to_string(dim) + " dimensions");
    }
    Vector c = random_unit(rng, dim);
    for (double& x : c) x *= separation;
    const bool ok = std::all_of(centers.begin(), centers.end(),
                                [&](const Vector& o) { return distance(c, o) >= separation; });
    if (ok) centers.push_back(std::move(c));
  }
  return centers;
}

// center + spread * z with |z| <= kTruncationRadius.
Vector draw_around(Rng& rng, const Vector& center, double spread) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(center.size());
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : z) {
      x = normal(rng);
      norm2 += x * x;
    }
  } while (norm2 > kTruncationRadius * kTruncationRadius);
  Vector out(center);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += spread * z[i];
  return out;
}

std::string make_id(std::string_view prefix, std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return std::string(prefix) + digits;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// In-distribution draws: an exact share of atypical samples at shuffled
// positions, the rest typical.
void draw_in_distribution(Rng& rng, const DatasetSpec& spec, const std::vector<Vector>& centers,
                          std::size_t n, std::string_view prefix, Dataset& out,
                          std::vector<SampleOrigin>* origin) {
  const auto n_atypical =
      static_cast<std::size_t>(std::llround(spec.atypical_fraction * static_cast<double>(n)));
  std::vector<bool> atypical(n, false);
  std::fill(atypical.begin(), atypical.begin() + static_cast<std::ptrdiff_t>(n_atypical), true);
  std::shuffle(atypical.begin(), atypical.end(), rng);

  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = make_id(prefix, i);
    s.domain = Domain::kId;
    SampleOrigin o;
    if (atypical[i]) {
      const std::size_t a = uniform_index(rng, spec.n_classes);
      std::size_t b = uniform_index(rng, spec.n_classes - 1);
      if (b >= a) ++b;
      Vector mid(spec.feature_dim);
      for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (centers[a][k] + centers[b][k]);
      s.x = draw_around(rng, mid, spec.spread);
      s.label = std::bernoulli_distribution(0.5)(rng) ? a : b;
      o = {true, a, b};
    } else {
      const std::size_t c = uniform_index(rng, spec.n_classes);
      s.x = draw_around(rng, centers[c], spec.spread);
      s.label = c;
      o = {false, c, c};
    }
    out.samples.push_back(std::move(s));
    if (origin) origin->push_back(o);
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::size_t Dataset::count(Domain d) const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [d](const Sample& s) { return s.domain == d; }));
}

void DatasetSpec::validate() const {
  if (n_classes < 2) throw InvalidInputError("need at least 2 classes");
  if (feature_dim < 1) throw InvalidInputError("feature_dim must be positive");
  if (train_size < 1 || test_size < 1) throw InvalidInputError("split sizes must be positive");
  if (!(atypical_fraction >= 0.0 && atypical_fraction < 1.0)) {
    throw InvalidInputError("atypical_fraction must be in [0, 1)");
  }
  if (!(separation > 0.0 && std::isfinite(separation))) {
    throw InvalidInputError("separation must be positive");
  }
  if (!(spread > 0.0 && std::isfinite(spread))) throw InvalidInputError("spread must be positive");
  if (!(covariate_noise >= 0.0 && std::isfinite(covariate_noise))) {
    throw InvalidInputError("covariate_noise must be non-negative");
  }
  if (n_semantic_classes < 1) throw InvalidInputError("need at least one semantic cluster");
}

GeneratedBenchmark generate(const DatasetSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  GeneratedBenchmark out;
  std::vector<Vector> centers =
      draw_centers(rng, spec.n_classes + spec.n_semantic_classes, spec.feature_dim, spec.separation);
  out.class_centers.assign(centers.begin(),
                           centers.begin() + static_cast<std::ptrdiff_t>(spec.n_classes));
  out.semantic_centers.assign(centers.begin() + static_cast<std::ptrdiff_t>(spec.n_classes),
                              centers.end());

  // Fixed covariate distortion: shrink toward the origin and shift along one
  // direction by one spread.
  constexpr double kCovariateScale = 0.9;
  Vector shift = random_unit(rng, spec.feature_dim);
  for (double& v : shift) v *= spec.spread;

  out.train.feature_dim = spec.feature_dim;
  out.test.feature_dim = spec.feature_dim;
  draw_in_distribution(rng, spec, out.class_centers, spec.train_size, "tr", out.train,
                       &out.train_origin);
  draw_in_distribution(rng, spec, out.class_centers, spec.test_size, "id", out.test, nullptr);

  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < spec.test_size; ++i) {
    const std::size_t c = uniform_index(rng, spec.n_classes);
    Sample s;
    s.id = make_id("cv", i);
    s.domain = Domain::kCovariate;
    s.label = c;
    s.x = draw_around(rng, out.class_centers[c], spec.spread);
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      s.x[k] = kCovariateScale * s.x[k] + shift[k] + spec.covariate_noise * normal(rng);
    }
    out.test.samples.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < spec.test_size; ++i) {
    const std::size_t c = uniform_index(rng, spec.n_semantic_classes);
    Sample s;
    s.id = make_id("se", i);
    s.domain = Domain::kSemantic;
    s.x = draw_around(rng, out.semantic_centers[c], spec.spread);
    out.test.samples.push_back(std::move(s));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Dataset& data) {
  std::string out = "id,label,domain";
  for (std::size_t k = 0; k < data.feature_dim; ++k) out += ",x" + std::to_string(k);
  out += '\n';
  for (const Sample& s : data.samples) {
    out += s.id;
    out += ',';
    if (s.label) out += std::to_string(*s.label);
    out += ',';
    out += domain_name(s.domain);
    for (double v : s.x) {
      out += ',';
      out += format_double17(v);
    }
    out += '\n';
  }
  return out;
}

void export_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  const std::string text = to_csv(data);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("failed writing " + path.string());
}

Dataset parse_csv(const std::string& text, std::optional<std::size_t> expected_dim) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string_view> header = split(line, ',');
  if (header.size() < 4 || header[0] != "id" || header[1] != "label" || header[2] != "domain") {
    throw ParseError("header must start with id,label,domain and have feature columns", line_no);
  }
  Dataset out;
  out.feature_dim = header.size() - 3;
  for (std::size_t k = 0; k < out.feature_dim; ++k) {
    if (header[3 + k] != "x" + std::to_string(k)) {
      throw ParseError("expected feature column x" + std::to_string(k), line_no);
    }
  }
  if (expected_dim && *expected_dim != out.feature_dim) {
    throw ParseError("header has " + std::to_string(out.feature_dim) + " features, expected " +
                         std::to_string(*expected_dim),
                     line_no);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> f = split(line, ',');
    if (f.size() != header.size()) {
      throw ParseError("expected " + std::to_string(out.feature_dim) + " features, found " +
                           std::to_string(f.size() >= 3 ? f.size() - 3 : 0),
                       line_no);
    }
    Sample s;
    s.id = std::string(f[0]);
    if (s.id.empty()) throw ParseError("empty id", line_no);
    try {
      s.domain = parse_domain(f[2]);
    } catch (const InvalidInputError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!f[1].empty()) {
      std::size_t label = 0;
      const auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), label);
      if (res.ec != std::errc() || res.ptr != f[1].data() + f[1].size()) {
        throw ParseError("non-integer label '" + std::string(f[1]) + "'", line_no);
      }
      s.label = label;
    }
    if (s.domain == Domain::kSemantic && s.label) {
      throw ParseError("semantic-shift row must not carry a label", line_no);
    }
    if (s.domain != Domain::kSemantic && !s.label) {
      throw ParseError("labelled domain row is missing its label", line_no);
    }
    s.x.resize(out.feature_dim);
    for (std::size_t k = 0; k < out.feature_dim; ++k) {
      const std::string_view cell = f[3 + k];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), s.x[k]);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(s.x[k])) {
        throw ParseError("non-numeric feature '" + std::string(cell) + "' in column x" +
                             std::to_string(k),
                         line_no);
      }
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

Dataset import_csv(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), expected_dim);
}

}  // namespace tal
