/**
 * Copyright 2026 The hetcv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/// @file io.hpp
/// @brief State specs, sample files and JSON reports.
///
/// State spec: {"cutoff": E, "amplitudes": [[re, im], ...]} or
/// {"cutoff": E, "matrix": [[[re, im], ...], ...]} (row-major).
/// Sample file: one "re im" pair per line at 17 significant digits.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>

#include <json.hpp>

#include "hetcv/certify.hpp"
#include "hetcv/errors.hpp"
#include "hetcv/fock.hpp"
#include "hetcv/heterodyne.hpp"
#include "hetcv/tomography.hpp"

namespace hetcv {

using json = nlohmann::json;
using StateSpec = std::variant<FockVector, DensityMatrix>;

namespace detail {

// 1-based line of the first occurrence of "key" in text, 0 if absent.
inline std::size_t line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string_view::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n'));
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

inline json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed JSON at line " + std::to_string(line_of_offset(text, off)) + ": " + e.what(),
                     line_of_offset(text, off));
  }
}

class SpecReader {
 public:
  explicit SpecReader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    const auto line = line_of_key(text_, field);
    throw ParseError("field '" + field + "'" + (line ? " (line " + std::to_string(line) + ")" : "") + ": " + msg,
                     line, field);
  }

  cplx number(const json& j, const std::string& field) const {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return {j[0].get<double>(), j[1].get<double>()};
    fail(field, "expected [re, im], got " + j.dump());
  }

  int cutoff(const json& root) const {
    if (!root.contains("cutoff")) fail("cutoff", "missing");
    const auto& c = root["cutoff"];
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) fail("cutoff", "must be a non-negative integer");
    if (c.get<std::int64_t>() > kMaxCoherentIndex) fail("cutoff", "exceeds " + std::to_string(kMaxCoherentIndex));
    return c.get<int>();
  }

  CVector vector(const json& root, const std::string& field, int cutoff) const {
    const auto& a = root[field];
    if (!a.is_array() || a.size() != static_cast<std::size_t>(cutoff + 1))
      fail(field, "expected an array of cutoff + 1 = " + std::to_string(cutoff + 1) + " entries");
    CVector v(cutoff + 1);
    for (int i = 0; i <= cutoff; ++i) v[i] = number(a[i], field);
    return v;
  }

  CMatrix matrix(const json& root, const std::string& field, int cutoff) const {
    const auto& a = root[field];
    const auto dim = static_cast<std::size_t>(cutoff + 1);
    if (!a.is_array() || a.size() != dim)
      fail(field, "expected " + std::to_string(dim) + " rows");
    CMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!a[i].is_array() || a[i].size() != dim)
        fail(field, "row " + std::to_string(i) + " must have " + std::to_string(dim) + " entries");
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = number(a[i][j], field);
    }
    return m;
  }

 private:
  std::string_view text_;
};

}  // namespace detail

/// Parses a state spec. Exactly one of "amplitudes" and "matrix" must be
/// present. Invariant violations raise ValidationError with the residual.
inline StateSpec parse_state_spec(std::string_view text) {
  const json root = detail::parse_json_text(text);
  const detail::SpecReader rd(text);
  if (!root.is_object()) throw ParseError("state spec must be a JSON object", 1);
  const int e = rd.cutoff(root);
  const bool has_amp = root.contains("amplitudes");
  const bool has_mat = root.contains("matrix");
  if (has_amp == has_mat) rd.fail(has_amp ? "matrix" : "amplitudes", "need exactly one of amplitudes/matrix");
  if (has_amp) return FockVector(rd.vector(root, "amplitudes", e));
  return DensityMatrix(rd.matrix(root, "matrix", e));
}

/// Parses an operator spec {"cutoff": E, "matrix": [...]}.
inline FockOperator parse_operator_spec(std::string_view text) {
  const json root = detail::parse_json_text(text);
  const detail::SpecReader rd(text);
  if (!root.is_object()) throw ParseError("operator spec must be a JSON object", 1);
  const int e = rd.cutoff(root);
  if (!root.contains("matrix")) rd.fail("matrix", "missing");
  return FockOperator(rd.matrix(root, "matrix", e));
}

inline DensityMatrix as_density_matrix(const StateSpec& spec) {
  if (const auto* v = std::get_if<FockVector>(&spec)) return DensityMatrix::pure(*v);
  return std::get<DensityMatrix>(spec);
}

/// Target states must be pure.
inline FockVector as_pure_target(const StateSpec& spec) {
  if (const auto* v = std::get_if<FockVector>(&spec)) return *v;
  throw ValidationError("target state must be given by amplitudes (a pure state)");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ParameterError("write failed for '" + path + "'");
}

inline StateSpec load_state_spec(const std::string& path) { return parse_state_spec(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Samples

inline std::string format_samples(std::span<const HeterodyneSample> samples) {
  std::string out;
  out.reserve(samples.size() * 48);
  char buf[80];
  for (const auto& s : samples) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g %.17g\n", s.value.real(), s.value.imag());
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

/// Parses sample text; blank lines are skipped, anything else must be two
/// decimal floats.
inline SampleList parse_samples(std::string_view text) {
  SampleList out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const char* p = line.data();
    const char* const last = line.data() + line.size();
    while (p < last && is_space(*p)) ++p;
    if (p == last) continue;
    double v[2];
    for (int f = 0; f < 2; ++f) {
      while (p < last && is_space(*p)) ++p;
      const auto [ptr, ec] = std::from_chars(p, last, v[f]);
      if (ec != std::errc() || (ptr < last && !is_space(*ptr)))
        throw ParseError("sample line " + std::to_string(line_no) + ": expected two floats, got '" +
                             std::string(line) + "'",
                         line_no, f == 0 ? "re" : "im");
      p = ptr;
    }
    while (p < last && is_space(*p)) ++p;
    if (p != last)
      throw ParseError("sample line " + std::to_string(line_no) + ": trailing text", line_no);
    out.push_back({cplx(v[0], v[1])});
  }
  return out;
}

inline void write_samples(const std::string& path, std::span<const HeterodyneSample> samples) {
  write_text_file(path, format_samples(samples));
}

inline SampleList read_samples(const std::string& path) { return parse_samples(read_text_file(path)); }

// ---------------------------------------------------------------------------
// JSON encoders

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(cplx(m(i, j))));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(cplx(v[i])));
  return a;
}

inline json state_to_json(const StateSpec& spec) {
  if (const auto* v = std::get_if<FockVector>(&spec))
    return {{"cutoff", v->cutoff()}, {"amplitudes", to_json(v->amplitudes())}};
  const auto& r = std::get<DensityMatrix>(spec);
  return {{"cutoff", r.cutoff()}, {"matrix", to_json(r.entries())}};
}

inline json to_json(const ProbabilityBudget& b) {
  json terms = json::object();
  for (const auto& t : b.terms)
    terms[t.name] = {{"log", t.log_value}, {"clamped", clamp_probability(t.log_value)}};
  return {{"terms", terms}, {"total_log", b.total_log}, {"total_clamped", b.total_clamped},
          {"vacuous", b.vacuous}};
}

inline json to_json(const TomographyReport& r) {
  return {{"cutoff", r.cutoff()},
          {"estimates", to_json(r.estimates)},
          {"eps", r.epsilon},
          {"eps_prime", r.epsilon_prime},
          {"confidence_radius", r.confidence_radius},
          {"failure_log_prob", r.failure_log_prob},
          {"failure_probability", r.failure_probability()},
          {"sample_count", r.sample_count},
          {"hermitized", r.hermitized}};
}

inline json to_json(const CertificationParams& p) {
  return {{"n", p.n}, {"m", p.m}, {"s", p.s}, {"E", p.E}, {"eps", p.eps}, {"eps_prime", p.eps_prime}};
}

inline json to_json(const VerificationParams& p) {
  return {{"n", p.n}, {"k", p.k}, {"q", p.q}, {"m", p.m}, {"s", p.s},
          {"E", p.E}, {"eps", p.eps}, {"eps_prime", p.eps_prime}};
}

inline json to_json(const CertificationReport& r) {
  return {{"params", to_json(r.params)}, {"r", r.r},
          {"passed", r.passed},          {"base_mean", r.base_mean},
          {"fidelity_estimate", r.fidelity_estimate},
          {"radius", r.radius},          {"eta", r.eta},
          {"K_psi", r.k_psi},            {"log_C_psi", r.log_c_psi},
          {"budget", to_json(r.budget)}};
}

inline json to_json(const VerificationReport& r) {
  return {{"params", to_json(r.params)}, {"r", r.r},
          {"passed", r.passed},          {"base_mean", r.base_mean},
          {"fidelity_estimate", r.fidelity_estimate},
          {"radius", r.radius},          {"eta", r.eta},
          {"K_psi", r.k_psi},            {"log_C_psi", r.log_c_psi},
          {"budget", to_json(r.budget)}};
}

/// Reads back a matrix written by to_json(CMatrix).
inline CMatrix matrix_from_json(const json& rows) {
  const auto dim = static_cast<Eigen::Index>(rows.size());
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = cplx(rows[i][j][0].get<double>(), rows[i][j][1].get<double>());
  return m;
}

}  // namespace hetcv
