// Copyright 2026 The gnslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON documents. Complex matrices are lists of rows of [re, im] pairs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnslab/cstar.hpp"
#include "gnslab/errors.hpp"
#include "gnslab/gns.hpp"
#include "gnslab/linalg.hpp"
#include "gnslab/nc_examples.hpp"
#include "gnslab/quasi_algebra.hpp"
#include "gnslab/report.hpp"
#include "gnslab/sesq_map.hpp"

namespace gnslab {

using Json = nlohmann::json;  // NOLINT

inline constexpr const char* kFormatVersion = "gnslab-1";

namespace io {

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ParseError((where.empty() ? "/" : where) + ": " + what);
}

inline const Json& need(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, "missing key '" + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

inline bool boolean(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected a boolean");
  return j.get<bool>();
}

inline void check_version(const Json& j, const std::string& where) {
  if (j.contains("version") && j["version"] != kFormatVersion)
    fail(where + "/version", "unsupported version");
}

// Keeps -0.0 out of the output.
inline double clean(double x) { return x == 0.0 ? 0.0 : x; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices

inline Json to_json(cplx z) { return Json::array({detail::clean(z.real()), detail::clean(z.imag())}); }

inline cplx complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) detail::fail(where, "expected [re, im]");
  return {detail::number(j[0], where + "/0"), detail::number(j[1], where + "/1")};
}

inline Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline Vec vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) detail::fail(where, "expected a list");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], where + "/" + std::to_string(i));
  return v;
}

inline Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) detail::fail(where, "expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Mat(0, 0);
  if (!j[0].is_array()) detail::fail(where + "/0", "expected a row");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string wr = where + "/" + std::to_string(r);
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) detail::fail(wr, "ragged row");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], wr + "/" + std::to_string(c));
  }
  return m;
}

// ---------------------------------------------------------------------------
// C*-algebras and elements

inline Json to_json(const CStarAlgebra& c) {
  return Json{{"version", kFormatVersion}, {"block_dims", c.block_dims()}};
}

inline CStarAlgebra algebra_from_json(const Json& j, const std::string& where = "") {
  detail::check_version(j, where);
  const Json& dims = detail::need(j, "block_dims", where);
  if (!dims.is_array() || dims.empty()) detail::fail(where + "/block_dims", "expected a non-empty list");
  std::vector<int> d;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const int n = detail::integer(dims[i], where + "/block_dims/" + std::to_string(i));
    if (n < 1) detail::fail(where + "/block_dims/" + std::to_string(i), "block size must be >= 1");
    d.push_back(n);
  }
  return CStarAlgebra(d);
}

inline Json to_json(const AlgebraElement& z) {
  Json blocks = Json::array();
  for (const auto& b : z.blocks) blocks.push_back(matrix_to_json(b));
  return Json{{"blocks", blocks}};
}

inline AlgebraElement element_from_json(const Json& j, const CStarAlgebra& c, const std::string& where) {
  const Json& blocks = detail::need(j, "blocks", where);
  if (!blocks.is_array() || static_cast<int>(blocks.size()) != c.num_blocks())
    detail::fail(where + "/blocks", "expected " + std::to_string(c.num_blocks()) + " blocks");
  AlgebraElement z;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string wk = where + "/blocks/" + std::to_string(k);
    Mat b = matrix_from_json(blocks[k], wk);
    const int n = c.block_dim(static_cast<int>(k));
    if (b.rows() != n || b.cols() != n) detail::fail(wk, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " block");
    z.blocks.push_back(std::move(b));
  }
  return z;
}

// ---------------------------------------------------------------------------
// Quasi *-algebras

inline Json to_json(const NormSpec& n) {
  if (n.kind == NormKind::Operator) return Json{{"kind", "operator"}};
  Json out{{"kind", "schatten"}, {"p", n.p}};
  if (n.trace_scale) out["scale"] = *n.trace_scale;
  return out;
}

inline NormSpec norm_from_json(const Json& j, const std::string& where) {
  const Json& k = detail::need(j, "kind", where);
  if (k == "operator") return NormSpec::op();
  if (k == "schatten") {
    const double p = j.contains("p") ? detail::number(j["p"], where + "/p") : 2.0;
    if (!(p >= 1.0)) detail::fail(where + "/p", "Schatten exponent must be >= 1");
    std::optional<double> s;
    if (j.contains("scale")) s = detail::number(j["scale"], where + "/scale");
    return NormSpec::schatten(p, s);
  }
  detail::fail(where + "/kind", "unknown norm kind");
}

inline Json to_json(const QuasiStarAlgebra& q) {
  Json basis = Json::array();
  for (const auto& e : q.basis()) basis.push_back(matrix_to_json(e));
  Json out{{"version", kFormatVersion}, {"ambient_dim", q.ambient_dim()}, {"basis", basis},
           {"a0_indices", q.a0_indices()}};
  if (q.unital()) out["unit_coeffs"] = to_json(*q.unit_coeffs());
  Json norms = Json::object();
  if (q.norm_a_spec()) norms["A"] = to_json(*q.norm_a_spec());
  if (q.norm_a0_spec()) norms["A0"] = to_json(*q.norm_a0_spec());
  if (!norms.empty()) out["norms"] = norms;
  return out;
}

inline QuasiAlgebraPtr quasi_from_json(const Json& j, const std::string& where = "") {
  detail::check_version(j, where);
  const int m = detail::integer(detail::need(j, "ambient_dim", where), where + "/ambient_dim");
  if (m < 1) detail::fail(where + "/ambient_dim", "must be >= 1");
  const Json& b = detail::need(j, "basis", where);
  if (!b.is_array()) detail::fail(where + "/basis", "expected a list");
  std::vector<Mat> basis;
  for (std::size_t i = 0; i < b.size(); ++i) basis.push_back(matrix_from_json(b[i], where + "/basis/" + std::to_string(i)));
  std::vector<int> a0;
  const Json& ai = detail::need(j, "a0_indices", where);
  if (!ai.is_array()) detail::fail(where + "/a0_indices", "expected a list");
  for (std::size_t i = 0; i < ai.size(); ++i) a0.push_back(detail::integer(ai[i], where + "/a0_indices/" + std::to_string(i)));
  std::optional<Vec> unit;
  if (j.contains("unit_coeffs") && !j["unit_coeffs"].is_null()) unit = vector_from_json(j["unit_coeffs"], where + "/unit_coeffs");
  std::optional<NormSpec> na, na0;
  if (j.contains("norms")) {
    const Json& n = j["norms"];
    if (n.contains("A")) na = norm_from_json(n["A"], where + "/norms/A");
    if (n.contains("A0")) na0 = norm_from_json(n["A0"], where + "/norms/A0");
  }
  return std::make_shared<const QuasiStarAlgebra>(m, std::move(basis), std::move(a0), unit, na, na0);
}

// ---------------------------------------------------------------------------
// Files

inline Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path.string());
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot write file");
  out << dump(j);
}

/// A *_ref is either an inline object or a path relative to `base`.
inline Json resolve_ref(const Json& j, const std::filesystem::path& base, const std::string& where) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_file(p);
  }
  if (!j.is_object()) detail::fail(where, "expected an object or a file path");
  return j;
}

// ---------------------------------------------------------------------------
// Maps

inline Json to_json(const MapFlags& f) {
  Json out{{"positivity", to_string(f.positivity)}};
  if (f.invariant) out["invariant"] = *f.invariant;
  if (f.c_linear) out["c_linear"] = *f.c_linear;
  if (f.faithful) out["faithful"] = *f.faithful;
  if (!f.admissible_constants.empty()) out["admissible_constants"] = f.admissible_constants;
  return out;
}

inline MapFlags flags_from_json(const Json& j, const std::string& where) {
  MapFlags f;
  if (!j.is_object()) detail::fail(where, "expected an object");
  if (j.contains("positivity")) {
    if (!j["positivity"].is_string()) detail::fail(where + "/positivity", "expected a string");
    try {
      f.positivity = certificate_from_string(j["positivity"].get<std::string>());
    } catch (const ParseError&) {
      detail::fail(where + "/positivity", "unknown certificate");
    }
  }
  if (j.contains("invariant")) f.invariant = detail::boolean(j["invariant"], where + "/invariant");
  if (j.contains("c_linear")) f.c_linear = detail::boolean(j["c_linear"], where + "/c_linear");
  if (j.contains("faithful")) f.faithful = detail::boolean(j["faithful"], where + "/faithful");
  if (j.contains("admissible_constants")) {
    const Json& a = j["admissible_constants"];
    if (!a.is_array()) detail::fail(where + "/admissible_constants", "expected a list");
    for (std::size_t i = 0; i < a.size(); ++i)
      f.admissible_constants.push_back(detail::number(a[i], where + "/admissible_constants/" + std::to_string(i)));
  }
  return f;
}

inline Json to_json(const RightAction& a) {
  Json emb = Json::array();
  for (const auto& e : a.embedding) emb.push_back(matrix_to_json(e));
  return Json{{"acting", to_json(a.acting)}, {"embedding", emb}};
}

inline RightAction action_from_json(const Json& j, const std::string& where) {
  RightAction a{algebra_from_json(detail::need(j, "acting", where), where + "/acting"), {}};
  const Json& e = detail::need(j, "embedding", where);
  if (!e.is_array()) detail::fail(where + "/embedding", "expected a list");
  for (std::size_t i = 0; i < e.size(); ++i)
    a.embedding.push_back(matrix_from_json(e[i], where + "/embedding/" + std::to_string(i)));
  return a;
}

inline Json to_json(const SesquiMap& phi) {
  Json gram = Json::array();
  for (int i = 0; i < phi.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < phi.dim(); ++j) row.push_back(to_json(phi.entry(i, j)));
    gram.push_back(std::move(row));
  }
  Json out{{"version", kFormatVersion},
           {"domain_ref", to_json(phi.domain())},
           {"codomain_ref", to_json(phi.codomain())},
           {"gram", gram},
           {"flags", to_json(phi.flags())}};
  if (phi.action()) out["right_action"] = to_json(*phi.action());
  return out;
}

/// `base` resolves string references.
inline SesquiMap map_from_json(const Json& j, const std::filesystem::path& base = ".") {
  detail::check_version(j, "");
  const QuasiAlgebraPtr dom = quasi_from_json(resolve_ref(detail::need(j, "domain_ref", ""), base, "/domain_ref"), "/domain_ref");
  const CStarAlgebra cod = algebra_from_json(resolve_ref(detail::need(j, "codomain_ref", ""), base, "/codomain_ref"), "/codomain_ref");
  const Json& g = detail::need(j, "gram", "");
  if (!g.is_array() || static_cast<int>(g.size()) != dom->dim())
    detail::fail("/gram", "expected " + std::to_string(dom->dim()) + " rows");
  std::vector<std::vector<AlgebraElement>> gram(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::string wi = "/gram/" + std::to_string(i);
    if (!g[i].is_array() || g[i].size() != g.size()) detail::fail(wi, "expected " + std::to_string(g.size()) + " entries");
    for (std::size_t k = 0; k < g.size(); ++k)
      gram[i].push_back(element_from_json(g[i][k], cod, wi + "/" + std::to_string(k)));
  }
  MapFlags flags;
  if (j.contains("flags")) flags = flags_from_json(j["flags"], "/flags");
  std::optional<RightAction> act;
  if (j.contains("right_action") && !j["right_action"].is_null()) act = action_from_json(j["right_action"], "/right_action");
  return SesquiMap::from_gram(dom, cod, gram, flags, act);
}

inline SesquiMap load_map(const std::filesystem::path& path) {
  return map_from_json(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

// ---------------------------------------------------------------------------
// Reports and triples

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(detail::clean(x)) : Json(nullptr); }

inline Json to_json(const CheckResult& c) {
  Json out{{"name", c.name}, {"status", c.passed ? "pass" : "fail"}};
  out["worst_ratio"] = c.worst_ratio ? number_or_null(*c.worst_ratio) : Json(nullptr);
  out["residual"] = c.residual ? number_or_null(*c.residual) : Json(nullptr);
  if (c.witness) out["witness"] = *c.witness;
  if (!c.note.empty()) out["note"] = c.note;
  return out;
}

inline CheckResult check_from_json(const Json& j, const std::string& where) {
  CheckResult c;
  const Json& n = detail::need(j, "name", where);
  if (!n.is_string()) detail::fail(where + "/name", "expected a string");
  c.name = n.get<std::string>();
  const Json& s = detail::need(j, "status", where);
  if (s != "pass" && s != "fail") detail::fail(where + "/status", "expected 'pass' or 'fail'");
  c.passed = s == "pass";
  if (j.contains("worst_ratio") && !j["worst_ratio"].is_null()) c.worst_ratio = detail::number(j["worst_ratio"], where + "/worst_ratio");
  if (j.contains("residual") && !j["residual"].is_null()) c.residual = detail::number(j["residual"], where + "/residual");
  if (j.contains("witness")) c.witness = j["witness"].get<std::string>();
  if (j.contains("note")) c.note = j["note"].get<std::string>();
  return c;
}

struct RunEnvironment {
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  int samples = 10000;
};

inline Json to_json(const RunEnvironment& e) {
  return Json{{"version", kFormatVersion}, {"seed", e.seed}, {"tol", e.tol}, {"samples", e.samples}};
}

/// Checks are emitted sorted by name; failed checks always carry a witness.
inline Json report_to_json(Report rep, const RunEnvironment& env) {
  rep.sort();
  Json checks = Json::array();
  for (CheckResult c : rep.checks()) {
    if (!c.passed && !c.witness) c.witness = "no localised witness; see residual";
    checks.push_back(to_json(c));
  }
  return Json{{"version", kFormatVersion}, {"environment", to_json(env)}, {"checks", checks}};
}

inline Report report_from_json(const Json& j, const std::string& where = "") {
  detail::check_version(j, where);
  const Json& c = detail::need(j, "checks", where);
  if (!c.is_array()) detail::fail(where + "/checks", "expected a list");
  Report rep;
  for (std::size_t i = 0; i < c.size(); ++i) rep.add(check_from_json(c[i], where + "/checks/" + std::to_string(i)));
  return rep;
}

inline Json to_json(const GnsTriple& t) {
  Json pi = Json::array();
  for (const auto& p : t.pi) pi.push_back(matrix_to_json(p));
  Json res = Json::object();
  for (const auto& [k, v] : t.residuals) res[k] = number_or_null(v);
  return Json{{"rep_dim", t.rep_dim()},
              {"null_dim", t.quotient.null_dim()},
              {"rep_basis", matrix_to_json(t.quotient.rep_basis)},
              {"pi", pi},
              {"cyclic", to_json(t.cyclic)},
              {"domain_basis", matrix_to_json(t.domain_basis)},
              {"residuals", res}};
}

// ---------------------------------------------------------------------------
// Example instances: {m, p, W, n_grid, curve?}

struct ExampleInstance {
  int m = 2;
  double p = 2.0;
  double rho_unit = 1.0;
  Mat w;
  int n_grid = 16;
  std::optional<std::vector<Mat>> curve;
};

inline Json to_json(const ExampleInstance& e) {
  Json out{{"m", e.m}, {"p", e.p}, {"W", matrix_to_json(e.w)}, {"n_grid", e.n_grid}};
  if (e.rho_unit != 1.0) out["rho_unit"] = e.rho_unit;
  if (e.curve) {
    Json c = Json::array();
    for (const auto& a : *e.curve) c.push_back(matrix_to_json(a));
    out["curve"] = c;
  }
  return out;
}

inline ExampleInstance instance_from_json(const Json& j) {
  ExampleInstance e;
  e.m = detail::integer(detail::need(j, "m", ""), "/m");
  if (j.contains("p")) e.p = detail::number(j["p"], "/p");
  if (j.contains("rho_unit")) e.rho_unit = detail::number(j["rho_unit"], "/rho_unit");
  e.w = matrix_from_json(detail::need(j, "W", ""), "/W");
  if (e.w.rows() != e.m || e.w.cols() != e.m) detail::fail("/W", "expected an m x m matrix");
  e.n_grid = detail::integer(detail::need(j, "n_grid", ""), "/n_grid");
  if (j.contains("curve") && !j["curve"].is_null()) {
    const Json& c = j["curve"];
    if (!c.is_array() || static_cast<int>(c.size()) != e.n_grid) detail::fail("/curve", "expected n_grid samples");
    std::vector<Mat> s;
    for (std::size_t k = 0; k < c.size(); ++k) s.push_back(matrix_from_json(c[k], "/curve/" + std::to_string(k)));
    e.curve = std::move(s);
  }
  return e;
}

}  // namespace io
}  // namespace gnslab
