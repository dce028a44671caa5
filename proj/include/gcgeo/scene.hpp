#pragma once

// Scene files drive the command line tool: one JSON document declares a
// coordinate chart, named tensors, named structures built from them, and a
// task list.  run_scene executes the tasks in scene order and collects one
// report per task; document/render_text turn the result into the machine
// and human readable outputs.
//
// Schema (version 1, the "schema" field):
//   chart       { "coordinates": ["x1", ...] }        shared default chart
//   tensors     { name: { "rows", "cols", "entries": [
//                   { "row", "col", "terms": [
//                       { "coefficient": "p/q" | int,
//                         "exponents": [int per coordinate],   (optional)
//                         "odd": [generator indices] } ] } ] } }
//   structures  { name: { "kind": ..., ... } }         built in file order
//   tasks       [ { "check": ..., "structure": ..., "seed", "samples",
//                   "conventions": {...} } ]
//
// Plain rational matrices may be written inline as arrays of rows (entries
// "p/q" strings or integers) or as the name of a constant tensor.  Malformed
// scenes raise SceneError with a JSON-pointer style location; mathematical
// failures become failing report items instead.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gcgeo/algebroid.hpp"
#include "gcgeo/calculus.hpp"
#include "gcgeo/conventions.hpp"
#include "gcgeo/gencomplex.hpp"
#include "gcgeo/holostack.hpp"
#include "gcgeo/rational.hpp"
#include "gcgeo/report.hpp"
#include "gcgeo/stacky.hpp"
#include "gcgeo/tori.hpp"

namespace gcgeo {

using Json = nlohmann::ordered_json;

struct SceneError : std::runtime_error {
  std::string where;
  SceneError(std::string at, const std::string& msg)
      : std::runtime_error(msg), where(std::move(at)) {}
};

namespace scene_detail {

[[noreturn]] inline void fail(const std::string& at, const std::string& msg) {
  throw SceneError(at, msg);
}

inline const Json& member(const Json& j, const std::string& at, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail(at, "missing field \"" + key + "\"");
  return *it;
}

inline std::string string_field(const Json& j, const std::string& at, const std::string& key) {
  const Json& v = member(j, at, key);
  if (!v.is_string()) fail(at + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline int int_value(const Json& v, const std::string& at) {
  if (!v.is_number_integer()) fail(at, "expected an integer");
  return v.get<int>();
}

inline Rational rational_value(const Json& v, const std::string& at) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
      fail(at, e.what());
    }
  }
  fail(at, "expected an integer or a \"p/q\" string");
}

inline int degree_key(const std::string& key, const std::string& at) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(key, &pos);
    if (pos != key.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    fail(at, "expected an integer degree key, got \"" + key + "\"");
  }
}

}  // namespace scene_detail

// --- Tensors -------------------------------------------------------------------

struct TensorTerm {
  Rational coefficient;
  std::vector<int> exponents;
  std::vector<int> odd;
};

struct TensorEntry {
  int row = 0;
  int col = 0;
  std::vector<TensorTerm> terms;
};

struct TensorData {
  int rows = 0;
  int cols = 0;
  std::vector<TensorEntry> entries;
  std::string at;
};

namespace scene_detail {

inline TensorData parse_tensor(const Json& j, const std::string& at) {
  if (!j.is_object()) fail(at, "expected a tensor object");
  TensorData t;
  t.at = at;
  t.rows = int_value(member(j, at, "rows"), at + "/rows");
  t.cols = int_value(member(j, at, "cols"), at + "/cols");
  if (t.rows < 0 || t.cols < 0) fail(at, "tensor shape must be non-negative");
  const Json& entries = member(j, at, "entries");
  if (!entries.is_array()) fail(at + "/entries", "expected an array");
  int e = 0;
  for (const Json& entry : entries) {
    std::string eat = at + "/entries/" + std::to_string(e++);
    if (!entry.is_object()) fail(eat, "expected an entry object");
    TensorEntry out;
    out.row = int_value(member(entry, eat, "row"), eat + "/row");
    out.col = int_value(member(entry, eat, "col"), eat + "/col");
    if (out.row < 0 || out.row >= t.rows || out.col < 0 || out.col >= t.cols)
      fail(eat, "entry position outside the declared shape");
    const Json& terms = member(entry, eat, "terms");
    if (!terms.is_array()) fail(eat + "/terms", "expected an array");
    int k = 0;
    for (const Json& term : terms) {
      std::string tat = eat + "/terms/" + std::to_string(k++);
      if (!term.is_object()) fail(tat, "expected a term object");
      TensorTerm tt;
      tt.coefficient = rational_value(member(term, tat, "coefficient"), tat + "/coefficient");
      if (auto it = term.find("exponents"); it != term.end()) {
        if (!it->is_array()) fail(tat + "/exponents", "expected an array");
        for (const Json& ev : *it) {
          int exp = int_value(ev, tat + "/exponents");
          if (exp < 0) fail(tat + "/exponents", "exponents must be non-negative");
          tt.exponents.push_back(exp);
        }
      }
      if (auto it = term.find("odd"); it != term.end()) {
        if (!it->is_array()) fail(tat + "/odd", "expected an array");
        for (const Json& ov : *it) tt.odd.push_back(int_value(ov, tat + "/odd"));
      }
      out.terms.push_back(std::move(tt));
    }
    t.entries.push_back(std::move(out));
  }
  return t;
}

// Monomial in the given generators of the ambient chart.
inline GradedElement monomial(const ChartPtr& W, const std::vector<int>& gens,
                              const TensorTerm& term, const std::string& at) {
  if (term.exponents.size() > gens.size())
    fail(at, "term lists more exponents than there are coordinates");
  GradedElement m = GradedElement::constant(W, term.coefficient);
  for (std::size_t i = 0; i < term.exponents.size(); ++i)
    for (int e = 0; e < term.exponents[i]; ++e)
      m = m * GradedElement::generator(W, gens[i]);
  return m;
}

// Matrix of functions of the coordinates, over any chart that contains them.
inline SymbolicMatrix function_matrix(const TensorData& t, const ChartPtr& W,
                                      const std::vector<int>& coords, int rows, int cols) {
  if (t.rows != rows || t.cols != cols)
    fail(t.at, "tensor is " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                   " but the slot needs " + std::to_string(rows) + "x" + std::to_string(cols));
  SymbolicMatrix out(W, rows, cols);
  for (const TensorEntry& entry : t.entries) {
    GradedElement v = GradedElement::zero(W);
    for (const TensorTerm& term : entry.terms) {
      if (!term.odd.empty()) fail(t.at, "entries here must be functions of the coordinates");
      v += monomial(W, coords, term, t.at);
    }
    out.at(entry.row, entry.col) = std::move(v);
  }
  return out;
}

// A bivector over a multivector chart: every term carries exactly two
// distinct dual indices.
inline GradedElement bivector_element(const TensorData& t, const MultivectorChart& mc) {
  if (t.rows != 1 || t.cols != 1) fail(t.at, "a bivector is a 1x1 tensor");
  int n = static_cast<int>(mc.coords.size());
  GradedElement out = GradedElement::zero(mc.chart);
  for (const TensorEntry& entry : t.entries)
    for (const TensorTerm& term : entry.terms) {
      if (term.odd.size() != 2 || term.odd[0] == term.odd[1])
        fail(t.at, "bivector terms need exactly two distinct dual indices");
      for (int o : term.odd)
        if (o < 0 || o >= n) fail(t.at, "dual index outside the coordinate range");
      GradedElement m = monomial(mc.chart, mc.coords, term, t.at);
      out += m * GradedElement::generator(mc.chart, mc.duals[term.odd[0]]) *
             GradedElement::generator(mc.chart, mc.duals[term.odd[1]]);
    }
  return out;
}

inline QMat constant_matrix(const TensorData& t) {
  QMat out(t.rows, t.cols);
  for (const TensorEntry& entry : t.entries) {
    Rational v = 0;
    for (const TensorTerm& term : entry.terms) {
      bool constant = term.odd.empty();
      for (int e : term.exponents) constant = constant && e == 0;
      if (!constant) fail(t.at, "this slot needs a constant tensor");
      v += term.coefficient;
    }
    out.at(entry.row, entry.col) = v;
  }
  return out;
}

}  // namespace scene_detail

// --- Structures ------------------------------------------------------------------

struct HHSSpec {
  std::string from;       // generalized complex source
  std::string algebroid;  // explicit algebroid source
  std::optional<TensorData> endo_tangent, endo_frame, homotopy;
};

struct FoliationSpec {
  std::string carrier;  // name of the hhs structure it foliates
  FoliationCandidate candidate{0, 0, 0, 0};
};

struct StructureEntry {
  std::string kind;
  std::string at;
  std::optional<GCStructure> gc;
  std::optional<LieAlgebroid> algebroid;
  std::string defect;  // construction failed a mathematical hypothesis
  int dim_hint = 0, rank_hint = 0;
  std::optional<SymplecticTorus> torus;
  std::optional<CoisotropicBrane> brane;
  std::string brane_torus;
  std::optional<LinearSymplectic> linear;
  std::optional<LinearLagrangian> lagrangian;
  std::string lagrangian_ambient;
  std::optional<HHSSpec> hhs;
  std::optional<FoliationSpec> foliation;
};

struct TaskData {
  std::string kind;
  std::string structure;
  std::string ambient, first, second;  // intersect references
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  Json conventions;
  std::string at;
};

struct Scene {
  std::vector<std::string> coordinates;
  std::map<std::string, TensorData> tensors;
  std::vector<std::pair<std::string, StructureEntry>> structures;  // file order
  std::vector<TaskData> tasks;

  const StructureEntry* find(const std::string& name) const {
    for (const auto& [n, e] : structures)
      if (n == name) return &e;
    return nullptr;
  }
};

namespace scene_detail {

inline const TensorData& tensor_ref(const Scene& s, const Json& v, const std::string& at) {
  if (!v.is_string()) fail(at, "expected the name of a tensor");
  std::string name = v.get<std::string>();
  auto it = s.tensors.find(name);
  if (it == s.tensors.end()) fail(at, "undefined tensor \"" + name + "\"");
  return it->second;
}

inline QMat matrix_field(const Scene& s, const Json& v, const std::string& at) {
  if (v.is_string()) return constant_matrix(tensor_ref(s, v, at));
  if (!v.is_array()) fail(at, "expected an array of rows or a tensor name");
  int rows = static_cast<int>(v.size());
  int cols = -1;
  std::vector<Rational> vals;
  int i = 0;
  for (const Json& row : v) {
    std::string rat_at = at + "/" + std::to_string(i++);
    if (!row.is_array()) fail(rat_at, "expected a row array");
    if (cols < 0)
      cols = static_cast<int>(row.size());
    else if (cols != static_cast<int>(row.size()))
      fail(rat_at, "rows have different lengths");
    for (const Json& cell : row) vals.push_back(rational_value(cell, rat_at));
  }
  if (cols < 0) cols = 0;
  QMat out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) = vals[static_cast<std::size_t>(r) * cols + c];
  return out;
}

inline QMat shaped_matrix(const Scene& s, const Json& v, const std::string& at, int rows,
                          int cols) {
  QMat m = matrix_field(s, v, at);
  if (m.rows != rows || m.cols != cols)
    fail(at, "matrix is " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                 " but the slot needs " + std::to_string(rows) + "x" + std::to_string(cols));
  return m;
}

inline CMat complex_matrix_field(const Scene& s, const Json& v, const std::string& at, int rows,
                                 int cols) {
  QMat re(rows, cols), im(rows, cols);
  if (v.is_object()) {
    if (auto it = v.find("re"); it != v.end()) re = shaped_matrix(s, *it, at + "/re", rows, cols);
    if (auto it = v.find("im"); it != v.end()) im = shaped_matrix(s, *it, at + "/im", rows, cols);
  } else {
    re = shaped_matrix(s, v, at, rows, cols);
  }
  CMat out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out.at(i, j) = GaussianRational(re.at(i, j), im.at(i, j));
  return out;
}

inline GaussianRational gaussian_value(const Json& v, const std::string& at) {
  if (v.is_object()) {
    GaussianRational out;
    if (auto it = v.find("re"); it != v.end()) out.re = rational_value(*it, at + "/re");
    if (auto it = v.find("im"); it != v.end()) out.im = rational_value(*it, at + "/im");
    return out;
  }
  return GaussianRational(rational_value(v, at));
}

inline std::vector<std::string> coordinates_field(const Scene& s, const Json& j,
                                                  const std::string& at) {
  auto it = j.find("coordinates");
  if (it == j.end()) {
    if (s.coordinates.empty()) fail(at, "no coordinates here and no scene chart");
    return s.coordinates;
  }
  if (!it->is_array() || it->empty()) fail(at + "/coordinates", "expected a non-empty array");
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const Json& v : *it) {
    if (!v.is_string()) fail(at + "/coordinates", "expected coordinate names");
    names.push_back(v.get<std::string>());
    if (!seen.insert(names.back()).second)
      fail(at + "/coordinates", "duplicate coordinate \"" + names.back() + "\"");
  }
  return names;
}

inline CartanChart cartan_for(const std::vector<std::string>& names) {
  std::vector<Generator> gens;
  for (const std::string& n : names) gens.push_back({n, 0, 0});
  return make_cartan_chart(gens);
}

inline ChartPtr body_chart(const std::vector<std::string>& names) {
  std::vector<Generator> gens;
  for (const std::string& n : names) gens.push_back({n, 0, 0});
  return Chart::make(std::move(gens));
}

inline std::vector<int> all_indices(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

inline LinearComplex<Rational> linear_complex_field(const Scene& s, const Json& j,
                                                    const std::string& at) {
  LinearComplex<Rational> C;
  const Json& dims = member(j, at, "dims");
  if (!dims.is_object()) fail(at + "/dims", "expected an object keyed by degree");
  for (const auto& [key, val] : dims.items()) {
    int k = degree_key(key, at + "/dims");
    int n = int_value(val, at + "/dims/" + key);
    if (n < 0) fail(at + "/dims/" + key, "dimensions must be non-negative");
    C.set_dim(k, n);
  }
  if (auto it = j.find("differentials"); it != j.end()) {
    if (!it->is_object()) fail(at + "/differentials", "expected an object keyed by degree");
    for (const auto& [key, val] : it->items()) {
      int k = degree_key(key, at + "/differentials");
      std::string dat = at + "/differentials/" + key;
      try {
        C.set_diff(k, shaped_matrix(s, val, dat, C.dim(k + 1), C.dim(k)));
      } catch (const std::invalid_argument& e) {
        fail(dat, e.what());
      }
    }
  }
  try {
    C.check();
  } catch (const std::logic_error& e) {
    fail(at, e.what());
  }
  return C;
}

inline std::map<int, QMat> degree_blocks(const Scene& s, const Json& j, const std::string& at,
                                         const std::string& key) {
  std::map<int, QMat> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_object()) fail(at + "/" + key, "expected an object keyed by degree");
  for (const auto& [k, val] : it->items()) {
    int deg = degree_key(k, at + "/" + key);
    out.emplace(deg, matrix_field(s, val, at + "/" + key + "/" + k));
  }
  return out;
}

}  // namespace scene_detail

// --- Loading -----------------------------------------------------------------------

namespace scene_detail {

inline void build_generalized_complex(Scene& s, StructureEntry& e, const Json& j,
                                      const std::string& at) {
  std::vector<std::string> names = coordinates_field(s, j, at);
  CartanChart cc = cartan_for(names);
  int n = static_cast<int>(names.size());
  try {
    if (auto it = j.find("symplectic"); it != j.end()) {
      QMat w = shaped_matrix(s, *it, at + "/symplectic", n, n);
      if (!inverse(w)) fail(at + "/symplectic", "the form must be invertible");
      e.gc = from_symplectic(cc, w);
    } else if (auto itc = j.find("complex"); itc != j.end()) {
      e.gc = from_complex(cc, shaped_matrix(s, *itc, at + "/complex", n, n));
    } else {
      SymbolicMatrix bi =
          function_matrix(tensor_ref(s, member(j, at, "i"), at + "/i"), cc.chart, cc.body, n, n);
      SymbolicMatrix bp =
          function_matrix(tensor_ref(s, member(j, at, "p"), at + "/p"), cc.chart, cc.body, n, n);
      SymbolicMatrix bq =
          function_matrix(tensor_ref(s, member(j, at, "q"), at + "/q"), cc.chart, cc.body, n, n);
      e.gc = GCStructure(cc, bi, bp, bq);
    }
  } catch (const std::invalid_argument& err) {
    fail(at, err.what());
  }
}

inline void build_poisson_algebroid(Scene& s, StructureEntry& e, const Json& j,
                                    const std::string& at) {
  std::vector<std::string> names = coordinates_field(s, j, at);
  MultivectorChart mc = make_multivector_chart(names);
  GradedElement biv =
      bivector_element(tensor_ref(s, member(j, at, "bivector"), at + "/bivector"), mc);
  e.dim_hint = e.rank_hint = static_cast<int>(names.size());
  try {
    e.algebroid = poisson_algebroid(mc, biv);
  } catch (const std::domain_error& err) {
    e.defect = err.what();
  }
}

inline void build_abelian_algebroid(Scene& s, StructureEntry& e, const Json& j,
                                    const std::string& at) {
  std::vector<std::string> names = coordinates_field(s, j, at);
  int rank = int_value(member(j, at, "rank"), at + "/rank");
  if (rank < 0) fail(at + "/rank", "rank must be non-negative");
  e.dim_hint = static_cast<int>(names.size());
  e.rank_hint = rank;
  e.algebroid = abelian_algebroid(body_chart(names), rank);
}

inline void build_symplectic_torus(Scene& s, StructureEntry& e, const Json& j,
                                   const std::string& at) {
  std::vector<std::string> names = coordinates_field(s, j, at);
  int n = static_cast<int>(names.size());
  try {
    e.torus = SymplecticTorus(shaped_matrix(s, member(j, at, "form"), at + "/form", n, n), names);
  } catch (const std::invalid_argument& err) {
    fail(at, err.what());
  }
}

inline void build_brane(Scene& s, StructureEntry& e, const Json& j, const std::string& at) {
  e.brane_torus = string_field(j, at, "torus");
  const StructureEntry* t = s.find(e.brane_torus);
  if (!t || t->kind != "symplectic_torus")
    fail(at + "/torus", "\"" + e.brane_torus + "\" is not a symplectic torus declared earlier");
  int n = t->torus->dim();
  CoisotropicBrane b;
  b.directions = matrix_field(s, member(j, at, "directions"), at + "/directions");
  if (b.directions.rows != n) fail(at + "/directions", "directions need one row per coordinate");
  int k = b.directions.cols;
  b.offset.assign(static_cast<std::size_t>(n), Rational(0));
  if (auto it = j.find("offset"); it != j.end()) {
    if (!it->is_array() || static_cast<int>(it->size()) != n)
      fail(at + "/offset", "expected one value per coordinate");
    for (int i = 0; i < n; ++i)
      b.offset[static_cast<std::size_t>(i)] = rational_value((*it)[static_cast<std::size_t>(i)],
                                                             at + "/offset");
  }
  b.curvature = QMat(k, k);
  if (auto it = j.find("curvature"); it != j.end())
    b.curvature = shaped_matrix(s, *it, at + "/curvature", k, k);
  try {
    detail::validate_brane(*t->torus, b);
  } catch (const std::invalid_argument& err) {
    fail(at, err.what());
  }
  e.brane = std::move(b);
}

inline void build_linear_symplectic(Scene& s, StructureEntry& e, const Json& j,
                                    const std::string& at) {
  LinearSymplectic S;
  S.shift = int_value(member(j, at, "shift"), at + "/shift");
  S.tangent = linear_complex_field(s, j, at);
  for (auto& [k, m] : degree_blocks(s, j, at, "blocks")) {
    try {
      S.set_block(k, std::move(m));
    } catch (const std::invalid_argument& err) {
      fail(at + "/blocks/" + std::to_string(k), err.what());
    }
  }
  e.linear = std::move(S);
}

inline void build_linear_lagrangian(Scene& s, StructureEntry& e, const Json& j,
                                    const std::string& at) {
  e.lagrangian_ambient = string_field(j, at, "ambient");
  const StructureEntry* amb = s.find(e.lagrangian_ambient);
  if (!amb || amb->kind != "linear_symplectic")
    fail(at + "/ambient",
         "\"" + e.lagrangian_ambient + "\" is not a linear symplectic model declared earlier");
  LinearLagrangian L;
  L.tangent = linear_complex_field(s, j, at);
  L.into = ChainMap<Rational>{L.tangent, amb->linear->tangent, {}};
  for (auto& [k, m] : degree_blocks(s, j, at, "components")) {
    try {
      L.into.set_comp(k, std::move(m));
    } catch (const std::invalid_argument& err) {
      fail(at + "/components/" + std::to_string(k), err.what());
    }
  }
  int shift = amb->linear->shift;
  for (auto& [k, m] : degree_blocks(s, j, at, "homotopy")) {
    if (m.rows != L.tangent.dim(1 - shift - k) || m.cols != L.tangent.dim(k))
      fail(at + "/homotopy/" + std::to_string(k), "homotopy block shape mismatch");
    L.homotopy.emplace(k, std::move(m));
  }
  e.lagrangian = std::move(L);
}

inline void build_hhs(Scene& s, StructureEntry& e, const Json& j, const std::string& at) {
  HHSSpec h;
  if (auto it = j.find("from"); it != j.end()) {
    if (!it->is_string()) fail(at + "/from", "expected a structure name");
    h.from = it->get<std::string>();
    const StructureEntry* src = s.find(h.from);
    if (!src || src->kind != "generalized_complex")
      fail(at + "/from",
           "\"" + h.from + "\" is not a generalized complex structure declared earlier");
  } else {
    h.algebroid = string_field(j, at, "algebroid");
    const StructureEntry* src = s.find(h.algebroid);
    if (!src || !(src->kind == "poisson_algebroid" || src->kind == "abelian_algebroid"))
      fail(at + "/algebroid", "\"" + h.algebroid + "\" is not an algebroid declared earlier");
    if (auto ite = j.find("endo"); ite != j.end()) {
      if (!ite->is_object()) fail(at + "/endo", "expected an object");
      h.endo_tangent = tensor_ref(s, member(*ite, at + "/endo", "tangent"), at + "/endo/tangent");
      h.endo_frame = tensor_ref(s, member(*ite, at + "/endo", "frame"), at + "/endo/frame");
    }
    if (auto ith = j.find("homotopy"); ith != j.end())
      h.homotopy = tensor_ref(s, *ith, at + "/homotopy");
  }
  e.hhs = std::move(h);
}

inline std::pair<int, int> hhs_dims(const Scene& s, const StructureEntry& e) {
  const HHSSpec& h = *e.hhs;
  if (!h.from.empty()) {
    int n = s.find(h.from)->gc->dim();
    return {n, n};
  }
  const StructureEntry* src = s.find(h.algebroid);
  if (src->algebroid) return {src->algebroid->dim(), src->algebroid->rank()};
  // a defective bivector still fixes the shape: one dual per coordinate
  return {src->dim_hint, src->rank_hint};
}

inline void build_foliation(Scene& s, StructureEntry& e, const Json& j, const std::string& at) {
  FoliationSpec f;
  f.carrier = string_field(j, at, "structure");
  const StructureEntry* src = s.find(f.carrier);
  if (!src || src->kind != "hhs")
    fail(at + "/structure", "\"" + f.carrier + "\" is not an hhs structure declared earlier");
  auto [n, r] = hhs_dims(s, *src);
  int rm1 = int_value(member(j, at, "rank_m1"), at + "/rank_m1");
  int r0 = int_value(member(j, at, "rank_0"), at + "/rank_0");
  if (rm1 < 0 || r0 < 0) fail(at, "frame ranks must be non-negative");
  FoliationCandidate F(rm1, r0, n, r);
  if (auto it = j.find("d"); it != j.end())
    F.d = complex_matrix_field(s, *it, at + "/d", r0, rm1);
  if (auto it = j.find("rho_m1"); it != j.end())
    F.rho_m1 = complex_matrix_field(s, *it, at + "/rho_m1", r, rm1);
  F.rho_0 = complex_matrix_field(s, member(j, at, "rho_0"), at + "/rho_0", n, r0);
  if (auto it = j.find("gamma"); it != j.end())
    F.gamma = complex_matrix_field(s, *it, at + "/gamma", r, r0);
  if (auto it = j.find("brackets"); it != j.end()) {
    if (!it->is_array()) fail(at + "/brackets", "expected an array");
    int i = 0;
    for (const Json& br : *it) {
      std::string bat = at + "/brackets/" + std::to_string(i++);
      if (!br.is_object()) fail(bat, "expected a bracket object");
      int a = int_value(member(br, bat, "a"), bat + "/a");
      int b = int_value(member(br, bat, "b"), bat + "/b");
      int k = int_value(member(br, bat, "k"), bat + "/k");
      if (a < 0 || a >= r0 || b < 0 || b >= r0 || k < 0 || k >= r0)
        fail(bat, "bracket index outside the frame");
      F.set_bracket(a, b, k, gaussian_value(member(br, bat, "value"), bat + "/value"));
    }
  }
  f.candidate = std::move(F);
  e.foliation = std::move(f);
}

inline void validate_conventions_json(const Json& j, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  for (const auto& [key, val] : j.items()) {
    std::string vat = at + "/" + key;
    if (key == "square_rhs") {
      rational_value(val, vat);
    } else if (key == "twisted_square_differential") {
      if (!val.is_boolean()) fail(vat, "expected a boolean");
    } else if (key == "diagonal_sign") {
      int v = int_value(val, vat);
      if (v != 1 && v != -1) fail(vat, "diagonal sign must be +1 or -1");
    } else {
      fail(vat, "unknown convention \"" + key + "\"");
    }
  }
}

inline Conventions merge_conventions(const Json& j, Conventions base) {
  if (!j.is_object()) return base;
  if (auto it = j.find("square_rhs"); it != j.end()) base.square_rhs = rational_value(*it, "");
  if (auto it = j.find("twisted_square_differential"); it != j.end())
    base.twisted_square_differential = it->get<bool>();
  if (auto it = j.find("diagonal_sign"); it != j.end()) base.diagonal_sign = it->get<int>();
  return base;
}

inline const std::set<std::string>& task_kinds() {
  static const std::set<std::string> kinds{"gc",  "algebroid", "shifted",   "lagrangian",
                                           "hhs", "foliation", "lift",      "intersect"};
  return kinds;
}

inline bool task_accepts(const std::string& kind, const StructureEntry& e) {
  if (kind == "gc") return e.kind == "generalized_complex";
  if (kind == "algebroid")
    return e.kind == "poisson_algebroid" || e.kind == "abelian_algebroid";
  if (kind == "shifted")
    return e.kind == "poisson_algebroid" || e.kind == "abelian_algebroid" ||
           e.kind == "linear_symplectic";
  if (kind == "lagrangian")
    return e.kind == "poisson_algebroid" || e.kind == "abelian_algebroid" ||
           e.kind == "linear_lagrangian";
  if (kind == "hhs") return e.kind == "hhs";
  if (kind == "foliation") return e.kind == "foliation";
  if (kind == "lift") return e.kind == "brane";
  return false;
}

inline TaskData parse_task(const Scene& s, const Json& j, const std::string& at) {
  if (!j.is_object()) fail(at, "expected a task object");
  TaskData t;
  t.at = at;
  t.kind = string_field(j, at, "check");
  if (!task_kinds().count(t.kind)) fail(at + "/check", "unknown check \"" + t.kind + "\"");
  if (t.kind == "intersect") {
    t.ambient = string_field(j, at, "ambient");
    t.first = string_field(j, at, "first");
    t.second = string_field(j, at, "second");
    const StructureEntry* amb = s.find(t.ambient);
    if (!amb || amb->kind != "linear_symplectic")
      fail(at + "/ambient", "\"" + t.ambient + "\" is not a linear symplectic model");
    for (const auto& [name, key] :
         {std::pair<const std::string&, const char*>{t.first, "first"}, {t.second, "second"}}) {
      const StructureEntry* leg = s.find(name);
      if (!leg || leg->kind != "linear_lagrangian")
        fail(at + "/" + key, "\"" + name + "\" is not a linear Lagrangian model");
      if (leg->lagrangian_ambient != t.ambient)
        fail(at + "/" + key, "\"" + name + "\" does not map into \"" + t.ambient + "\"");
    }
  } else {
    t.structure = string_field(j, at, "structure");
    const StructureEntry* e = s.find(t.structure);
    if (!e) fail(at + "/structure", "undefined structure \"" + t.structure + "\"");
    if (!task_accepts(t.kind, *e))
      fail(at + "/structure",
           "a " + t.kind + " check cannot run on a " + e->kind + " structure");
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<long long>() < 0))
      fail(at + "/seed", "expected a non-negative integer");
    t.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("samples"); it != j.end()) {
    int v = int_value(*it, at + "/samples");
    if (v < 1) fail(at + "/samples", "need at least one sample");
    t.samples = v;
  }
  if (auto it = j.find("conventions"); it != j.end()) {
    validate_conventions_json(*it, at + "/conventions");
    t.conventions = *it;
  }
  return t;
}

}  // namespace scene_detail

inline Scene load_scene(const Json& doc) {
  using namespace scene_detail;
  if (!doc.is_object()) fail("", "scene must be a JSON object");
  const Json& schema = member(doc, "", "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1)
    fail("/schema", "unsupported schema version");

  Scene s;
  if (auto it = doc.find("chart"); it != doc.end()) {
    if (!it->is_object()) fail("/chart", "expected an object");
    Json wrap = Json::object();
    wrap["coordinates"] = member(*it, "/chart", "coordinates");
    s.coordinates = coordinates_field(s, wrap, "/chart");
  }
  if (auto it = doc.find("tensors"); it != doc.end()) {
    if (!it->is_object()) fail("/tensors", "expected an object");
    for (const auto& [name, j] : it->items())
      s.tensors.emplace(name, parse_tensor(j, "/tensors/" + name));
  }
  if (auto it = doc.find("structures"); it != doc.end()) {
    if (!it->is_object()) fail("/structures", "expected an object");
    for (const auto& [name, j] : it->items()) {
      std::string at = "/structures/" + name;
      if (!j.is_object()) fail(at, "expected a structure object");
      StructureEntry e;
      e.at = at;
      e.kind = string_field(j, at, "kind");
      if (e.kind == "generalized_complex")
        build_generalized_complex(s, e, j, at);
      else if (e.kind == "poisson_algebroid")
        build_poisson_algebroid(s, e, j, at);
      else if (e.kind == "abelian_algebroid")
        build_abelian_algebroid(s, e, j, at);
      else if (e.kind == "symplectic_torus")
        build_symplectic_torus(s, e, j, at);
      else if (e.kind == "brane")
        build_brane(s, e, j, at);
      else if (e.kind == "linear_symplectic")
        build_linear_symplectic(s, e, j, at);
      else if (e.kind == "linear_lagrangian")
        build_linear_lagrangian(s, e, j, at);
      else if (e.kind == "hhs")
        build_hhs(s, e, j, at);
      else if (e.kind == "foliation")
        build_foliation(s, e, j, at);
      else
        fail(at + "/kind", "unknown structure kind \"" + e.kind + "\"");
      s.structures.emplace_back(name, std::move(e));
    }
  }
  if (auto it = doc.find("tasks"); it != doc.end()) {
    if (!it->is_array()) fail("/tasks", "expected an array");
    int i = 0;
    for (const Json& j : *it) s.tasks.push_back(parse_task(s, j, "/tasks/" + std::to_string(i++)));
  }
  return s;
}

inline Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError(path, "cannot open scene file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SceneError(path, e.what());
  }
  return load_scene(doc);
}

// Convention override file: a json object with any of the keys accepted by
// the per-task "conventions" field.
inline Conventions load_conventions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError(path, "cannot open convention file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SceneError(path, e.what());
  }
  scene_detail::validate_conventions_json(doc, path);
  return scene_detail::merge_conventions(doc, Conventions{});
}

// --- Running -----------------------------------------------------------------------

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  Conventions conventions;
};

struct TaskResult {
  std::string kind;
  std::string label;
  Json refs;  // name fields for the document
  std::uint64_t seed = 1;
  int samples = 5;
  Report report{""};
};

struct RunResult {
  Conventions conventions;
  std::vector<TaskResult> results;

  bool pass() const {
    for (const auto& r : results)
      if (!r.report.pass()) return false;
    return true;
  }
};

namespace scene_detail {

// Failing hypotheses are verdicts, not scene defects: a domain error from a
// constructor or check becomes a failing item under the task's title.
inline Report hypothesis_failure(const std::string& title, const std::string& what) {
  Report rep(title);
  rep.add("input hypotheses hold", false, what);
  return rep;
}

inline HHStructure assemble_hhs(const Scene& s, const StructureEntry& e, const Conventions& conv,
                                Report* induced) {
  const HHSSpec& h = *e.hhs;
  if (!h.from.empty()) {
    InducedHHS ind = hhs_from_gc(*s.find(h.from)->gc, conv);
    if (induced) *induced = ind.report;
    return std::move(ind.structure);
  }
  const StructureEntry& src = *s.find(h.algebroid);
  if (!src.defect.empty()) throw std::domain_error(src.defect);
  HHStructure out = hh_structure(*src.algebroid);
  const LieAlgebroid& A = out.algebroid;
  int n = A.dim(), r = A.rank();
  std::vector<int> coords = all_indices(n);
  if (h.endo_tangent) {
    SymbolicMatrix a = function_matrix(*h.endo_tangent, A.base(), coords, n, n);
    SymbolicMatrix b = function_matrix(*h.endo_frame, A.base(), coords, r, r);
    set_endo(out, 1, endomorphism_form(out.model, a, b));
  }
  if (h.homotopy) {
    SymbolicMatrix q = function_matrix(*h.homotopy, A.base(), coords, r, n);
    set_homotopy(out, 1, lowering_form(out.model, q));
  }
  return out;
}

inline Report run_gc(const StructureEntry& e) { return gc_check(*e.gc); }

inline Report run_algebroid(const StructureEntry& e) {
  if (!e.defect.empty()) {
    Report rep("algebroid axioms");
    rep.add("structure assembles", false, e.defect);
    return rep;
  }
  return check_axioms(*e.algebroid);
}

inline Report run_shifted(const StructureEntry& e, const SampleScheme& scheme) {
  if (e.linear) return check_symplectic_linear(*e.linear);
  if (!e.defect.empty()) return hypothesis_failure("one-shifted pairing", e.defect);
  const LieAlgebroid& A = *e.algebroid;
  ShiftedTwoForm omega = canonical_one_shifted(A);
  Report rep("one-shifted pairing");
  rep.absorb(omega.closure);
  rep.absorb(check_nondegenerate(omega, tangent_complex(A), scheme));
  return rep;
}

inline Report run_lagrangian(const Scene& s, const StructureEntry& e, const SampleScheme& scheme) {
  if (e.lagrangian)
    return check_lagrangian_linear(*s.find(e.lagrangian_ambient)->linear, *e.lagrangian);
  if (!e.defect.empty()) return hypothesis_failure("atlas Lagrangian", e.defect);
  const LieAlgebroid& A = *e.algebroid;
  return check_lagrangian(A, canonical_one_shifted(A), scheme);
}

inline Report run_hhs(const Scene& s, const StructureEntry& e, const Conventions& conv) {
  Report induced("");
  HHStructure h = assemble_hhs(s, e, conv, &induced);
  Report rep = check_hhs(h, conv);
  if (!induced.title.empty()) rep.absorb(induced);
  return rep;
}

inline Report run_foliation(const Scene& s, const StructureEntry& e, const Conventions& conv,
                            const SampleScheme& scheme) {
  const FoliationSpec& f = *e.foliation;
  HHStructure h = assemble_hhs(s, *s.find(f.carrier), conv, nullptr);
  return check_foliation(f.candidate, h, scheme);
}

inline Report run_lift(const Scene& s, const StructureEntry& e) {
  const SymplecticTorus& T = *s.find(e.brane_torus)->torus;
  const CoisotropicBrane& b = *e.brane;
  Report rep("brane lift");
  Report co = is_coisotropic_brane(T, b);
  bool ok = co.pass();
  rep.absorb(co);
  if (!ok) {
    rep.add("lift descends to the doubled torus", false, "brane fails the coisotropic check");
    return rep;
  }
  try {
    LinearSubtorus L = lift(T, b);
    rep.add("lift descends to the doubled torus", true);
    DoubledTorus D(T);
    rep.absorb(doubled_check(D));
    rep.add("lift is Lagrangian for the doubled pairing", is_lagrangian_in_double(L, D));
    rep.add("lift is invariant under the doubled complex structure", is_complex_in_double(L, D));
    if (b.directions.cols == T.dim()) {
      std::vector<std::string> eqs = lift_equations(T, b);
      for (std::size_t i = 0; i < eqs.size(); ++i)
        rep.note("equation " + std::to_string(i + 1), eqs[i]);
    }
  } catch (const std::domain_error& err) {
    rep.add("lift descends to the doubled torus", false, err.what());
  }
  return rep;
}

inline Report run_intersect(const Scene& s, const TaskData& t) {
  const LinearSymplectic& S = *s.find(t.ambient)->linear;
  LagrangianIntersection Z =
      lagrangian_intersection(S, *s.find(t.first)->lagrangian, *s.find(t.second)->lagrangian);
  Report rep = Z.report;
  rep.note("inherited shift", std::to_string(Z.inherited.shift));
  return rep;
}

inline std::string task_title(const std::string& kind) {
  if (kind == "gc") return "generalized complex check";
  if (kind == "algebroid") return "algebroid axioms";
  if (kind == "shifted") return "one-shifted pairing";
  if (kind == "lagrangian") return "atlas Lagrangian";
  if (kind == "hhs") return "homotopy holomorphic structure";
  if (kind == "foliation") return "anti-holomorphic foliation";
  if (kind == "lift") return "brane lift";
  return "derived intersection";
}

}  // namespace scene_detail

inline TaskResult run_task(const Scene& s, const TaskData& t, const RunOverrides& o = {}) {
  using namespace scene_detail;
  TaskResult out;
  out.kind = t.kind;
  out.seed = o.seed ? *o.seed : t.seed.value_or(1);
  out.samples = o.samples ? *o.samples : t.samples.value_or(5);
  out.refs = Json::object();
  if (t.kind == "intersect") {
    out.refs["ambient"] = t.ambient;
    out.refs["first"] = t.first;
    out.refs["second"] = t.second;
    out.label = t.first + " and " + t.second + " in " + t.ambient;
  } else {
    out.refs["structure"] = t.structure;
    out.label = t.structure;
  }
  Conventions conv = merge_conventions(t.conventions, o.conventions);
  SampleScheme scheme{out.seed, out.samples, true};
  try {
    if (t.kind == "gc")
      out.report = run_gc(*s.find(t.structure));
    else if (t.kind == "algebroid")
      out.report = run_algebroid(*s.find(t.structure));
    else if (t.kind == "shifted")
      out.report = run_shifted(*s.find(t.structure), scheme);
    else if (t.kind == "lagrangian")
      out.report = run_lagrangian(s, *s.find(t.structure), scheme);
    else if (t.kind == "hhs")
      out.report = run_hhs(s, *s.find(t.structure), conv);
    else if (t.kind == "foliation")
      out.report = run_foliation(s, *s.find(t.structure), conv, scheme);
    else if (t.kind == "lift")
      out.report = run_lift(s, *s.find(t.structure));
    else
      out.report = run_intersect(s, t);
  } catch (const std::domain_error& err) {
    out.report = hypothesis_failure(task_title(t.kind), err.what());
  } catch (const std::logic_error& err) {
    fail(t.at, err.what());
  }
  return out;
}

inline RunResult run_tasks(const Scene& s, const std::vector<TaskData>& tasks,
                           const RunOverrides& o = {}) {
  RunResult out;
  out.conventions = o.conventions;
  try {
    validate(out.conventions);
  } catch (const std::invalid_argument& e) {
    scene_detail::fail("/conventions", e.what());
  }
  for (const TaskData& t : tasks) out.results.push_back(run_task(s, t, o));
  return out;
}

inline RunResult run_scene(const Scene& s, const RunOverrides& o = {}) {
  return run_tasks(s, s.tasks, o);
}

// Tasks for one subcommand: the scene's own tasks of that kind (optionally
// narrowed to one structure), or a synthesized default when it has none.
inline std::vector<TaskData> select_tasks(const Scene& s, const std::string& kind,
                                          const std::string& name = "") {
  using namespace scene_detail;
  std::vector<TaskData> out;
  for (const TaskData& t : s.tasks)
    if (t.kind == kind && (name.empty() || t.structure == name ||
                           (kind == "intersect" &&
                            (t.ambient == name || t.first == name || t.second == name))))
      out.push_back(t);
  if (!out.empty()) return out;

  TaskData t;
  t.kind = kind;
  t.at = "/tasks";
  if (kind == "intersect") {
    std::vector<std::string> legs;
    for (const auto& [n, e] : s.structures) {
      if (e.kind == "linear_symplectic") {
        if (!t.ambient.empty()) fail("/tasks", "several linear symplectic models; add an intersect task");
        t.ambient = n;
      }
      if (e.kind == "linear_lagrangian") legs.push_back(n);
    }
    if (t.ambient.empty() || legs.size() != 2)
      fail("/tasks", "an intersect run needs one linear symplectic model and exactly two Lagrangians");
    t.first = legs[0];
    t.second = legs[1];
    out.push_back(std::move(t));
    return out;
  }
  for (const auto& [n, e] : s.structures) {
    if (!name.empty() && n != name) continue;
    if (!task_accepts(kind, e)) continue;
    if (!t.structure.empty())
      fail("/tasks", "several structures fit a " + kind + " check; pass --name");
    t.structure = n;
  }
  if (t.structure.empty())
    fail("/tasks", name.empty() ? "no structure in the scene fits a " + kind + " check"
                                : "structure \"" + name + "\" does not fit a " + kind + " check");
  out.push_back(std::move(t));
  return out;
}

// --- Rendering ---------------------------------------------------------------------

inline Json conventions_json(const Conventions& c) {
  Json j;
  j["square_rhs"] = rational_string(c.square_rhs);
  j["twisted_square_differential"] = c.twisted_square_differential;
  j["diagonal_sign"] = c.diagonal_sign;
  return j;
}

inline Json document(const RunResult& r) {
  Json doc;
  doc["schema"] = 1;
  doc["generator"] = "gcgeo 0.1.0";
  doc["conventions"] = conventions_json(r.conventions);
  doc["tasks"] = Json::array();
  for (const TaskResult& t : r.results) {
    Json entry;
    entry["task"] = t.kind;
    for (const auto& [k, v] : t.refs.items()) entry[k] = v;
    entry["seed"] = t.seed;
    entry["samples"] = t.samples;
    entry["pass"] = t.report.pass();
    entry["report"] = t.report.to_json();
    doc["tasks"].push_back(std::move(entry));
  }
  doc["pass"] = r.pass();
  return doc;
}

inline std::string render_json(const RunResult& r) { return document(r).dump(2) + "\n"; }

inline std::string render_text(const RunResult& r) {
  std::string out;
  for (const TaskResult& t : r.results) {
    out += "== " + t.kind + " " + t.label + " ==\n";
    out += t.report.title + "\n";
    for (const CheckItem& item : t.report.items) {
      out += (item.pass ? "[PASS] " : "[FAIL] ") + item.name;
      if (!item.detail.empty()) out += ": " + item.detail;
      out += "\n";
    }
    for (const auto& [k, v] : t.report.notes) out += "note: " + k + " = " + v + "\n";
    out += std::string("task ") + (t.report.pass() ? "PASS" : "FAIL") + "\n\n";
  }
  out += std::string("overall ") + (r.pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace gcgeo
