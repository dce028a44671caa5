#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gcgeo/linalg.hpp"

namespace gcgeo {

// Bounded cochain complex of finite dimensional spaces over an exact field,
// with d^k : V^k -> V^{k+1}.  Absent degrees are zero.
template <class F>
struct LinearComplex {
  std::map<int, int> dims;
  std::map<int, Mat<F>> diffs;

  int dim(int k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
  }
  Mat<F> diff(int k) const {
    auto it = diffs.find(k);
    return it == diffs.end() ? Mat<F>(dim(k + 1), dim(k)) : it->second;
  }

  LinearComplex& set_dim(int k, int n) {
    if (n < 0) throw std::invalid_argument("negative dimension");
    if (n == 0)
      dims.erase(k);
    else
      dims[k] = n;
    return *this;
  }
  LinearComplex& set_diff(int k, Mat<F> m) {
    if (m.rows != dim(k + 1) || m.cols != dim(k))
      throw std::invalid_argument("differential shape mismatch");
    if (m.is_zero())
      diffs.erase(k);
    else
      diffs[k] = std::move(m);
    return *this;
  }

  int min_degree() const { return dims.empty() ? 0 : dims.begin()->first; }
  int max_degree() const { return dims.empty() ? 0 : dims.rbegin()->first; }
  int total_dim() const {
    int n = 0;
    for (const auto& [k, d] : dims) n += d;
    return n;
  }

  void check() const {
    for (const auto& [k, m] : diffs) {
      if (m.rows != dim(k + 1) || m.cols != dim(k))
        throw std::logic_error("differential shape mismatch");
      if (!(diff(k + 1) * m).is_zero()) throw std::logic_error("differential does not square to zero");
    }
  }

  bool operator==(const LinearComplex&) const = default;
};

// C[m]^k = C^{k+m} with differential (-1)^m d.
template <class F>
LinearComplex<F> shifted(const LinearComplex<F>& C, int m) {
  LinearComplex<F> out;
  for (const auto& [k, d] : C.dims) out.set_dim(k - m, d);
  F sign(m % 2 ? -1 : 1);
  for (const auto& [k, mat] : C.diffs) out.set_diff(k - m, sign * mat);
  return out;
}

// (C^v)^k = (C^{-k})^* with (d^v phi)(v) = -(-1)^{|phi|} phi(dv).
template <class F>
LinearComplex<F> dualized(const LinearComplex<F>& C) {
  LinearComplex<F> out;
  for (const auto& [k, d] : C.dims) out.set_dim(-k, d);
  for (int k = out.min_degree(); k < out.max_degree(); ++k) {
    F sign(k % 2 ? 1 : -1);
    out.set_diff(k, sign * C.diff(-k - 1).transpose());
  }
  return out;
}

template <class F>
LinearComplex<F> direct_sum(const LinearComplex<F>& A, const LinearComplex<F>& B) {
  LinearComplex<F> out;
  int lo = std::min(A.min_degree(), B.min_degree());
  int hi = std::max(A.max_degree(), B.max_degree());
  for (int k = lo; k <= hi; ++k) out.set_dim(k, A.dim(k) + B.dim(k));
  for (int k = lo; k < hi; ++k) {
    Mat<F> d(out.dim(k + 1), out.dim(k));
    d.paste(0, 0, A.diff(k));
    d.paste(A.dim(k + 1), A.dim(k), B.diff(k));
    out.set_diff(k, std::move(d));
  }
  return out;
}

// Degree-wise map commuting with the differentials.
template <class F>
struct ChainMap {
  LinearComplex<F> source;
  LinearComplex<F> target;
  std::map<int, Mat<F>> comps;

  Mat<F> comp(int k) const {
    auto it = comps.find(k);
    return it == comps.end() ? Mat<F>(target.dim(k), source.dim(k)) : it->second;
  }
  ChainMap& set_comp(int k, Mat<F> m) {
    if (m.rows != target.dim(k) || m.cols != source.dim(k))
      throw std::invalid_argument("component shape mismatch");
    if (m.is_zero())
      comps.erase(k);
    else
      comps[k] = std::move(m);
    return *this;
  }

  void check() const {
    source.check();
    target.check();
    for (const auto& [k, m] : comps)
      if (m.rows != target.dim(k) || m.cols != source.dim(k))
        throw std::logic_error("component shape mismatch");
    int lo = std::min(source.min_degree(), target.min_degree());
    int hi = std::max(source.max_degree(), target.max_degree());
    for (int k = lo; k < hi; ++k)
      if (!(target.diff(k) * comp(k) == comp(k + 1) * source.diff(k)))
        throw std::logic_error("map does not commute with the differentials");
  }
};

template <class F>
ChainMap<F> identity_chain_map(const LinearComplex<F>& C) {
  ChainMap<F> f{C, C, {}};
  for (const auto& [k, d] : C.dims) f.set_comp(k, Mat<F>::identity(d));
  return f;
}

template <class F>
ChainMap<F> compose(const ChainMap<F>& g, const ChainMap<F>& f) {
  ChainMap<F> out{f.source, g.target, {}};
  int lo = std::min(out.source.min_degree(), out.target.min_degree());
  int hi = std::max(out.source.max_degree(), out.target.max_degree());
  for (int k = lo; k <= hi; ++k) out.set_comp(k, g.comp(k) * f.comp(k));
  return out;
}

template <class F>
ChainMap<F> direct_sum(const ChainMap<F>& f, const ChainMap<F>& g) {
  ChainMap<F> out{direct_sum(f.source, g.source), direct_sum(f.target, g.target), {}};
  int lo = std::min(out.source.min_degree(), out.target.min_degree());
  int hi = std::max(out.source.max_degree(), out.target.max_degree());
  for (int k = lo; k <= hi; ++k) {
    Mat<F> m(out.target.dim(k), out.source.dim(k));
    m.paste(0, 0, f.comp(k));
    m.paste(f.target.dim(k), f.source.dim(k), g.comp(k));
    out.set_comp(k, std::move(m));
  }
  return out;
}

// (f^v)^k = (f^{-k})^T, a map C^v <- D^v for f : C -> D.
template <class F>
ChainMap<F> dual_map(const ChainMap<F>& f) {
  ChainMap<F> out{dualized(f.target), dualized(f.source), {}};
  for (int k = out.source.min_degree(); k <= out.source.max_degree(); ++k)
    out.set_comp(k, f.comp(-k).transpose());
  return out;
}

// [f | -g] : S_f (+) S_g -> T for two maps into the same target.
template <class F>
ChainMap<F> difference_map(const ChainMap<F>& f, const ChainMap<F>& g) {
  if (!(f.target == g.target)) throw std::invalid_argument("difference of maps with distinct targets");
  ChainMap<F> out{direct_sum(f.source, g.source), f.target, {}};
  for (int k = out.source.min_degree(); k <= out.source.max_degree(); ++k) {
    Mat<F> m(out.target.dim(k), out.source.dim(k));
    m.paste(0, 0, f.comp(k));
    m.paste(0, f.source.dim(k), -g.comp(k));
    out.set_comp(k, std::move(m));
  }
  return out;
}

// cone(f)^k = S^{k+1} (+) T^k with d(s,t) = (-ds, f(s) + dt).
template <class F>
LinearComplex<F> cone(const ChainMap<F>& f) {
  LinearComplex<F> out;
  int lo = std::min(f.source.min_degree() - 1, f.target.min_degree());
  int hi = std::max(f.source.max_degree() - 1, f.target.max_degree());
  for (int k = lo; k <= hi; ++k) out.set_dim(k, f.source.dim(k + 1) + f.target.dim(k));
  for (int k = lo; k < hi; ++k) {
    Mat<F> d(out.dim(k + 1), out.dim(k));
    d.paste(0, 0, -f.source.diff(k + 1));
    d.paste(f.source.dim(k + 2), 0, f.comp(k + 1));
    d.paste(f.source.dim(k + 2), f.source.dim(k + 1), f.target.diff(k));
    out.set_diff(k, std::move(d));
  }
  return out;
}

// fiber(u)^k = A^k (+) B^{k-1} with d(a,b) = (da, u(a) - db); a concrete model
// of the derived fiber of u, quasi-isomorphic to cone(u)[-1].
template <class F>
LinearComplex<F> mapping_fiber(const ChainMap<F>& u) {
  LinearComplex<F> out;
  int lo = std::min(u.source.min_degree(), u.target.min_degree() + 1);
  int hi = std::max(u.source.max_degree(), u.target.max_degree() + 1);
  for (int k = lo; k <= hi; ++k) out.set_dim(k, u.source.dim(k) + u.target.dim(k - 1));
  for (int k = lo; k < hi; ++k) {
    Mat<F> d(out.dim(k + 1), out.dim(k));
    d.paste(0, 0, u.source.diff(k));
    d.paste(u.source.dim(k + 1), 0, u.comp(k));
    d.paste(u.source.dim(k + 1), u.source.dim(k), -u.target.diff(k - 1));
    out.set_diff(k, std::move(d));
  }
  return out;
}

// For a commuting square v fa = fb u, the induced map fiber(u) -> fiber(v)
// acting as fa on the source part and fb on the shifted target part.
template <class F>
ChainMap<F> induced_fiber_map(const ChainMap<F>& u, const ChainMap<F>& v,
                              const ChainMap<F>& fa, const ChainMap<F>& fb) {
  if (!(fa.source == u.source) || !(fb.source == u.target) ||
      !(fa.target == v.source) || !(fb.target == v.target))
    throw std::invalid_argument("square endpoints do not line up");
  for (int k = u.source.min_degree() - 1; k <= u.source.max_degree() + 1; ++k)
    if (!(v.comp(k) * fa.comp(k) == fb.comp(k) * u.comp(k)))
      throw std::invalid_argument("square does not commute");
  ChainMap<F> out{mapping_fiber(u), mapping_fiber(v), {}};
  for (int k = out.source.min_degree(); k <= out.source.max_degree(); ++k) {
    Mat<F> m(out.target.dim(k), out.source.dim(k));
    m.paste(0, 0, fa.comp(k));
    m.paste(v.source.dim(k), u.source.dim(k), fb.comp(k - 1));
    out.set_comp(k, std::move(m));
  }
  return out;
}

template <class F>
int cohomology_dim(const LinearComplex<F>& C, int k) {
  return C.dim(k) - rank(C.diff(k)) - rank(C.diff(k - 1));
}

template <class F>
bool acyclic(const LinearComplex<F>& C) {
  for (int k = C.min_degree(); k <= C.max_degree(); ++k)
    if (cohomology_dim(C, k) != 0) return false;
  return true;
}

template <class F>
bool quasi_iso(const ChainMap<F>& f) {
  return acyclic(cone(f));
}

// Columns representing a basis of H^k: completes the image of d^{k-1} to the
// kernel of d^k and returns the completing kernel columns.
template <class F>
Mat<F> cohomology_basis(const LinearComplex<F>& C, int k) {
  Mat<F> ker = kernel_basis(C.diff(k));
  Mat<F> im = column_space_basis(C.diff(k - 1));
  Mat<F> full = hstack(im, ker);
  Mat<F> probe = full;
  auto pivots = rref_in_place(probe);
  std::vector<int> picked;
  for (int c : pivots)
    if (c >= im.cols) picked.push_back(c - im.cols);
  Mat<F> out(C.dim(k), static_cast<int>(picked.size()));
  for (std::size_t j = 0; j < picked.size(); ++j)
    for (int i = 0; i < out.rows; ++i) out.at(i, static_cast<int>(j)) = ker.at(i, picked[j]);
  return out;
}

}  // namespace gcgeo
