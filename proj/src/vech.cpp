#include "curvop/vech.hpp"

#include <cmath>

#include "curvop/errors.hpp"

namespace curvop {

namespace {
[[noreturn]] void shape_error() { throw DomainError("vector shapes do not match"); }
}

void add_scaled(VecH& y, cplx a, const VecH& x) {
  if (a == cplx{0.0, 0.0}) return;
  if (auto* yd = std::get_if<VecH::Dense>(&y.node)) {
    const auto* xd = std::get_if<VecH::Dense>(&x.node);
    if (!xd || xd->size() != yd->size()) shape_error();
    kern::ops().axpy(yd->size(), a, xd->data(), yd->data());
  } else if (auto* ys = std::get_if<VecH::Sparse>(&y.node)) {
    const auto* xs = std::get_if<VecH::Sparse>(&x.node);
    if (!xs) shape_error();
    for (const auto& [idx, v] : *xs) (*ys)[idx] += a * v;
  } else if (auto* yp = std::get_if<std::vector<VecH>>(&y.node)) {
    const auto* xp = std::get_if<std::vector<VecH>>(&x.node);
    if (!xp || xp->size() != yp->size()) shape_error();
    for (std::size_t i = 0; i < yp->size(); ++i) add_scaled((*yp)[i], a, (*xp)[i]);
  } else {
    auto& ye = std::get<VecH::Ext>(y.node);
    const auto* xe = std::get_if<VecH::Ext>(&x.node);
    if (!xe || xe->defect_coords.size() != ye.defect_coords.size()) shape_error();
    add_scaled(ye.inner(), a, xe->inner());
    kern::ops().axpy(ye.defect_coords.size(), a, xe->defect_coords.data(),
                     ye.defect_coords.data());
  }
}

void scale(VecH& x, cplx a) {
  if (auto* xd = std::get_if<VecH::Dense>(&x.node)) {
    kern::ops().scal(xd->size(), a, xd->data());
  } else if (auto* xs = std::get_if<VecH::Sparse>(&x.node)) {
    for (auto& [idx, v] : *xs) v *= a;
  } else if (auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    for (auto& p : *xp) scale(p, a);
  } else {
    auto& xe = std::get<VecH::Ext>(x.node);
    scale(xe.inner(), a);
    kern::ops().scal(xe.defect_coords.size(), a, xe.defect_coords.data());
  }
}

cplx inner(const VecH& x, const VecH& y) {
  if (const auto* xd = std::get_if<VecH::Dense>(&x.node)) {
    const auto* yd = std::get_if<VecH::Dense>(&y.node);
    if (!yd || yd->size() != xd->size()) shape_error();
    return kern::ops().dotc(xd->size(), xd->data(), yd->data());
  }
  if (const auto* xs = std::get_if<VecH::Sparse>(&x.node)) {
    const auto* ys = std::get_if<VecH::Sparse>(&y.node);
    if (!ys) shape_error();
    cplx acc{0.0, 0.0};
    // Iterate the smaller support.
    if (xs->size() <= ys->size()) {
      for (const auto& [idx, v] : *xs) {
        auto it = ys->find(idx);
        if (it != ys->end()) acc += v * std::conj(it->second);
      }
    } else {
      for (const auto& [idx, v] : *ys) {
        auto it = xs->find(idx);
        if (it != xs->end()) acc += it->second * std::conj(v);
      }
    }
    return acc;
  }
  if (const auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    const auto* yp = std::get_if<std::vector<VecH>>(&y.node);
    if (!yp || yp->size() != xp->size()) shape_error();
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < xp->size(); ++i) acc += inner((*xp)[i], (*yp)[i]);
    return acc;
  }
  const auto& xe = std::get<VecH::Ext>(x.node);
  const auto* ye = std::get_if<VecH::Ext>(&y.node);
  if (!ye || ye->defect_coords.size() != xe.defect_coords.size()) shape_error();
  return inner(xe.inner(), ye->inner()) +
         kern::ops().dotc(xe.defect_coords.size(), xe.defect_coords.data(),
                          ye->defect_coords.data());
}

double norm2(const VecH& x) {
  if (const auto* xd = std::get_if<VecH::Dense>(&x.node))
    return kern::ops().norm2(xd->size(), xd->data());
  if (const auto* xs = std::get_if<VecH::Sparse>(&x.node)) {
    double acc = 0.0;
    for (const auto& [idx, v] : *xs) acc += std::norm(v);
    return acc;
  }
  if (const auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    double acc = 0.0;
    for (const auto& p : *xp) acc += norm2(p);
    return acc;
  }
  const auto& xe = std::get<VecH::Ext>(x.node);
  return norm2(xe.inner()) +
         kern::ops().norm2(xe.defect_coords.size(), xe.defect_coords.data());
}

double norm(const VecH& x) { return std::sqrt(norm2(x)); }

bool same_shape(const VecH& x, const VecH& y) {
  if (x.node.index() != y.node.index()) return false;
  if (const auto* xd = std::get_if<VecH::Dense>(&x.node))
    return xd->size() == std::get<VecH::Dense>(y.node).size();
  if (std::get_if<VecH::Sparse>(&x.node)) return true;
  if (const auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    const auto& yp = std::get<std::vector<VecH>>(y.node);
    if (xp->size() != yp.size()) return false;
    for (std::size_t i = 0; i < xp->size(); ++i)
      if (!same_shape((*xp)[i], yp[i])) return false;
    return true;
  }
  const auto& xe = std::get<VecH::Ext>(x.node);
  const auto& ye = std::get<VecH::Ext>(y.node);
  return xe.defect_coords.size() == ye.defect_coords.size() &&
         same_shape(xe.inner(), ye.inner());
}

VecH zero_like(const VecH& x) {
  if (const auto* xd = std::get_if<VecH::Dense>(&x.node))
    return VecH::dense(std::vector<cplx>(xd->size(), cplx{0.0, 0.0}));
  if (std::get_if<VecH::Sparse>(&x.node)) return VecH::sparse({});
  if (const auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    std::vector<VecH> parts;
    parts.reserve(xp->size());
    for (const auto& p : *xp) parts.push_back(zero_like(p));
    return VecH::parts(std::move(parts));
  }
  const auto& xe = std::get<VecH::Ext>(x.node);
  return VecH::ext(zero_like(xe.inner()),
                   std::vector<cplx>(xe.defect_coords.size(), cplx{0.0, 0.0}));
}

void prune_zeros(VecH& x) {
  if (auto* xs = std::get_if<VecH::Sparse>(&x.node)) {
    for (auto it = xs->begin(); it != xs->end();)
      it = (it->second == cplx{0.0, 0.0}) ? xs->erase(it) : std::next(it);
  } else if (auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    for (auto& p : *xp) prune_zeros(p);
  } else if (auto* xe = std::get_if<VecH::Ext>(&x.node)) {
    prune_zeros(xe->inner());
  }
}

bool all_finite(const VecH& x) {
  if (const auto* xd = std::get_if<VecH::Dense>(&x.node)) {
    for (const cplx& v : *xd)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
  if (const auto* xs = std::get_if<VecH::Sparse>(&x.node)) {
    for (const auto& [idx, v] : *xs)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
  if (const auto* xp = std::get_if<std::vector<VecH>>(&x.node)) {
    for (const auto& p : *xp)
      if (!all_finite(p)) return false;
    return true;
  }
  const auto& xe = std::get<VecH::Ext>(x.node);
  for (const cplx& v : xe.defect_coords)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return all_finite(xe.inner());
}

}  // namespace curvop
