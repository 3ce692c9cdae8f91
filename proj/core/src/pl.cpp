#include "stablerank/pl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace stablerank {

Complex normalize_to_unit(Complex z) {
  if (!(std::isfinite(z.real()) && std::isfinite(z.imag())))
    throw std::domain_error("normalize_to_unit: non-finite value");
  double m = modulus(z);
  if (m == 0.0) throw std::domain_error("normalize_to_unit: zero value");
  for (int i = 0; i < 8 && m != 1.0; ++i) {
    z = {z.real() / m, z.imag() / m};
    m = modulus(z);
  }
  if (m == 1.0) return z;
  // Rare non-converging round-off cycle: walk the lesser component by single
  // ulps (sub-ulp steps of the modulus) until the computed modulus is 1.
  double re = z.real(), im = z.imag();
  const bool walk_im = std::abs(im) <= std::abs(re);
  for (int i = 0; i < 64 && m != 1.0; ++i) {
    double& t = walk_im ? im : re;
    const double away = t >= 0.0 ? 2.0 : -2.0;
    t = std::nextafter(t, m > 1.0 ? (t >= 0.0 ? 0.0 : -0.0) : away);
    m = std::hypot(re, im);
  }
  if (m != 1.0)
    throw std::domain_error("normalize_to_unit: failed to reach unit modulus");
  return {re, im};
}

Complex clip_modulus(Complex z, double cap) {
  if (cap < 0.0) throw std::domain_error("clip_modulus: negative cap");
  double m = modulus(z);
  if (m <= cap) return z;
  for (int i = 0; i < 16 && m > cap; ++i) {
    const double s = cap / m;
    z = {z.real() * s, z.imag() * s};
    m = modulus(z);
  }
  while (m > cap) {  // final one-ulp shaves of the dominant component
    double re = z.real(), im = z.imag();
    if (std::abs(re) >= std::abs(im))
      re = std::nextafter(re, 0.0);
    else
      im = std::nextafter(im, 0.0);
    z = {re, im};
    m = modulus(z);
  }
  return z;
}

namespace {

void check_real(const std::vector<Complex>& values) {
  for (const auto& v : values)
    if (v.imag() != 0.0)
      throw std::invalid_argument(
          "real-field function has a nonzero imaginary part");
}

Field combine_field(Field a, Field b) {
  return (a == Field::Real && b == Field::Real) ? Field::Real : Field::Complex;
}

void check_same_mesh(const PLFunction& a, const PLFunction& b) {
  if (a.mesh() != b.mesh())
    throw std::invalid_argument("functions live on different meshes");
}

}  // namespace

PLFunction::PLFunction(MeshPtr mesh, Field field, std::vector<Complex> values)
    : mesh_(std::move(mesh)), field_(field), values_(std::move(values)) {
  if (!mesh_) throw std::invalid_argument("PLFunction: null mesh");
  if (static_cast<int>(values_.size()) != mesh_->vertex_count())
    throw std::invalid_argument(
        "PLFunction: value count does not match the vertex count");
  if (field_ == Field::Real) check_real(values_);
}

PLFunction PLFunction::constant(MeshPtr mesh, Field field, Complex value) {
  if (!mesh) throw std::invalid_argument("PLFunction: null mesh");
  std::vector<Complex> vals(mesh->vertex_count(), value);
  return PLFunction(std::move(mesh), field, std::move(vals));
}

PLFunction PLFunction::coordinate(MeshPtr mesh, Field field, int axis) {
  if (!mesh) throw std::invalid_argument("PLFunction: null mesh");
  if (axis < 0 || axis >= mesh->ambient_dim)
    throw std::invalid_argument("PLFunction::coordinate: axis out of range");
  std::vector<Complex> vals;
  vals.reserve(mesh->vertex_count());
  for (int v = 0; v < mesh->vertex_count(); ++v)
    vals.emplace_back(mesh->vertex(v)[axis], 0.0);
  return PLFunction(std::move(mesh), field, std::move(vals));
}

Complex PLFunction::eval(const MeshPoint& point) const {
  auto sx = mesh_->simplex(point.simplex);
  Complex acc = 0.0;
  for (int i = 0; i <= mesh_->dimension; ++i)
    acc += point.bary[i] * values_[sx[i]];
  return acc;
}

PLTuple::PLTuple(std::vector<PLFunction> c) : comps(std::move(c)) {
  if (comps.empty()) throw std::invalid_argument("PLTuple: empty tuple");
  for (const auto& f : comps) {
    if (f.mesh() != comps.front().mesh())
      throw std::invalid_argument("PLTuple: components on different meshes");
    if (f.field() != comps.front().field())
      throw std::invalid_argument("PLTuple: components in different fields");
  }
}

double sup_norm(const PLFunction& f) {
  double best = 0.0;
  for (const auto& v : f.values()) best = std::max(best, modulus(v));
  return best;
}

double sup_magnitude(const PLTuple& t) {
  double best = 0.0;
  const int V = t.comps.front().size();
  for (int v = 0; v < V; ++v) {
    double sq = 0.0;
    for (const auto& f : t.comps) {
      const Complex z = f.value(v);
      sq += z.real() * z.real() + z.imag() * z.imag();
    }
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

PLFunction pointwise_map(
    std::span<const PLFunction> inputs, Field out_field,
    const std::function<Complex(std::span<const Complex>)>& recipe) {
  if (inputs.empty())
    throw std::invalid_argument("pointwise_map: no input functions");
  for (const auto& f : inputs) check_same_mesh(f, inputs.front());
  const int V = inputs.front().size();
  std::vector<Complex> out(V);
  std::vector<Complex> row(inputs.size());
  for (int v = 0; v < V; ++v) {
    for (std::size_t i = 0; i < inputs.size(); ++i) row[i] = inputs[i].value(v);
    out[v] = recipe(row);
  }
  return PLFunction(inputs.front().mesh(), out_field, std::move(out));
}

PLFunction pl_add(const PLFunction& a, const PLFunction& b) {
  check_same_mesh(a, b);
  std::vector<Complex> out(a.values());
  for (int v = 0; v < a.size(); ++v) out[v] += b.value(v);
  return PLFunction(a.mesh(), combine_field(a.field(), b.field()),
                    std::move(out));
}

PLFunction pl_sub(const PLFunction& a, const PLFunction& b) {
  check_same_mesh(a, b);
  std::vector<Complex> out(a.values());
  for (int v = 0; v < a.size(); ++v) out[v] -= b.value(v);
  return PLFunction(a.mesh(), combine_field(a.field(), b.field()),
                    std::move(out));
}

PLFunction pl_scale(const PLFunction& a, Complex s) {
  std::vector<Complex> out(a.values());
  for (auto& v : out) v *= s;
  const Field f =
      (a.field() == Field::Real && s.imag() == 0.0) ? Field::Real
                                                    : Field::Complex;
  return PLFunction(a.mesh(), f, std::move(out));
}

PLFunction pl_shift(const PLFunction& a, Complex s) {
  std::vector<Complex> out(a.values());
  for (auto& v : out) v += s;
  const Field f =
      (a.field() == Field::Real && s.imag() == 0.0) ? Field::Real
                                                    : Field::Complex;
  return PLFunction(a.mesh(), f, std::move(out));
}

PLFunction pl_divide(const PLFunction& num, const PLFunction& den) {
  check_same_mesh(num, den);
  std::vector<Complex> out(num.values());
  for (int v = 0; v < num.size(); ++v) {
    const Complex d = den.value(v);
    if (d.real() == 0.0 && d.imag() == 0.0)
      throw std::domain_error("pl_divide: zero denominator at a vertex");
    out[v] /= d;
  }
  return PLFunction(num.mesh(), combine_field(num.field(), den.field()),
                    std::move(out));
}

PLFunction pl_conj(const PLFunction& a) {
  std::vector<Complex> out(a.values());
  for (auto& v : out) v = std::conj(v);
  return PLFunction(a.mesh(), a.field(), std::move(out));
}

PLFunction pl_modulus(const PLFunction& a) {
  std::vector<Complex> out(a.size());
  for (int v = 0; v < a.size(); ++v) out[v] = Complex(modulus(a.value(v)), 0.0);
  return PLFunction(a.mesh(), Field::Real, std::move(out));
}

PLFunction pl_normalize(const PLFunction& a) {
  std::vector<Complex> out(a.size());
  for (int v = 0; v < a.size(); ++v) out[v] = normalize_to_unit(a.value(v));
  return PLFunction(a.mesh(), a.field(), std::move(out));
}

PLTuple pl_add(const PLTuple& a, const PLTuple& b) {
  if (a.n() != b.n()) throw std::invalid_argument("tuple sizes differ");
  std::vector<PLFunction> out;
  out.reserve(a.n());
  for (int i = 0; i < a.n(); ++i) out.push_back(pl_add(a[i], b[i]));
  return PLTuple(std::move(out));
}

PLTuple pl_sub(const PLTuple& a, const PLTuple& b) {
  if (a.n() != b.n()) throw std::invalid_argument("tuple sizes differ");
  std::vector<PLFunction> out;
  out.reserve(a.n());
  for (int i = 0; i < a.n(); ++i) out.push_back(pl_sub(a[i], b[i]));
  return PLTuple(std::move(out));
}

PLTuple join(const PLTuple& t, const PLFunction& g) {
  std::vector<PLFunction> out = t.comps;
  out.push_back(g);
  return PLTuple(std::move(out));
}

PLTuple subtuple(const PLTuple& t, std::span<const int> keep) {
  std::vector<PLFunction> out;
  out.reserve(keep.size());
  for (int i : keep) {
    if (i < 0 || i >= t.n())
      throw std::invalid_argument("subtuple: index out of range");
    out.push_back(t[i]);
  }
  return PLTuple(std::move(out));
}

PLFunction urysohn_from_levels(const PLFunction& g, double t_in, double t_out,
                               bool inside_one) {
  if (!(t_in >= 0.0) || !(t_out > t_in))
    throw std::invalid_argument("urysohn_from_levels needs 0 <= t_in < t_out");
  const double width = t_out - t_in;
  std::vector<Complex> out(g.size());
  for (int v = 0; v < g.size(); ++v) {
    const double m = modulus(g.value(v));
    // For m <= t_in the ratio is >= 1 in exact arithmetic, and monotone
    // correctly-rounded subtraction/division keep it >= 1 in floating point,
    // so the clamp returns a bit-exact 1 (and symmetrically a bit-exact 0
    // for m >= t_out).
    double ramp = (t_out - m) / width;
    ramp = std::clamp(ramp, 0.0, 1.0);
    out[v] = Complex(inside_one ? ramp : 1.0 - ramp, 0.0);
  }
  return PLFunction(g.mesh(), Field::Real, std::move(out));
}

PLFunction transfer(const MeshRefinement& refinement, const PLFunction& f) {
  const auto& origin = refinement.vertex_origin;
  std::vector<Complex> out(origin.size());
  for (std::size_t v = 0; v < origin.size(); ++v) {
    const auto [a, b] = origin[v];
    out[v] = (a == b) ? f.value(a) : (f.value(a) + f.value(b)) / 2.0;
  }
  return PLFunction(refinement.mesh, f.field(), std::move(out));
}

PLTuple transfer(const MeshRefinement& refinement, const PLTuple& t) {
  std::vector<PLFunction> out;
  out.reserve(t.n());
  for (const auto& f : t.comps) out.push_back(transfer(refinement, f));
  return PLTuple(std::move(out));
}

int argmin_vertex_modulus(const PLFunction& g) {
  int best = 0;
  double m = modulus(g.value(0));
  for (int v = 1; v < g.size(); ++v) {
    const double mv = modulus(g.value(v));
    if (mv < m) {
      m = mv;
      best = v;
    }
  }
  return best;
}

PLFunction rescale_to_unit_sup(const PLFunction& f) {
  const double s = sup_norm(f);
  if (s == 0.0)
    throw std::domain_error("rescale_to_unit_sup: zero function");
  int argmax = 0;
  double best = 0.0;
  for (int v = 0; v < f.size(); ++v) {
    const double m = modulus(f.value(v));
    if (m > best) {
      best = m;
      argmax = v;
    }
  }
  std::vector<Complex> out(f.values());
  for (auto& v : out) {
    v /= s;
    v = clip_modulus(v, 1.0);
  }
  out[argmax] = normalize_to_unit(out[argmax]);
  return PLFunction(f.mesh(), f.field(), std::move(out));
}

}  // namespace stablerank
