#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stablerank/mesh.hpp"
#include "stablerank/types.hpp"

namespace stablerank {

/// Piecewise-linear scalar function on a simplicial mesh, represented by its
/// vertex values and barycentric interpolation inside each top simplex.
/// Real-field functions keep a zero imaginary part at every vertex.
class PLFunction {
 public:
  PLFunction() = default;
  PLFunction(MeshPtr mesh, Field field, std::vector<Complex> values);

  static PLFunction constant(MeshPtr mesh, Field field, Complex value);
  /// PL interpolant of an ambient coordinate (exact at vertices).
  static PLFunction coordinate(MeshPtr mesh, Field field, int axis);

  const MeshPtr& mesh() const { return mesh_; }
  Field field() const { return field_; }
  const std::vector<Complex>& values() const { return values_; }
  Complex value(int vertex) const { return values_[vertex]; }
  int size() const { return static_cast<int>(values_.size()); }

  /// Barycentric interpolation at a mesh point.
  Complex eval(const MeshPoint& point) const;

 private:
  MeshPtr mesh_;
  Field field_ = Field::Complex;
  std::vector<Complex> values_;
};

/// Tuple of PL functions over one shared mesh and field.
struct PLTuple {
  std::vector<PLFunction> comps;

  PLTuple() = default;
  explicit PLTuple(std::vector<PLFunction> c);

  int n() const { return static_cast<int>(comps.size()); }
  const MeshPtr& mesh() const { return comps.front().mesh(); }
  Field field() const { return comps.front().field(); }
  const PLFunction& operator[](int i) const { return comps[i]; }
  PLFunction& operator[](int i) { return comps[i]; }
};

/// Exact sup norm: the maximum vertex modulus (PL interpolation cannot
/// exceed the convex hull of the vertex values, so the vertex max is the
/// true sup and is computed without tolerance).
double sup_norm(const PLFunction& f);

/// Largest aggregate Euclidean magnitude over vertices (an upper bound for
/// the tuple magnitude everywhere, by convexity).
double sup_magnitude(const PLTuple& t);

/// Apply a scalar recipe vertex-wise and return the PL interpolant of the
/// results.  All inputs must share one mesh; the output field must be Real
/// only if the recipe's outputs are real at every vertex (checked).
PLFunction pointwise_map(
    std::span<const PLFunction> inputs, Field out_field,
    const std::function<Complex(std::span<const Complex>)>& recipe);

// Named vertex-wise recipes used by the reductions.  add/sub/scale are exact
// as functions (affine recipes commute with interpolation); the others
// return the PL interpolant of the vertex-wise values.
PLFunction pl_add(const PLFunction& a, const PLFunction& b);
PLFunction pl_sub(const PLFunction& a, const PLFunction& b);
PLFunction pl_scale(const PLFunction& a, Complex s);
PLFunction pl_shift(const PLFunction& a, Complex s);
/// Vertex-wise quotient; throws std::domain_error on a zero denominator
/// vertex value.
PLFunction pl_divide(const PLFunction& num, const PLFunction& den);
PLFunction pl_conj(const PLFunction& a);
/// Real PL interpolant of the vertex moduli.
PLFunction pl_modulus(const PLFunction& a);
/// Vertex-wise rescale to unit modulus (every vertex value ends with
/// computed modulus exactly 1).  Throws std::domain_error on a zero vertex.
PLFunction pl_normalize(const PLFunction& a);

PLTuple pl_add(const PLTuple& a, const PLTuple& b);
PLTuple pl_sub(const PLTuple& a, const PLTuple& b);

/// Append one component.
PLTuple join(const PLTuple& t, const PLFunction& g);
/// Keep the listed components (indices ascending).
PLTuple subtuple(const PLTuple& t, std::span<const int> keep);

/// Piecewise-linear cutoff built from the modulus level sets of g.
///
/// With inside_one=true the vertex values are 1 where |g| <= t_in, 0 where
/// |g| >= t_out, and the linear ramp (t_out - |g|) / (t_out - t_in) between;
/// the endpoint values are bit-exact 0 and 1.  With inside_one=false the
/// complementary ramp (exactly 0 inside, 1 outside) is returned.  Requires
/// 0 <= t_in < t_out.
PLFunction urysohn_from_levels(const PLFunction& g, double t_in, double t_out,
                               bool inside_one = true);

/// Interpolate a function onto a refined mesh.  Exact for PL functions: old
/// vertices copy their value, new vertices average their edge endpoints.
PLFunction transfer(const MeshRefinement& refinement, const PLFunction& f);
PLTuple transfer(const MeshRefinement& refinement, const PLTuple& t);

/// Index of a vertex with minimal |g| (lowest index among ties).
int argmin_vertex_modulus(const PLFunction& g);

/// Rescale so the sup norm is exactly 1.0: divide by the vertex max and
/// re-normalize any vertex whose computed modulus exceeds 1, then force the
/// argmax vertex to computed modulus exactly 1.  Requires a nonzero input.
PLFunction rescale_to_unit_sup(const PLFunction& f);

}  // namespace stablerank
