#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stablerank/types.hpp"

namespace stablerank {

/// Built-in compact model spaces.
enum class ShapeTag { Interval, Circle, Rectangle, Torus, Sphere, Custom };

const char* shape_name(ShapeTag tag);
ShapeTag shape_from_name(const std::string& name);  // throws on unknown name

/// Finite simplicial complex with an embedding.
///
/// Top simplices are stored as flat index rows of length dimension+1 with a
/// consistent orientation (shared interior faces are traversed in opposite
/// directions by their two incident top simplices).
struct SimplicialMesh {
  int dimension = 1;    // dimension of the top simplices
  int ambient_dim = 1;  // dimension of the embedding space
  std::vector<double> coords;  // vertex_count() * ambient_dim, row-major
  std::vector<int> simplices;  // simplex_count() * (dimension + 1), row-major
  ShapeTag shape_tag = ShapeTag::Custom;
  int resolution = 0;

  int vertex_count() const {
    return ambient_dim == 0 ? 0 : static_cast<int>(coords.size()) / ambient_dim;
  }
  int simplex_count() const {
    return static_cast<int>(simplices.size()) / (dimension + 1);
  }
  std::span<const int> simplex(int s) const {
    return {simplices.data() + static_cast<std::size_t>(s) * (dimension + 1),
            static_cast<std::size_t>(dimension + 1)};
  }
  std::span<const double> vertex(int v) const {
    return {coords.data() + static_cast<std::size_t>(v) * ambient_dim,
            static_cast<std::size_t>(ambient_dim)};
  }
};

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

/// Build one of the stock meshes.  Throws std::invalid_argument for an
/// unusable resolution (interval/rectangle/sphere need >= 1, circle/torus
/// need >= 3) or an unsupported tag.
MeshPtr build_mesh(ShapeTag shape, int resolution);

/// Check structural invariants: index ranges, distinct vertices per simplex,
/// no duplicated top simplices, every (d-1)-face in at most two top
/// simplices, and orientation consistency across interior faces (for
/// dimension <= 2).  Throws std::invalid_argument with a description.
void validate_mesh(const SimplicialMesh& mesh);

enum class RefineStrategy { Global, Subset };

/// Result of a refinement step.  The refined mesh's top simplices partition
/// the parents exactly; new vertices are edge midpoints.
struct MeshRefinement {
  MeshPtr mesh;
  /// Per new-mesh vertex: pair of parent-mesh vertices. a == b means the
  /// vertex is a verbatim copy of parent vertex a; a < b means it is the
  /// midpoint of parent edge (a, b).
  std::vector<std::array<int, 2>> vertex_origin;
  /// Per new-mesh top simplex: index of the parent top simplex containing it.
  std::vector<int> parent_simplex;
  /// Per new-mesh top simplex: barycentric coordinates of its corners inside
  /// the parent simplex (entries are exact dyadics 0, 1/2, 1).
  std::vector<std::array<std::array<double, 3>, 3>> corner_bary;
};

/// Subdivide.  Global strategy bisects every top simplex (midpoint/red rule:
/// segments split in two, triangles into four).  Subset strategy refines the
/// marked top simplices and closes the mesh with bisections of neighbours so
/// the result is conforming.  Supports dimension <= 2.
MeshRefinement refine_mesh(const MeshPtr& mesh, RefineStrategy strategy,
                           std::span<const int> marked = {});

/// A point of the complex: simplex index plus barycentric coordinates
/// (dimension+1 entries, nonnegative, summing to one).
struct MeshPoint {
  int simplex = 0;
  std::vector<double> bary;
};

/// Uniformly random point: uniform top simplex, uniform (Dirichlet)
/// barycentric coordinates.  Deterministic given the Rng state.
MeshPoint sample_point(const SimplicialMesh& mesh, Rng& rng);

/// Map a point of the refined mesh to the equivalent point of the parent
/// mesh (same location inside the shared geometric realization).
MeshPoint to_parent_point(const MeshRefinement& refinement,
                          const MeshPoint& point);

/// Ambient coordinates of a mesh point.
std::vector<double> embed_point(const SimplicialMesh& mesh,
                                const MeshPoint& point);

}  // namespace stablerank
