#include "stablerank/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace stablerank {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::pair<int, int> undirected(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

MeshPtr finish(SimplicialMesh mesh) {
  validate_mesh(mesh);
  return std::make_shared<const SimplicialMesh>(std::move(mesh));
}

SimplicialMesh build_interval(int res) {
  SimplicialMesh m;
  m.dimension = 1;
  m.ambient_dim = 1;
  m.shape_tag = ShapeTag::Interval;
  m.resolution = res;
  m.coords.reserve(res + 1);
  for (int i = 0; i <= res; ++i) m.coords.push_back(double(i) / double(res));
  for (int i = 0; i < res; ++i) {
    m.simplices.push_back(i);
    m.simplices.push_back(i + 1);
  }
  return m;
}

SimplicialMesh build_circle(int res) {
  SimplicialMesh m;
  m.dimension = 1;
  m.ambient_dim = 2;
  m.shape_tag = ShapeTag::Circle;
  m.resolution = res;
  for (int k = 0; k < res; ++k) {
    const double t = 2.0 * kPi * double(k) / double(res);
    m.coords.push_back(std::cos(t));
    m.coords.push_back(std::sin(t));
  }
  for (int k = 0; k < res; ++k) {
    m.simplices.push_back(k);
    m.simplices.push_back((k + 1) % res);
  }
  return m;
}

// Grid square (i, j) -> two CCW triangles sharing the diagonal.
void push_cell(std::vector<int>& simplices, int a, int b, int c, int d) {
  // a---b lower edge, d---c upper edge; triangles (a,b,c) and (a,c,d).
  simplices.insert(simplices.end(), {a, b, c});
  simplices.insert(simplices.end(), {a, c, d});
}

SimplicialMesh build_rectangle(int res) {
  SimplicialMesh m;
  m.dimension = 2;
  m.ambient_dim = 2;
  m.shape_tag = ShapeTag::Rectangle;
  m.resolution = res;
  const int side = res + 1;
  for (int j = 0; j < side; ++j)
    for (int i = 0; i < side; ++i) {
      m.coords.push_back(double(i) / double(res));
      m.coords.push_back(double(j) / double(res));
    }
  auto vid = [side](int i, int j) { return j * side + i; };
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i)
      push_cell(m.simplices, vid(i, j), vid(i + 1, j), vid(i + 1, j + 1),
                vid(i, j + 1));
  return m;
}

SimplicialMesh build_torus(int res) {
  SimplicialMesh m;
  m.dimension = 2;
  m.ambient_dim = 3;
  m.shape_tag = ShapeTag::Torus;
  m.resolution = res;
  const double R = 2.0, r = 1.0;
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      const double u = 2.0 * kPi * double(i) / double(res);
      const double w = 2.0 * kPi * double(j) / double(res);
      m.coords.push_back((R + r * std::cos(w)) * std::cos(u));
      m.coords.push_back((R + r * std::cos(w)) * std::sin(u));
      m.coords.push_back(r * std::sin(w));
    }
  auto vid = [res](int i, int j) { return (j % res) * res + (i % res); };
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i)
      push_cell(m.simplices, vid(i, j), vid(i + 1, j), vid(i + 1, j + 1),
                vid(i, j + 1));
  return m;
}

void project_to_unit_sphere(std::vector<double>& coords) {
  for (std::size_t v = 0; v < coords.size(); v += 3) {
    double* p = coords.data() + v;
    const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    p[0] /= n;
    p[1] /= n;
    p[2] /= n;
  }
}

SimplicialMesh build_sphere(int res) {
  // Icosahedron base, `res` rounds of 4-way subdivision, vertices projected
  // onto the unit sphere after every round.
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> verts = {
      {-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  // Orient every base face outward (normal pointing away from the origin).
  for (auto& f : faces) {
    const auto& a = verts[f[0]];
    const auto& b = verts[f[1]];
    const auto& c = verts[f[2]];
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    const double nx = uy * vz - uz * vy;
    const double ny = uz * vx - ux * vz;
    const double nz = ux * vy - uy * vx;
    const double cx = a[0] + b[0] + c[0];
    const double cy = a[1] + b[1] + c[1];
    const double cz = a[2] + b[2] + c[2];
    if (nx * cx + ny * cy + nz * cz < 0.0) std::swap(f[1], f[2]);
  }

  SimplicialMesh m;
  m.dimension = 2;
  m.ambient_dim = 3;
  m.shape_tag = ShapeTag::Sphere;
  m.resolution = res;
  for (const auto& v : verts)
    m.coords.insert(m.coords.end(), {v[0], v[1], v[2]});
  for (const auto& f : faces)
    m.simplices.insert(m.simplices.end(), {f[0], f[1], f[2]});
  project_to_unit_sphere(m.coords);

  for (int round = 0; round < res; ++round) {
    std::map<std::pair<int, int>, int> midpoint;
    std::vector<int> next;
    next.reserve(m.simplices.size() * 4);
    auto mid = [&](int a, int b) {
      const auto key = undirected(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int id = static_cast<int>(m.coords.size()) / 3;
      for (int k = 0; k < 3; ++k)
        m.coords.push_back((m.coords[3 * a + k] + m.coords[3 * b + k]) / 2.0);
      midpoint.emplace(key, id);
      return id;
    };
    const int count = static_cast<int>(m.simplices.size()) / 3;
    for (int s = 0; s < count; ++s) {
      const int a = m.simplices[3 * s], b = m.simplices[3 * s + 1],
                c = m.simplices[3 * s + 2];
      const int ab = mid(a, b), bc = mid(b, c), ac = mid(a, c);
      next.insert(next.end(), {a, ab, ac});
      next.insert(next.end(), {ab, b, bc});
      next.insert(next.end(), {ac, bc, c});
      next.insert(next.end(), {ab, bc, ac});
    }
    m.simplices = std::move(next);
    project_to_unit_sphere(m.coords);
  }
  return m;
}

}  // namespace

const char* shape_name(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::Interval: return "interval";
    case ShapeTag::Circle: return "circle";
    case ShapeTag::Rectangle: return "rectangle";
    case ShapeTag::Torus: return "torus";
    case ShapeTag::Sphere: return "sphere";
    case ShapeTag::Custom: return "custom";
  }
  return "custom";
}

ShapeTag shape_from_name(const std::string& name) {
  if (name == "interval") return ShapeTag::Interval;
  if (name == "circle") return ShapeTag::Circle;
  if (name == "rectangle") return ShapeTag::Rectangle;
  if (name == "torus") return ShapeTag::Torus;
  if (name == "sphere") return ShapeTag::Sphere;
  if (name == "custom") return ShapeTag::Custom;
  throw std::invalid_argument("unknown shape tag: " + name);
}

MeshPtr build_mesh(ShapeTag shape, int resolution) {
  require(resolution >= 1, "mesh resolution must be >= 1");
  switch (shape) {
    case ShapeTag::Interval:
      return finish(build_interval(resolution));
    case ShapeTag::Circle:
      require(resolution >= 3, "circle resolution must be >= 3");
      return finish(build_circle(resolution));
    case ShapeTag::Rectangle:
      return finish(build_rectangle(resolution));
    case ShapeTag::Torus:
      require(resolution >= 3, "torus resolution must be >= 3");
      return finish(build_torus(resolution));
    case ShapeTag::Sphere:
      return finish(build_sphere(resolution));
    case ShapeTag::Custom:
      break;
  }
  throw std::invalid_argument("unsupported shape tag for build_mesh");
}

void validate_mesh(const SimplicialMesh& mesh) {
  require(mesh.dimension >= 1, "mesh dimension must be >= 1");
  require(mesh.ambient_dim >= 1, "ambient dimension must be >= 1");
  require(!mesh.coords.empty(), "mesh has no vertices");
  require(static_cast<int>(mesh.coords.size()) % mesh.ambient_dim == 0,
          "coordinate array size is not a multiple of the ambient dimension");
  const int width = mesh.dimension + 1;
  require(static_cast<int>(mesh.simplices.size()) % width == 0,
          "simplex array size is not a multiple of dimension+1");
  require(mesh.simplex_count() > 0, "mesh has no top simplices");

  const int V = mesh.vertex_count();
  std::set<std::vector<int>> seen;
  for (int s = 0; s < mesh.simplex_count(); ++s) {
    auto sx = mesh.simplex(s);
    std::vector<int> sorted(sx.begin(), sx.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      require(sorted[i] >= 0 && sorted[i] < V,
              "simplex vertex index out of range");
      require(i == 0 || sorted[i] != sorted[i - 1],
              "simplex has repeated vertices");
    }
    require(seen.insert(sorted).second, "duplicate top simplex");
  }

  if (mesh.dimension == 1) {
    // Face multiplicity: each vertex belongs to at most two segments, and a
    // consistent orientation means it is the head of at most one and the
    // tail of at most one.
    std::vector<int> heads(V, 0), tails(V, 0);
    for (int s = 0; s < mesh.simplex_count(); ++s) {
      auto sx = mesh.simplex(s);
      tails[sx[0]]++;
      heads[sx[1]]++;
    }
    for (int v = 0; v < V; ++v) {
      require(heads[v] <= 1 && tails[v] <= 1,
              "vertex face multiplicity exceeds two or orientation flips");
    }
  } else if (mesh.dimension == 2) {
    // Each directed edge at most once; each undirected edge at most twice.
    std::map<std::pair<int, int>, int> directed;
    for (int s = 0; s < mesh.simplex_count(); ++s) {
      auto sx = mesh.simplex(s);
      const int e[3][2] = {{sx[0], sx[1]}, {sx[1], sx[2]}, {sx[2], sx[0]}};
      for (const auto& d : e) {
        require(++directed[{d[0], d[1]}] <= 1,
                "edge traversed twice in the same direction "
                "(inconsistent orientation)");
      }
    }
    for (const auto& [edge, count] : directed) {
      const auto rev = directed.find({edge.second, edge.first});
      const int total = count + (rev == directed.end() ? 0 : rev->second);
      require(total <= 2, "edge shared by more than two triangles");
    }
  } else {
    // Higher dimension: only the face multiplicity invariant is checked.
    std::map<std::vector<int>, int> faces;
    for (int s = 0; s < mesh.simplex_count(); ++s) {
      auto sx = mesh.simplex(s);
      for (int skip = 0; skip < width; ++skip) {
        std::vector<int> face;
        for (int i = 0; i < width; ++i)
          if (i != skip) face.push_back(sx[i]);
        std::sort(face.begin(), face.end());
        require(++faces[face] <= 2, "face shared by more than two simplices");
      }
    }
  }
}

namespace {

struct RefineBuilder {
  const SimplicialMesh& parent;
  SimplicialMesh child;
  MeshRefinement out;
  std::map<std::pair<int, int>, int> midpoint_id;

  explicit RefineBuilder(const SimplicialMesh& p) : parent(p) {
    child.dimension = p.dimension;
    child.ambient_dim = p.ambient_dim;
    child.shape_tag = p.shape_tag;
    child.resolution = p.resolution;
    child.coords = p.coords;
    out.vertex_origin.reserve(p.vertex_count());
    for (int v = 0; v < p.vertex_count(); ++v)
      out.vertex_origin.push_back({v, v});
  }

  void create_midpoints(const std::set<std::pair<int, int>>& edges) {
    for (const auto& [a, b] : edges) {
      const int id = static_cast<int>(out.vertex_origin.size());
      for (int k = 0; k < parent.ambient_dim; ++k)
        child.coords.push_back((parent.coords[a * parent.ambient_dim + k] +
                                parent.coords[b * parent.ambient_dim + k]) /
                               2.0);
      out.vertex_origin.push_back({a, b});
      midpoint_id.emplace(std::make_pair(a, b), id);
    }
  }

  int mid(int a, int b) const { return midpoint_id.at(undirected(a, b)); }

  void emit(std::initializer_list<int> verts, int parent_ix,
            std::initializer_list<std::array<double, 3>> bary) {
    child.simplices.insert(child.simplices.end(), verts);
    out.parent_simplex.push_back(parent_ix);
    std::array<std::array<double, 3>, 3> cb{};
    int i = 0;
    for (const auto& b : bary) cb[i++] = b;
    out.corner_bary.push_back(cb);
  }
};

}  // namespace

MeshRefinement refine_mesh(const MeshPtr& mesh, RefineStrategy strategy,
                           std::span<const int> marked) {
  require(mesh != nullptr, "refine_mesh: null mesh");
  const SimplicialMesh& p = *mesh;
  require(p.dimension <= 2, "refine_mesh supports dimension <= 2");
  const int S = p.simplex_count();

  std::vector<char> red(S, 0);
  if (strategy == RefineStrategy::Global) {
    std::fill(red.begin(), red.end(), 1);
  } else {
    require(!marked.empty(), "subset refinement needs a non-empty mark set");
    for (int s : marked) {
      require(s >= 0 && s < S, "marked simplex index out of range");
      red[s] = 1;
    }
  }

  std::set<std::pair<int, int>> split;
  auto add_edges_of = [&](int s) {
    auto sx = p.simplex(s);
    if (p.dimension == 1) {
      split.insert(undirected(sx[0], sx[1]));
    } else {
      split.insert(undirected(sx[0], sx[1]));
      split.insert(undirected(sx[1], sx[2]));
      split.insert(undirected(sx[0], sx[2]));
    }
  };
  for (int s = 0; s < S; ++s)
    if (red[s]) add_edges_of(s);

  if (p.dimension == 2) {
    // Closure: a triangle with two or three split edges becomes red too.
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < S; ++s) {
        if (red[s]) continue;
        auto sx = p.simplex(s);
        const int n = split.count(undirected(sx[0], sx[1])) +
                      split.count(undirected(sx[1], sx[2])) +
                      split.count(undirected(sx[0], sx[2]));
        if (n >= 2) {
          red[s] = 1;
          add_edges_of(s);
          changed = true;
        }
      }
    }
  }

  RefineBuilder rb(p);
  rb.create_midpoints(split);

  const std::array<double, 3> bA = {1, 0, 0}, bB = {0, 1, 0}, bC = {0, 0, 1};
  const std::array<double, 3> mAB = {0.5, 0.5, 0}, mBC = {0, 0.5, 0.5},
                              mAC = {0.5, 0, 0.5};

  for (int s = 0; s < S; ++s) {
    auto sx = p.simplex(s);
    if (p.dimension == 1) {
      const int a = sx[0], b = sx[1];
      if (red[s]) {
        const int m = rb.mid(a, b);
        rb.emit({a, m}, s, {{1, 0, 0}, {0.5, 0.5, 0}});
        rb.emit({m, b}, s, {{0.5, 0.5, 0}, {0, 1, 0}});
      } else {
        rb.emit({a, b}, s, {{1, 0, 0}, {0, 1, 0}});
      }
      continue;
    }
    const int a = sx[0], b = sx[1], c = sx[2];
    const bool sab = split.count(undirected(a, b)) > 0;
    const bool sbc = split.count(undirected(b, c)) > 0;
    const bool sac = split.count(undirected(a, c)) > 0;
    if (red[s]) {
      const int ab = rb.mid(a, b), bc = rb.mid(b, c), ac = rb.mid(a, c);
      rb.emit({a, ab, ac}, s, {bA, mAB, mAC});
      rb.emit({ab, b, bc}, s, {mAB, bB, mBC});
      rb.emit({ac, bc, c}, s, {mAC, mBC, bC});
      rb.emit({ab, bc, ac}, s, {mAB, mBC, mAC});
    } else if (sab) {
      const int m = rb.mid(a, b);
      rb.emit({a, m, c}, s, {bA, mAB, bC});
      rb.emit({m, b, c}, s, {mAB, bB, bC});
    } else if (sbc) {
      const int m = rb.mid(b, c);
      rb.emit({a, b, m}, s, {bA, bB, mBC});
      rb.emit({a, m, c}, s, {bA, mBC, bC});
    } else if (sac) {
      const int m = rb.mid(a, c);
      rb.emit({a, b, m}, s, {bA, bB, mAC});
      rb.emit({b, c, m}, s, {bB, bC, mAC});
    } else {
      rb.emit({a, b, c}, s, {bA, bB, bC});
    }
  }

  validate_mesh(rb.child);
  MeshRefinement result = std::move(rb.out);
  result.mesh = std::make_shared<const SimplicialMesh>(std::move(rb.child));
  return result;
}

MeshPoint sample_point(const SimplicialMesh& mesh, Rng& rng) {
  MeshPoint pt;
  pt.simplex = rng.uniform_int(0, mesh.simplex_count() - 1);
  const int n = mesh.dimension + 1;
  pt.bary.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    // Exponential variates normalize to a uniform (flat Dirichlet) point.
    pt.bary[i] = -std::log(1.0 - rng.uniform01());
    sum += pt.bary[i];
  }
  for (int i = 0; i < n; ++i) pt.bary[i] /= sum;
  return pt;
}

MeshPoint to_parent_point(const MeshRefinement& refinement,
                          const MeshPoint& point) {
  const int dim = refinement.mesh->dimension;
  MeshPoint out;
  out.simplex = refinement.parent_simplex.at(point.simplex);
  out.bary.assign(dim + 1, 0.0);
  const auto& cb = refinement.corner_bary.at(point.simplex);
  for (int corner = 0; corner <= dim; ++corner)
    for (int k = 0; k <= dim; ++k)
      out.bary[k] += point.bary[corner] * cb[corner][k];
  return out;
}

std::vector<double> embed_point(const SimplicialMesh& mesh,
                                const MeshPoint& point) {
  std::vector<double> x(mesh.ambient_dim, 0.0);
  auto sx = mesh.simplex(point.simplex);
  for (int corner = 0; corner <= mesh.dimension; ++corner) {
    auto v = mesh.vertex(sx[corner]);
    for (int k = 0; k < mesh.ambient_dim; ++k)
      x[k] += point.bary[corner] * v[k];
  }
  return x;
}

}  // namespace stablerank
