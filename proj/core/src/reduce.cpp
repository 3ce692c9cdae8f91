#include "stablerank/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace stablerank {

namespace {

PLTuple single(const PLFunction& g) {
  return PLTuple(std::vector<PLFunction>{g});
}

PLTuple tuple_from_values(const MeshPtr& mesh, Field field,
                          std::vector<std::vector<Complex>> values) {
  std::vector<PLFunction> comps;
  comps.reserve(values.size());
  for (auto& v : values) comps.emplace_back(mesh, field, std::move(v));
  return PLTuple(std::move(comps));
}

PLTuple constant_tuple(const MeshPtr& mesh, Field field, int n,
                       Complex value) {
  std::vector<PLFunction> comps;
  comps.reserve(n);
  for (int j = 0; j < n; ++j)
    comps.push_back(PLFunction::constant(mesh, field, value));
  return PLTuple(std::move(comps));
}

Field wide_field(Field a, Field b) {
  return (a == Field::Real && b == Field::Real) ? Field::Real : Field::Complex;
}

void require_same_mesh(const PLTuple& f, const PLFunction& g,
                       const char* who) {
  if (f.mesh() != g.mesh())
    throw std::invalid_argument(std::string(who) +
                                ": f and g must share one mesh");
}

/// Re-bind vertex values onto a structurally identical mesh object so that
/// the same-mesh pointer checks of the expression builders pass.
PLFunction rehost(const PLFunction& f, const MeshPtr& mesh) {
  return PLFunction(mesh, f.field(), f.values());
}

PLTuple rehost(const PLTuple& t, const MeshPtr& mesh) {
  std::vector<PLFunction> comps;
  comps.reserve(t.n());
  for (const auto& c : t.comps) comps.push_back(rehost(c, mesh));
  return PLTuple(std::move(comps));
}

/// Vertex-value snapshot of the reduced tuple f + m*g.
PLTuple reduced_snapshot(const PLTuple& f, const PLTuple& m,
                         const PLFunction& g) {
  const int nv = f.mesh()->vertex_count();
  const Field field =
      wide_field(wide_field(f.field(), m.field()), g.field());
  std::vector<std::vector<Complex>> vals(
      f.n(), std::vector<Complex>(nv, Complex(0.0, 0.0)));
  for (int j = 0; j < f.n(); ++j)
    for (int v = 0; v < nv; ++v)
      vals[j][v] = f[j].value(v) + m[j].value(v) * g.value(v);
  return tuple_from_values(f.mesh(), field, std::move(vals));
}

MinModulusResult joint_min_or_throw(const PLTuple& f, const PLFunction& g,
                                    const CertifyOptions& opt,
                                    const char* who) {
  MinModulusResult mm = min_modulus_pl(join(f, g), opt);
  if (!(mm.cert.value > 0.0))
    throw std::domain_error(
        std::string(who) +
        ": input tuple is not invertible (certified exact minimum is 0)");
  return mm;
}

/// Sublevel radius derived from the certified joint minimum: small enough
/// that on {|g| <= radius} the leading tuple keeps magnitude
/// sqrt(c^2 - radius^2) and the blended multipliers keep their margins.
double sublevel_radius(double c, int n) {
  return std::min(0.5 * c,
                  c * std::sqrt(3.0) / (4.0 * std::sqrt(double(n))));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string coords_string(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    s += buf;
  }
  s += ")";
  return s;
}

std::string point_string(const SimplicialMesh& mesh, const MeshPoint& p) {
  std::vector<double> x = embed_point(mesh, p);
  return coords_string(x);
}

/// Retry ladder: re-seed up to max_retries per mesh level, refine globally
/// up to max_refinements levels, then fail honestly with the last reason.
template <typename Pass>
ReductionOutcome run_ladder(PLTuple f, PLFunction g,
                            const ReductionParams& params, Pass&& pass) {
  ReductionFailure fail;
  const int retries = std::max(1, params.max_retries);
  for (int refinement = 0;; ++refinement) {
    for (int attempt = 0; attempt < retries; ++attempt) {
      Rng rng = Rng::from(params.seed, static_cast<std::uint64_t>(refinement),
                          static_cast<std::uint64_t>(attempt));
      ReductionOutcome out = pass(f, g, rng, attempt);
      if (out.ok) {
        out.witness.params = params;
        out.witness.refinements_used = refinement;
        out.witness.retries_used = attempt;
        return out;
      }
      fail = std::move(out.failure);
      fail.retries_used = attempt + 1;
      fail.refinements_used = refinement;
      if (fail.needs_refinement) break;  // re-seeding cannot clear this gate
    }
    if (refinement >= params.max_refinements) break;
    MeshRefinement next = refine_mesh(f.mesh(), RefineStrategy::Global);
    f = transfer(next, f);
    g = transfer(next, g);
  }
  ReductionOutcome out;
  out.failure = std::move(fail);
  if (out.failure.reason.empty()) out.failure.reason = "reduction failed";
  return out;
}

PLTuple divide_tuple(const PLTuple& f, const PLFunction& g) {
  std::vector<PLFunction> comps;
  comps.reserve(f.n());
  for (int j = 0; j < f.n(); ++j) comps.push_back(pl_divide(f[j], g));
  return PLTuple(std::move(comps));
}

// ---------------------------------------------------------------------------
// small-norm reduction
// ---------------------------------------------------------------------------

ReductionOutcome small_norm_pass(const PLTuple& f, const PLFunction& g,
                                 const ReductionParams& params, Rng& rng) {
  ReductionOutcome out;
  const int n = f.n();
  const int nv = f.mesh()->vertex_count();
  const double eps = params.epsilon;

  MinModulusResult joint =
      joint_min_or_throw(f, g, params.certify, "small_norm_reduce");
  const double c = joint.value;
  MinModulusResult gm = min_modulus_pl(single(g), params.certify);

  DerivedThresholds th;
  th.c = c;
  th.t_outer = sublevel_radius(c, n);
  th.delta = std::sqrt(std::max(c * c - th.t_outer * th.t_outer, 0.0));

  std::vector<Certificate> certs;
  certs.push_back(joint.cert);

  const Field mfield = wide_field(f.field(), g.field());
  std::vector<std::vector<Complex>> avals(
      n, std::vector<Complex>(nv, Complex(0.0, 0.0)));
  int case_label = 0;

  if (gm.cert.value > 0.0) {
    // g is invertible: approximate f/g, the residual is the multiplier.
    case_label = 1;
    th.t_inner = 0.0;
    PLTuple F = divide_tuple(f, g);
    const double eps_eff = std::min(eps, eps * gm.value);
    ApproxResult ap = approx_invertible(F, eps_eff, rng,
                                        params.approx_attempts, nullptr,
                                        params.certify);
    if (!ap.ok) {
      out.failure.reason =
          "no invertible approximation of f/g within the attempt budget";
      return out;
    }
    certs.push_back(gm.cert);
    certs.push_back(ap.cert);
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < nv; ++v)
        avals[j][v] =
            clip_modulus(ap.u[j].value(v) - F[j].value(v), eps);
  } else {
    // g has a certified zero: perturb f away from the sublevel of |g| only,
    // divide off the sublevel, keep the multiplier exactly 0 inside.
    case_label = 2;
    th.t_inner = 0.5 * th.t_outer;
    PLFunction cutoff =
        urysohn_from_levels(g, th.t_inner, th.t_outer, /*inside_one=*/false);
    ApproxResult ap =
        approx_invertible(f, 2.0 * eps * th.t_inner, rng,
                          params.approx_attempts, &cutoff, params.certify);
    if (!ap.ok) {
      out.failure.reason =
          "no invertible masked approximation of f within the attempt budget";
      return out;
    }
    certs.push_back(ap.cert);
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < nv; ++v) {
        if (modulus(g.value(v)) > th.t_inner)
          avals[j][v] = clip_modulus(
              (ap.u[j].value(v) - f[j].value(v)) / g.value(v), eps);
        // inside the sublevel the multiplier stays exactly 0
      }
  }

  PLTuple a = tuple_from_values(f.mesh(), mfield, std::move(avals));
  for (int j = 0; j < n; ++j) {
    Certificate sc = certify_sup_norm(
        a[j], "sup-norm of multiplier component " + std::to_string(j));
    if (!(sc.value <= eps)) {
      out.failure.reason = "multiplier norm budget violated after clipping";
      return out;
    }
    certs.push_back(std::move(sc));
  }

  QuadExpr expr = expr_linear_combination(f, a, g, "f + a*g");
  InvertibleResult inv = check_invertible(expr, params.certify);
  if (!inv.invertible) {
    out.failure.reason =
        "could not certify invertibility of the reduced tuple";
    out.failure.offending = inv.offending;
    return out;
  }
  th.delta_prime = inv.cert.value;
  certs.push_back(inv.cert);

  ReductionWitness w;
  w.kind = WitnessKind::SmallNorm;
  w.multiplier = a;
  w.reduced = reduced_snapshot(f, a, g);
  w.certificates = std::move(certs);
  w.thresholds = th;
  w.case_label = case_label;
  out.ok = true;
  out.witness = std::move(w);
  return out;
}

// ---------------------------------------------------------------------------
// norm-one reduction
// ---------------------------------------------------------------------------

ReductionOutcome norm_one_pass(const PLTuple& f, const PLFunction& g,
                               const ReductionParams& params, Rng& rng) {
  ReductionOutcome out;
  const int n = f.n();
  const int nv = f.mesh()->vertex_count();

  MinModulusResult joint =
      joint_min_or_throw(f, g, params.certify, "norm_one_reduce");
  const double c = joint.value;
  MinModulusResult gm = min_modulus_pl(single(g), params.certify);

  DerivedThresholds th;
  th.c = c;
  th.t_outer = sublevel_radius(c, n);
  th.delta = std::sqrt(std::max(c * c - th.t_outer * th.t_outer, 0.0));

  std::vector<Certificate> certs;
  certs.push_back(joint.cert);

  const Field mfield = wide_field(f.field(), g.field());

  ReductionWitness w;
  w.kind = WitnessKind::NormOne;

  if (gm.value < th.t_outer) {
    // ---- case B: |g| gets small; blend a cutoff with a small-norm
    // multiplier so the modulus reaches exactly 1 at a designated vertex.
    //
    // The floor below is only valid where |g| stays under the sublevel
    // radius, so the cutoff must vanish before the blend can reach simplices
    // with larger values.  The cutoff level is lowered adaptively: every
    // simplex with a vertex under the level must keep all its vertex moduli
    // under the radius (a PL interpolant never exceeds its vertex moduli,
    // so |g| <= radius pointwise on that cover).
    w.case_label = 2;
    const double radius = th.t_outer;
    const int x0 = argmin_vertex_modulus(g);
    const double gx0 = modulus(g.value(x0));
    const SimplicialMesh& mesh = *f.mesh();
    const int S = mesh.simplex_count();
    std::vector<double> star_max(nv, 0.0);
    for (int s = 0; s < S; ++s) {
      auto sx = mesh.simplex(s);
      double maxm = 0.0;
      for (int i = 0; i < mesh.dimension + 1; ++i)
        maxm = std::max(maxm, modulus(g.value(sx[i])));
      for (int i = 0; i < mesh.dimension + 1; ++i)
        star_max[sx[i]] = std::max(star_max[sx[i]], maxm);
    }
    double level = radius;
    for (int vtx = 0; vtx < nv; ++vtx)
      if (star_max[vtx] > radius)
        level = std::min(level, modulus(g.value(vtx)));
    if (!(gx0 < level)) {
      out.failure.reason =
          "no mesh vertex strictly inside the cutoff sublevel";
      out.failure.needs_refinement = true;
      return out;
    }
    th.t_outer = level;
    th.delta = std::sqrt(std::max(c * c - level * level, 0.0));
    // Raising the inner radius to the best vertex level keeps the cutoff
    // equal to exactly 1 at that vertex.
    th.t_inner = std::max(0.5 * level, gx0);

    ReductionParams sub = params;
    sub.max_refinements = 0;  // the outer ladder controls refinement
    sub.seed = rng.next_u64();
    ReductionOutcome ysub = small_norm_reduce(f, g, 0.5, sub);
    if (!ysub.ok) {
      out.failure = ysub.failure;
      out.failure.reason =
          "small-norm sub-reduction failed: " + ysub.failure.reason;
      return out;
    }
    const PLTuple& y = ysub.witness.multiplier;

    PLFunction psi =
        urysohn_from_levels(g, th.t_inner, th.t_outer, /*inside_one=*/true);
    std::vector<std::vector<Complex>> vals(
        n, std::vector<Complex>(nv, Complex(0.0, 0.0)));
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < nv; ++v) {
        const double p = psi.value(v).real();
        const double om = 1.0 - p;
        const Complex blend = Complex(p, 0.0) + y[j].value(v) * om;
        if (modulus(blend) > p + 0.5 * om + 1e-12) {
          out.failure.reason = "blend bound violated at a vertex";
          return out;
        }
        vals[j][v] = clip_modulus(blend, 1.0);
      }
    PLTuple v = tuple_from_values(f.mesh(), mfield, std::move(vals));
    for (int j = 0; j < n; ++j)
      if (modulus(v[j].value(x0)) != 1.0) {
        out.failure.reason =
            "designated vertex does not reach modulus exactly 1";
        return out;
      }

    // On the cutoff cover |g| <= radius pointwise, so the blend keeps
    //   |f + v*g| >= sqrt(c^2 - radius^2) - sqrt(n)*radius >= c*sqrt(3)/4,
    // and the floor is certified there.  Off the cover the cutoff vanishes
    // at every vertex, the multiplier coincides with the small-norm one,
    // and the reduction is certified strictly positive.
    std::vector<int> cover, rest;
    for (int s = 0; s < S; ++s) {
      auto sx = mesh.simplex(s);
      double minm = std::numeric_limits<double>::infinity();
      for (int i = 0; i < mesh.dimension + 1; ++i)
        minm = std::min(minm, modulus(g.value(sx[i])));
      (minm < th.t_outer ? cover : rest).push_back(s);
    }
    th.floor = c * std::sqrt(3.0) / 4.0 * (1.0 - 1e-6);
    QuadExpr cexpr =
        expr_linear_combination(f, v, g, "f + v*g (cutoff cover)");
    BernsteinOutcome bo =
        certify_min_modulus_expr(cexpr, th.floor, params.certify, cover);
    if (!bo.ok) {
      out.failure.reason =
          "could not certify the reduced tuple above the margin floor on "
          "the cutoff cover";
      out.failure.offending = bo.offending;
      return out;
    }
    bo.cert.facts.push_back("region=simplices with a vertex where |g| < " +
                            std::to_string(th.t_outer));
    QuadExpr rexpr = expr_linear_combination(f, v, g, "f + v*g (off cover)");
    BernsteinOutcome po =
        certify_min_modulus_expr(rexpr, 0.0, params.certify, rest);
    if (!po.ok) {
      out.failure.reason =
          "could not certify positivity of the reduced tuple off the "
          "cutoff cover";
      out.failure.offending = po.offending;
      return out;
    }
    po.cert.facts.push_back(
        "region=simplices with all vertex |g| >= " +
        std::to_string(th.t_outer) + " (cutoff vanishes, multiplier equals "
        "the small-norm one)");
    th.delta_prime = ysub.witness.thresholds.delta_prime;

    for (const auto& cert : ysub.witness.certificates)
      certs.push_back(cert);
    for (int j = 0; j < n; ++j) {
      Certificate sc = certify_sup_norm(
          v[j], "sup-norm of multiplier component " + std::to_string(j));
      if (sc.value != 1.0) {
        out.failure.reason = "multiplier sup-norm is not exactly 1";
        return out;
      }
      certs.push_back(std::move(sc));
    }
    bo.cert.facts.push_back("designated vertex " + std::to_string(x0) +
                            " at " +
                            coords_string(f.mesh()->vertex(x0)));
    certs.push_back(bo.cert);
    certs.push_back(po.cert);

    w.multiplier = v;
    w.designated_vertex = x0;
  } else if (n == 1) {
    // ---- case A: g invertible, single component: normalize an invertible
    // approximation of f/g vertex-wise.
    w.case_label = 1;
    th.t_inner = 0.0;
    PLTuple F = divide_tuple(f, g);
    ApproxResult ap = approx_invertible(F, 0.5, rng, params.approx_attempts,
                                        nullptr, params.certify);
    if (!ap.ok) {
      out.failure.reason =
          "no invertible approximation of f/g within the attempt budget";
      return out;
    }
    PLTuple v = single(pl_normalize(ap.u[0]));
    QuadExpr expr = expr_linear_combination(f, v, g, "f + v*g");
    InvertibleResult inv = check_invertible(expr, params.certify);
    if (!inv.invertible) {
      out.failure.reason =
          "could not certify invertibility of the reduced tuple";
      out.failure.offending = inv.offending;
      return out;
    }
    certs.push_back(gm.cert);
    certs.push_back(ap.cert);
    {
      Certificate sc =
          certify_sup_norm(v[0], "sup-norm of multiplier component 0");
      if (sc.value != 1.0) {
        out.failure.reason = "multiplier sup-norm is not exactly 1";
        return out;
      }
      certs.push_back(std::move(sc));
    }
    th.delta_prime = inv.cert.value;
    certs.push_back(inv.cert);
    w.multiplier = v;
  } else {
    // ---- case C: g invertible, several components: normalize a minimal
    // invertible subtuple of an approximation of f/g, pad with ones.
    w.case_label = 3;
    th.t_inner = 0.0;
    PLTuple F = divide_tuple(f, g);
    const double eps_c = 0.5 / std::sqrt(double(n));
    ApproxResult ap = approx_invertible(F, eps_c, rng, params.approx_attempts,
                                        nullptr, params.certify);
    if (!ap.ok) {
      out.failure.reason =
          "no invertible approximation of f/g within the attempt budget";
      return out;
    }
    SubtupleResult st = minimal_invertible_subtuple(ap.u, params.certify);

    std::vector<char> kept(n, 0);
    for (int j : st.indices) kept[j] = 1;
    std::vector<std::vector<Complex>> vals(
        n, std::vector<Complex>(nv, Complex(1.0, 0.0)));
    for (int v = 0; v < nv; ++v) {
      double q = 0.0;
      for (int j : st.indices) {
        const Complex z = ap.u[j].value(v);
        q += z.real() * z.real() + z.imag() * z.imag();
      }
      const double mag = std::sqrt(q);
      for (int j : st.indices) vals[j][v] = ap.u[j].value(v) / mag;
    }
    std::vector<PLFunction> comps;
    comps.reserve(n);
    for (int j = 0; j < n; ++j) {
      PLFunction vj(f.mesh(), mfield, std::move(vals[j]));
      comps.push_back(kept[j] ? rescale_to_unit_sup(vj) : std::move(vj));
    }
    PLTuple v(std::move(comps));

    QuadExpr expr = expr_linear_combination(f, v, g, "f + v*g");
    InvertibleResult inv = check_invertible(expr, params.certify);
    if (!inv.invertible) {
      out.failure.reason =
          "could not certify invertibility of the reduced tuple";
      out.failure.offending = inv.offending;
      return out;
    }
    certs.push_back(gm.cert);
    certs.push_back(ap.cert);
    certs.push_back(st.cert);
    for (int j = 0; j < n; ++j) {
      Certificate sc = certify_sup_norm(
          v[j], "sup-norm of multiplier component " + std::to_string(j));
      if (sc.value != 1.0) {
        out.failure.reason = "multiplier sup-norm is not exactly 1";
        return out;
      }
      certs.push_back(std::move(sc));
    }
    th.delta_prime = inv.cert.value;
    certs.push_back(inv.cert);
    w.multiplier = v;
    w.subtuple = st.indices;
  }

  w.reduced = reduced_snapshot(f, w.multiplier, g);
  w.certificates = std::move(certs);
  w.thresholds = th;
  out.ok = true;
  out.witness = std::move(w);
  return out;
}

// ---------------------------------------------------------------------------
// unitary reduction
// ---------------------------------------------------------------------------

ReductionOutcome unitary_pass(const PLTuple& a, const PLFunction& b,
                              const ReductionParams& params, Rng& rng,
                              int attempt) {
  ReductionOutcome out;
  const int n = a.n();
  const int nv = a.mesh()->vertex_count();

  MinModulusResult joint =
      joint_min_or_throw(a, b, params.certify, "unitary_reduce");
  const Field mfield = wide_field(a.field(), b.field());

  DerivedThresholds th;
  th.c = joint.value;

  // Step 0: the all-ones multiplier is trivially invertible; accept it
  // whenever a + e*b already certifies.
  {
    PLTuple e = constant_tuple(a.mesh(), mfield, n, Complex(1.0, 0.0));
    QuadExpr expr0 = expr_linear_combination(a, e, b, "a + e*b");
    InvertibleResult inv0 = check_invertible(expr0, params.certify);
    if (inv0.invertible) {
      MinModulusResult me = min_modulus_pl(e, params.certify);
      ReductionWitness w;
      w.kind = WitnessKind::Unitary;
      w.case_label = 1;
      w.multiplier = e;
      w.reduced = reduced_snapshot(a, e, b);
      th.delta_prime = inv0.cert.value;
      w.thresholds = th;
      w.certificates = {joint.cert, me.cert, inv0.cert};
      out.ok = true;
      out.witness = std::move(w);
      return out;
    }
  }

  // Canonical pointwise solution row of x*a + y*b = 1.
  std::vector<std::vector<Complex>> xv(n, std::vector<Complex>(nv));
  std::vector<Complex> yv(nv);
  for (int v = 0; v < nv; ++v) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) {
      const Complex z = a[j].value(v);
      d += z.real() * z.real() + z.imag() * z.imag();
    }
    const Complex zb = b.value(v);
    d += zb.real() * zb.real() + zb.imag() * zb.imag();
    for (int j = 0; j < n; ++j) xv[j][v] = std::conj(a[j].value(v)) / d;
    yv[v] = std::conj(zb) / d;
  }
  PLTuple x = tuple_from_values(a.mesh(), mfield, std::move(xv));
  PLFunction y(a.mesh(), mfield, std::move(yv));

  const double supab = sup_magnitude(join(a, b));
  const double eps0 = std::min(0.5, 0.5 / (std::sqrt(double(n)) * supab)) *
                      std::pow(0.5, attempt);
  ApproxResult au = approx_invertible(x, eps0, rng, params.approx_attempts,
                                      nullptr, params.certify);
  if (!au.ok) {
    out.failure.reason =
        "no invertible approximation of the canonical solution row";
    return out;
  }
  const PLTuple& u = au.u;

  // The openness step: the perturbed scalar u*a + y*b must stay invertible.
  QuadExpr dot = expr_dot(u, a, "sum_j u_j*a_j + y*b");
  dot.components[0].push_back(QuadTerm{Complex(1.0, 0.0), y, b});
  BernsteinOutcome dotc = certify_min_modulus_expr(dot, 0.0, params.certify);
  if (!dotc.ok) {
    out.failure.reason =
        "could not certify the perturbed scalar combination away from 0";
    out.failure.offending = dotc.offending;
    return out;
  }
  double dev = 0.0;
  for (int v = 0; v < nv; ++v) {
    Complex s = -1.0;
    for (int j = 0; j < n; ++j) s += u[j].value(v) * a[j].value(v);
    s += y.value(v) * b.value(v);
    dev = std::max(dev, modulus(s));
  }
  dotc.cert.facts.push_back("max vertex deviation from 1 = " +
                            format_double(dev));
  th.delta_prime = dotc.cert.value;

  // Factor y through u vertex-wise and approximate by an invertible tuple.
  std::vector<std::vector<Complex>> wv(n, std::vector<Complex>(nv));
  for (int v = 0; v < nv; ++v) {
    double q = 0.0;
    for (int j = 0; j < n; ++j) {
      const Complex z = u[j].value(v);
      q += z.real() * z.real() + z.imag() * z.imag();
    }
    for (int j = 0; j < n; ++j)
      wv[j][v] = y.value(v) * std::conj(u[j].value(v)) / q;
  }
  PLTuple wraw = tuple_from_values(a.mesh(), mfield, std::move(wv));

  const double supu = sup_magnitude(u);
  const double supb = std::max(1.0, sup_norm(b));
  double eps1 = dotc.cert.value / (2.0 * std::sqrt(double(n)) * supu * supb);
  eps1 = std::min(eps1, 0.5) * std::pow(0.5, attempt);
  ApproxResult aw = approx_invertible(wraw, eps1, rng, params.approx_attempts,
                                      nullptr, params.certify);
  if (!aw.ok) {
    out.failure.reason =
        "no invertible approximation of the factored multiplier";
    return out;
  }
  const PLTuple& w = aw.u;

  QuadExpr expr = expr_linear_combination(a, w, b, "a + w*b");
  InvertibleResult inv = check_invertible(expr, params.certify);
  if (!inv.invertible) {
    out.failure.reason =
        "could not certify invertibility of the reduced tuple";
    out.failure.offending = inv.offending;
    return out;
  }

  ReductionWitness wit;
  wit.kind = WitnessKind::Unitary;
  wit.case_label = 2;
  wit.multiplier = w;
  wit.reduced = reduced_snapshot(a, w, b);
  wit.thresholds = th;
  wit.certificates = {joint.cert, au.cert, dotc.cert, aw.cert, inv.cert};
  out.ok = true;
  out.witness = std::move(wit);
  return out;
}

// ---------------------------------------------------------------------------
// stabilization
// ---------------------------------------------------------------------------

ReductionOutcome stabilize_pass(const PLTuple& f, const PLFunction& g, int n,
                                const ReductionParams& params, Rng& rng) {
  ReductionOutcome out;
  const int m = f.n();
  const int nv = f.mesh()->vertex_count();
  const Field mfield = wide_field(f.field(), g.field());

  MinModulusResult joint =
      joint_min_or_throw(f, g, params.certify, "stabilize_reduce");

  // Transformed tuple (f_1..f_n, f_{n+1}+g, ..., f_m+g, g): exactly PL.
  std::vector<PLFunction> tc;
  tc.reserve(m + 1);
  for (int j = 0; j < n; ++j) tc.push_back(f[j]);
  for (int j = n; j < m; ++j) tc.push_back(pl_add(f[j], g));
  tc.push_back(g);
  PLTuple t(std::move(tc));
  MinModulusResult mmt = min_modulus_pl(t, params.certify);
  if (!(mmt.cert.value > 0.0)) {
    out.failure.reason = "transformed tuple did not certify invertible";
    out.failure.needs_refinement = true;
    return out;
  }

  // Canonical pointwise solution row of the transformed tuple, and the
  // folded scalar h = sum_{j>n} a_j*t_j + a_last*g.
  std::vector<Complex> alast(nv);
  std::vector<Complex> hv(nv, Complex(0.0, 0.0));
  for (int v = 0; v < nv; ++v) {
    double q = 0.0;
    for (int j = 0; j <= m; ++j) {
      const Complex z = t[j].value(v);
      q += z.real() * z.real() + z.imag() * z.imag();
    }
    Complex acc(0.0, 0.0);
    for (int j = n; j <= m; ++j) {
      const Complex z = t[j].value(v);
      acc += (std::conj(z) / q) * z;
    }
    hv[v] = acc;
    alast[v] = std::conj(t[m].value(v)) / q;
  }
  PLFunction h(f.mesh(), mfield, std::move(hv));

  // The shortened problem (f_1..f_n, h) must itself certify invertible.
  std::vector<int> head(n);
  std::iota(head.begin(), head.end(), 0);
  PLTuple fn = subtuple(f, head);
  MinModulusResult mmfh = min_modulus_pl(join(fn, h), params.certify);
  if (!(mmfh.cert.value > 0.0)) {
    out.failure.reason =
        "shortened tuple did not certify invertible (refinement needed)";
    out.failure.needs_refinement = true;
    return out;
  }

  ReductionParams sub = params;
  sub.max_refinements = 0;  // the outer ladder controls refinement
  sub.seed = rng.next_u64();
  ReductionOutcome xsub = small_norm_reduce(fn, h, params.epsilon, sub);
  if (!xsub.ok) {
    out.failure = xsub.failure;
    out.failure.reason =
        "small-norm sub-reduction failed: " + xsub.failure.reason;
    return out;
  }
  const PLTuple& x = xsub.witness.multiplier;

  // Multiplier: c_j = x_j * a_last for the shortened block, 1 afterwards.
  std::vector<std::vector<Complex>> cv(
      m, std::vector<Complex>(nv, Complex(1.0, 0.0)));
  for (int j = 0; j < n; ++j)
    for (int v = 0; v < nv; ++v) cv[j][v] = x[j].value(v) * alast[v];
  PLTuple cmult = tuple_from_values(f.mesh(), mfield, std::move(cv));
  MinModulusResult mmc = min_modulus_pl(cmult, params.certify);
  if (!(mmc.cert.value > 0.0)) {
    out.failure.reason = "multiplier tuple did not certify invertible";
    return out;
  }

  QuadExpr expr = expr_linear_combination(f, cmult, g, "f + c*g");
  InvertibleResult inv = check_invertible(expr, params.certify);
  if (!inv.invertible) {
    out.failure.reason =
        "could not certify invertibility of the reduced tuple";
    out.failure.offending = inv.offending;
    return out;
  }

  DerivedThresholds th;
  th.c = joint.value;
  th.delta_prime = mmfh.value;

  ReductionWitness w;
  w.kind = WitnessKind::Stabilize;
  w.multiplier = cmult;
  w.reduced = reduced_snapshot(f, cmult, g);
  w.thresholds = th;
  w.stabilize_n = n;
  w.certificates = {joint.cert, mmt.cert, mmfh.cert};
  for (const auto& cert : xsub.witness.certificates)
    w.certificates.push_back(cert);
  w.certificates.push_back(mmc.cert);
  w.certificates.push_back(inv.cert);
  out.ok = true;
  out.witness = std::move(w);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

const char* witness_kind_name(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::SmallNorm: return "small-norm";
    case WitnessKind::NormOne: return "norm-one";
    case WitnessKind::AllUnits: return "all-units";
    case WitnessKind::Unitary: return "unitary";
    case WitnessKind::Stabilize: return "stabilize";
  }
  throw std::invalid_argument("unknown witness kind");
}

WitnessKind witness_kind_from_name(const std::string& name) {
  if (name == "small-norm") return WitnessKind::SmallNorm;
  if (name == "norm-one") return WitnessKind::NormOne;
  if (name == "all-units") return WitnessKind::AllUnits;
  if (name == "unitary") return WitnessKind::Unitary;
  if (name == "stabilize") return WitnessKind::Stabilize;
  throw std::invalid_argument("unknown witness kind: " + name);
}

ApproxResult approx_invertible(const PLTuple& h, double eps, Rng& rng,
                               int max_attempts, const PLFunction* mask,
                               const CertifyOptions& opt) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument(
        "approx_invertible: eps must be positive and finite");
  if (mask) {
    if (mask->mesh() != h.mesh())
      throw std::invalid_argument(
          "approx_invertible: mask must live on the tuple's mesh");
    if (mask->field() != Field::Real)
      throw std::invalid_argument("approx_invertible: mask must be real");
  }

  ApproxResult out;
  auto accept = [&](PLTuple cand) {
    MinModulusResult mm = min_modulus_pl(cand, opt);
    if (mm.cert.value > 0.0) {
      out.ok = true;
      out.u = std::move(cand);
      out.cert = std::move(mm.cert);
      return true;
    }
    return false;
  };
  if (accept(h)) return out;

  const int nv = h.mesh()->vertex_count();
  const int n = h.n();
  const bool complex_field = h.field() == Field::Complex;
  auto masked = [&](int v, Complex p) {
    return mask ? p * mask->value(v).real() : p;
  };

  // Deterministic first try: a constant real shift keeps constant inputs
  // constant and already clears generic zero sets.
  {
    ++out.attempts;
    const double s = 0.5 * eps;
    std::vector<std::vector<Complex>> vals(n, std::vector<Complex>(nv));
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < nv; ++v)
        vals[j][v] = h[j].value(v) + masked(v, Complex(s, 0.0));
    if (accept(tuple_from_values(h.mesh(), h.field(), std::move(vals))))
      return out;
  }

  // Random vertex perturbations with a radius that halves every 4 attempts.
  for (int k = 1; out.attempts < std::max(1, max_attempts); ++k) {
    ++out.attempts;
    const double radius = 0.5 * eps * std::pow(0.5, (k - 1) / 4);
    std::vector<std::vector<Complex>> vals(n, std::vector<Complex>(nv));
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < nv; ++v) {
        const Complex p =
            complex_field ? radius * rng.unit_disk()
                          : Complex(rng.uniform(-radius, radius), 0.0);
        vals[j][v] = h[j].value(v) + masked(v, p);
      }
    if (accept(tuple_from_values(h.mesh(), h.field(), std::move(vals))))
      return out;
  }
  return out;
}

ReductionOutcome small_norm_reduce(const PLTuple& f, const PLFunction& g,
                                   double epsilon,
                                   const ReductionParams& params) {
  require_same_mesh(f, g, "small_norm_reduce");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument(
        "small_norm_reduce: epsilon must be positive and finite");
  ReductionParams p = params;
  p.epsilon = epsilon;
  return run_ladder(f, g, p,
                    [&p](const PLTuple& fk, const PLFunction& gk, Rng& rng,
                         int) { return small_norm_pass(fk, gk, p, rng); });
}

ReductionOutcome norm_one_reduce(const PLTuple& f, const PLFunction& g,
                                 const ReductionParams& params) {
  require_same_mesh(f, g, "norm_one_reduce");
  return run_ladder(f, g, params,
                    [&params](const PLTuple& fk, const PLFunction& gk,
                              Rng& rng, int) {
                      return norm_one_pass(fk, gk, params, rng);
                    });
}

ReductionOutcome all_units_reduce(const PLTuple& f, const PLFunction& g,
                                  const ReductionParams& params) {
  require_same_mesh(f, g, "all_units_reduce");
  const double eps = params.epsilon;
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument(
        "all_units_reduce: epsilon must lie in (0, 1), or a multiplier "
        "component could vanish");

  // Solve the shifted problem (f - e*g, g); the multiplier x - e then has
  // every component valued in the closed disk around -1 of radius eps.
  std::vector<PLFunction> shifted;
  shifted.reserve(f.n());
  for (int j = 0; j < f.n(); ++j) shifted.push_back(pl_sub(f[j], g));
  ReductionOutcome sub =
      small_norm_reduce(PLTuple(std::move(shifted)), g, eps, params);
  if (!sub.ok) return sub;

  // Rebuild f, g on the mesh the sub-reduction ended on.
  PLTuple fk = f;
  PLFunction gk = g;
  for (int r = 0; r < sub.witness.refinements_used; ++r) {
    MeshRefinement ref = refine_mesh(fk.mesh(), RefineStrategy::Global);
    fk = transfer(ref, fk);
    gk = transfer(ref, gk);
  }
  const MeshPtr& mesh = sub.witness.multiplier.mesh();
  if (mesh->vertex_count() != fk.mesh()->vertex_count()) {
    ReductionOutcome out;
    out.failure.reason = "refinement replay mismatch";
    return out;
  }
  fk = rehost(fk, mesh);
  gk = rehost(gk, mesh);

  std::vector<PLFunction> ucomp;
  ucomp.reserve(f.n());
  for (int j = 0; j < f.n(); ++j)
    ucomp.push_back(pl_shift(sub.witness.multiplier[j], Complex(-1.0, 0.0)));
  PLTuple u(std::move(ucomp));

  // Record the joint minimum of the original (unshifted) problem; the sub
  // witness carries the shifted one.
  MinModulusResult joint =
      joint_min_or_throw(fk, gk, params.certify, "all_units_reduce");

  std::vector<Certificate> certs;
  certs.push_back(joint.cert);
  for (const auto& cert : sub.witness.certificates) certs.push_back(cert);
  for (int j = 0; j < f.n(); ++j) {
    MinModulusResult mm = min_modulus_pl(single(u[j]), params.certify);
    if (!(mm.cert.value > 0.0)) {
      ReductionOutcome out;
      out.failure.reason = "a multiplier component did not certify invertible";
      out.failure.refinements_used = sub.witness.refinements_used;
      return out;
    }
    mm.cert.target =
        "min |multiplier component " + std::to_string(j) + "|";
    certs.push_back(mm.cert);
  }

  QuadExpr expr = expr_linear_combination(fk, u, gk, "f + u*g");
  InvertibleResult inv = check_invertible(expr, params.certify);
  if (!inv.invertible) {
    ReductionOutcome out;
    out.failure.reason =
        "could not certify invertibility of the reduced tuple";
    out.failure.offending = inv.offending;
    out.failure.refinements_used = sub.witness.refinements_used;
    return out;
  }
  certs.push_back(inv.cert);

  ReductionOutcome out;
  ReductionWitness w;
  w.kind = WitnessKind::AllUnits;
  w.multiplier = u;
  w.reduced = reduced_snapshot(fk, u, gk);
  w.certificates = std::move(certs);
  w.params = params;
  w.thresholds = sub.witness.thresholds;
  w.thresholds.c = joint.value;
  w.refinements_used = sub.witness.refinements_used;
  w.retries_used = sub.witness.retries_used;
  w.case_label = sub.witness.case_label;
  out.ok = true;
  out.witness = std::move(w);
  return out;
}

ReductionOutcome unitary_reduce(const PLTuple& a, const PLFunction& b,
                                const ReductionParams& params) {
  require_same_mesh(a, b, "unitary_reduce");
  return run_ladder(a, b, params,
                    [&params](const PLTuple& ak, const PLFunction& bk,
                              Rng& rng, int attempt) {
                      return unitary_pass(ak, bk, params, rng, attempt);
                    });
}

ReductionOutcome stabilize_reduce(const PLTuple& f, const PLFunction& g,
                                  int n, const ReductionParams& params) {
  require_same_mesh(f, g, "stabilize_reduce");
  const int m = f.n();
  if (n < 1 || n > m)
    throw std::invalid_argument("stabilize_reduce: need 1 <= n <= m");
  if (n == m) {
    // Nothing to stabilize; the small-norm semantics apply unchanged.
    ReductionOutcome sub = small_norm_reduce(f, g, params.epsilon, params);
    if (sub.ok) sub.witness.stabilize_n = n;
    return sub;
  }
  return run_ladder(f, g, params,
                    [&params, n](const PLTuple& fk, const PLFunction& gk,
                                 Rng& rng, int) {
                      return stabilize_pass(fk, gk, n, params, rng);
                    });
}

SubtupleResult minimal_invertible_subtuple(const PLTuple& u,
                                           const CertifyOptions& opt) {
  MinModulusResult full = min_modulus_pl(u, opt);
  if (!(full.cert.value > 0.0))
    throw std::domain_error(
        "minimal_invertible_subtuple: input tuple is not invertible");

  std::vector<int> keep(u.n());
  std::iota(keep.begin(), keep.end(), 0);
  Certificate cert = full.cert;
  std::vector<std::string> facts;

  // Dropping a component can only shrink the pointwise magnitude, so an
  // index that fails to drop once can never drop later; one descending pass
  // therefore yields an inclusion-minimal invertible subtuple.
  for (int j = u.n() - 1; j >= 0 && keep.size() > 1; --j) {
    std::vector<int> trial;
    trial.reserve(keep.size() - 1);
    for (int i : keep)
      if (i != j) trial.push_back(i);
    PLTuple sub = subtuple(u, trial);
    MinModulusResult mm = min_modulus_pl(sub, opt);
    if (mm.cert.value > 0.0) {
      keep = std::move(trial);
      cert = std::move(mm.cert);
    } else {
      facts.push_back("component " + std::to_string(j) +
                      " is essential: without it the magnitude reaches " +
                      format_double(mm.value) + " near " +
                      point_string(*u.mesh(), mm.argmin));
    }
  }

  SubtupleResult out;
  out.indices = std::move(keep);
  out.cert = std::move(cert);
  out.cert.target = "min |subtuple|";
  for (auto& fact : facts) out.cert.facts.push_back(std::move(fact));
  return out;
}

VerifyReport verify_witness(const PLTuple& f, const PLFunction& g,
                            const ReductionWitness& w) {
  VerifyReport rep;
  auto fail = [&rep](std::string msg) {
    rep.ok = false;
    rep.failures.push_back(std::move(msg));
  };

  PLTuple fk = f;
  PLFunction gk = g;
  for (int r = 0; r < w.refinements_used; ++r) {
    MeshRefinement ref = refine_mesh(fk.mesh(), RefineStrategy::Global);
    fk = transfer(ref, fk);
    gk = transfer(ref, gk);
  }
  const MeshPtr& mesh = fk.mesh();

  if (w.multiplier.n() != fk.n()) {
    fail("multiplier length does not match the problem tuple");
    return rep;
  }
  if (w.multiplier.mesh()->vertex_count() != mesh->vertex_count() ||
      w.multiplier.mesh()->simplex_count() != mesh->simplex_count()) {
    fail("multiplier mesh does not match the replayed refinement");
    return rep;
  }
  PLTuple mult = rehost(w.multiplier, mesh);

  // The recorded reduced tuple must be the exact vertex-wise snapshot.
  PLTuple red = reduced_snapshot(fk, mult, gk);
  if (w.reduced.n() != red.n()) {
    fail("reduced tuple length mismatch");
  } else {
    bool same = true;
    for (int j = 0; j < red.n() && same; ++j)
      for (int v = 0; v < mesh->vertex_count() && same; ++v) {
        const Complex lhs = w.reduced[j].value(v);
        const Complex rhs = red[j].value(v);
        same = lhs.real() == rhs.real() && lhs.imag() == rhs.imag();
      }
    if (!same) fail("reduced tuple is not the vertex-wise snapshot of f + multiplier*g");
  }

  const CertifyOptions& opt = w.params.certify;
  MinModulusResult joint = min_modulus_pl(join(fk, gk), opt);
  if (!(joint.cert.value > 0.0)) fail("input joint tuple did not certify invertible");
  if (std::abs(joint.value - w.thresholds.c) >
      1e-9 * std::max(1.0, joint.value))
    fail("recorded joint minimum does not match a fresh computation");

  QuadExpr expr = expr_linear_combination(fk, mult, gk, "f + multiplier*g");
  auto check_reduced_positive = [&]() {
    InvertibleResult inv = check_invertible(expr, opt);
    if (!inv.invertible) fail("reduced tuple did not re-certify invertible");
  };

  switch (w.kind) {
    case WitnessKind::SmallNorm: {
      for (int j = 0; j < mult.n(); ++j)
        if (!(sup_norm(mult[j]) <= w.params.epsilon))
          fail("multiplier component " + std::to_string(j) +
               " exceeds the norm budget");
      check_reduced_positive();
      break;
    }
    case WitnessKind::NormOne: {
      for (int j = 0; j < mult.n(); ++j)
        if (sup_norm(mult[j]) != 1.0)
          fail("multiplier component " + std::to_string(j) +
               " does not have sup-norm exactly 1");
      if (w.case_label == 2) {
        const int x0 = w.designated_vertex;
        if (x0 < 0 || x0 >= mesh->vertex_count()) {
          fail("designated vertex out of range");
        } else {
          for (int j = 0; j < mult.n(); ++j)
            if (modulus(mult[j].value(x0)) != 1.0)
              fail("designated vertex modulus is not exactly 1 in component " +
                   std::to_string(j));
        }
      }
      if (w.case_label == 3) {
        std::vector<char> kept(mult.n(), 0);
        for (int j : w.subtuple)
          if (j >= 0 && j < mult.n()) kept[j] = 1;
        for (int j = 0; j < mult.n(); ++j) {
          if (kept[j]) continue;
          for (int v = 0; v < mesh->vertex_count(); ++v) {
            const Complex z = mult[j].value(v);
            if (z.real() != 1.0 || z.imag() != 0.0) {
              fail("padding component " + std::to_string(j) +
                   " is not identically 1");
              break;
            }
          }
        }
      }
      if (w.case_label == 2 && w.thresholds.floor > 0.0 &&
          w.thresholds.t_outer > 0.0) {
        // Replay the cover split: the floor holds on simplices with a
        // vertex under the cutoff level, strict positivity elsewhere.
        std::vector<int> cover, rest;
        for (int s = 0; s < mesh->simplex_count(); ++s) {
          auto sx = mesh->simplex(s);
          double minm = std::numeric_limits<double>::infinity();
          for (int i = 0; i < mesh->dimension + 1; ++i)
            minm = std::min(minm, modulus(gk.value(sx[i])));
          (minm < w.thresholds.t_outer ? cover : rest).push_back(s);
        }
        BernsteinOutcome bo =
            certify_min_modulus_expr(expr, w.thresholds.floor, opt, cover);
        if (!bo.ok)
          fail("reduced tuple did not re-certify above the recorded floor "
               "on the cutoff cover");
        BernsteinOutcome po = certify_min_modulus_expr(expr, 0.0, opt, rest);
        if (!po.ok)
          fail("reduced tuple did not re-certify positive off the cutoff "
               "cover");
      } else if (w.thresholds.floor > 0.0) {
        BernsteinOutcome bo = certify_min_modulus_expr(expr, w.thresholds.floor, opt);
        if (!bo.ok)
          fail("reduced tuple did not re-certify above the recorded floor");
      } else {
        check_reduced_positive();
      }
      break;
    }
    case WitnessKind::AllUnits: {
      const double bound = (1.0 - w.params.epsilon) * (1.0 - 1e-9);
      for (int j = 0; j < mult.n(); ++j) {
        MinModulusResult mm = min_modulus_pl(single(mult[j]), opt);
        if (!(mm.cert.value > 0.0))
          fail("multiplier component " + std::to_string(j) +
               " did not certify invertible");
        else if (mm.value < bound)
          fail("multiplier component " + std::to_string(j) +
               " fell below the construction bound");
      }
      check_reduced_positive();
      break;
    }
    case WitnessKind::Unitary: {
      MinModulusResult mm = min_modulus_pl(mult, opt);
      if (!(mm.cert.value > 0.0)) fail("multiplier tuple did not certify invertible");
      check_reduced_positive();
      break;
    }
    case WitnessKind::Stabilize: {
      const int nkeep = w.stabilize_n;
      if (nkeep < 1 || nkeep > mult.n()) {
        fail("recorded stabilization length out of range");
      } else {
        for (int j = nkeep; j < mult.n(); ++j)
          for (int v = 0; v < mesh->vertex_count(); ++v) {
            const Complex z = mult[j].value(v);
            if (z.real() != 1.0 || z.imag() != 0.0) {
              fail("trailing multiplier component " + std::to_string(j) +
                   " is not identically 1");
              break;
            }
          }
      }
      MinModulusResult mm = min_modulus_pl(mult, opt);
      if (!(mm.cert.value > 0.0)) fail("multiplier tuple did not certify invertible");
      check_reduced_positive();
      break;
    }
  }
  return rep;
}

}  // namespace stablerank
