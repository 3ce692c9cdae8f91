#include "stablerank/serialize.hpp"

#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "stablerank/version.hpp"

namespace stablerank {

namespace {

using nlohmann::json;  // the map-based variant: keys serialize sorted

// ---------------------------------------------------------------- scalars

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("complex values must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

CertKind cert_kind_from_name(const std::string& name) {
  for (CertKind k : {CertKind::ExactMin, CertKind::BernsteinLowerBound,
                     CertKind::SupNorm, CertKind::Composite}) {
    if (name == cert_kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown certificate kind: " + name);
}

// ----------------------------------------------------------------- meshes

json mesh_to_json(const SimplicialMesh& mesh) {
  json j;
  if (mesh.shape_tag != ShapeTag::Custom) {
    j["builder"] = shape_name(mesh.shape_tag);
    j["resolution"] = mesh.resolution;
    return j;
  }
  j["dimension"] = mesh.dimension;
  j["ambient_dim"] = mesh.ambient_dim;
  j["coords"] = mesh.coords;
  j["simplices"] = mesh.simplices;
  return j;
}

MeshPtr mesh_from_json(const json& j) {
  if (j.contains("builder")) {
    return build_mesh(shape_from_name(j.at("builder").get<std::string>()),
                      j.at("resolution").get<int>());
  }
  auto mesh = std::make_shared<SimplicialMesh>();
  mesh->dimension = j.at("dimension").get<int>();
  mesh->ambient_dim = j.at("ambient_dim").get<int>();
  mesh->coords = j.at("coords").get<std::vector<double>>();
  mesh->simplices = j.at("simplices").get<std::vector<int>>();
  validate_mesh(*mesh);
  return mesh;
}

// ----------------------------------------------------------- PL functions

json values_to_json(const std::vector<Complex>& values) {
  json arr = json::array();
  for (const Complex& v : values) arr.push_back(complex_to_json(v));
  return arr;
}

std::vector<Complex> values_from_json(const json& j) {
  std::vector<Complex> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(complex_from_json(v));
  return out;
}

json pl_tuple_to_json(const PLTuple& t) {
  json arr = json::array();
  for (const PLFunction& c : t.comps) arr.push_back(values_to_json(c.values()));
  return arr;
}

PLTuple pl_tuple_from_json(const json& j, const MeshPtr& mesh, Field field) {
  std::vector<PLFunction> comps;
  comps.reserve(j.size());
  for (const json& c : j) {
    comps.emplace_back(mesh, field, values_from_json(c));
  }
  return PLTuple(std::move(comps));
}

// ----------------------------------------------------------- disk algebra

json poly_to_json(const disk::Poly& p) {
  json arr = json::array();
  for (const Complex& c : p.coeff) arr.push_back(complex_to_json(c));
  return arr;
}

disk::Poly poly_from_json(const json& j) {
  disk::Poly p;
  p.coeff = values_from_json(j);
  return p;
}

bool den_is_one(const disk::DiskElement& e) {
  return e.den.coeff.size() == 1 && e.den.coeff[0] == Complex{1.0, 0.0};
}

json element_to_json(const disk::DiskElement& e) {
  json j;
  j["num"] = poly_to_json(e.num);
  if (!den_is_one(e)) {
    j["den"] = poly_to_json(e.den);
    j["den_lower"] = e.den_lower;
  }
  return j;
}

/// Primary inputs: any nontrivial denominator is re-certified from scratch.
disk::DiskElement element_from_json_checked(const json& j) {
  disk::Poly num = poly_from_json(j.at("num"));
  if (!j.contains("den")) return disk::element(std::move(num));
  return disk::element(std::move(num), poly_from_json(j.at("den")));
}

/// Derived data (multipliers, reduced tuples): the stored bound is loaded
/// as-is; the witness verifier re-derives every element it relies on.
disk::DiskElement element_from_json_trusted(const json& j) {
  disk::Poly num = poly_from_json(j.at("num"));
  if (!j.contains("den")) return disk::element(std::move(num));
  return disk::element_trusted(std::move(num), poly_from_json(j.at("den")),
                               j.at("den_lower").get<double>());
}

json disk_tuple_to_json(const disk::DiskTuple& t) {
  json arr = json::array();
  for (const disk::DiskElement& e : t.comps) arr.push_back(element_to_json(e));
  return arr;
}

disk::DiskTuple disk_tuple_from_json(const json& j, bool trusted) {
  disk::DiskTuple t;
  t.comps.reserve(j.size());
  for (const json& e : j) {
    t.comps.push_back(trusted ? element_from_json_trusted(e)
                              : element_from_json_checked(e));
  }
  return t;
}

// ------------------------------------------------------------ certificates

json certificate_to_json(const Certificate& c) {
  json j;
  j["kind"] = cert_kind_name(c.kind);
  j["value"] = c.value;
  if (!c.target.empty()) j["target"] = c.target;
  if (!c.facts.empty()) j["facts"] = c.facts;
  if (c.refinements_used != 0) j["refinements_used"] = c.refinements_used;
  if (!c.trace.empty()) {
    json arr = json::array();
    for (const SimplexBound& b : c.trace) {
      json e;
      e["simplex"] = b.simplex;
      e["lower_bound"] = b.lower_bound;
      e["dual_gap"] = b.dual_gap;
      e["subdivisions"] = b.subdivisions;
      arr.push_back(std::move(e));
    }
    j["trace"] = std::move(arr);
  }
  if (!c.parts.empty()) {
    json arr = json::array();
    for (const Certificate& p : c.parts) arr.push_back(certificate_to_json(p));
    j["parts"] = std::move(arr);
  }
  return j;
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.kind = cert_kind_from_name(j.at("kind").get<std::string>());
  c.value = j.at("value").get<double>();
  if (j.contains("target")) c.target = j.at("target").get<std::string>();
  if (j.contains("facts")) {
    c.facts = j.at("facts").get<std::vector<std::string>>();
  }
  if (j.contains("refinements_used")) {
    c.refinements_used = j.at("refinements_used").get<int>();
  }
  if (j.contains("trace")) {
    for (const json& e : j.at("trace")) {
      SimplexBound b;
      b.simplex = e.at("simplex").get<int>();
      b.lower_bound = e.at("lower_bound").get<double>();
      b.dual_gap = e.at("dual_gap").get<double>();
      b.subdivisions = e.at("subdivisions").get<int>();
      c.trace.push_back(b);
    }
  }
  if (j.contains("parts")) {
    for (const json& p : j.at("parts")) {
      c.parts.push_back(certificate_from_json(p));
    }
  }
  return c;
}

json certificates_to_json(const std::vector<Certificate>& certs) {
  json arr = json::array();
  for (const Certificate& c : certs) arr.push_back(certificate_to_json(c));
  return arr;
}

std::vector<Certificate> certificates_from_json(const json& j) {
  std::vector<Certificate> out;
  out.reserve(j.size());
  for (const json& c : j) out.push_back(certificate_from_json(c));
  return out;
}

// ----------------------------------------------------- params / thresholds

json params_to_json(const ReductionParams& p) {
  json j;
  j["epsilon"] = p.epsilon;
  j["max_retries"] = p.max_retries;
  j["max_refinements"] = p.max_refinements;
  j["seed"] = p.seed;
  j["approx_attempts"] = p.approx_attempts;
  json c;
  c["guard"] = p.certify.guard;
  c["max_cells"] = p.certify.max_cells;
  c["max_depth"] = p.certify.max_depth;
  c["outward_intervals"] = p.certify.outward_intervals;
  c["keep_trace"] = p.certify.keep_trace;
  j["certify"] = std::move(c);
  return j;
}

ReductionParams params_from_json(const json& j) {
  ReductionParams p;
  if (j.contains("epsilon")) p.epsilon = j.at("epsilon").get<double>();
  if (j.contains("max_retries")) {
    p.max_retries = j.at("max_retries").get<int>();
  }
  if (j.contains("max_refinements")) {
    p.max_refinements = j.at("max_refinements").get<int>();
  }
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("approx_attempts")) {
    p.approx_attempts = j.at("approx_attempts").get<int>();
  }
  if (j.contains("certify")) {
    const json& c = j.at("certify");
    if (c.contains("guard")) p.certify.guard = c.at("guard").get<double>();
    if (c.contains("max_cells")) {
      p.certify.max_cells = c.at("max_cells").get<int>();
    }
    if (c.contains("max_depth")) {
      p.certify.max_depth = c.at("max_depth").get<int>();
    }
    if (c.contains("outward_intervals")) {
      p.certify.outward_intervals = c.at("outward_intervals").get<bool>();
    }
    if (c.contains("keep_trace")) {
      p.certify.keep_trace = c.at("keep_trace").get<bool>();
    }
  }
  return p;
}

json thresholds_to_json(const DerivedThresholds& t) {
  json j;
  j["c"] = t.c;
  j["t_inner"] = t.t_inner;
  j["t_outer"] = t.t_outer;
  j["delta"] = t.delta;
  j["delta_prime"] = t.delta_prime;
  j["floor"] = t.floor;
  return j;
}

DerivedThresholds thresholds_from_json(const json& j) {
  DerivedThresholds t;
  t.c = j.at("c").get<double>();
  t.t_inner = j.at("t_inner").get<double>();
  t.t_outer = j.at("t_outer").get<double>();
  t.delta = j.at("delta").get<double>();
  t.delta_prime = j.at("delta_prime").get<double>();
  t.floor = j.at("floor").get<double>();
  return t;
}

json failure_to_json(const ReductionFailure& f) {
  json j;
  j["reason"] = f.reason;
  j["retries_used"] = f.retries_used;
  j["refinements_used"] = f.refinements_used;
  if (!f.offending.empty()) j["offending"] = f.offending;
  return j;
}

ReductionFailure failure_from_json(const json& j) {
  ReductionFailure f;
  f.reason = j.at("reason").get<std::string>();
  f.retries_used = j.at("retries_used").get<int>();
  f.refinements_used = j.at("refinements_used").get<int>();
  if (j.contains("offending")) {
    f.offending = j.at("offending").get<std::vector<int>>();
  }
  return f;
}

// ------------------------------------------------------------- witnesses

json pl_witness_to_json(const ReductionWitness& w) {
  json j;
  j["kind"] = witness_kind_name(w.kind);
  j["multiplier"] = pl_tuple_to_json(w.multiplier);
  j["reduced"] = pl_tuple_to_json(w.reduced);
  j["certificates"] = certificates_to_json(w.certificates);
  j["params"] = params_to_json(w.params);
  j["thresholds"] = thresholds_to_json(w.thresholds);
  j["refinements_used"] = w.refinements_used;
  j["retries_used"] = w.retries_used;
  j["case_label"] = w.case_label;
  if (!w.subtuple.empty()) j["subtuple"] = w.subtuple;
  if (w.designated_vertex >= 0) j["designated_vertex"] = w.designated_vertex;
  if (w.stabilize_n != 0) j["stabilize_n"] = w.stabilize_n;
  return j;
}

ReductionWitness pl_witness_from_json(const json& j, const MeshPtr& problem_mesh,
                                      Field field) {
  ReductionWitness w;
  w.kind = witness_kind_from_name(j.at("kind").get<std::string>());
  w.refinements_used = j.at("refinements_used").get<int>();
  w.retries_used = j.at("retries_used").get<int>();
  w.case_label = j.at("case_label").get<int>();
  if (j.contains("subtuple")) {
    w.subtuple = j.at("subtuple").get<std::vector<int>>();
  }
  if (j.contains("designated_vertex")) {
    w.designated_vertex = j.at("designated_vertex").get<int>();
  }
  if (j.contains("stabilize_n")) {
    w.stabilize_n = j.at("stabilize_n").get<int>();
  }
  w.params = params_from_json(j.at("params"));
  w.thresholds = thresholds_from_json(j.at("thresholds"));
  w.certificates = certificates_from_json(j.at("certificates"));
  // The witness tuples live on the mesh the ladder ended with: replay the
  // recorded number of global refinements of the problem mesh.
  MeshPtr mesh = problem_mesh;
  for (int i = 0; i < w.refinements_used; ++i) {
    mesh = refine_mesh(mesh, RefineStrategy::Global).mesh;
  }
  w.multiplier = pl_tuple_from_json(j.at("multiplier"), mesh, field);
  w.reduced = pl_tuple_from_json(j.at("reduced"), mesh, field);
  return w;
}

json disk_witness_to_json(const disk::DiskWitness& w) {
  json j;
  j["multiplier"] = disk_tuple_to_json(w.multiplier);
  j["reduced"] = disk_tuple_to_json(w.reduced);
  j["y"] = disk_tuple_to_json(w.y);
  j["zeta0"] = complex_to_json(w.zeta0);
  j["m"] = w.m;
  json mob;
  mob["eta"] = w.mobius.eta;
  mob["epsilon"] = w.mobius.epsilon;
  mob["a"] = w.mobius.a;
  j["mobius"] = std::move(mob);
  j["c"] = w.c;
  j["t_outer"] = w.t_outer;
  j["delta"] = w.delta;
  j["delta_prime"] = w.delta_prime;
  j["g_upper"] = w.g_upper;
  j["floor"] = w.floor;
  json sb = json::array();
  for (const disk::BoundPair& b : w.sup_bounds) {
    sb.push_back(json::array({b.lower, b.upper}));
  }
  j["sup_bounds"] = std::move(sb);
  j["certificates"] = certificates_to_json(w.certificates);
  return j;
}

disk::DiskWitness disk_witness_from_json(const json& j) {
  disk::DiskWitness w;
  w.multiplier = disk_tuple_from_json(j.at("multiplier"), /*trusted=*/true);
  w.reduced = disk_tuple_from_json(j.at("reduced"), /*trusted=*/true);
  // y feeds the verifier's rebuild, so it gets the checked parse.
  w.y = disk_tuple_from_json(j.at("y"), /*trusted=*/false);
  w.zeta0 = complex_from_json(j.at("zeta0"));
  w.m = j.at("m").get<int>();
  const json& mob = j.at("mobius");
  w.mobius.eta = mob.at("eta").get<double>();
  w.mobius.epsilon = mob.at("epsilon").get<double>();
  w.mobius.a = mob.at("a").get<double>();
  w.c = j.at("c").get<double>();
  w.t_outer = j.at("t_outer").get<double>();
  w.delta = j.at("delta").get<double>();
  w.delta_prime = j.at("delta_prime").get<double>();
  w.g_upper = j.at("g_upper").get<double>();
  w.floor = j.at("floor").get<double>();
  for (const json& b : j.at("sup_bounds")) {
    w.sup_bounds.push_back(
        disk::BoundPair{b[0].get<double>(), b[1].get<double>()});
  }
  w.certificates = certificates_from_json(j.at("certificates"));
  return w;
}

// -------------------------------------------------------------- problems

json problem_to_json_impl(const ProblemSpec& p) {
  json j;
  j["schema"] = kSchemaVersion;
  j["algebra"] = p.algebra;
  j["field"] = field_name(p.field);
  j["operation"] = operation_name(p.operation);
  j["params"] = params_to_json(p.params);
  if (p.operation == Operation::Stabilize) j["stabilize_n"] = p.stabilize_n;
  if (p.operation == Operation::DiskWitnessSearch) {
    j["witness_bound"] = p.witness_bound;
    j["max_attempts"] = p.max_attempts;
  }
  if (p.algebra == "pl-mesh") {
    if (!p.mesh) throw std::invalid_argument("pl-mesh problem without a mesh");
    j["mesh"] = mesh_to_json(*p.mesh);
    j["f"] = pl_tuple_to_json(p.f);
    if (p.g.size() > 0) j["g"] = values_to_json(p.g.values());
  } else {
    j["f"] = disk_tuple_to_json(p.disk_f);
    if (!p.disk_g.num.coeff.empty() || !den_is_one(p.disk_g)) {
      j["g"] = element_to_json(p.disk_g);
    }
    if (p.disk_y.n() > 0) j["y"] = disk_tuple_to_json(p.disk_y);
  }
  return j;
}

ProblemSpec problem_from_json_impl(const json& j) {
  ProblemSpec p;
  const int schema = j.value("schema", kSchemaVersion);
  if (schema != kSchemaVersion) {
    throw std::invalid_argument("unsupported schema version " +
                                std::to_string(schema));
  }
  p.algebra = j.value("algebra", std::string("pl-mesh"));
  if (p.algebra != "pl-mesh" && p.algebra != "disk") {
    throw std::invalid_argument("unknown algebra: " + p.algebra);
  }
  p.field = field_from_name(j.value("field", std::string("complex")));
  p.operation = operation_from_name(j.at("operation").get<std::string>());
  if (j.contains("params")) p.params = params_from_json(j.at("params"));
  if (j.contains("stabilize_n")) {
    p.stabilize_n = j.at("stabilize_n").get<int>();
  }
  if (j.contains("witness_bound")) {
    p.witness_bound = j.at("witness_bound").get<double>();
  }
  if (j.contains("max_attempts")) {
    p.max_attempts = j.at("max_attempts").get<int>();
  }
  if (p.algebra == "pl-mesh") {
    p.mesh = mesh_from_json(j.at("mesh"));
    p.f = pl_tuple_from_json(j.at("f"), p.mesh, p.field);
    if (j.contains("g")) {
      p.g = PLFunction(p.mesh, p.field, values_from_json(j.at("g")));
    }
  } else {
    if (p.field != Field::Complex) {
      throw std::invalid_argument("disk problems are complex-valued");
    }
    p.disk_f = disk_tuple_from_json(j.at("f"), /*trusted=*/false);
    if (j.contains("g")) p.disk_g = element_from_json_checked(j.at("g"));
    if (j.contains("y")) {
      p.disk_y = disk_tuple_from_json(j.at("y"), /*trusted=*/false);
    }
  }
  return p;
}

}  // namespace

const char* operation_name(Operation op) {
  switch (op) {
    case Operation::SmallNorm: return "small-norm";
    case Operation::NormOne: return "norm-one";
    case Operation::AllUnits: return "all-units";
    case Operation::Unitary: return "unitary";
    case Operation::Stabilize: return "stabilize";
    case Operation::Certify: return "certify";
    case Operation::DiskNormOne: return "disk-norm-one";
    case Operation::DiskWitnessSearch: return "disk-witness-search";
  }
  return "unknown";
}

Operation operation_from_name(const std::string& name) {
  for (Operation op :
       {Operation::SmallNorm, Operation::NormOne, Operation::AllUnits,
        Operation::Unitary, Operation::Stabilize, Operation::Certify,
        Operation::DiskNormOne, Operation::DiskWitnessSearch}) {
    if (name == operation_name(op)) return op;
  }
  throw std::invalid_argument("unknown operation: " + name);
}

Field field_from_name(const std::string& name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw std::invalid_argument("unknown field: " + name);
}

std::string problem_to_json(const ProblemSpec& p) {
  return problem_to_json_impl(p).dump(2) + "\n";
}

ProblemSpec problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
  }
  try {
    return problem_from_json_impl(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed problem: ") + e.what());
  }
}

std::string witness_to_json(const WitnessDocument& doc) {
  json j;
  j["schema"] = kSchemaVersion;
  j["version"] = version();
  j["problem"] = problem_to_json_impl(doc.problem);
  j["ok"] = doc.ok;
  j["kind"] = doc.kind;
  if (doc.ok) {
    if (doc.kind == "reduction") {
      j["witness"] = pl_witness_to_json(doc.reduction);
    } else if (doc.kind == "disk-reduction") {
      j["witness"] = disk_witness_to_json(doc.disk_reduction);
    } else if (doc.kind == "disk-search") {
      j["found_y"] = disk_tuple_to_json(doc.found_y);
      j["certificates"] = certificates_to_json(doc.certificates);
    } else if (doc.kind == "certification") {
      j["certificates"] = certificates_to_json(doc.certificates);
    } else {
      throw std::invalid_argument("unknown document kind: " + doc.kind);
    }
  } else {
    j["failure"] = failure_to_json(doc.failure);
  }
  if (doc.has_timing) {
    json t;
    t["elapsed_seconds"] = doc.elapsed_seconds;
    j["timings"] = std::move(t);
  }
  return j.dump(2) + "\n";
}

WitnessDocument witness_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
  }
  try {
    WitnessDocument doc;
    const int schema = j.value("schema", kSchemaVersion);
    if (schema != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema version " +
                                  std::to_string(schema));
    }
    doc.problem = problem_from_json_impl(j.at("problem"));
    doc.ok = j.at("ok").get<bool>();
    doc.kind = j.at("kind").get<std::string>();
    if (doc.ok) {
      if (doc.kind == "reduction") {
        doc.reduction = pl_witness_from_json(j.at("witness"), doc.problem.mesh,
                                             doc.problem.field);
      } else if (doc.kind == "disk-reduction") {
        doc.disk_reduction = disk_witness_from_json(j.at("witness"));
      } else if (doc.kind == "disk-search") {
        doc.found_y = disk_tuple_from_json(j.at("found_y"), /*trusted=*/false);
        doc.certificates = certificates_from_json(j.at("certificates"));
      } else if (doc.kind == "certification") {
        doc.certificates = certificates_from_json(j.at("certificates"));
      } else {
        throw std::invalid_argument("unknown document kind: " + doc.kind);
      }
    } else {
      doc.failure = failure_from_json(j.at("failure"));
    }
    if (j.contains("timings")) {
      doc.has_timing = true;
      doc.elapsed_seconds =
          j.at("timings").at("elapsed_seconds").get<double>();
    }
    return doc;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed document: ") + e.what());
  }
}

namespace {
void strip_cert_traces(Certificate& c) {
  c.trace.clear();
  for (Certificate& p : c.parts) strip_cert_traces(p);
}
}  // namespace

void strip_traces(WitnessDocument& doc) {
  for (Certificate& c : doc.reduction.certificates) strip_cert_traces(c);
  for (Certificate& c : doc.disk_reduction.certificates) strip_cert_traces(c);
  for (Certificate& c : doc.certificates) strip_cert_traces(c);
}

}  // namespace stablerank
