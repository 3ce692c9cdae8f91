#pragma once

#include <string>
#include <vector>

#include "stablerank/disk.hpp"

namespace stablerank {

inline constexpr int kSchemaVersion = 1;

/// Operation requested by a problem file.
enum class Operation {
  SmallNorm,
  NormOne,
  AllUnits,
  Unitary,
  Stabilize,
  Certify,
  DiskNormOne,
  DiskWitnessSearch
};

const char* operation_name(Operation op);
Operation operation_from_name(const std::string& name);  // throws on unknown

Field field_from_name(const std::string& name);  // throws on unknown

/// Parsed problem file.  Exactly one of the two algebra payloads is
/// populated: the PL fields for "pl-mesh", the disk fields for "disk".
struct ProblemSpec {
  Operation operation = Operation::NormOne;
  std::string algebra = "pl-mesh";
  Field field = Field::Complex;
  MeshPtr mesh;  // pl-mesh payload
  PLTuple f;
  PLFunction g;
  disk::DiskTuple disk_f;  // disk payload
  disk::DiskElement disk_g;
  disk::DiskTuple disk_y;  // optional small-norm witness input (may be empty)
  int stabilize_n = 1;
  double witness_bound = 0.5;  // disk witness-search sup-norm bound
  int max_attempts = 64;       // disk witness-search draw budget
  ReductionParams params;
};

std::string problem_to_json(const ProblemSpec& p);
/// Parses and validates; re-certifies every disk denominator it loads.
/// Throws std::invalid_argument (malformed input) or std::domain_error
/// (a denominator failed certification).
ProblemSpec problem_from_json(const std::string& text);

/// Output document: problem echo plus one of the result payloads, selected
/// by `kind`: "reduction" (PL reductions), "disk-reduction",
/// "disk-search" (found_y + certificates), or "certification"
/// (certificates only).  Timings are emitted only when requested so that
/// equal seeds yield byte-identical documents.
struct WitnessDocument {
  ProblemSpec problem;
  bool ok = false;
  std::string kind = "reduction";
  ReductionWitness reduction;
  disk::DiskWitness disk_reduction;
  disk::DiskTuple found_y;
  std::vector<Certificate> certificates;
  ReductionFailure failure;
  bool has_timing = false;
  double elapsed_seconds = 0.0;
};

std::string witness_to_json(const WitnessDocument& doc);
/// Rebuilds the PL witness tuples by replaying the recorded number of
/// global refinements on the problem mesh.  Disk multiplier/reduced
/// denominators are loaded as stored (they are re-derived from scratch by
/// the verifier); primary inputs are always re-certified.
WitnessDocument witness_from_json(const std::string& text);

/// Drop every certificate trace from the document (smaller files; the
/// document stays re-verifiable because verification recomputes traces).
void strip_traces(WitnessDocument& doc);

}  // namespace stablerank
