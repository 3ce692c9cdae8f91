// Command-line front end: problem files in, witness documents out, plus the
// built-in acceptance corpus.  Exit codes: 0 = certified witness, 2 = honest
// failure (budget or hypothesis), 1 = malformed input or usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "stablerank/instances.hpp"
#include "stablerank/version.hpp"

namespace {

using namespace stablerank;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

void emit_error(const std::string& kind, const std::string& detail) {
  nlohmann::json j;
  j["error"] = kind;
  j["detail"] = detail;
  std::cerr << j.dump() << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// Re-check a parsed witness document without re-running the construction.
int verify_document(const WitnessDocument& doc) {
  if (!doc.ok) {
    emit_error("failure", "the document records a failure; nothing to verify");
    return 2;
  }
  VerifyReport rep;
  if (doc.kind == "reduction") {
    rep = verify_witness(doc.problem.f, doc.problem.g, doc.reduction);
  } else if (doc.kind == "disk-reduction") {
    rep = disk::disk_verify_witness(doc.problem.disk_f, doc.problem.disk_g,
                                    doc.disk_reduction);
  } else if (doc.kind == "disk-search") {
    const disk::DiskTuple& y = doc.found_y;
    if (y.n() != doc.problem.disk_f.n()) {
      rep.ok = false;
      rep.failures.push_back("witness length does not match the tuple");
    } else {
      for (int j = 0; j < y.n(); ++j) {
        const disk::BoundPair b = disk::disk_sup_norm(y[j]);
        if (b.upper > doc.problem.witness_bound) {
          rep.ok = false;
          rep.failures.push_back("witness component " + std::to_string(j) +
                                 " exceeds the norm bound");
        }
      }
      disk::DiskTuple inter;
      inter.comps.reserve(static_cast<std::size_t>(y.n()));
      for (int j = 0; j < y.n(); ++j)
        inter.comps.push_back(disk::de_add(
            doc.problem.disk_f[j], disk::de_mul(y[j], doc.problem.disk_g)));
      const disk::DiskMinBound mb = disk::disk_min_magnitude(inter);
      if (!mb.ok) {
        rep.ok = false;
        rep.failures.push_back(
            "the perturbed tuple did not re-certify invertible");
      }
    }
  } else if (doc.kind == "certification") {
    if (doc.problem.algebra == "pl-mesh") {
      PLTuple target = doc.problem.g.size() > 0
                           ? join(doc.problem.f, doc.problem.g)
                           : doc.problem.f;
      const InvertibleResult res =
          check_invertible(target, doc.problem.params.certify);
      if (!res.invertible) {
        rep.ok = false;
        rep.failures.push_back("the tuple did not re-certify invertible");
      }
    } else {
      disk::DiskTuple target = doc.problem.disk_f;
      if (!doc.problem.disk_g.num.is_zero())
        target.comps.push_back(doc.problem.disk_g);
      const disk::DiskInvertibleResult res =
          target.n() == 1 ? disk::disk_check_invertible(target[0])
                          : disk::disk_check_invertible(target);
      if (!(res.conclusive && res.invertible)) {
        rep.ok = false;
        rep.failures.push_back("the tuple did not re-certify invertible");
      }
    }
  } else {
    emit_error("malformed-input", "unknown document kind: " + doc.kind);
    return 1;
  }

  nlohmann::json j;
  j["verified"] = rep.ok;
  j["failures"] = rep.failures;
  std::cout << j.dump(2) << "\n";
  if (!rep.ok) emit_error("failure", "verification found failed certificates");
  return rep.ok ? 0 : 2;
}

int dispatch_problem(ProblemSpec& p, bool emit_timings, bool strip,
                     const std::string& out_path) {
  WitnessDocument doc;
  doc.problem = p;
  std::string failure_reason;
  const auto t0 = std::chrono::steady_clock::now();

  const bool is_pl_reduction =
      p.operation == Operation::SmallNorm || p.operation == Operation::NormOne ||
      p.operation == Operation::AllUnits || p.operation == Operation::Unitary ||
      p.operation == Operation::Stabilize;
  if (is_pl_reduction && p.algebra != "pl-mesh") {
    emit_error("malformed-input", std::string(operation_name(p.operation)) +
                                      " requires the pl-mesh algebra");
    return 1;
  }
  if ((p.operation == Operation::DiskNormOne ||
       p.operation == Operation::DiskWitnessSearch) &&
      p.algebra != "disk") {
    emit_error("malformed-input", std::string(operation_name(p.operation)) +
                                      " requires the disk algebra");
    return 1;
  }

  switch (p.operation) {
    case Operation::SmallNorm:
    case Operation::NormOne:
    case Operation::AllUnits:
    case Operation::Unitary:
    case Operation::Stabilize: {
      ReductionOutcome out;
      if (p.operation == Operation::SmallNorm)
        out = small_norm_reduce(p.f, p.g, p.params.epsilon, p.params);
      else if (p.operation == Operation::NormOne)
        out = norm_one_reduce(p.f, p.g, p.params);
      else if (p.operation == Operation::AllUnits)
        out = all_units_reduce(p.f, p.g, p.params);
      else if (p.operation == Operation::Unitary)
        out = unitary_reduce(p.f, p.g, p.params);
      else
        out = stabilize_reduce(p.f, p.g, p.stabilize_n, p.params);
      doc.kind = "reduction";
      doc.ok = out.ok;
      if (out.ok)
        doc.reduction = std::move(out.witness);
      else {
        doc.failure = std::move(out.failure);
        failure_reason = doc.failure.reason;
      }
      break;
    }
    case Operation::Certify: {
      doc.kind = "certification";
      if (p.algebra == "pl-mesh") {
        PLTuple target = p.g.size() > 0 ? join(p.f, p.g) : p.f;
        InvertibleResult res = check_invertible(target, p.params.certify);
        doc.ok = res.invertible;
        doc.certificates = {res.cert};
        if (!res.invertible)
          failure_reason = res.conclusive
                               ? "the tuple is not invertible"
                               : "certification budget exhausted";
      } else {
        disk::DiskTuple target = p.disk_f;
        if (!p.disk_g.num.is_zero()) target.comps.push_back(p.disk_g);
        disk::DiskInvertibleResult res =
            target.n() == 1 ? disk::disk_check_invertible(target[0])
                            : disk::disk_check_invertible(target);
        doc.ok = res.conclusive && res.invertible;
        doc.certificates = {res.cert};
        if (!doc.ok)
          failure_reason = res.conclusive ? "the tuple is not invertible"
                                          : "certification budget exhausted";
      }
      if (!doc.ok) doc.failure.reason = failure_reason;
      break;
    }
    case Operation::DiskNormOne: {
      disk::DiskParams dp;
      dp.epsilon = p.params.epsilon;
      dp.seed = p.params.seed;
      dp.max_attempts = p.max_attempts;
      disk::DiskTuple y = p.disk_y;
      doc.kind = "disk-reduction";
      if (y.n() == 0) {
        disk::DiskSearchOutcome found =
            disk::disk_small_norm_witness(p.disk_f, p.disk_g,
                                          p.witness_bound, dp);
        if (!found.ok) {
          doc.ok = false;
          doc.failure = std::move(found.failure);
          doc.failure.reason =
              "witness search failed: " + doc.failure.reason;
          failure_reason = doc.failure.reason;
          break;
        }
        y = std::move(found.y);
      }
      disk::DiskOutcome out = disk::disk_norm_one_reduce(p.disk_f, p.disk_g,
                                                         y, dp);
      doc.ok = out.ok;
      if (out.ok)
        doc.disk_reduction = std::move(out.witness);
      else {
        doc.failure = std::move(out.failure);
        failure_reason = doc.failure.reason;
      }
      break;
    }
    case Operation::DiskWitnessSearch: {
      disk::DiskParams dp;
      dp.epsilon = p.params.epsilon;
      dp.seed = p.params.seed;
      dp.max_attempts = p.max_attempts;
      disk::DiskSearchOutcome out = disk::disk_small_norm_witness(
          p.disk_f, p.disk_g, p.witness_bound, dp);
      doc.kind = "disk-search";
      doc.ok = out.ok;
      if (out.ok) {
        doc.found_y = std::move(out.y);
        doc.certificates = {std::move(out.cert)};
      } else {
        doc.failure = std::move(out.failure);
        failure_reason = doc.failure.reason;
      }
      break;
    }
  }

  if (emit_timings) {
    doc.has_timing = true;
    doc.elapsed_seconds = seconds_since(t0);
  }
  if (strip) strip_traces(doc);
  write_output(out_path, witness_to_json(doc));
  if (!doc.ok) {
    emit_error("failure", failure_reason);
    return 2;
  }
  return 0;
}

int do_corpus(const std::string& subset) {
  std::vector<CorpusResult> results;
  try {
    results = run_corpus(subset);
  } catch (const std::invalid_argument& e) {
    emit_error("malformed-input", e.what());
    return 1;
  }
  // Timings go to standard error: the summary on standard output must be
  // byte-identical across equal-seed runs.
  for (const auto& r : results) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.elapsed_seconds);
    std::cerr << "timing: criterion " << r.criterion << " " << r.name << " "
              << buf << " s\n";
  }
  std::cout << corpus_summary(results);
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("stablerank ") + version() +
               " - certified reductions of invertible tuples"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string op_name;
  std::string out_path;
  double epsilon = 0.5;
  std::uint64_t seed = 0;
  int max_retries = 0;
  int max_refine = 0;
  bool verify_only = false;
  bool emit_timings = false;
  bool strip = false;

  CLI::App* run = app.add_subcommand("run", "execute one operation on a problem file");
  run->add_option("--problem", problem_path,
                  "problem JSON file (witness document with --verify-only)")
      ->required();
  run->add_option("--op", op_name,
                  "operation: small-norm | norm-one | all-units | unitary | "
                  "stabilize | certify | disk-norm-one | disk-witness-search");
  run->add_option("--epsilon", epsilon, "norm budget override");
  run->add_option("--seed", seed, "RNG seed override");
  run->add_option("--max-retries", max_retries, "retry budget override");
  run->add_option("--max-refine", max_refine, "refinement budget override");
  run->add_option("--out", out_path, "write the document to this file");
  run->add_flag("--verify-only", verify_only,
                "re-check an existing witness document and exit");
  run->add_flag("--emit-timings", emit_timings,
                "record wall time in the document");
  run->add_flag("--strip-traces", strip,
                "drop per-simplex traces from the document");

  std::string subset;
  CLI::App* corpus =
      app.add_subcommand("corpus", "run the built-in acceptance corpus");
  corpus->add_option("subset", subset, "pl-quick | pl-full | disk | all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << app.help() << "\n";
    emit_error("malformed-input", e.what());
    return 1;
  }

  if (*corpus) return do_corpus(subset);

  std::string text;
  try {
    text = read_file(problem_path);
  } catch (const std::exception& e) {
    emit_error("malformed-input", e.what());
    return 1;
  }

  if (verify_only) {
    WitnessDocument doc;
    try {
      doc = witness_from_json(text);
    } catch (const std::domain_error& e) {
      emit_error("failure", e.what());
      return 2;
    } catch (const std::exception& e) {
      emit_error("malformed-input", e.what());
      return 1;
    }
    try {
      return verify_document(doc);
    } catch (const std::domain_error& e) {
      emit_error("failure", e.what());
      return 2;
    } catch (const std::exception& e) {
      emit_error("malformed-input", e.what());
      return 1;
    }
  }

  if (op_name.empty()) {
    std::cerr << run->help() << "\n";
    emit_error("malformed-input", "--op is required");
    return 1;
  }

  ProblemSpec p;
  try {
    p = problem_from_json(text);
    p.operation = operation_from_name(op_name);
  } catch (const std::domain_error& e) {
    emit_error("failure", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("malformed-input", e.what());
    return 1;
  }
  if (run->count("--epsilon")) p.params.epsilon = epsilon;
  if (run->count("--seed")) p.params.seed = seed;
  if (run->count("--max-retries")) p.params.max_retries = max_retries;
  if (run->count("--max-refine")) p.params.max_refinements = max_refine;

  try {
    return dispatch_problem(p, emit_timings, strip, out_path);
  } catch (const std::domain_error& e) {
    // A violated mathematical hypothesis is an honest failure, not a usage
    // error: the problem file was well-formed, the construction just does
    // not apply to it.
    emit_error("failure", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error("malformed-input", e.what());
    return 1;
  }
}
