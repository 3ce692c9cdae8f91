#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stablerank/serialize.hpp"

namespace stablerank {

/// Deterministic random instance generators used by the corpus and tests.

/// Random PL function: vertex values drawn with modulus in [lo_mod, hi_mod]
/// and uniform phase (real field: uniform sign instead of phase).
PLFunction random_pl_function(const MeshPtr& mesh, Field field, Rng& rng,
                              double lo_mod = 0.35, double hi_mod = 1.0);

/// A pair (f, g) whose joint tuple is certified invertible, produced by
/// redrawing until the exact minimum clears `min_joint`.
struct CertifiedPair {
  PLTuple f;
  PLFunction g;
  Certificate cert;  // exact-min certificate of the joint tuple
  double joint_min = 0.0;
  int draws = 0;
};

CertifiedPair random_certified_pair(const MeshPtr& mesh, Field field, int n,
                                    std::uint64_t seed,
                                    double min_joint = 0.05,
                                    const CertifyOptions& opt = {});

/// Like random_certified_pair but g is forced to vanish at `vanish_vertex`
/// (drawn at random when negative).  The joint tuple is still certified.
CertifiedPair random_vanishing_pair(const MeshPtr& mesh, Field field, int n,
                                    std::uint64_t seed, int vanish_vertex = -1,
                                    double min_joint = 0.05,
                                    const CertifyOptions& opt = {});

/// Like random_certified_pair but additionally |g| is certified to stay at
/// or above the sublevel radius derived from the joint minimum, which pins
/// the norm-one reduction to its subtuple branch.
CertifiedPair random_positive_g_pair(const MeshPtr& mesh, Field field, int n,
                                     std::uint64_t seed,
                                     const CertifyOptions& opt = {});

/// One corpus run: pass/fail, a deterministic one-line detail, wall time,
/// and the serialized witness documents it produced (timings omitted so the
/// bytes are reproducible).
struct CorpusResult {
  std::string name;
  int criterion = 0;
  bool pass = false;
  std::string detail;
  double elapsed_seconds = 0.0;
  std::vector<std::string> documents;
};

struct CorpusEntry {
  std::string name;
  int criterion = 0;                 // 1-12, matching the acceptance list
  std::vector<std::string> subsets;  // tags that include this entry
  std::function<CorpusResult(bool quick)> run;
};

/// The acceptance corpus, ordered by criterion number.
const std::vector<CorpusEntry>& corpus_entries();

/// Run the entries tagged with `subset` ("pl-quick", "pl-full", "disk",
/// "all").  Entries may run concurrently (STABLERANK_THREADS caps the pool,
/// 0/unset = hardware concurrency); results come back in entry order.
std::vector<CorpusResult> run_corpus(const std::string& subset);

/// Deterministic summary table: pass/fail lines per entry plus an FNV-1a
/// digest of every document, with no timing data (equal seeds must yield
/// byte-identical summaries).
std::string corpus_summary(const std::vector<CorpusResult>& results);

/// 64-bit FNV-1a, used for the document digest.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace stablerank
