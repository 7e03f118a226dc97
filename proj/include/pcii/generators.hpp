#pragma once

// Seeded matrix generators for the axiom harness. Every generator is a pure
// function of its arguments; callers derive per-sample seeds with
// derive_seed so that checks can run in any order or in parallel.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "pcii/pc_matrix.hpp"

namespace pcii {

using Rng = std::mt19937_64;

/// FNV-1a; stable across platforms and runs, unlike std::hash.
std::uint64_t stable_hash(std::string_view text);

/// Mixes a base seed with any number of stream labels (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

/// exp(U[-spread, spread]).
double log_uniform(Rng& rng, double spread);

/// Upper-triangle entries log-uniform on [e^-spread, e^spread], lower
/// triangle reciprocal. spread = 0 gives the all-ones matrix.
PcMatrix random_pc_matrix(std::size_t n, double spread, std::uint64_t seed);

/// m_ij = w_i / w_j with w_i log-uniform on [e^-spread/2, e^spread/2], so
/// entries stay within [e^-spread, e^spread].
PcMatrix random_consistent_matrix(std::size_t n, double spread, std::uint64_t seed);

struct Perturbation {
  PcMatrix matrix;
  std::size_t i = 0;  // perturbed upper entry (i < j), 0-based
  std::size_t j = 1;
  double factor = 1.0;
};

/// Multiplies one uniformly chosen upper entry (and divides its mirror) by a
/// factor log-uniform on [2, 10].
Perturbation perturb(const PcMatrix& a, Rng& rng);

struct EmbeddingSpec {
  Triad triad;
  std::size_t target_order = 3;
  /// Weights of entities 4..n. Empty means all ones.
  std::vector<double> filler;
};

/// n x n reciprocal matrix whose (1,2), (1,3), (2,3) entries are the triad and
/// whose other entries come from the weights (xz, z, 1, filler...). Every
/// triad not containing both entity 1 and entity 3 is consistent.
PcMatrix embed_triad(const EmbeddingSpec& spec);

/// As above, but missing filler weights are drawn log-uniform on [1/3, 3].
PcMatrix embed_triad(const EmbeddingSpec& spec, std::uint64_t seed);

/// Uniformly random strictly increasing m-subset of {0..n-1}.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, Rng& rng);

}  // namespace pcii
