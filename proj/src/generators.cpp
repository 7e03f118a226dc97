#include "pcii/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcii/error.hpp"

namespace pcii {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_order(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::OrderTooSmall, "generators need order n >= 3");
}

}  // namespace

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t p : parts) s = splitmix64(s ^ p);
  return s;
}

double log_uniform(Rng& rng, double spread) {
  if (spread == 0.0) return 1.0;
  std::uniform_real_distribution<double> u(-spread, spread);
  return std::exp(u(rng));
}

PcMatrix random_pc_matrix(std::size_t n, double spread, std::uint64_t seed) {
  require_order(n);
  Rng rng(seed);
  std::vector<double> upper(n * (n - 1) / 2);
  for (auto& v : upper) v = log_uniform(rng, spread);
  return PcMatrix::from_upper(n, upper);
}

PcMatrix random_consistent_matrix(std::size_t n, double spread, std::uint64_t seed) {
  require_order(n);
  Rng rng(seed);
  std::vector<double> w(n);
  for (auto& v : w) v = log_uniform(rng, spread / 2);
  return PcMatrix::from_weights(w);
}

Perturbation perturb(const PcMatrix& a, Rng& rng) {
  const std::size_t n = a.order();
  std::uniform_int_distribution<std::size_t> pick(0, n * (n - 1) / 2 - 1);
  std::uniform_real_distribution<double> lf(std::log(2.0), std::log(10.0));
  std::size_t slot = pick(rng);
  const double factor = std::exp(lf(rng));

  std::vector<double> upper;
  Perturbation out{a, 0, 1, factor};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = a(i, j);
      if (upper.size() == slot) {
        v *= factor;
        out.i = i;
        out.j = j;
      }
      upper.push_back(v);
    }
  }
  out.matrix = PcMatrix::from_upper(n, upper);
  return out;
}

PcMatrix embed_triad(const EmbeddingSpec& spec) {
  const std::size_t n = spec.target_order;
  require_order(n);
  const Triad& t = spec.triad;
  std::vector<double> w{t.x * t.z, t.z, 1.0};
  for (std::size_t l = 3; l < n; ++l) {
    w.push_back(l - 3 < spec.filler.size() ? spec.filler[l - 3] : 1.0);
  }
  std::vector<double> upper;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (i == 0 && j == 1) {
        upper.push_back(t.x);
      } else if (i == 0 && j == 2) {
        upper.push_back(t.y);
      } else if (i == 1 && j == 2) {
        upper.push_back(t.z);
      } else {
        upper.push_back(w[i] / w[j]);
      }
    }
  }
  return PcMatrix::from_upper(n, upper);
}

PcMatrix embed_triad(const EmbeddingSpec& spec, std::uint64_t seed) {
  require_order(spec.target_order);
  EmbeddingSpec filled = spec;
  Rng rng(seed);
  while (filled.filler.size() + 3 < spec.target_order) {
    filled.filler.push_back(log_uniform(rng, std::log(3.0)));
  }
  return embed_triad(filled);
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t p = 0; p < m; ++p) {
    std::uniform_int_distribution<std::size_t> pick(p, n - 1);
    std::swap(all[p], all[pick(rng)]);
  }
  all.resize(m);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace pcii
