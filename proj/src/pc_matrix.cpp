#include "pcii/pc_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcii/error.hpp"

namespace pcii {
namespace {

std::string coord(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

void check_entry(double v, std::size_t i, std::size_t j) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteEntry, "entry " + coord(i, j) + " is not finite",
                i + 1, j + 1);
  }
  if (v <= 0.0) {
    throw Error(ErrorCode::NonPositiveEntry,
                "entry " + coord(i, j) + " must be strictly positive", i + 1, j + 1);
  }
  if (v <= kMinEntry || v >= kMaxEntry) {
    throw Error(ErrorCode::EntryOutOfRange,
                "entry " + coord(i, j) + " outside (1e-15, 1e15)", i + 1, j + 1);
  }
}

bool reciprocal_within_tolerance(std::size_t n, const std::vector<double>& e) {
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(e[i * n + i] - 1.0) > kReciprocityTolerance) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(e[i * n + j] * e[j * n + i] - 1.0) > kReciprocityTolerance) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

std::string to_string(const TriadIndex& t) {
  return "(" + std::to_string(t.i + 1) + ", " + std::to_string(t.j + 1) + ", " +
         std::to_string(t.k + 1) + ")";
}

// --- SubmatrixSelector ------------------------------------------------------

SubmatrixSelector SubmatrixSelector::make(std::vector<std::size_t> indices,
                                          std::size_t parent_order) {
  if (indices.size() < 2 || indices.size() >= parent_order) {
    throw Error(ErrorCode::SelectorOutOfRange,
                "a proper submatrix selector needs 2 <= m < n (m=" +
                    std::to_string(indices.size()) +
                    ", n=" + std::to_string(parent_order) + ")");
  }
  std::vector<bool> seen(parent_order, false);
  for (std::size_t idx : indices) {
    if (idx >= parent_order) {
      throw Error(ErrorCode::SelectorOutOfRange,
                  "selector index " + std::to_string(idx + 1) + " exceeds order " +
                      std::to_string(parent_order));
    }
    if (seen[idx]) {
      throw Error(ErrorCode::NonInjectiveSelector,
                  "selector repeats index " + std::to_string(idx + 1));
    }
    seen[idx] = true;
  }
  return SubmatrixSelector(std::move(indices), parent_order);
}

SubmatrixSelector SubmatrixSelector::then(const SubmatrixSelector& tau) const {
  if (tau.parent_order() != size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "inner selector must select from a matrix of order " +
                    std::to_string(size()));
  }
  std::vector<std::size_t> composite(tau.size());
  for (std::size_t p = 0; p < tau.size(); ++p) composite[p] = indices_[tau[p]];
  return SubmatrixSelector(std::move(composite), parent_order_);
}

// --- ScalingVector ----------------------------------------------------------

ScalingVector ScalingVector::make(std::vector<double> lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) {
      throw Error(ErrorCode::NonPositiveScaling,
                  "scaling weight " + std::to_string(i + 1) + " must be positive",
                  i + 1);
    }
  }
  return ScalingVector(std::move(lambdas));
}

ScalingVector ScalingVector::operator*(const ScalingVector& other) const {
  if (other.size() != size()) {
    throw Error(ErrorCode::DimensionMismatch, "scaling vectors differ in length");
  }
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = lambdas_[i] * other.lambdas_[i];
  return ScalingVector(std::move(out));
}

// --- Permutation ------------------------------------------------------------

Permutation Permutation::make(std::vector<std::size_t> images) {
  std::vector<bool> hit(images.size(), false);
  for (std::size_t v : images) {
    if (v >= images.size() || hit[v]) {
      throw Error(ErrorCode::InvalidPermutation, "not a bijection on 1..n");
    }
    hit[v] = true;
  }
  return Permutation(std::move(images));
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return Permutation(std::move(p));
}

Permutation Permutation::swap(std::size_t n, std::size_t a, std::size_t b) {
  if (a >= n || b >= n) {
    throw Error(ErrorCode::InvalidPermutation, "swap index out of range");
  }
  auto p = identity(n);
  std::swap(p.images_[a], p.images_[b]);
  return p;
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = i;
  return Permutation(std::move(inv));
}

// --- PcMatrix ---------------------------------------------------------------

PcMatrix::PcMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  reciprocal_ = reciprocal_within_tolerance(n_, entries_);
}

PcMatrix PcMatrix::validate(const std::vector<std::vector<double>>& raw,
                            ValidationMode mode) {
  const std::size_t n = raw.size();
  for (const auto& row : raw) {
    if (row.size() != n) {
      throw Error(ErrorCode::NonSquare, "matrix is not square");
    }
  }
  if (n < 2) {
    throw Error(ErrorCode::OrderTooSmall, "a PC matrix needs order n >= 2");
  }
  std::vector<double> entries;
  entries.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      check_entry(raw[i][j], i, j);
      entries.push_back(raw[i][j]);
    }
  }
  if (mode == ValidationMode::Strict) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(raw[i][i] - 1.0) > kReciprocityTolerance) {
        throw Error(ErrorCode::NonUnitDiagonal,
                    "diagonal entry " + coord(i, i) + " must be 1", i + 1);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs(raw[i][j] * raw[j][i] - 1.0) > kReciprocityTolerance) {
          throw Error(ErrorCode::ReciprocityViolation,
                      "entries " + coord(i, j) + " and " + coord(j, i) +
                          " are not reciprocal",
                      i + 1, j + 1);
        }
      }
    }
  }
  return PcMatrix(n, std::move(entries));
}

PcMatrix PcMatrix::from_upper(std::size_t n, std::span<const double> upper) {
  if (n < 2) throw Error(ErrorCode::OrderTooSmall, "a PC matrix needs order n >= 2");
  if (upper.size() != n * (n - 1) / 2) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(n * (n - 1) / 2) + " upper entries");
  }
  std::vector<double> e(n * n, 1.0);
  std::size_t u = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++u) {
      check_entry(upper[u], i, j);
      e[i * n + j] = upper[u];
      e[j * n + i] = 1.0 / upper[u];
    }
  }
  return PcMatrix(n, std::move(e));
}

PcMatrix PcMatrix::from_weights(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n < 2) throw Error(ErrorCode::OrderTooSmall, "a PC matrix needs order n >= 2");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::NonPositiveScaling,
                  "weight " + std::to_string(i + 1) + " must be positive", i + 1);
    }
  }
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(weights[i] / weights[j]);
  }
  return from_upper(n, upper);
}

PcMatrix PcMatrix::ones(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::OrderTooSmall, "a PC matrix needs order n >= 2");
  return PcMatrix(n, std::vector<double>(n * n, 1.0));
}

std::vector<std::vector<double>> PcMatrix::rows() const {
  std::vector<std::vector<double>> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    out[i].assign(entries_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                  entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
  }
  return out;
}

// --- algebra ----------------------------------------------------------------

PcMatrix reciprocalize(const PcMatrix& a) {
  const std::size_t n = a.order();
  std::vector<double> e(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double g = std::sqrt(a(i, j) / a(j, i));
      e[i * n + j] = g;
      e[j * n + i] = 1.0 / g;
    }
  }
  return PcMatrix(n, std::move(e));
}

bool is_consistent(const PcMatrix& a, double tol) {
  const std::size_t n = a.order();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (std::abs(a(i, j) * a(j, k) / a(i, k) - 1.0) > tol) return false;
      }
    }
  }
  return true;
}

std::size_t triad_count(std::size_t n) {
  return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6;
}

std::vector<TriadIndex> triads(std::size_t n) {
  if (n < 3) {
    throw Error(ErrorCode::OrderTooSmall, "triads need order n >= 3");
  }
  std::vector<TriadIndex> out;
  out.reserve(triad_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) out.push_back({i, j, k});
    }
  }
  return out;
}

Triad triad_at(const PcMatrix& a, const TriadIndex& t) {
  if (!(t.i < t.j && t.j < t.k && t.k < a.order())) {
    throw Error(ErrorCode::IndexOutOfRange,
                "triad " + to_string(t) + " invalid for order " +
                    std::to_string(a.order()));
  }
  return {a(t.i, t.j), a(t.i, t.k), a(t.j, t.k)};
}

PcMatrix submatrix(const PcMatrix& a, const SubmatrixSelector& sel) {
  if (sel.parent_order() != a.order()) {
    throw Error(ErrorCode::SelectorOutOfRange,
                "selector built for order " + std::to_string(sel.parent_order()) +
                    ", matrix has order " + std::to_string(a.order()));
  }
  const std::size_t m = sel.size();
  std::vector<double> e(m * m);
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = 0; q < m; ++q) e[p * m + q] = a(sel[p], sel[q]);
  }
  return PcMatrix(m, std::move(e));
}

std::vector<SubmatrixSelector> enumerate_selectors(std::size_t n, std::size_t m) {
  if (m < 3 || m >= n) {
    throw Error(ErrorCode::OrderTooSmall,
                "selector enumeration needs 3 <= m < n (m=" + std::to_string(m) +
                    ", n=" + std::to_string(n) + ")");
  }
  std::vector<SubmatrixSelector> out;
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.push_back(SubmatrixSelector::make(idx, n));
    // advance to the next m-combination in lexicographic order
    std::size_t p = m;
    while (p > 0 && idx[p - 1] == n - m + (p - 1)) --p;
    if (p == 0) break;
    ++idx[p - 1];
    for (std::size_t q = p; q < m; ++q) idx[q] = idx[q - 1] + 1;
  }
  return out;
}

PcMatrix permute(const PcMatrix& a, const Permutation& p) {
  const std::size_t n = a.order();
  if (p.size() != n) {
    throw Error(ErrorCode::InvalidPermutation,
                "permutation size " + std::to_string(p.size()) +
                    " does not match order " + std::to_string(n));
  }
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) e[p.image(i) * n + p.image(j)] = a(i, j);
  }
  return PcMatrix(n, std::move(e));
}

PcMatrix scale_action(const PcMatrix& a, const ScalingVector& lam) {
  const std::size_t n = a.order();
  if (lam.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "scaling vector length " + std::to_string(lam.size()) +
                    " does not match order " + std::to_string(n));
  }
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      e[i * n + j] = i == j ? a(i, i) : a(i, j) * lam[i] / lam[j];
    }
  }
  return PcMatrix(n, std::move(e));
}

PcMatrix transpose(const PcMatrix& a) {
  const std::size_t n = a.order();
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) e[i * n + j] = a(j, i);
  }
  return PcMatrix(n, std::move(e));
}

}  // namespace pcii
