#pragma once

// Pairwise-comparisons (PC) matrices and their exact algebra.
//
// All indices in this C++ API are 0-based. The external formats (CSV/JSON
// files, CLI output, HTTP payloads) use 1-based indices; conversion happens
// at those boundaries only.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pcii {

/// Strict validation accepts |m_ij * m_ji - 1| up to this slack.
inline constexpr double kReciprocityTolerance = 1e-9;
/// Ratio-form tolerance used by is_consistent when none is given.
inline constexpr double kConsistencyTolerance = 1e-9;
/// Entries must lie strictly inside (kMinEntry, kMaxEntry) so that products
/// of three entries stay well within double range.
inline constexpr double kMinEntry = 1e-15;
inline constexpr double kMaxEntry = 1e15;

enum class ValidationMode { Strict, Lenient };

class PcMatrix;

/// Ordered value triple (a_ij, a_ik, a_jk) for i < j < k. The middle value is
/// the "long edge" a_ik; the triad is consistent when x * z == y.
struct Triad {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;

  bool operator==(const Triad&) const = default;
};

/// Position of a triad: 0-based indices with i < j < k.
struct TriadIndex {
  std::size_t i = 0;
  std::size_t j = 1;
  std::size_t k = 2;

  bool operator==(const TriadIndex&) const = default;
  auto operator<=>(const TriadIndex&) const = default;
};

/// Formats as "(i, j, k)" with 1-based indices.
std::string to_string(const TriadIndex& t);

/// Injective map from {0..m-1} into {0..n-1}; selects the rows/columns of a
/// principal submatrix.
class SubmatrixSelector {
 public:
  static SubmatrixSelector make(std::vector<std::size_t> indices,
                                std::size_t parent_order);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t parent_order() const noexcept { return parent_order_; }
  std::size_t operator[](std::size_t p) const { return indices_[p]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }

  /// sigma.then(tau) selects tau from the submatrix chosen by sigma, i.e. the
  /// composite map p -> sigma(tau(p)).
  SubmatrixSelector then(const SubmatrixSelector& tau) const;

  bool operator==(const SubmatrixSelector&) const = default;

 private:
  SubmatrixSelector(std::vector<std::size_t> indices, std::size_t parent)
      : indices_(std::move(indices)), parent_order_(parent) {}

  std::vector<std::size_t> indices_;
  std::size_t parent_order_ = 0;
};

/// Strictly positive weights (lambda_1..lambda_n) of the scaling action.
class ScalingVector {
 public:
  static ScalingVector make(std::vector<double> lambdas);

  std::size_t size() const noexcept { return lambdas_.size(); }
  double operator[](std::size_t i) const { return lambdas_[i]; }
  std::span<const double> values() const noexcept { return lambdas_; }

  /// Componentwise product; the group operation.
  ScalingVector operator*(const ScalingVector& other) const;

 private:
  explicit ScalingVector(std::vector<double> l) : lambdas_(std::move(l)) {}
  std::vector<double> lambdas_;
};

/// Bijection on {0..n-1}; entity i moves to position image(i).
class Permutation {
 public:
  static Permutation make(std::vector<std::size_t> images);
  static Permutation identity(std::size_t n);
  static Permutation swap(std::size_t n, std::size_t a, std::size_t b);

  std::size_t size() const noexcept { return images_.size(); }
  std::size_t image(std::size_t i) const { return images_[i]; }
  std::span<const std::size_t> images() const noexcept { return images_; }
  Permutation inverse() const;

  bool operator==(const Permutation&) const = default;

 private:
  explicit Permutation(std::vector<std::size_t> p) : images_(std::move(p)) {}
  std::vector<std::size_t> images_;
};

class PcMatrix {
 public:
  /// Checks a raw square array. Strict mode additionally requires a unit
  /// diagonal and reciprocity within kReciprocityTolerance; lenient mode only
  /// requires finite, positive, in-range entries.
  static PcMatrix validate(const std::vector<std::vector<double>>& raw,
                           ValidationMode mode = ValidationMode::Strict);

  /// Reciprocal matrix from its strict upper triangle, row-major
  /// (a_01, a_02, ..., a_0{n-1}, a_12, ...).
  static PcMatrix from_upper(std::size_t n, std::span<const double> upper);

  /// Consistent matrix m_ij = w_i / w_j.
  static PcMatrix from_weights(std::span<const double> weights);

  static PcMatrix ones(std::size_t n);

  std::size_t order() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }
  std::span<const double> data() const noexcept { return entries_; }
  std::vector<std::vector<double>> rows() const;

  /// True when |m_ij * m_ji - 1| <= kReciprocityTolerance everywhere and the
  /// diagonal is 1 (always true for matrices built by the algebra below).
  bool is_reciprocal() const noexcept { return reciprocal_; }

  bool operator==(const PcMatrix& other) const {
    return n_ == other.n_ && entries_ == other.entries_;
  }

 private:
  PcMatrix(std::size_t n, std::vector<double> entries);

  std::size_t n_ = 0;
  std::vector<double> entries_;
  bool reciprocal_ = false;

  friend PcMatrix reciprocalize(const PcMatrix& a);
  friend PcMatrix transpose(const PcMatrix& a);
  friend PcMatrix submatrix(const PcMatrix& a, const SubmatrixSelector& sel);
  friend PcMatrix permute(const PcMatrix& a, const Permutation& p);
  friend PcMatrix scale_action(const PcMatrix& a, const ScalingVector& lam);
};

/// Replaces each off-diagonal pair by the geometric mean of a_ij and 1/a_ji
/// and its reciprocal. Idempotent on reciprocal input.
PcMatrix reciprocalize(const PcMatrix& a);

/// Ratio form: every triad satisfies |a_ij a_jk / a_ik - 1| <= tol.
bool is_consistent(const PcMatrix& a, double tol = kConsistencyTolerance);

std::size_t triad_count(std::size_t n);

/// All C(n,3) triads in lexicographic order. Throws OrderTooSmall for n < 3.
std::vector<TriadIndex> triads(std::size_t n);

Triad triad_at(const PcMatrix& a, const TriadIndex& t);

/// Proper principal submatrix (2 <= m < n).
PcMatrix submatrix(const PcMatrix& a, const SubmatrixSelector& sel);

/// All C(n,m) strictly increasing selectors, lexicographic. Requires
/// 3 <= m < n.
std::vector<SubmatrixSelector> enumerate_selectors(std::size_t n,
                                                   std::size_t m);

/// out(p(i), p(j)) = a(i, j).
PcMatrix permute(const PcMatrix& a, const Permutation& p);

/// out_ij = a_ij * lambda_i / lambda_j.
PcMatrix scale_action(const PcMatrix& a, const ScalingVector& lam);

PcMatrix transpose(const PcMatrix& a);

}  // namespace pcii
