#pragma once

// Inconsistency indicators on PC matrices.
//
// Most indicators are "triad-max" indicators: a kernel on a single triad
// (x, y, z) = (a_ij, a_ik, a_jk), extended to n x n matrices by the maximum
// over all i < j < k. The exceptions are II1/II2 (affine maps of Kii), II4
// (built from the most consistent triad) and CI (eigenvalue based).
//
// Stable string ids used by the CLI and the HTTP API:
//   kii, ii1..ii5, ci, log2, loge, logpow:<k>, diff2, diffe, diffpow:<k>,
//   family:<name>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcii/pc_matrix.hpp"

namespace pcii {

enum class IndicatorKind {
  Kii,
  II1,
  II2,
  II3,
  II4,
  II5,
  CI,
  Log2,
  LogE,
  LogPow,
  Diff2,
  DiffE,
  DiffPow,
  Family,
};

/// Shape function f of the invariant family ii(x,y,z) = f(log x + log z - log y).
/// Only obtainable through build_from_f (or the built-in registry), so every
/// instance has passed the registration grid checks.
class FamilyShape {
 public:
  const std::string& name() const noexcept { return name_; }
  double operator()(double t) const { return f_(t); }

 private:
  FamilyShape(std::string name, std::function<double(double)> f)
      : name_(std::move(name)), f_(std::move(f)) {}

  std::string name_;
  std::function<double(double)> f_;

  friend std::shared_ptr<const FamilyShape> make_checked_shape(
      std::string name, std::function<double(double)> f);
};

class IndicatorId {
 public:
  /// Parses the stable lowercase ids. Throws UnknownIndicator.
  static IndicatorId parse(std::string_view text);

  /// For LogPow/DiffPow `exponent` must lie in (0, 1]; ignored otherwise.
  static IndicatorId of(IndicatorKind kind, double exponent = 1.0);
  static IndicatorId family(std::shared_ptr<const FamilyShape> shape);

  IndicatorKind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return exponent_; }
  const FamilyShape* shape() const noexcept { return shape_.get(); }
  const std::shared_ptr<const FamilyShape>& shared_shape() const noexcept { return shape_; }

  /// Canonical id string, e.g. "logpow:0.5" or "family:exp".
  std::string name() const;

  bool operator==(const IndicatorId& other) const;

 private:
  IndicatorId(IndicatorKind kind, double exponent,
              std::shared_ptr<const FamilyShape> shape)
      : kind_(kind), exponent_(exponent), shape_(std::move(shape)) {}

  IndicatorKind kind_ = IndicatorKind::Kii;
  double exponent_ = 1.0;
  std::shared_ptr<const FamilyShape> shape_;
};

struct IndicatorResult {
  double value = 0.0;
  /// Argmax triad. For II4 this is the triad that determines the value (the
  /// most consistent one); unset for CI.
  std::optional<TriadIndex> worst_triad;
  /// Populated only for CI.
  std::optional<double> principal_eigenvalue;
};

// --- triad kernels ----------------------------------------------------------

/// 1 - min(y/(xz), xz/y).
double kii_triad(const Triad& t);
/// exp(-max{x,y,z,1/x,1/y,1/z}) * kii_triad(t).
double damped_kii_triad(const Triad& t);
/// 0 when xz == y (ratio tolerance kTriadEqualityTolerance), otherwise
/// (x+y+z)/(x+y+z+1).
double ii_t_triad(const Triad& t);

inline constexpr double kTriadEqualityTolerance = 1e-12;

enum class InvariantKind { Ratio, LogDiff, Diff };

/// Ratio: xz/y. LogDiff: log x + log z - log y. Diff: xz - y.
/// Ratio and LogDiff are invariant under the scaling action; Diff is not.
double invariant_map(InvariantKind kind, const Triad& t);

using TriadKernel = std::function<double(const Triad&)>;

/// Kernel used to localise inconsistency for `id`: its own triad kernel for
/// triad-max indicators, kii_triad for II1/II2/II4 (monotone in Kii's kernel).
/// Throws UnknownIndicator for CI, which has no triad kernel.
TriadKernel localisation_kernel(const IndicatorId& id);

/// True for indicators whose value is max over triads of a kernel.
bool is_triad_max(const IndicatorId& id);

// --- matrix indicators ------------------------------------------------------

/// Requires a reciprocal matrix of order >= 3 (NotReciprocal, OrderTooSmall).
IndicatorResult evaluate(const IndicatorId& id, const PcMatrix& a);

/// The indicator restricted to an explicit set of triads (used for partially
/// filled matrices). The list may be empty only for value-free callers; an
/// empty list yields value 0 without witness. Throws UnknownIndicator for CI.
IndicatorResult evaluate_over_triads(
    const IndicatorId& id, std::span<const std::pair<TriadIndex, Triad>> items);

/// sup over all 3 x 3 principal submatrices B of kernel(upper triad of B),
/// computed by explicit submatrix extraction.
IndicatorResult extend_triad_indicator(const TriadKernel& kernel, const PcMatrix& a);

/// Registers f as an invariant-family indicator after checking, on the grid
/// {0, +-2^-10, ..., +-2^10}: evenness, zero exactly at 0, nondecreasing on
/// the nonnegative grid points, values in [0, 1]. Passing the grid is
/// necessary, not sufficient. Throws ShapeFunctionViolation naming the
/// condition and the witness point.
IndicatorId build_from_f(std::string name, std::function<double(double)> f);

/// Built-in shapes: "exp" (1 - e^-|t|, equal to Kii), "frac" (|t|/(1+|t|)),
/// "tanh" (tanh|t|), "step" (0 for |t| <= 1e-12, else 1).
std::shared_ptr<const FamilyShape> builtin_family(std::string_view name);
std::vector<std::string> builtin_family_names();

// --- relative error ---------------------------------------------------------

struct RelativeErrorInput {
  double t = 1.0;         // true value
  double t_approx = 1.0;  // approximation
};

/// |(t - t_approx) / t|. Throws ZeroTrueValue.
double relative_error(const RelativeErrorInput& in);

/// How a triad's deviation is phrased as a relative error.
///   ProductAsTruth:    t = xz, t_approx = y, i.e. |xz - y| / xz
///   MiddleOverProduct: y / (xz), so (1,10,1) gives 10
enum class TriadErrorConvention { ProductAsTruth, MiddleOverProduct };

double triad_relative_error(const Triad& t, TriadErrorConvention convention);

// --- catalogue --------------------------------------------------------------

struct CatalogueEntry {
  IndicatorId id;
  std::string description;
  /// Values always in [0, 1].
  bool normalized = true;
  /// Known to violate the axiom system (kept because it is in wide use).
  bool non_conforming = false;
};

/// Immutable registry of the built-in indicators, built once.
const std::vector<CatalogueEntry>& catalogue();

bool is_normalized(const IndicatorId& id);

}  // namespace pcii
