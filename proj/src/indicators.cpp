#include "pcii/indicators.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>

#include "pcii/eigen.hpp"
#include "pcii/error.hpp"

namespace pcii {

// Defined here; declared as a friend of FamilyShape.
std::shared_ptr<const FamilyShape> make_checked_shape(std::string name,
                                                      std::function<double(double)> f);

namespace {

double log_diff(const Triad& t) { return std::log(t.x) + std::log(t.z) - std::log(t.y); }

double one_minus_min_pow(double base, double e) {
  return 1.0 - std::min(std::pow(base, e), std::pow(base, -e));
}

// Rounding leaves |l| or |d| near 1e-16 on consistent input, which a
// fractional power lifts to ~1e-4. Treat ratio-consistent triads as exact.
bool ratio_consistent(const Triad& t) {
  return std::abs(t.x * t.z / t.y - 1.0) <= kTriadEqualityTolerance;
}

double saturating_power(double magnitude, double k) {
  const double p = std::pow(std::abs(magnitude), k);
  return std::isinf(p) ? 1.0 : p / (1.0 + p);
}

std::string format_exponent(double k) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, k);
  return std::string(buf, res.ptr);
}

[[noreturn]] void unknown(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::UnknownIndicator,
              "unknown indicator '" + std::string(text) + "'" + (why.empty() ? "" : ": " + why));
}

double parse_exponent(std::string_view text, std::string_view whole) {
  double k = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc{} || ptr != text.data() + text.size()) unknown(whole, "bad exponent");
  if (!(k > 0.0 && k <= 1.0)) unknown(whole, "exponent must lie in (0, 1]");
  return k;
}

TriadKernel own_kernel(const IndicatorId& id) {
  const double k = id.exponent();
  switch (id.kind()) {
    case IndicatorKind::Kii:
      return kii_triad;
    case IndicatorKind::II3:
      return damped_kii_triad;
    case IndicatorKind::II5:
      return ii_t_triad;
    case IndicatorKind::Log2:
      return [](const Triad& t) { return one_minus_min_pow(2.0, log_diff(t)); };
    case IndicatorKind::LogE:
      return [](const Triad& t) { return one_minus_min_pow(std::exp(1.0), log_diff(t)); };
    case IndicatorKind::LogPow:
      return [k](const Triad& t) {
        return ratio_consistent(t) ? 0.0 : saturating_power(log_diff(t), k);
      };
    case IndicatorKind::Diff2:
      return [](const Triad& t) { return one_minus_min_pow(2.0, t.x * t.z - t.y); };
    case IndicatorKind::DiffE:
      return [](const Triad& t) { return one_minus_min_pow(std::exp(1.0), t.x * t.z - t.y); };
    case IndicatorKind::DiffPow:
      return [k](const Triad& t) {
        return ratio_consistent(t) ? 0.0 : saturating_power(t.x * t.z - t.y, k);
      };
    case IndicatorKind::Family: {
      auto shape = id.shared_shape();
      return [shape](const Triad& t) { return ratio_consistent(t) ? 0.0 : (*shape)(log_diff(t)); };
    }
    case IndicatorKind::II1:
    case IndicatorKind::II2:
    case IndicatorKind::II4:
    case IndicatorKind::CI:
      break;
  }
  throw Error(ErrorCode::UnknownIndicator, id.name() + " has no triad kernel");
}

struct ArgMax {
  double value = 0.0;
  std::optional<TriadIndex> where;

  void offer(double v, const TriadIndex& t) {
    if (!where || v > value) {
      value = v;
      where = t;
    }
  }
};

}  // namespace

// --- IndicatorId ------------------------------------------------------------

IndicatorId IndicatorId::of(IndicatorKind kind, double exponent) {
  if (kind == IndicatorKind::Family) {
    throw Error(ErrorCode::UnknownIndicator, "family indicators need a shape function");
  }
  if (kind == IndicatorKind::LogPow || kind == IndicatorKind::DiffPow) {
    if (!(exponent > 0.0 && exponent <= 1.0)) {
      throw Error(ErrorCode::UnknownIndicator, "exponent must lie in (0, 1]");
    }
  } else {
    exponent = 1.0;
  }
  return IndicatorId(kind, exponent, nullptr);
}

IndicatorId IndicatorId::family(std::shared_ptr<const FamilyShape> shape) {
  if (!shape) throw Error(ErrorCode::UnknownIndicator, "null family shape");
  return IndicatorId(IndicatorKind::Family, 1.0, std::move(shape));
}

IndicatorId IndicatorId::parse(std::string_view text) {
  static const std::map<std::string_view, IndicatorKind> simple = {
      {"kii", IndicatorKind::Kii},     {"ii1", IndicatorKind::II1},
      {"ii2", IndicatorKind::II2},     {"ii3", IndicatorKind::II3},
      {"ii4", IndicatorKind::II4},     {"ii5", IndicatorKind::II5},
      {"ci", IndicatorKind::CI},       {"log2", IndicatorKind::Log2},
      {"loge", IndicatorKind::LogE},   {"diff2", IndicatorKind::Diff2},
      {"diffe", IndicatorKind::DiffE}, {"logpow", IndicatorKind::LogPow},
      {"diffpow", IndicatorKind::DiffPow},
  };
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  if (head == "family") {
    if (colon == std::string_view::npos) unknown(text, "missing family name");
    auto shape = builtin_family(text.substr(colon + 1));
    if (!shape) unknown(text, "no such family");
    return family(std::move(shape));
  }
  const auto it = simple.find(head);
  if (it == simple.end()) unknown(text, "");
  const bool takes_exponent =
      it->second == IndicatorKind::LogPow || it->second == IndicatorKind::DiffPow;
  if (colon != std::string_view::npos) {
    if (!takes_exponent) unknown(text, "takes no parameter");
    return of(it->second, parse_exponent(text.substr(colon + 1), text));
  }
  return of(it->second);
}

std::string IndicatorId::name() const {
  switch (kind_) {
    case IndicatorKind::Kii: return "kii";
    case IndicatorKind::II1: return "ii1";
    case IndicatorKind::II2: return "ii2";
    case IndicatorKind::II3: return "ii3";
    case IndicatorKind::II4: return "ii4";
    case IndicatorKind::II5: return "ii5";
    case IndicatorKind::CI: return "ci";
    case IndicatorKind::Log2: return "log2";
    case IndicatorKind::LogE: return "loge";
    case IndicatorKind::LogPow: return "logpow:" + format_exponent(exponent_);
    case IndicatorKind::Diff2: return "diff2";
    case IndicatorKind::DiffE: return "diffe";
    case IndicatorKind::DiffPow: return "diffpow:" + format_exponent(exponent_);
    case IndicatorKind::Family: return "family:" + shape_->name();
  }
  return "unknown";
}

bool IndicatorId::operator==(const IndicatorId& other) const {
  if (kind_ != other.kind_ || exponent_ != other.exponent_) return false;
  if (kind_ != IndicatorKind::Family) return true;
  return shape_ == other.shape_ || shape_->name() == other.shape_->name();
}

// --- kernels ----------------------------------------------------------------

double kii_triad(const Triad& t) {
  const double r = t.x * t.z / t.y;
  return 1.0 - std::min(r, 1.0 / r);
}

double damped_kii_triad(const Triad& t) {
  const double worst = std::max({t.x, t.y, t.z, 1.0 / t.x, 1.0 / t.y, 1.0 / t.z});
  return std::exp(-worst) * kii_triad(t);
}

double ii_t_triad(const Triad& t) {
  if (std::abs(t.x * t.z / t.y - 1.0) <= kTriadEqualityTolerance) return 0.0;
  const double s = t.x + t.y + t.z;
  return s / (s + 1.0);
}

double invariant_map(InvariantKind kind, const Triad& t) {
  switch (kind) {
    case InvariantKind::Ratio: return t.x * t.z / t.y;
    case InvariantKind::LogDiff: return log_diff(t);
    case InvariantKind::Diff: return t.x * t.z - t.y;
  }
  return 0.0;
}

bool is_triad_max(const IndicatorId& id) {
  switch (id.kind()) {
    case IndicatorKind::II1:
    case IndicatorKind::II2:
    case IndicatorKind::II4:
    case IndicatorKind::CI:
      return false;
    default:
      return true;
  }
}

TriadKernel localisation_kernel(const IndicatorId& id) {
  switch (id.kind()) {
    case IndicatorKind::II1:
    case IndicatorKind::II2:
    case IndicatorKind::II4:
      return kii_triad;
    default:
      return own_kernel(id);
  }
}

// --- matrix indicators ------------------------------------------------------

IndicatorResult evaluate_over_triads(
    const IndicatorId& id, std::span<const std::pair<TriadIndex, Triad>> items) {
  if (id.kind() == IndicatorKind::CI) {
    throw Error(ErrorCode::UnknownIndicator, "ci is not defined over a triad subset");
  }
  if (items.empty()) return {};

  if (id.kind() == IndicatorKind::II4) {
    bool consistent = true;
    ArgMax best;  // max over triads of min(r, 1/r)
    for (const auto& [where, t] : items) {
      const double r = t.x * t.z / t.y;
      if (std::abs(r - 1.0) > kConsistencyTolerance) consistent = false;
      best.offer(std::min(r, 1.0 / r), where);
    }
    if (consistent) return {};
    return {1.0 - 0.5 * best.value, best.where, std::nullopt};
  }

  const TriadKernel kernel = localisation_kernel(id);
  ArgMax worst;
  for (const auto& [where, t] : items) worst.offer(kernel(t), where);

  switch (id.kind()) {
    case IndicatorKind::II1: return {0.5 * (1.0 + worst.value), worst.where, std::nullopt};
    case IndicatorKind::II2: return {2.0 * worst.value, worst.where, std::nullopt};
    default: return {worst.value, worst.where, std::nullopt};
  }
}

IndicatorResult evaluate(const IndicatorId& id, const PcMatrix& a) {
  const std::size_t n = a.order();
  if (n < 3) throw Error(ErrorCode::OrderTooSmall, "indicators need order n >= 3");
  if (!a.is_reciprocal()) {
    throw Error(ErrorCode::NotReciprocal, "indicators need a reciprocal PC matrix");
  }
  if (id.kind() == IndicatorKind::CI) {
    const double lambda = principal_eigenvalue(a);
    const double nd = static_cast<double>(n);
    return {(lambda - nd) / (nd - 1.0), std::nullopt, lambda};
  }
  std::vector<std::pair<TriadIndex, Triad>> items;
  items.reserve(triad_count(n));
  for (const auto& t : triads(n)) items.emplace_back(t, triad_at(a, t));
  return evaluate_over_triads(id, items);
}

IndicatorResult extend_triad_indicator(const TriadKernel& kernel, const PcMatrix& a) {
  const std::size_t n = a.order();
  if (n < 3) throw Error(ErrorCode::OrderTooSmall, "need order n >= 3");
  const TriadIndex top{0, 1, 2};
  if (n == 3) return {kernel(triad_at(a, top)), top, std::nullopt};
  ArgMax worst;
  for (const auto& sel : enumerate_selectors(n, 3)) {
    const PcMatrix b = submatrix(a, sel);
    worst.offer(kernel(triad_at(b, top)), {sel[0], sel[1], sel[2]});
  }
  return {worst.value, worst.where, std::nullopt};
}

// --- families ---------------------------------------------------------------

std::shared_ptr<const FamilyShape> make_checked_shape(std::string name,
                                                      std::function<double(double)> f) {
  if (!f) throw Error(ErrorCode::ShapeFunctionViolation, "empty shape function");
  std::vector<double> grid{0.0};
  for (int e = -10; e <= 10; ++e) grid.push_back(std::ldexp(1.0, e));

  auto violation = [&](const std::string& condition, double at, double value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, " violated at t=%.17g (f=%.17g)", at, value);
    throw Error(ErrorCode::ShapeFunctionViolation,
                "shape '" + name + "': " + condition + buf);
  };

  for (double t : grid) {
    if (std::abs(f(-t) - f(t)) > 1e-12) violation("evenness", -t, f(-t));
  }
  if (f(0.0) != 0.0) violation("zero-at-zero", 0.0, f(0.0));
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (!(f(grid[g]) != 0.0)) violation("zero-only-at-zero", grid[g], f(grid[g]));
    if (f(grid[g]) < f(grid[g - 1])) violation("monotonicity", grid[g], f(grid[g]));
  }
  for (double t : grid) {
    for (double s : {t, -t}) {
      const double v = f(s);
      if (!(v >= 0.0 && v <= 1.0)) violation("range [0,1]", s, v);
    }
  }
  return std::shared_ptr<const FamilyShape>(new FamilyShape(std::move(name), std::move(f)));
}

IndicatorId build_from_f(std::string name, std::function<double(double)> f) {
  return IndicatorId::family(make_checked_shape(std::move(name), std::move(f)));
}

namespace {

const std::map<std::string, std::shared_ptr<const FamilyShape>, std::less<>>& families() {
  static const auto registry = [] {
    std::map<std::string, std::shared_ptr<const FamilyShape>, std::less<>> m;
    m["exp"] = make_checked_shape("exp", [](double t) { return 1.0 - std::exp(-std::abs(t)); });
    m["frac"] = make_checked_shape(
        "frac", [](double t) { return std::abs(t) / (1.0 + std::abs(t)); });
    m["tanh"] = make_checked_shape("tanh", [](double t) { return std::tanh(std::abs(t)); });
    m["step"] = make_checked_shape(
        "step", [](double t) { return std::abs(t) <= 1e-12 ? 0.0 : 1.0; });
    return m;
  }();
  return registry;
}

}  // namespace

std::shared_ptr<const FamilyShape> builtin_family(std::string_view name) {
  const auto& m = families();
  const auto it = m.find(name);
  return it == m.end() ? nullptr : it->second;
}

std::vector<std::string> builtin_family_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : families()) out.push_back(k);
  return out;
}

// --- relative error ---------------------------------------------------------

double relative_error(const RelativeErrorInput& in) {
  if (in.t == 0.0) throw Error(ErrorCode::ZeroTrueValue, "relative error needs t != 0");
  return std::abs((in.t - in.t_approx) / in.t);
}

double triad_relative_error(const Triad& t, TriadErrorConvention convention) {
  const double product = t.x * t.z;
  switch (convention) {
    case TriadErrorConvention::ProductAsTruth: return relative_error({product, t.y});
    case TriadErrorConvention::MiddleOverProduct: return t.y / product;
  }
  return 0.0;
}

// --- catalogue --------------------------------------------------------------

const std::vector<CatalogueEntry>& catalogue() {
  static const std::vector<CatalogueEntry> entries = [] {
    using K = IndicatorKind;
    std::vector<CatalogueEntry> v{
        {IndicatorId::of(K::Kii), "max over triads of 1 - min(y/xz, xz/y)", true, false},
        {IndicatorId::of(K::II1), "(1 + Kii)/2; never 0, breaks consistency detection", true, false},
        {IndicatorId::of(K::II2), "2 Kii; breaks normalization", false, false},
        {IndicatorId::of(K::II3), "max of exp(-max entry) * Kii kernel over 3x3 submatrices", true, false},
        {IndicatorId::of(K::II4), "1 - max_T min(r,1/r)/2; breaks monotonicity", true, false},
        {IndicatorId::of(K::II5), "max over triads of (x+y+z)/(x+y+z+1); breaks order invariance", true, false},
        {IndicatorId::of(K::CI), "(lambda_max - n)/(n - 1)", false, true},
        {IndicatorId::of(K::Log2), "1 - min(2^l, 2^-l), l = ln x + ln z - ln y", true, false},
        {IndicatorId::of(K::LogE), "1 - min(e^l, e^-l); equals Kii", true, false},
        {IndicatorId::of(K::LogPow), "|l|^k/(1+|l|^k)", true, false},
        {IndicatorId::of(K::Diff2), "1 - min(2^d, 2^-d), d = xz - y", true, false},
        {IndicatorId::of(K::DiffE), "1 - min(e^d, e^-d)", true, false},
        {IndicatorId::of(K::DiffPow), "|d|^k/(1+|d|^k)", true, false},
    };
    for (const auto& name : builtin_family_names()) {
      v.push_back({IndicatorId::family(builtin_family(name)), "f(l) for shape " + name, true, false});
    }
    return v;
  }();
  return entries;
}

bool is_normalized(const IndicatorId& id) {
  return id.kind() != IndicatorKind::II2 && id.kind() != IndicatorKind::CI;
}

}  // namespace pcii
