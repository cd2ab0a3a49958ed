#include "finsler/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

constexpr std::uint32_t kKeyBase = kMaxJetOrder + 1;

std::uint32_t exponent_key(std::span<const std::uint8_t> exps) {
  std::uint32_t key = 0;
  for (auto it = exps.rbegin(); it != exps.rend(); ++it) key = key * kKeyBase + *it;
  return key;
}

// All exponent vectors of total degree `degree`, lexicographically descending.
void compositions(int num_vars, int degree, std::vector<std::uint8_t>& current, int var,
                  std::vector<std::uint8_t>& out) {
  if (var == num_vars - 1) {
    current[var] = static_cast<std::uint8_t>(degree);
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = static_cast<std::uint8_t>(e);
    compositions(num_vars, degree - e, current, var + 1, out);
  }
}

}  // namespace

MonomialLayout::MonomialLayout(int num_vars, int max_order)
    : num_vars_(num_vars), max_order_(max_order) {
  std::vector<std::uint8_t> current(num_vars, 0);
  degree_offsets_.push_back(0);
  for (int d = 0; d <= max_order; ++d) {
    compositions(num_vars, d, current, 0, exponents_);
    const int count = static_cast<int>(exponents_.size() / num_vars);
    degree_.resize(count, d);
    degree_offsets_.push_back(count);
  }

  const int n = size();
  std::vector<std::pair<std::uint32_t, int>> keyed;
  keyed.reserve(n);
  for (int i = 0; i < n; ++i) keyed.emplace_back(exponent_key(exponents(i)), i);
  std::sort(keyed.begin(), keyed.end());
  for (const auto& [k, i] : keyed) {
    keys_.push_back(k);
    key_index_.push_back(i);
  }

  std::vector<std::uint8_t> sum(num_vars);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n && degree_[i] + degree_[j] <= max_order; ++j) {
      auto ei = exponents(i);
      auto ej = exponents(j);
      for (int v = 0; v < num_vars; ++v) sum[v] = static_cast<std::uint8_t>(ei[v] + ej[v]);
      products_.push_back({i, j, index_of(sum)});
    }
  }

  raise_.assign(static_cast<std::size_t>(num_vars) * n, -1);
  for (int v = 0; v < num_vars; ++v) {
    for (int i = 0; i < n; ++i) {
      if (degree_[i] >= max_order) continue;
      auto e = exponents(i);
      std::copy(e.begin(), e.end(), sum.begin());
      ++sum[v];
      raise_[static_cast<std::size_t>(v) * n + i] = index_of(sum);
    }
  }
}

int MonomialLayout::index_of(std::span<const std::uint8_t> exps) const {
  int deg = 0;
  for (auto e : exps) deg += e;
  if (deg > max_order_) return -1;
  const auto key = exponent_key(exps);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return key_index_[static_cast<std::size_t>(it - keys_.begin())];
}

std::shared_ptr<const MonomialLayout> MonomialLayout::get(int num_vars, int max_order) {
  if (num_vars < 1 || num_vars > kMaxJetVars)
    throw ArgumentError("jet variable count must be in [1, " + std::to_string(kMaxJetVars) +
                        "], got " + std::to_string(num_vars));
  if (max_order < 0 || max_order > kMaxJetOrder)
    throw ArgumentError("jet order must be in [0, " + std::to_string(kMaxJetOrder) + "], got " +
                        std::to_string(max_order));
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{num_vars, max_order}];
  if (!slot) slot = std::make_shared<const MonomialLayout>(num_vars, max_order);
  return slot;
}

Jet Jet::constant(double value, int num_vars, int max_order) {
  auto layout = MonomialLayout::get(num_vars, max_order);
  std::vector<double> c(layout->size(), 0.0);
  c[0] = value;
  return Jet(std::move(layout), std::move(c));
}

Jet Jet::variable(double value, int var_index, int num_vars, int max_order) {
  if (var_index < 0 || var_index >= num_vars)
    throw ArgumentError("variable index " + std::to_string(var_index) + " out of range for " +
                        std::to_string(num_vars) + " variables");
  Jet j = constant(value, num_vars, max_order);
  if (max_order >= 1) j.coeffs_[1 + var_index] = 1.0;
  return j;
}

Jet Jet::constant_like(double value) const {
  std::vector<double> c(coeffs_.size(), 0.0);
  c[0] = value;
  return Jet(layout_, std::move(c));
}

double Jet::coefficient(std::span<const std::uint8_t> exps) const {
  if (static_cast<int>(exps.size()) != num_vars())
    throw ArgumentError("exponent vector length does not match jet variable count");
  const int idx = layout_->index_of(exps);
  if (idx < 0) throw ArgumentError("requested coefficient is above the jet order");
  return coeffs_[idx];
}

void Jet::require_compatible(const Jet& o) const {
  if (empty() || o.empty()) throw ArgumentError("arithmetic on an empty jet");
  if (layout_ != o.layout_)
    throw ArgumentError("jet arithmetic requires equal variable count and order (got " +
                        std::to_string(num_vars()) + "/" + std::to_string(max_order()) + " and " +
                        std::to_string(o.num_vars()) + "/" + std::to_string(o.max_order()) + ")");
}

Jet Jet::derivative(int var) const {
  if (var < 0 || var >= num_vars()) throw ArgumentError("derivative variable out of range");
  if (max_order() == 0) throw ArgumentError("cannot differentiate an order-0 jet");
  auto target = MonomialLayout::get(num_vars(), max_order() - 1);
  std::vector<double> c(target->size());
  auto up = layout_->raise(var);
  for (int k = 0; k < target->size(); ++k)
    c[k] = (target->exponents(k)[var] + 1) * coeffs_[up[k]];
  return Jet(std::move(target), std::move(c));
}

Jet Jet::truncated(int order) const {
  if (order > max_order()) throw ArgumentError("truncation cannot raise the jet order");
  if (order == max_order()) return *this;
  auto target = MonomialLayout::get(num_vars(), order);
  std::vector<double> c(coeffs_.begin(), coeffs_.begin() + target->size());
  return Jet(std::move(target), std::move(c));
}

Jet& Jet::operator+=(const Jet& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  require_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet& Jet::operator+=(double s) {
  coeffs_[0] += s;
  return *this;
}
Jet& Jet::operator-=(double s) {
  coeffs_[0] -= s;
  return *this;
}
Jet& Jet::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}
Jet& Jet::operator/=(double s) {
  if (s == 0.0) throw DomainError("division of a jet by zero");
  for (auto& c : coeffs_) c /= s;
  return *this;
}

Jet operator-(Jet a) {
  for (auto& c : a.coeffs_) c = -c;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.require_compatible(b);
  std::vector<double> c(a.coeffs_.size(), 0.0);
  for (const auto& t : a.layout_->products()) c[t.out] += a.coeffs_[t.lhs] * b.coeffs_[t.rhs];
  return Jet(a.layout_, std::move(c));
}

Jet operator/(const Jet& a, const Jet& b) {
  a.require_compatible(b);
  if (b.value() == 0.0) throw DomainError("division by a zero-valued jet");
  return a * reciprocal(b);
}

Jet operator/(double s, const Jet& a) {
  if (a.value() == 0.0) throw DomainError("division by a zero-valued jet");
  return s * reciprocal(a);
}

Jet Jet::compose(std::span<const double> series) const {
  const int p = max_order();
  if (static_cast<int>(series.size()) < p + 1)
    throw ArgumentError("composition series shorter than the jet order");
  Jet h = *this;
  h.coeffs_[0] = 0.0;
  Jet r = constant_like(series[p]);
  for (int k = p - 1; k >= 0; --k) {
    r = r * h;
    r.coeffs_[0] += series[k];
  }
  return r;
}

namespace {

using Series = std::array<double, kMaxJetOrder + 1>;

// Generalized binomial coefficients times u0^(r-k): Taylor series of u^r.
Series power_series(double u0, double r, int order) {
  Series s{};
  double falling = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) {
      falling *= (r - (k - 1));
      fact *= k;
    }
    s[k] = falling == 0.0 ? 0.0 : falling / fact * std::pow(u0, r - k);
  }
  return s;
}

}  // namespace

Jet sqrt(const Jet& u) {
  const double u0 = u.value();
  if (u0 < 0.0) throw DomainError("sqrt of negative value " + std::to_string(u0));
  if (u0 == 0.0 && u.max_order() > 0) throw DomainError("sqrt is not differentiable at 0");
  return u.compose(power_series(u0, 0.5, u.max_order()));
}

Jet pow(const Jet& u, int exponent) {
  const double u0 = u.value();
  if (exponent < 0 && u0 == 0.0) throw DomainError("negative power of a zero-valued jet");
  if (exponent == 0) return u.constant_like(1.0);
  if (exponent == 1) return u;
  if (exponent == 2) return u * u;
  return u.compose(power_series(u0, exponent, u.max_order()));
}

Jet reciprocal(const Jet& u) { return pow(u, -1); }

Jet exp(const Jet& u) {
  Series s{};
  const double e = std::exp(u.value());
  double fact = 1.0;
  for (int k = 0; k <= u.max_order(); ++k) {
    if (k > 0) fact *= k;
    s[k] = e / fact;
  }
  return u.compose(s);
}

Jet log(const Jet& u) {
  const double u0 = u.value();
  if (u0 <= 0.0) throw DomainError("log of nonpositive value " + std::to_string(u0));
  Series s{};
  s[0] = std::log(u0);
  for (int k = 1; k <= u.max_order(); ++k)
    s[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(u0, k));
  return u.compose(s);
}

namespace {

// d^k/dt^k sin(t) = sin(t + k pi/2); phase 0 gives sin, phase 1 gives cos.
Jet trig(const Jet& u, int phase) {
  const double sv = std::sin(u.value());
  const double cv = std::cos(u.value());
  const std::array<double, 4> cycle{sv, cv, -sv, -cv};
  Series s{};
  double fact = 1.0;
  for (int k = 0; k <= u.max_order(); ++k) {
    if (k > 0) fact *= k;
    s[k] = cycle[(k + phase) % 4] / fact;
  }
  return u.compose(s);
}

}  // namespace

Jet sin(const Jet& u) { return trig(u, 0); }
Jet cos(const Jet& u) { return trig(u, 1); }

Jet seed_variable(double value, int var_index, int num_vars, int max_order) {
  if (max_order < 1 || max_order > kMaxJetOrder)
    throw ArgumentError("max_order must be in [1, 4], got " + std::to_string(max_order));
  return Jet::variable(value, var_index, num_vars, max_order);
}

Jet jet_apply(JetOp op, std::span<const Jet> args, int exponent) {
  const bool binary = op == JetOp::add || op == JetOp::sub || op == JetOp::mul || op == JetOp::div;
  const std::size_t want = binary ? 2 : 1;
  if (args.size() != want)
    throw ArgumentError("jet_apply expects " + std::to_string(want) + " operand(s), got " +
                        std::to_string(args.size()));
  switch (op) {
    case JetOp::add: return args[0] + args[1];
    case JetOp::sub: return args[0] - args[1];
    case JetOp::mul: return args[0] * args[1];
    case JetOp::div: return args[0] / args[1];
    case JetOp::sqrt: return sqrt(args[0]);
    case JetOp::pow_int: return pow(args[0], exponent);
    case JetOp::sin: return sin(args[0]);
    case JetOp::cos: return cos(args[0]);
    case JetOp::exp: return exp(args[0]);
    case JetOp::log: return log(args[0]);
  }
  throw ArgumentError("unknown jet operation");
}

double extract_partial(const Jet& jet, std::span<const int> variables) {
  if (jet.empty()) throw ArgumentError("extract_partial on an empty jet");
  if (static_cast<int>(variables.size()) > jet.max_order())
    throw ArgumentError("derivative degree " + std::to_string(variables.size()) +
                        " exceeds jet order " + std::to_string(jet.max_order()));
  std::array<std::uint8_t, kMaxJetVars> exps{};
  for (int v : variables) {
    if (v < 0 || v >= jet.num_vars()) throw ArgumentError("derivative variable out of range");
    ++exps[v];
  }
  double scale = 1.0;
  for (int v = 0; v < jet.num_vars(); ++v)
    for (int k = 2; k <= exps[v]; ++k) scale *= k;
  return scale * jet.coefficient(std::span<const std::uint8_t>(exps.data(), jet.num_vars()));
}

}  // namespace finsler
