#include "finsler/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

void for_each_index(int rank, int dim, const std::function<void(std::span<const int>)>& fn) {
  std::vector<int> idx(rank, 0);
  while (true) {
    fn(idx);
    int r = rank - 1;
    while (r >= 0 && ++idx[r] == dim) idx[r--] = 0;
    if (r < 0) return;
  }
}

TensorValue values(const JetTensor& t) {
  TensorValue out(t.dim(), t.signature());
  for (std::size_t i = 0; i < t.size(); ++i) out.data()[i] = t.data()[i].value();
  return out;
}

JetTensor truncated(const JetTensor& t, int order) {
  JetTensor out = t;
  for (auto& j : out.data()) j = j.truncated(order);
  return out;
}

JetTensor derivative(const JetTensor& t, int var) {
  JetTensor out = t;
  for (auto& j : out.data()) j = j.derivative(var);
  return out;
}

int jet_order(const JetTensor& t) {
  int order = kMaxJetOrder;
  for (const auto& j : t.data()) order = std::min(order, j.max_order());
  return order;
}

double max_abs(const TensorValue& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const TensorValue& a, const TensorValue& b) {
  if (a.size() != b.size()) throw ArgumentError("tensor shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

std::vector<Jet> invert(std::span<const Jet> matrix, int n) {
  if (static_cast<int>(matrix.size()) != n * n) throw ArgumentError("invert: matrix is not n x n");
  std::vector<Jet> a(matrix.begin(), matrix.end());
  std::vector<Jet> inv(static_cast<std::size_t>(n) * n);
  double scale = 0.0;
  for (const auto& e : a) scale = std::max(scale, std::abs(e.value()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i * n + j] = a[0].constant_like(i == j ? 1.0 : 0.0);

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col].value()) > std::abs(a[pivot * n + col].value())) pivot = r;
    if (!(std::abs(a[pivot * n + col].value()) > 1e-13 * std::max(scale, 1e-300)))
      throw LinearAlgebraError("singular matrix (pivot " + std::to_string(col) + ")");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a[col * n + j], a[pivot * n + j]);
        std::swap(inv[col * n + j], inv[pivot * n + j]);
      }
    }
    const Jet pinv = reciprocal(a[col * n + col]);
    for (int j = 0; j < n; ++j) {
      a[col * n + j] = a[col * n + j] * pinv;
      inv[col * n + j] = inv[col * n + j] * pinv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = a[r * n + col];
      for (int j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[col * n + j];
        inv[r * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return inv;
}

}  // namespace finsler
