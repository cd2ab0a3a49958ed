#pragma once

// Dense tensors over an n-dimensional index range.
//
// Storage convention (used consistently by every module):
//   g_ij         -> g(i, j)
//   C_ijk        -> C(i, j, k)
//   C_i^h_j      -> Cmix(i, h, j)
//   N^i_j        -> N(i, j)
//   F_i^h_j      -> F(i, h, j)
//   R^h_ij       -> Rh(h, i, j)
//   R_k^h_ji     -> R(k, h, j, i)
// i.e. indices are stored in the order they are written, upper and lower
// alike.  Derivative indices produced by delta_derivative are prepended and
// those produced by covariant derivatives are appended.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

enum class Variance { upper, lower };
enum class Block { horizontal, vertical, base };

struct IndexSlot {
  std::string name;
  Variance variance = Variance::lower;
  Block block = Block::base;

  friend bool operator==(const IndexSlot&, const IndexSlot&) = default;
};

inline IndexSlot lower(std::string name, Block block = Block::base) {
  return {std::move(name), Variance::lower, block};
}
inline IndexSlot upper(std::string name, Block block = Block::base) {
  return {std::move(name), Variance::upper, block};
}

template <class T>
class BasicTensor {
 public:
  BasicTensor() = default;
  BasicTensor(int dim, std::vector<IndexSlot> signature, T fill = T{})
      : dim_(dim), signature_(std::move(signature)) {
    if (dim < 1) throw ArgumentError("tensor dimension must be positive");
    std::size_t size = 1;
    for (std::size_t r = 0; r < signature_.size(); ++r) size *= static_cast<std::size_t>(dim);
    data_.assign(size, fill);
  }

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(signature_.size()); }
  std::size_t size() const { return data_.size(); }
  const std::vector<IndexSlot>& signature() const { return signature_; }
  std::vector<int> shape() const { return std::vector<int>(signature_.size(), dim_); }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }
  T& at(std::span<const int> idx) { return data_[offset(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[offset(idx)]; }

  std::size_t offset(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank()) throw ArgumentError("tensor index rank mismatch");
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return off;
  }
  std::size_t offset(std::initializer_list<int> idx) const {
    return offset(std::span<const int>(idx.begin(), idx.size()));
  }

 private:
  int dim_ = 0;
  std::vector<IndexSlot> signature_;
  std::vector<T> data_;
};

using TensorValue = BasicTensor<double>;
using JetTensor = BasicTensor<Jet>;

/// Calls fn(index) for every multi-index in row-major order.
void for_each_index(int rank, int dim, const std::function<void(std::span<const int>)>& fn);

/// Entrywise value extraction.
TensorValue values(const JetTensor& t);
/// Entrywise truncation to a lower jet order.
JetTensor truncated(const JetTensor& t, int order);
/// Entrywise derivative with respect to jet variable `var`.
JetTensor derivative(const JetTensor& t, int var);
/// Smallest jet order present in the tensor.
int jet_order(const JetTensor& t);

/// Largest absolute entry.
double max_abs(const TensorValue& t);
/// Largest absolute entrywise difference; shapes must match.
double max_abs_diff(const TensorValue& a, const TensorValue& b);

/// Inverse of a square matrix of jets (Gauss-Jordan, partial pivoting on the
/// values).  Throws LinearAlgebraError when a pivot vanishes.
std::vector<Jet> invert(std::span<const Jet> matrix, int n);

}  // namespace finsler
