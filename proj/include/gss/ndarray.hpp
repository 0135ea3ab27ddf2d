#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <numeric>
#include <vector>

namespace gss {

// Dense row-major array with a fixed rank. Used for every indexed parameter
// and decision-variable family (e.g. C[i][j][t] is NdArray<double, 3>).
template <typename T, std::size_t Rank>
class NdArray {
 public:
  using Shape = std::array<std::size_t, Rank>;

  NdArray() { shape_.fill(0); }

  explicit NdArray(const Shape& shape, T fill = T{}) : shape_(shape) {
    data_.assign(count(shape), fill);
  }

  template <typename... Ix>
  T& operator()(Ix... ix) {
    static_assert(sizeof...(Ix) == Rank);
    return data_[offset({static_cast<std::size_t>(ix)...})];
  }

  template <typename... Ix>
  const T& operator()(Ix... ix) const {
    static_assert(sizeof...(Ix) == Rank);
    return data_[offset({static_cast<std::size_t>(ix)...})];
  }

  const Shape& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const { return shape_[axis]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::vector<T>& flat() { return data_; }
  const std::vector<T>& flat() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool operator==(const NdArray&) const = default;

  static std::size_t count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

 private:
  std::size_t offset(const Shape& ix) const {
    std::size_t off = 0;
    for (std::size_t a = 0; a < Rank; ++a) {
      assert(ix[a] < shape_[a]);
      off = off * shape_[a] + ix[a];
    }
    return off;
  }

  Shape shape_;
  std::vector<T> data_;
};

using Vec1 = NdArray<double, 1>;
using Arr2 = NdArray<double, 2>;
using Arr3 = NdArray<double, 3>;
using Arr4 = NdArray<double, 4>;

}  // namespace gss
