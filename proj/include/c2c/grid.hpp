#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace c2c {

// Dense 2D array, x fastest (index = y*w + x). x runs right-left,
// y runs anterior-posterior when holding image data.
template <typename T>
struct Array2 {
  int w = 0;
  int h = 0;
  std::vector<T> v;

  Array2() = default;
  Array2(int w_, int h_, T init = T{}) : w(w_), h(h_), v(static_cast<size_t>(w_) * h_, init) {}

  T& operator()(int x, int y) { return v[static_cast<size_t>(y) * w + x]; }
  const T& operator()(int x, int y) const { return v[static_cast<size_t>(y) * w + x]; }

  size_t size() const { return v.size(); }
  bool in_bounds(int x, int y) const { return x >= 0 && x < w && y >= 0 && y < h; }
  bool same_shape(const Array2& o) const { return w == o.w && h == o.h; }
  void fill(T val) { std::fill(v.begin(), v.end(), val); }

  bool operator==(const Array2& o) const { return w == o.w && h == o.h && v == o.v; }
};

// Dense 3D array, x fastest, then y, then z (index = (z*ny + y)*nx + x).
template <typename T>
struct Array3 {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  std::vector<T> v;

  Array3() = default;
  Array3(int nx_, int ny_, int nz_, T init = T{})
      : nx(nx_), ny(ny_), nz(nz_), v(static_cast<size_t>(nx_) * ny_ * nz_, init) {}

  T& operator()(int x, int y, int z) {
    return v[(static_cast<size_t>(z) * ny + y) * nx + x];
  }
  const T& operator()(int x, int y, int z) const {
    return v[(static_cast<size_t>(z) * ny + y) * nx + x];
  }

  size_t size() const { return v.size(); }
  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < nx && y >= 0 && y < ny && z >= 0 && z < nz;
  }
  bool same_shape(const Array3& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
  void fill(T val) { std::fill(v.begin(), v.end(), val); }

  bool operator==(const Array3& o) const {
    return nx == o.nx && ny == o.ny && nz == o.nz && v == o.v;
  }
};

}  // namespace c2c
