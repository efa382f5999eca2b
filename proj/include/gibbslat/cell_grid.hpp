#pragma once

#include <vector>

#include "gibbslat/geometry.hpp"

namespace gibbslat {

// Dense bucket grid over a bounding box for fixed-radius neighbor queries.
// Holds indices into an external point vector; points must stay inside the
// box the grid was built over.
class CellGrid {
 public:
  CellGrid() = default;

  // `cell` must be >= the largest query radius so a 3^d block covers it.
  void init(const Window& bounds, double cell);

  void insert(int id, const Vec& p);
  void remove(int id, const Vec& p);
  void move(int id, const Vec& from, const Vec& to);

  // Calls f(id, point_index_unchecked) for every id in the 3^d cell block
  // around y; callers do their own distance test.
  template <class F>
  void for_candidates(const Vec& y, F&& f) const {
    std::array<int, kMaxDim> c = cell_of(y);
    std::array<int, kMaxDim> it{};
    for (int k = 0; k < dim_; ++k) it[static_cast<size_t>(k)] = -1;
    while (true) {
      bool ok = true;
      size_t flat = 0;
      for (int k = 0; k < dim_; ++k) {
        const int ck = c[static_cast<size_t>(k)] + it[static_cast<size_t>(k)];
        if (ck < 0 || ck >= dims_[static_cast<size_t>(k)]) {
          ok = false;
          break;
        }
        flat = flat * static_cast<size_t>(dims_[static_cast<size_t>(k)]) + static_cast<size_t>(ck);
      }
      if (ok)
        for (int id : buckets_[flat]) f(id);
      int k = dim_ - 1;
      while (k >= 0) {
        if (++it[static_cast<size_t>(k)] <= 1) break;
        it[static_cast<size_t>(k)] = -1;
        --k;
      }
      if (k < 0) break;
    }
  }

  int dim() const { return dim_; }

 private:
  std::array<int, kMaxDim> cell_of(const Vec& p) const;
  size_t flat_index(const std::array<int, kMaxDim>& c) const;

  Window bounds_;
  double cell_ = 1.0;
  int dim_ = 0;
  std::array<int, kMaxDim> dims_{};
  std::vector<std::vector<int>> buckets_;
};

}  // namespace gibbslat
