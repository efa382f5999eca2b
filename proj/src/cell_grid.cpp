#include "gibbslat/cell_grid.hpp"

#include <algorithm>
#include <cmath>

namespace gibbslat {

void CellGrid::init(const Window& bounds, double cell) {
  if (bounds.empty || cell <= 0.0) throw ConfigError("cell grid needs a nonempty box and positive cell size");
  bounds_ = bounds;
  cell_ = cell;
  dim_ = bounds.dim;
  size_t total = 1;
  for (int k = 0; k < dim_; ++k) {
    dims_[static_cast<size_t>(k)] =
        std::max(1, static_cast<int>(std::ceil(bounds.side(k) / cell)));
    total *= static_cast<size_t>(dims_[static_cast<size_t>(k)]);
  }
  buckets_.assign(total, {});
}

std::array<int, kMaxDim> CellGrid::cell_of(const Vec& p) const {
  std::array<int, kMaxDim> c{};
  for (int k = 0; k < dim_; ++k) {
    int ck = static_cast<int>(std::floor((p[k] - bounds_.lower[k]) / cell_));
    c[static_cast<size_t>(k)] = std::clamp(ck, 0, dims_[static_cast<size_t>(k)] - 1);
  }
  return c;
}

size_t CellGrid::flat_index(const std::array<int, kMaxDim>& c) const {
  size_t flat = 0;
  for (int k = 0; k < dim_; ++k)
    flat = flat * static_cast<size_t>(dims_[static_cast<size_t>(k)]) +
           static_cast<size_t>(c[static_cast<size_t>(k)]);
  return flat;
}

void CellGrid::insert(int id, const Vec& p) { buckets_[flat_index(cell_of(p))].push_back(id); }

void CellGrid::remove(int id, const Vec& p) {
  auto& b = buckets_[flat_index(cell_of(p))];
  for (size_t i = 0; i < b.size(); ++i) {
    if (b[i] == id) {
      b[i] = b.back();
      b.pop_back();
      return;
    }
  }
}

void CellGrid::move(int id, const Vec& from, const Vec& to) {
  const size_t a = flat_index(cell_of(from));
  const size_t b = flat_index(cell_of(to));
  if (a == b) return;
  auto& ba = buckets_[a];
  for (size_t i = 0; i < ba.size(); ++i) {
    if (ba[i] == id) {
      ba[i] = ba.back();
      ba.pop_back();
      break;
    }
  }
  buckets_[b].push_back(id);
}

}  // namespace gibbslat
