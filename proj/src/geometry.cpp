#include "geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace linopt {

Pairing Pairing::from_blocks(std::size_t n, std::vector<Block> blocks) {
  if (n == 0) throw std::invalid_argument("pairing: mode count must be at least 1");
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  Pairing p;
  p.partner_.assign(n, unset);
  p.block_index_.assign(n, unset);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    for (std::size_t x : {blk.first, blk.second}) {
      if (x >= n) {
        throw std::invalid_argument(
            fmt::format("pairing: mode {} out of range 1..{}", x + 1, n));
      }
    }
    if (p.partner_[blk.first] != unset || (blk.is_pair() && p.partner_[blk.second] != unset)) {
      throw std::invalid_argument(fmt::format("pairing: overlapping blocks at mode {}",
                                              p.partner_[blk.first] != unset ? blk.first + 1
                                                                             : blk.second + 1));
    }
    p.partner_[blk.first] = blk.second;
    p.partner_[blk.second] = blk.first;
    p.block_index_[blk.first] = b;
    p.block_index_[blk.second] = b;
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (p.partner_[x] == unset) {
      throw std::invalid_argument(fmt::format("pairing: mode {} not covered by any block", x + 1));
    }
  }
  p.blocks_ = std::move(blocks);
  return p;
}

Pairing Pairing::from_one_based(std::size_t n,
                                const std::vector<std::vector<std::size_t>>& blocks) {
  std::vector<Block> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (b.empty() || b.size() > 2) {
      throw std::invalid_argument("pairing: blocks must hold one or two modes");
    }
    for (std::size_t x : b) {
      if (x < 1 || x > n) {
        throw std::invalid_argument(fmt::format("pairing: mode {} out of range 1..{}", x, n));
      }
    }
    if (b.size() == 2 && b[0] == b[1]) {
      throw std::invalid_argument(fmt::format("pairing: block {{{},{}}} repeats a mode", b[0], b[1]));
    }
    out.push_back({b[0] - 1, b.back() - 1});
  }
  return from_blocks(n, std::move(out));
}

Pairing Pairing::singletons(std::size_t n) {
  std::vector<Block> blocks;
  for (std::size_t x = 0; x < n; ++x) blocks.push_back({x, x});
  return from_blocks(n, std::move(blocks));
}

std::size_t Pairing::pair_count() const {
  return static_cast<std::size_t>(
      std::count_if(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.is_pair(); }));
}

std::vector<std::vector<std::size_t>> Pairing::to_one_based() const {
  std::vector<std::vector<std::size_t>> out;
  for (const Block& b : blocks_) {
    if (b.is_pair()) {
      out.push_back({b.first + 1, b.second + 1});
    } else {
      out.push_back({b.first + 1});
    }
  }
  return out;
}

std::string to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::brickwall1d: return "brickwall";
    case GeometryKind::brickwork: return "brickwork";
    case GeometryKind::custom: return "custom";
  }
  return "custom";
}

GeometrySpec GeometrySpec::reversed() const {
  GeometrySpec out = *this;
  std::reverse(out.layers.begin(), out.layers.end());
  std::reverse(out.layer_order.begin(), out.layer_order.end());
  if (out.kind == GeometryKind::brickwall1d) out.kind = GeometryKind::custom;
  return out;
}

namespace {

std::vector<Block> left_blocks(std::size_t m) {
  std::vector<Block> blocks;
  for (std::size_t x = 0; x + 1 < m; x += 2) blocks.push_back({x, x + 1});
  return blocks;
}

std::vector<Block> right_blocks(std::size_t m) {
  std::vector<Block> blocks{{0, 0}};
  for (std::size_t x = 1; x + 2 < m; x += 2) blocks.push_back({x, x + 1});
  blocks.push_back({m - 1, m - 1});
  return blocks;
}

}  // namespace

GeometrySpec brickwall_geometry(std::size_t n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument(fmt::format("brickwall geometry needs an even n >= 2, got {}", n));
  }
  GeometrySpec g;
  g.n = n;
  g.kind = GeometryKind::brickwall1d;
  g.layers.push_back(Pairing::from_blocks(n, left_blocks(n)));
  g.layers.push_back(Pairing::from_blocks(n, right_blocks(n)));
  g.side = n;
  g.dim = 1;
  g.layer_order = {0, 1};
  return g;
}

std::vector<std::size_t> brickwork_coordinates(std::size_t index, std::size_t m, std::size_t dim) {
  std::vector<std::size_t> coords(dim);
  for (std::size_t j = dim; j-- > 0;) {
    coords[j] = index % m;
    index /= m;
  }
  return coords;
}

GeometrySpec brickwork_d_geometry(std::size_t m, std::size_t dim, std::vector<std::size_t> order) {
  if (m < 2 || m % 2 != 0) {
    throw std::invalid_argument(fmt::format("brickwork geometry needs an even side m >= 2, got {}", m));
  }
  if (dim < 1) throw std::invalid_argument("brickwork geometry needs dimension >= 1");
  if (order.empty()) {
    order.resize(2 * dim);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted.size() != 2 * dim || sorted[i] != i) {
        throw std::invalid_argument(fmt::format(
            "brickwork layer order must be a permutation of 0..{}", 2 * dim - 1));
      }
    }
  }
  std::size_t n = 1;
  for (std::size_t j = 0; j < dim; ++j) n *= m;

  // stride of axis j (0-based) in the row-major flattening
  std::vector<std::size_t> stride(dim, 1);
  for (std::size_t j = dim - 1; j-- > 0;) stride[j] = stride[j + 1] * m;

  const std::vector<Block> line_l = left_blocks(m);
  const std::vector<Block> line_r = right_blocks(m);

  GeometrySpec g;
  g.n = n;
  g.kind = dim == 1 ? GeometryKind::brickwall1d : GeometryKind::brickwork;
  g.side = m;
  g.dim = dim;
  g.layer_order = order;
  for (std::size_t slot : order) {
    const std::size_t axis = slot / 2;
    const std::vector<Block>& line = (slot % 2 == 0) ? line_l : line_r;
    std::vector<Block> blocks;
    for (std::size_t base = 0; base < n; ++base) {
      if (brickwork_coordinates(base, m, dim)[axis] != 0) continue;
      for (const Block& b : line) {
        blocks.push_back({base + b.first * stride[axis], base + b.second * stride[axis]});
      }
    }
    g.layers.push_back(Pairing::from_blocks(n, std::move(blocks)));
  }
  return g;
}

GeometrySpec custom_geometry(std::size_t n, std::vector<Pairing> layers) {
  if (layers.empty()) throw std::invalid_argument("custom geometry needs at least one layer");
  for (std::size_t j = 0; j < layers.size(); ++j) {
    if (layers[j].modes() != n) {
      throw std::invalid_argument(fmt::format("custom geometry: layer {} has {} modes, expected {}",
                                              j + 1, layers[j].modes(), n));
    }
  }
  GeometrySpec g;
  g.n = n;
  g.kind = GeometryKind::custom;
  g.layers = std::move(layers);
  return g;
}

GeometrySpec octahedral_geometry() {
  std::vector<Pairing> layers;
  layers.push_back(Pairing::from_one_based(6, {{1, 2}, {3, 5}, {4, 6}}));
  layers.push_back(Pairing::from_one_based(6, {{1, 4}, {2, 5}, {3, 6}}));
  layers.push_back(Pairing::from_one_based(6, {{2, 3}, {4, 5}, {1, 6}}));
  layers.push_back(Pairing::from_one_based(6, {{1, 3}, {2, 4}, {5, 6}}));
  return custom_geometry(6, std::move(layers));
}

std::size_t lightcone_band(const GeometrySpec& geometry, std::size_t depth) {
  if (geometry.kind != GeometryKind::brickwall1d) {
    throw std::invalid_argument(fmt::format("lightcone_band: unsupported geometry '{}'",
                                            to_string(geometry.kind)));
  }
  return 2 * depth;
}

}  // namespace linopt
