#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace linopt {

/// One block of a pairing, 0-based. Singletons have first == second.
struct Block {
  std::size_t first;
  std::size_t second;
  bool is_pair() const { return first != second; }
};

/// Partition of the modes {0..n-1} into singletons and pairs. Equivalent to
/// an involution of the modes; `partner(x)` is that involution.
class Pairing {
 public:
  /// Validates a partition given with 1-based mode labels.
  static Pairing from_one_based(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks);
  /// Builds from 0-based blocks; validation is identical.
  static Pairing from_blocks(std::size_t n, std::vector<Block> blocks);
  static Pairing singletons(std::size_t n);

  std::size_t modes() const { return partner_.size(); }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t partner(std::size_t x) const { return partner_[x]; }
  /// Index into blocks() of the block holding mode x.
  std::size_t block_of(std::size_t x) const { return block_index_[x]; }
  std::size_t pair_count() const;

  /// 1-based nested representation used in config and JSON files.
  std::vector<std::vector<std::size_t>> to_one_based() const;

  friend bool operator==(const Pairing& a, const Pairing& b) { return a.partner_ == b.partner_; }

 private:
  std::vector<Block> blocks_;
  std::vector<std::size_t> partner_;
  std::vector<std::size_t> block_index_;
};

enum class GeometryKind { brickwall1d, brickwork, custom };

std::string to_string(GeometryKind kind);

/// Ordered layers making up one circuit step. Layer 0 acts first.
struct GeometrySpec {
  std::size_t n = 0;
  std::vector<Pairing> layers;
  GeometryKind kind = GeometryKind::custom;
  // brickwork only
  std::size_t side = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> layer_order;

  std::size_t layers_per_step() const { return layers.size(); }
  /// Same layers applied in the opposite order (the time-reversed walk).
  GeometrySpec reversed() const;
};

GeometrySpec brickwall_geometry(std::size_t n);

/// n = m^dim modes, row-major flattening with axis 1 slowest. Layer slots are
/// numbered 2j (L on axis j+1) and 2j+1 (R on axis j+1); `order` lists the
/// slots in application order and defaults to 0,1,...,2*dim-1.
GeometrySpec brickwork_d_geometry(std::size_t m, std::size_t dim,
                                  std::vector<std::size_t> order = {});

GeometrySpec custom_geometry(std::size_t n, std::vector<Pairing> layers);

/// The six-mode, four-layer step whose coupling graph is the octahedron.
GeometrySpec octahedral_geometry();

/// Guaranteed half band width of a depth-d brickwall unitary (2 per step).
std::size_t lightcone_band(const GeometrySpec& geometry, std::size_t depth);

/// Coordinates (0-based) of a flattened brickwork mode index.
std::vector<std::size_t> brickwork_coordinates(std::size_t index, std::size_t m, std::size_t dim);

}  // namespace linopt
