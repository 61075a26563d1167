#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "etdlab/env.hpp"

namespace etdlab::features {

struct Bounds {
  double low = 0.0;
  double high = 1.0;
};

/// Uniform grid tile coding over (position, velocity).
///
/// Each tiling is a (tiles_per_dim + 1)^2 grid with tile width
/// (high - low) / tiles_per_dim; tiling i is shifted by -offset[i] tile
/// widths in both dimensions (default offset[i] = i / tilings), and the extra
/// row/column keeps the shifted grid covering the whole box.
struct TileCodingConfig {
  std::size_t tilings = 5;
  std::size_t tiles_per_dim = 4;
  Bounds position{env::kPositionMin, env::kPositionMax};
  Bounds velocity{env::kVelocityMin, env::kVelocityMax};
  /// Per-tiling offset in tile widths, each in [0, 1). Empty means i / tilings.
  std::vector<double> offset_fractions;
};

/// Binary feature vector stored as its strictly increasing active indices.
class SparseFeatures {
 public:
  SparseFeatures() = default;
  explicit SparseFeatures(std::size_t dimension) : dimension_(dimension) {}
  /// Throws ContractError unless indices are strictly increasing and < dimension.
  SparseFeatures(std::size_t dimension, std::vector<std::uint32_t> active);

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::span<const std::uint32_t> active() const noexcept { return active_; }
  [[nodiscard]] bool empty() const noexcept { return active_.empty(); }

  /// Dense 0/1 expansion.
  [[nodiscard]] std::vector<double> to_dense() const;

  friend bool operator==(const SparseFeatures&, const SparseFeatures&) = default;

 private:
  friend class TileCoder;
  std::size_t dimension_ = 0;
  std::vector<std::uint32_t> active_;
};

class TileCoder {
 public:
  /// Throws ConfigError for zero tilings/tiles, empty bounds or bad offsets.
  explicit TileCoder(TileCodingConfig cfg);

  [[nodiscard]] const TileCodingConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t tiles_per_tiling() const noexcept { return grid_ * grid_; }

  /// One active feature per tiling. Throws DomainError outside the bounds.
  [[nodiscard]] SparseFeatures encode(const env::CarState& s) const;
  /// Same as encode, reusing out's storage.
  void encode_into(const env::CarState& s, SparseFeatures& out) const;
  /// phi of the successor: the zero vector when the transition terminated.
  void encode_into(const env::Transition& t, SparseFeatures& out) const;

  /// The terminal sentinel's features: no active index.
  [[nodiscard]] SparseFeatures terminal() const { return SparseFeatures(dimension_); }

  /// (position, velocity) tile coordinate of s in one tiling.
  [[nodiscard]] std::pair<std::size_t, std::size_t> tile_coords(const env::CarState& s,
                                                                std::size_t tiling) const;

 private:
  TileCodingConfig cfg_;
  std::size_t grid_;
  std::size_t dimension_;
  double inv_width_pos_;
  double inv_width_vel_;
};

/// theta^T phi for binary phi. Throws ContractError on dimension mismatch.
[[nodiscard]] double dot(std::span<const double> theta, const SparseFeatures& phi);

}  // namespace etdlab::features
