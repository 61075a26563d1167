#include "etdlab/tile_coding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "etdlab/errors.hpp"

namespace etdlab::features {

SparseFeatures::SparseFeatures(std::size_t dimension, std::vector<std::uint32_t> active)
    : dimension_(dimension), active_(std::move(active)) {
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (active_[i] >= dimension_) throw ContractError("SparseFeatures: index out of range");
    if (i > 0 && active_[i] <= active_[i - 1])
      throw ContractError("SparseFeatures: indices must be strictly increasing");
  }
}

std::vector<double> SparseFeatures::to_dense() const {
  std::vector<double> dense(dimension_, 0.0);
  for (auto i : active_) dense[i] = 1.0;
  return dense;
}

TileCoder::TileCoder(TileCodingConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.tilings == 0 || cfg_.tiles_per_dim == 0)
    throw ConfigError("tile coding needs at least one tiling and one tile per dimension");
  if (!(cfg_.position.high > cfg_.position.low) || !(cfg_.velocity.high > cfg_.velocity.low))
    throw ConfigError("tile coding bounds must have positive extent");
  if (cfg_.offset_fractions.empty()) {
    cfg_.offset_fractions.resize(cfg_.tilings);
    for (std::size_t i = 0; i < cfg_.tilings; ++i)
      cfg_.offset_fractions[i] = static_cast<double>(i) / static_cast<double>(cfg_.tilings);
  }
  if (cfg_.offset_fractions.size() != cfg_.tilings)
    throw ConfigError("tile coding needs one offset per tiling");
  for (double f : cfg_.offset_fractions)
    if (!(f >= 0.0 && f < 1.0)) throw ConfigError("tiling offsets must lie in [0, 1)");

  grid_ = cfg_.tiles_per_dim + 1;
  dimension_ = cfg_.tilings * grid_ * grid_;
  const auto tiles = static_cast<double>(cfg_.tiles_per_dim);
  inv_width_pos_ = tiles / (cfg_.position.high - cfg_.position.low);
  inv_width_vel_ = tiles / (cfg_.velocity.high - cfg_.velocity.low);
}

std::pair<std::size_t, std::size_t> TileCoder::tile_coords(const env::CarState& s,
                                                           std::size_t tiling) const {
  const double shift = cfg_.offset_fractions[tiling];
  const double up = (s.position - cfg_.position.low) * inv_width_pos_ + shift;
  const double uv = (s.velocity - cfg_.velocity.low) * inv_width_vel_ + shift;
  // Rounding at the upper bound can land a hair past the last cell.
  const auto last = static_cast<double>(grid_ - 1);
  return {static_cast<std::size_t>(std::min(std::floor(up), last)),
          static_cast<std::size_t>(std::min(std::floor(uv), last))};
}

SparseFeatures TileCoder::encode(const env::CarState& s) const {
  SparseFeatures out;
  encode_into(s, out);
  return out;
}

void TileCoder::encode_into(const env::CarState& s, SparseFeatures& out) const {
  if (!(s.position >= cfg_.position.low && s.position <= cfg_.position.high &&
        s.velocity >= cfg_.velocity.low && s.velocity <= cfg_.velocity.high))
    throw DomainError("state (" + std::to_string(s.position) + ", " + std::to_string(s.velocity) +
                      ") is outside the tile coding bounds");
  out.dimension_ = dimension_;
  out.active_.clear();
  const std::size_t block = grid_ * grid_;
  for (std::size_t t = 0; t < cfg_.tilings; ++t) {
    const auto [ip, iv] = tile_coords(s, t);
    out.active_.push_back(static_cast<std::uint32_t>(t * block + ip * grid_ + iv));
  }
}

void TileCoder::encode_into(const env::Transition& t, SparseFeatures& out) const {
  if (t.terminal) {
    out.dimension_ = dimension_;
    out.active_.clear();
    return;
  }
  encode_into(t.next, out);
}

double dot(std::span<const double> theta, const SparseFeatures& phi) {
  if (theta.size() != phi.dimension())
    throw ContractError("dot: weight dimension " + std::to_string(theta.size()) +
                        " != feature dimension " + std::to_string(phi.dimension()));
  double acc = 0.0;
  for (auto i : phi.active()) acc += theta[i];
  return acc;
}

}  // namespace etdlab::features
