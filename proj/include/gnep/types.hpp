#pragma once

#include <Eigen/Dense>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnep {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Block layout of a stacked decision vector: one contiguous block per player.
struct VariableLayout {
  std::vector<int> dims;     // n_i per player
  std::vector<int> offsets;  // start of each player's block
  int total = 0;             // n = sum n_i

  VariableLayout() = default;

  explicit VariableLayout(std::vector<int> player_dims) : dims(std::move(player_dims)) {
    offsets.resize(dims.size());
    int off = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i] <= 0) {
        throw std::invalid_argument("VariableLayout: player " + std::to_string(i + 1) +
                                    " has non-positive dimension");
      }
      offsets[i] = off;
      off += dims[i];
    }
    total = off;
  }

  int num_players() const { return static_cast<int>(dims.size()); }

  Eigen::VectorBlock<const Vec> block(const Vec& x, int player) const {
    return x.segment(offsets[player], dims[player]);
  }
  Eigen::VectorBlock<Vec> block(Vec& x, int player) const {
    return x.segment(offsets[player], dims[player]);
  }
};

/// Joint strategy profile: flat vector plus the layout that splits it per player.
struct StrategyProfile {
  VariableLayout layout;
  Vec x;

  StrategyProfile() = default;
  StrategyProfile(VariableLayout lay, Vec flat) : layout(std::move(lay)), x(std::move(flat)) {
    if (x.size() != layout.total) {
      throw std::invalid_argument("StrategyProfile: flat vector length " +
                                  std::to_string(x.size()) + " does not match layout total " +
                                  std::to_string(layout.total));
    }
  }

  static StrategyProfile pack(const VariableLayout& lay, const std::vector<Vec>& per_player) {
    if (static_cast<int>(per_player.size()) != lay.num_players()) {
      throw std::invalid_argument("StrategyProfile::pack: wrong number of player blocks");
    }
    Vec flat(lay.total);
    for (int i = 0; i < lay.num_players(); ++i) {
      if (per_player[i].size() != lay.dims[i]) {
        throw std::invalid_argument("StrategyProfile::pack: player " + std::to_string(i + 1) +
                                    " block has wrong length");
      }
      flat.segment(lay.offsets[i], lay.dims[i]) = per_player[i];
    }
    return StrategyProfile(lay, std::move(flat));
  }

  Vec unpack(int player) const { return layout.block(x, player); }

  std::vector<Vec> unpack_all() const {
    std::vector<Vec> out;
    out.reserve(layout.num_players());
    for (int i = 0; i < layout.num_players(); ++i) out.push_back(unpack(i));
    return out;
  }
};

}  // namespace gnep
