#pragma once

#include "gridflow/action_field.hpp"
#include "gridflow/grid_map.hpp"
#include "gridflow/rng.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <string>
#include <utility>

namespace gridflow {

enum Channel : int {
  kMapChannel = 0,
  kCurrentChannel = 1,
  kGoalChannel = 2,
  kCostChannel = 3,
  kGradXChannel = 4,
  kGradYChannel = 5,
};
inline constexpr int kNumChannels = 6;
inline constexpr std::array<const char*, kNumChannels> kChannelOrder = {"map",         "current", "goal",
                                                                        "cost_to_goal", "grad_x",  "grad_y"};

/// (height, width, channels) tensor, row-major and channel-last: element
/// (r, c, k) lives at data(r * width + c, k), which is also its flat offset
/// (r * width + c) * channels + k.
template <typename Scalar = float>
class FeatureTensor {
 public:
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FeatureTensor() = default;
  FeatureTensor(int height, int width, int channels = kNumChannels)
      : height_(height), width_(width), data_(Storage::Zero(height * width, channels)) {}

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return static_cast<int>(data_.cols()); }

  Scalar& operator()(int r, int c, int k) { return data_(r * width_ + c, k); }
  Scalar operator()(int r, int c, int k) const { return data_(r * width_ + c, k); }

  /// One channel as an (height, width) grid copy.
  Grid<Scalar> channel(int k) const {
    return data_.col(k).reshaped(width_, height_).transpose().array();
  }

  const Storage& data() const { return data_; }
  Storage& data() { return data_; }
  std::span<const Scalar> flat() const { return {data_.data(), static_cast<std::size_t>(data_.size())}; }

  friend bool operator==(const FeatureTensor& a, const FeatureTensor& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.data_.cols() == b.data_.cols() && a.data_ == b.data_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  Storage data_;
};

struct FeatureOptions {
  /// Divide agent indices in the current/goal channels by the agent count.
  bool normalize_indices = false;
};

/// Cost-to-goal gradient sign per axis. dx = +1 means moving Right lowers
/// the distance, dy = +1 means moving Down does.
struct Gradient {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Gradient&, const Gradient&) = default;
};

/// Axis rule: with d_neg / d_pos the distance change towards the negative /
/// positive neighbor (walls and off-map count as +inf): 0 if neither
/// decreases, the decreasing side if exactly one does, and a random side from
/// `rng` if both do. Throws UnreachableCell.
Gradient gradient_at(const DistanceField& field, Cell cell, const CounterRng& rng);

/// Generator used for the gradient ties of one state: keyed by the dataset
/// seed, the instance id and the timestep.
inline CounterRng state_rng(std::uint64_t seed, std::string_view instance_id, int t) {
  return CounterRng(seed).derive(hash_string(instance_id)).derive(static_cast<std::uint64_t>(t));
}

/// Builds the 6-channel input tensor. Agent i is written as index i + 1 at
/// its current cell and at its goal cell; its normalized cost-to-goal
/// (distance / (height + width)) and gradient go at its current cell only.
template <typename Scalar = float>
FeatureTensor<Scalar> build_features(const GridMap& map, std::span<const Cell> positions, std::span<const Cell> goals,
                                     std::span<const DistanceField> distances, const CounterRng& rng,
                                     const FeatureOptions& options = {}) {
  if (distances.size() != positions.size())
    throw MissingDistanceField("expected " + std::to_string(positions.size()) + " distance fields, got " +
                               std::to_string(distances.size()));
  if (goals.size() != positions.size()) throw LengthMismatch("one goal per agent required");

  FeatureTensor<Scalar> f(map.height(), map.width());
  f.data().col(kMapChannel) = map.cells().template cast<Scalar>().template reshaped<Eigen::RowMajor>().matrix();

  const auto n = static_cast<Scalar>(positions.size());
  const auto scale = static_cast<Scalar>(map.height() + map.width());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Scalar idx = options.normalize_indices ? static_cast<Scalar>(i + 1) / n : static_cast<Scalar>(i + 1);
    const Cell at = positions[i];
    const Cell goal = goals[i];
    if (distances[i].goal != goal) throw MissingDistanceField("distance field " + std::to_string(i) + " is for another goal");
    f(at.row, at.col, kCurrentChannel) = idx;
    f(goal.row, goal.col, kGoalChannel) = idx;
    const auto d = distances[i].at(at);
    if (!d) throw UnreachableCell("agent " + std::to_string(i) + " cannot reach its goal");
    f(at.row, at.col, kCostChannel) = static_cast<Scalar>(*d) / scale;
    const Gradient g = gradient_at(distances[i], at, rng);
    f(at.row, at.col, kGradXChannel) = static_cast<Scalar>(g.dx);
    f(at.row, at.col, kGradYChannel) = static_cast<Scalar>(g.dy);
  }
  return f;
}

/// Per-cell action labels; Free marks cells excluded from the loss.
using LabelField = ActionField;

/// Labels the transition current -> next. Throws InvalidTransition for a
/// non-unit move, a move onto an obstacle, or a colliding joint move.
LabelField build_label(const GridMap& map, std::span<const Cell> current, std::span<const Cell> next, int t = 0);

struct PadRecord {
  int row_offset = 0;
  int col_offset = 0;
  int height = 0;  // original
  int width = 0;
};

/// Pads bottom/right up to the next multiple of `multiple`. Padded cells are
/// obstacles: map channel 1, everything else 0.
template <typename Scalar>
std::pair<FeatureTensor<Scalar>, PadRecord> pad_to_valid(const FeatureTensor<Scalar>& x, int multiple = 16) {
  if (multiple < 1) throw DimensionMismatch("padding multiple must be >= 1");
  const int h = (x.height() + multiple - 1) / multiple * multiple;
  const int w = (x.width() + multiple - 1) / multiple * multiple;
  FeatureTensor<Scalar> out(h, w, x.channels());
  out.data().col(kMapChannel).setOnes();
  for (int r = 0; r < x.height(); ++r)
    out.data().middleRows(r * w, x.width()) = x.data().middleRows(r * x.width(), x.width());
  return {std::move(out), PadRecord{0, 0, x.height(), x.width()}};
}

GridMap pad_to_valid(const GridMap& map, int multiple = 16);

/// Inverse of pad_to_valid.
template <typename Scalar>
FeatureTensor<Scalar> crop(const FeatureTensor<Scalar>& x, const PadRecord& pad) {
  FeatureTensor<Scalar> out(pad.height, pad.width, x.channels());
  for (int r = 0; r < pad.height; ++r)
    out.data().middleRows(r * pad.width, pad.width) =
        x.data().middleRows((r + pad.row_offset) * x.width() + pad.col_offset, pad.width);
  return out;
}

}  // namespace gridflow
