#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cec/families.hpp"
#include "cec/linalg.hpp"

namespace cec {

struct PoolEntry {
  FamilySpec family;
  std::size_t initial_clusters = 1;
};

/// When clusters below min_weight are removed.
enum class Removal {
  /// During the sweep: a move that would leave its cluster underweight is
  /// replaced by dissolving that cluster, taken only if it lowers the energy.
  Online,
  /// After each sweep, every underweight cluster is removed, even when that
  /// raises the energy.
  AfterSweep,
};

struct EngineConfig {
  std::vector<PoolEntry> family_pool;
  /// Clusters whose share of the points drops below this are removed.
  double min_weight = 0.02;
  Removal removal = Removal::Online;
  int max_sweeps = 100;
  int restarts = 10;
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  /// Unset: N+1 for families that need regularization, 1 otherwise.
  std::optional<std::size_t> min_cluster_size;
};

/// One cluster slot: its coding family (fixed for the whole run) and the
/// smallest population a move may leave it with.
struct ClusterSlot {
  FamilySpec family;
  std::size_t family_index = 0;
  std::size_t min_size = 1;
};

struct FittedCluster {
  std::size_t family_index = 0;
  std::size_t count = 0;
  double weight = 0.0;
  double cross_entropy = 0.0;
  FittedGaussian gaussian;
};

struct ClusteringResult {
  /// Per input point, index into `clusters`.
  std::vector<int> labels;
  std::vector<FittedCluster> clusters;
  double final_energy = 0.0;
  int sweeps_used = 0;
  int best_restart = 0;
  /// Energy after initialization followed by the energy after each sweep, for
  /// the winning restart.
  std::vector<double> energy_trace;
  std::vector<double> restart_energies;
  std::vector<std::string> warnings;
};

/// Assignment of points to cluster slots with incrementally maintained
/// statistics and energy. Holds a reference to the point cloud, which must
/// outlive it.
class Partition {
 public:
  /// Every label must name a slot. Slots that receive no points start dead.
  Partition(const PointCloud& points, std::vector<ClusterSlot> slots, std::span<const int> labels,
            double epsilon);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t slot_count() const noexcept { return slots_.size(); }
  std::size_t alive_count() const noexcept;
  bool alive(std::size_t c) const noexcept { return alive_[c]; }
  int label(std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const ClusterStats& stats(std::size_t c) const noexcept { return stats_[c]; }
  const ClusterSlot& slot(std::size_t c) const noexcept { return slots_[c]; }
  const PointCloud& points() const noexcept { return *points_; }
  double epsilon() const noexcept { return epsilon_; }

  /// Incrementally tracked energy.
  double energy() const noexcept { return energy_; }
  /// Energy recomputed from batch statistics of the current labels.
  double energy_from_scratch() const;

  /// Energy change of moving `point` to `target`. Zero for its own cluster;
  /// +∞ for a forbidden move (source would drop below its minimum size, dead
  /// target, or a degenerate result).
  double move_delta(std::size_t point, std::size_t target) const;

  struct Move {
    std::size_t target;
    double delta;
  };
  /// Most negative move_delta over alive targets, ties to the lowest slot.
  /// Returns the point's own cluster with delta 0 when nothing is negative.
  Move best_move(std::size_t point) const;

  void apply_move(std::size_t point, std::size_t target, double delta);

  /// Kills alive clusters with weight below `min_weight` and hands their
  /// points, in `order`, one at a time to the surviving cluster where they
  /// add the least energy. If every cluster is underweight the largest one
  /// survives. Returns the number of clusters killed.
  std::size_t remove_underweight(double min_weight, std::span<const std::size_t> order);

  /// Copy with cluster `c` killed and its points handed out as above.
  Partition without_cluster(std::size_t c, std::span<const std::size_t> order) const;

 private:
  double term(std::size_t c, const ClusterStats& s) const;
  void kill(const std::vector<char>& doomed, std::span<const std::size_t> order);

  const PointCloud* points_;
  std::vector<ClusterSlot> slots_;
  std::vector<int> labels_;
  std::vector<ClusterStats> stats_;
  std::vector<char> alive_;
  std::vector<double> terms_;
  double epsilon_;
  double energy_ = 0.0;
};

/// Partition energy Σ p_i(−ln p_i + H×(μ_i‖F_i)) from scratch.
double energy(const Partition& p);

/// Called with the partition after initialization (sweep 0) and after every
/// sweep of every restart.
using SweepObserver = std::function<void(const Partition&, int restart, int sweep)>;

ClusteringResult run(const PointCloud& points, const EngineConfig& config,
                     const SweepObserver& observer = {});

/// Indices of `points` sorted lexicographically by coordinates.
std::vector<std::size_t> canonical_order(const PointCloud& points);

}  // namespace cec
