#include "cec/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cec/error.hpp"

namespace cec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Moves must lower the energy by more than this to be accepted; rounding in
// the incremental statistics would otherwise let a point oscillate.
constexpr double kMoveTolerance = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(const PointCloud& points, std::vector<ClusterSlot> slots, std::span<const int> labels,
                     double epsilon)
    : points_(&points), slots_(std::move(slots)), labels_(labels.begin(), labels.end()), epsilon_(epsilon) {
  if (labels_.size() != points.size()) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match point count");
  }
  stats_.assign(slots_.size(), ClusterStats(points.dim()));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int c = labels_[i];
    if (c < 0 || static_cast<std::size_t>(c) >= slots_.size()) {
      throw Error(ErrorKind::ConfigError, "label " + std::to_string(c) + " does not name a cluster");
    }
    stats_[static_cast<std::size_t>(c)].add(points[i]);
  }
  alive_.resize(slots_.size());
  terms_.assign(slots_.size(), 0.0);
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    alive_[c] = stats_[c].count() > 0;
    try {
      terms_[c] = term(c, stats_[c]);
    } catch (const Error& e) {
      throw Error(e.kind(), "cluster " + std::to_string(c) + ": " + e.what());
    }
  }
  energy_ = std::accumulate(terms_.begin(), terms_.end(), 0.0);
}

std::size_t Partition::alive_count() const noexcept {
  return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), char{1}));
}

double Partition::term(std::size_t c, const ClusterStats& s) const {
  if (s.count() == 0) return 0.0;
  const double p = static_cast<double>(s.count()) / static_cast<double>(labels_.size());
  return p * (-std::log(p) + cross_entropy(slots_[c].family, s, epsilon_));
}

double Partition::energy_from_scratch() const {
  std::vector<std::vector<std::size_t>> members(slots_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) members[static_cast<std::size_t>(labels_[i])].push_back(i);
  double e = 0.0;
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    if (members[c].empty()) continue;
    try {
      e += term(c, stats_from_points(*points_, members[c]));
    } catch (const Error& err) {
      throw Error(err.kind(), "cluster " + std::to_string(c) + ": " + err.what());
    }
  }
  return e;
}

double Partition::move_delta(std::size_t point, std::size_t target) const {
  const auto source = static_cast<std::size_t>(labels_[point]);
  if (target == source) return 0.0;
  if (target >= slots_.size() || !alive_[target]) return kInf;
  if (stats_[source].count() < slots_[source].min_size + 1) return kInf;
  const auto x = (*points_)[point];
  try {
    const double src = term(source, remove_point(stats_[source], x)) - terms_[source];
    const double tgt = term(target, add_point(stats_[target], x)) - terms_[target];
    return src + tgt;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateCluster) return kInf;
    throw;
  }
}

Partition::Move Partition::best_move(std::size_t point) const {
  const auto source = static_cast<std::size_t>(labels_[point]);
  Move best{source, 0.0};
  if (stats_[source].count() < slots_[source].min_size + 1) return best;
  const auto x = (*points_)[point];

  double src_delta = 0.0;
  try {
    src_delta = term(source, remove_point(stats_[source], x)) - terms_[source];
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateCluster) return best;
    throw;
  }
  ClusterStats candidate;
  for (std::size_t t = 0; t < slots_.size(); ++t) {
    if (t == source || !alive_[t]) continue;
    candidate = stats_[t];
    candidate.add(x);
    double delta;
    try {
      delta = src_delta + term(t, candidate) - terms_[t];
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateCluster) continue;
      throw;
    }
    if (delta < best.delta) best = {t, delta};
  }
  return best;
}

void Partition::apply_move(std::size_t point, std::size_t target, double delta) {
  const auto source = static_cast<std::size_t>(labels_[point]);
  if (target == source) return;
  const auto x = (*points_)[point];
  stats_[source].remove(x);
  stats_[target].add(x);
  terms_[source] = term(source, stats_[source]);
  terms_[target] = term(target, stats_[target]);
  labels_[point] = static_cast<int>(target);
  energy_ += delta;
}

std::size_t Partition::remove_underweight(double min_weight, std::span<const std::size_t> order) {
  const double n = static_cast<double>(labels_.size());
  std::vector<std::size_t> alive_ids;
  std::vector<std::size_t> under;
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    if (!alive_[c]) continue;
    alive_ids.push_back(c);
    if (static_cast<double>(stats_[c].count()) / n < min_weight) under.push_back(c);
  }
  if (under.empty()) return 0;
  if (under.size() == alive_ids.size()) {
    // Keep the largest; ties go to the lowest id.
    const auto keep = *std::max_element(under.begin(), under.end(), [&](std::size_t a, std::size_t b) {
      return stats_[a].count() < stats_[b].count();
    });
    under.erase(std::find(under.begin(), under.end(), keep));
    if (under.empty()) return 0;
  }

  std::vector<char> doomed(slots_.size(), 0);
  for (std::size_t c : under) doomed[c] = 1;
  kill(doomed, order);
  return under.size();
}

Partition Partition::without_cluster(std::size_t c, std::span<const std::size_t> order) const {
  Partition p = *this;
  std::vector<char> doomed(slots_.size(), 0);
  doomed.at(c) = 1;
  p.kill(doomed, order);
  return p;
}

void Partition::kill(const std::vector<char>& doomed, std::span<const std::size_t> order) {
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    if (!doomed[c]) continue;
    alive_[c] = 0;
    stats_[c] = ClusterStats(points_->dim());
    terms_[c] = 0.0;
  }

  for (std::size_t i : order) {
    const auto from = static_cast<std::size_t>(labels_[i]);
    if (!doomed[from]) continue;
    const auto x = (*points_)[i];
    std::size_t best = slots_.size();
    double best_cost = kInf;
    ClusterStats candidate;
    for (std::size_t t = 0; t < slots_.size(); ++t) {
      if (!alive_[t]) continue;
      candidate = stats_[t];
      candidate.add(x);
      double cost;
      try {
        cost = term(t, candidate) - terms_[t];
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateCluster) continue;
        throw;
      }
      if (best == slots_.size() || cost < best_cost) {
        best = t;
        best_cost = cost;
      }
    }
    if (best == slots_.size()) {
      throw Error(ErrorKind::DegenerateCluster, "no surviving cluster can absorb point " + std::to_string(i));
    }
    stats_[best].add(x);
    terms_[best] = term(best, stats_[best]);
    labels_[i] = static_cast<int>(best);
  }
  energy_ = std::accumulate(terms_.begin(), terms_.end(), 0.0);
}

double energy(const Partition& p) { return p.energy_from_scratch(); }

// ---------------------------------------------------------------------------
// run

std::vector<std::size_t> canonical_order(const PointCloud& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto pa = points[a];
    const auto pb = points[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  return order;
}

namespace {

struct RestartOutcome {
  std::vector<int> labels;
  std::vector<char> alive;
  double energy = 0.0;
  int sweeps = 0;
  std::vector<double> trace;
};

void validate(const PointCloud& points, const EngineConfig& config) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "no points to cluster");
  if (config.family_pool.empty()) throw Error(ErrorKind::ConfigError, "family pool is empty");
  std::size_t total = 0;
  for (const auto& entry : config.family_pool) {
    total += entry.initial_clusters;
    const std::size_t d = family_dim(entry.family);
    if (d != 0 && d != points.dim()) {
      throw Error(ErrorKind::DimensionMismatch, family_name(entry.family) + " family has dimension " +
                                                    std::to_string(d) + " but points have dimension " +
                                                    std::to_string(points.dim()));
    }
  }
  if (total == 0) throw Error(ErrorKind::ConfigError, "family pool requests zero clusters");
  if (!(config.min_weight > 0.0 && config.min_weight < 1.0)) {
    throw Error(ErrorKind::ConfigError, "min_weight must lie in (0, 1)");
  }
  if (config.restarts < 1) throw Error(ErrorKind::ConfigError, "restarts must be at least 1");
  if (config.max_sweeps < 0) throw Error(ErrorKind::ConfigError, "max_sweeps must be nonnegative");
  if (!(config.epsilon >= 0.0) || !std::isfinite(config.epsilon)) {
    throw Error(ErrorKind::ConfigError, "epsilon must be a finite nonnegative number");
  }
  if (config.min_cluster_size && *config.min_cluster_size == 0) {
    throw Error(ErrorKind::ConfigError, "min_cluster_size must be at least 1");
  }
}

bool all_identical(const PointCloud& points) {
  const auto first = points[0];
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto p = points[i];
    if (!std::equal(p.begin(), p.end(), first.begin())) return false;
  }
  return true;
}

RestartOutcome run_restart(const PointCloud& points, const std::vector<ClusterSlot>& slots,
                           const std::vector<std::size_t>& canon, const EngineConfig& config, int restart,
                           const SweepObserver& observer) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);

  // Balanced random assignment over the canonical order.
  const std::size_t n = points.size();
  const std::size_t k = slots.size();
  std::vector<int> ids(n);
  for (std::size_t j = 0; j < n; ++j) ids[j] = static_cast<int>(j % k);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<int> labels(n);
  for (std::size_t j = 0; j < n; ++j) labels[canon[j]] = ids[j];

  Partition part(points, slots, labels, config.epsilon);
  const bool online = config.removal == Removal::Online;
  // Online removal keeps every cluster at or above min_weight from here on.
  if (online) part.remove_underweight(config.min_weight, canon);
  const double min_count = config.min_weight * static_cast<double>(n);
  RestartOutcome out;
  out.trace.push_back(part.energy());
  if (observer) observer(part, restart, 0);

  std::vector<std::size_t> order = canon;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t moves = 0;
    for (std::size_t i : order) {
      const auto c = static_cast<std::size_t>(part.label(i));
      if (online && part.alive_count() > 1 && static_cast<double>(part.stats(c).count() - 1) < min_count) {
        Partition trial = part.without_cluster(c, canon);
        if (trial.energy() - part.energy() < -kMoveTolerance) {
          part = std::move(trial);
          ++moves;
        }
        continue;
      }
      const auto mv = part.best_move(i);
      if (mv.delta < -kMoveTolerance) {
        part.apply_move(i, mv.target, mv.delta);
        ++moves;
      }
    }
    const std::size_t killed = online ? 0 : part.remove_underweight(config.min_weight, canon);
    out.trace.push_back(part.energy());
    out.sweeps = sweep;
    if (observer) observer(part, restart, sweep);
    if (moves == 0 && killed == 0) break;
  }

  out.labels = part.labels();
  out.alive.resize(part.slot_count());
  for (std::size_t c = 0; c < part.slot_count(); ++c) out.alive[c] = part.alive(c);
  out.energy = part.energy();
  return out;
}

}  // namespace

ClusteringResult run(const PointCloud& points, const EngineConfig& config, const SweepObserver& observer) {
  validate(points, config);
  const std::size_t dim = points.dim();
  const std::size_t n = points.size();

  std::vector<ClusterSlot> slots;
  bool any_regularized = false;
  std::size_t required = 0;
  for (std::size_t f = 0; f < config.family_pool.size(); ++f) {
    const auto& entry = config.family_pool[f];
    const bool reg = needs_regularization(entry.family);
    any_regularized = any_regularized || reg;
    const std::size_t min_size = config.min_cluster_size.value_or(reg ? dim + 1 : 1);
    for (std::size_t k = 0; k < entry.initial_clusters; ++k) {
      slots.push_back(ClusterSlot{entry.family, f, min_size});
      required += min_size;
    }
  }
  if (n < required) {
    throw Error(ErrorKind::ConfigError, std::to_string(n) + " points cannot fill " +
                                            std::to_string(slots.size()) + " initial clusters (need " +
                                            std::to_string(required) + ")");
  }
  if (any_regularized && n > 1 && all_identical(points)) {
    throw Error(ErrorKind::DegenerateCluster,
                "all points are identical, so full/diag/spherical clusters have no spread; "
                "use a fixed-radius or fixed-eigs family instead");
  }

  ClusteringResult result;
  if (config.min_weight * static_cast<double>(n) < 1.0) {
    result.warnings.push_back("min_weight * n < 1: no cluster can ever be removed");
  }

  const std::vector<std::size_t> canon = canonical_order(points);
  RestartOutcome best;
  for (int r = 0; r < config.restarts; ++r) {
    RestartOutcome outcome = run_restart(points, slots, canon, config, r, observer);
    result.restart_energies.push_back(outcome.energy);
    if (r == 0 || outcome.energy < best.energy) {
      best = std::move(outcome);
      result.best_restart = r;
    }
  }

  // Compact alive slots to consecutive ids, in slot order.
  std::vector<int> remap(slots.size(), -1);
  std::vector<std::vector<std::size_t>> members(slots.size());
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(best.labels[i])].push_back(i);
  for (std::size_t c = 0; c < slots.size(); ++c) {
    if (!best.alive[c] || members[c].empty()) continue;
    remap[c] = static_cast<int>(result.clusters.size());
    const ClusterStats s = stats_from_points(points, members[c]);
    FittedCluster fc;
    fc.family_index = slots[c].family_index;
    fc.count = s.count();
    fc.weight = static_cast<double>(s.count()) / static_cast<double>(n);
    fc.cross_entropy = cross_entropy(slots[c].family, s, config.epsilon);
    fc.gaussian = best_fit(slots[c].family, s, config.epsilon);
    result.clusters.push_back(std::move(fc));
  }
  result.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.labels[i] = remap[static_cast<std::size_t>(best.labels[i])];

  result.final_energy = best.energy;
  result.sweeps_used = best.sweeps;
  result.energy_trace = std::move(best.trace);
  return result;
}

}  // namespace cec
