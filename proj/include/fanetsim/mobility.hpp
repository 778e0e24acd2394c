#ifndef FANETSIM_MOBILITY_HPP_
#define FANETSIM_MOBILITY_HPP_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanetsim {

// Raised on invalid configuration (bad hyper-parameters, malformed files,
// inconsistent scenario settings).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Arena {
  double width = 0.0;   // meters
  double height = 0.0;  // meters

  // The standard L x L/2 rectangle.
  static Arena from_length(double l) { return Arena{l, l / 2.0}; }
};

// Hyper-parameters of the hierarchical velocity model. mu0/sigma0_sq control
// the per-node mean speeds, (alpha, beta) the inverse-gamma prior on the
// per-node speed variance, tau the mean motion-segment duration.
struct HyperParams {
  double mu0 = 25.0;       // m/s
  double sigma0_sq = 5.0;  // m^2/s^2
  double alpha = 5.0;
  double beta = 1.0;
  double tau = 60.0;  // s

  void validate() const;
};

// Per-node velocity profile, fixed for the node's lifetime.
struct MotionProfile {
  double mu_v = 0.0;        // m/s
  double sigma_v_sq = 0.0;  // m^2/s^2
};

struct MotionSegment {
  double start_time = 0.0;  // s
  double duration = 0.0;    // s, > 0
  double speed = 0.0;       // m/s, >= 0
  double direction = 0.0;   // radians in [0, 2pi)
};

// A node's piecewise-linear path over [0, horizon]. Positions are evaluated
// with specular reflection at the arena boundary, so the induced path is
// continuous and always inside the arena.
struct Trajectory {
  int node_id = 0;
  Vec2 initial_position{};
  std::vector<MotionSegment> segments;
  Arena arena{};
  double horizon = 0.0;

  Vec2 position_at(double t) const;  // throws std::out_of_range outside [0, horizon]

  // Rebuilds the cached per-segment origins; call after mutating segments.
  void finalize();

 private:
  std::vector<Vec2> origins_;  // unreflected start position per segment
};

// The replayable unit: every node's trajectory plus the arena they share.
struct TrajectorySet {
  Arena arena{};
  double horizon = 0.0;
  std::vector<Trajectory> nodes;
};

MotionProfile sample_motion_profile(const HyperParams& hyper,
                                    std::mt19937_64& rng);

Trajectory generate_trajectory(int node_id, const MotionProfile& profile,
                               const HyperParams& hyper, const Arena& arena,
                               double horizon, std::mt19937_64& rng);

// Generates N trajectories from independent per-node streams derived from
// master_seed. When frozen is set the fleet is stationary (speed 0).
TrajectorySet generate_fleet(int n, const HyperParams& hyper,
                             const Arena& arena, double horizon,
                             std::uint64_t master_seed, bool frozen = false);

// Plain-text table (node_id, segment_start, duration, speed, direction,
// x0, y0) with a header carrying the arena and horizon; full round-trip
// precision so replays reproduce bit-identical positions.
void write_trajectories(std::ostream& out, const TrajectorySet& set);
TrajectorySet read_trajectories(std::istream& in);
void save_trajectories(const std::string& path, const TrajectorySet& set);
TrajectorySet load_trajectories(const std::string& path);

// FNV-1a over the canonical serialization; used to verify that every policy
// in a grid cell consumed the same trajectories.
std::string trajectory_hash(const TrajectorySet& set);

}  // namespace fanetsim

#endif  // FANETSIM_MOBILITY_HPP_
