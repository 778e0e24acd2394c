#include "fanetsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "fanetsim/rng.hpp"

namespace fanetsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Folds an unreflected coordinate into [0, extent] (triangular wave with
// period 2*extent). Continuous in u, which is what makes reflected
// piecewise-linear paths continuous without splitting segments at walls.
double reflect_fold(double u, double extent) {
  if (extent <= 0.0) return 0.0;
  const double period = 2.0 * extent;
  double r = std::fmod(u, period);
  if (r < 0.0) r += period;
  return r <= extent ? r : period - r;
}

double draw_normal(double mean, double variance, std::mt19937_64& rng) {
  if (variance <= 0.0) return mean;  // degenerate limit
  std::normal_distribution<double> dist(mean, std::sqrt(variance));
  return dist(rng);
}

std::string fmt_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void HyperParams::validate() const {
  if (!(sigma0_sq >= 0.0)) throw ConfigError("sigma0_sq must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
}

MotionProfile sample_motion_profile(const HyperParams& hyper,
                                    std::mt19937_64& rng) {
  hyper.validate();
  MotionProfile p;
  p.mu_v = draw_normal(hyper.mu0, hyper.sigma0_sq, rng);
  // sigma_v^2 ~ Inv-Gamma(alpha, beta): reciprocal of Gamma(shape=alpha,
  // rate=beta), i.e. Gamma(alpha, scale=1/beta).
  std::gamma_distribution<double> gamma(hyper.alpha, 1.0 / hyper.beta);
  p.sigma_v_sq = 1.0 / gamma(rng);
  return p;
}

Trajectory generate_trajectory(int node_id, const MotionProfile& profile,
                               const HyperParams& hyper, const Arena& arena,
                               double horizon, std::mt19937_64& rng) {
  hyper.validate();
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
  if (!(arena.width > 0.0) || !(arena.height > 0.0))
    throw ConfigError("arena dimensions must be > 0");

  Trajectory traj;
  traj.node_id = node_id;
  traj.arena = arena;
  traj.horizon = horizon;

  std::uniform_real_distribution<double> ux(0.0, arena.width);
  std::uniform_real_distribution<double> uy(0.0, arena.height);
  traj.initial_position = {ux(rng), uy(rng)};

  std::exponential_distribution<double> dur(1.0 / hyper.tau);
  std::uniform_real_distribution<double> dir(0.0, kTwoPi);

  double t = 0.0;
  while (t < horizon) {
    MotionSegment seg;
    seg.start_time = t;
    double d = dur(rng);
    if (d <= 0.0) d = std::numeric_limits<double>::min();
    seg.duration = std::min(d, horizon - t);
    seg.speed = std::max(0.0, draw_normal(profile.mu_v, profile.sigma_v_sq, rng));
    seg.direction = dir(rng);
    if (seg.direction >= kTwoPi) seg.direction = 0.0;
    traj.segments.push_back(seg);
    t += seg.duration;
  }
  traj.finalize();
  return traj;
}

void Trajectory::finalize() {
  origins_.clear();
  origins_.reserve(segments.size());
  Vec2 p = initial_position;
  for (const MotionSegment& seg : segments) {
    origins_.push_back(p);
    p.x += seg.speed * std::cos(seg.direction) * seg.duration;
    p.y += seg.speed * std::sin(seg.direction) * seg.duration;
  }
}

Vec2 Trajectory::position_at(double t) const {
  if (t < 0.0 || t > horizon)
    throw std::out_of_range("position_at: t outside [0, horizon]");
  if (segments.empty()) return initial_position;

  // Last segment whose start_time <= t.
  auto it = std::upper_bound(
      segments.begin(), segments.end(), t,
      [](double value, const MotionSegment& s) { return value < s.start_time; });
  std::size_t idx = (it == segments.begin())
                        ? 0
                        : static_cast<std::size_t>(it - segments.begin()) - 1;
  const MotionSegment& seg = segments[idx];
  const Vec2& origin = origins_[idx];
  const double dt = t - seg.start_time;
  const double ux = origin.x + seg.speed * std::cos(seg.direction) * dt;
  const double uy = origin.y + seg.speed * std::sin(seg.direction) * dt;
  return {reflect_fold(ux, arena.width), reflect_fold(uy, arena.height)};
}

TrajectorySet generate_fleet(int n, const HyperParams& hyper,
                             const Arena& arena, double horizon,
                             std::uint64_t master_seed, bool frozen) {
  if (n < 2) throw ConfigError("fleet needs at least 2 nodes");
  TrajectorySet set;
  set.arena = arena;
  set.horizon = horizon;
  set.nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = make_engine(master_seed, Stream::Mobility,
                           static_cast<std::uint64_t>(i));
    MotionProfile profile = sample_motion_profile(hyper, rng);
    if (frozen) profile = MotionProfile{0.0, 0.0};
    set.nodes.push_back(
        generate_trajectory(i, profile, hyper, arena, horizon, rng));
  }
  return set;
}

void write_trajectories(std::ostream& out, const TrajectorySet& set) {
  out << "# fanetsim trajectories v1\n";
  out << "# arena " << fmt_full(set.arena.width) << ' '
      << fmt_full(set.arena.height) << " horizon " << fmt_full(set.horizon)
      << '\n';
  out << "# node_id segment_start duration speed direction x0 y0\n";
  for (const Trajectory& traj : set.nodes) {
    for (const MotionSegment& seg : traj.segments) {
      out << traj.node_id << ' ' << fmt_full(seg.start_time) << ' '
          << fmt_full(seg.duration) << ' ' << fmt_full(seg.speed) << ' '
          << fmt_full(seg.direction) << ' '
          << fmt_full(traj.initial_position.x) << ' '
          << fmt_full(traj.initial_position.y) << '\n';
    }
  }
}

TrajectorySet read_trajectories(std::istream& in) {
  TrajectorySet set;
  bool have_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      hs >> word;
      if (word == "arena") {
        std::string horizon_tag;
        if (!(hs >> set.arena.width >> set.arena.height >> horizon_tag >>
              set.horizon) ||
            horizon_tag != "horizon")
          throw ConfigError("trajectory file: malformed arena header");
        have_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    int node_id;
    MotionSegment seg;
    double x0, y0;
    if (!(ls >> node_id >> seg.start_time >> seg.duration >> seg.speed >>
          seg.direction >> x0 >> y0))
      throw ConfigError("trajectory file: malformed row: " + line);
    if (set.nodes.empty() || set.nodes.back().node_id != node_id) {
      Trajectory traj;
      traj.node_id = node_id;
      traj.initial_position = {x0, y0};
      set.nodes.push_back(std::move(traj));
    }
    set.nodes.back().segments.push_back(seg);
  }
  if (!have_header) throw ConfigError("trajectory file: missing arena header");
  for (Trajectory& traj : set.nodes) {
    if (traj.segments.empty())
      throw ConfigError("trajectory file: node without segments");
    traj.arena = set.arena;
    traj.horizon = set.horizon;
    double expect = 0.0;
    for (const MotionSegment& seg : traj.segments) {
      if (std::abs(seg.start_time - expect) > 1e-9)
        throw ConfigError("trajectory file: non-contiguous segments for node " +
                          std::to_string(traj.node_id));
      expect = seg.start_time + seg.duration;
    }
    if (std::abs(expect - set.horizon) > 1e-6)
      throw ConfigError("trajectory file: node " +
                        std::to_string(traj.node_id) +
                        " does not cover the horizon");
    traj.finalize();
  }
  return set;
}

void save_trajectories(const std::string& path, const TrajectorySet& set) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  write_trajectories(out, set);
}

TrajectorySet load_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return read_trajectories(in);
}

std::string trajectory_hash(const TrajectorySet& set) {
  std::ostringstream canon;
  write_trajectories(canon, set);
  const std::string bytes = canon.str();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fanetsim
