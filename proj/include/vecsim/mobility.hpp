#pragma once

#include <string>
#include <vector>

#include "vecsim/config.hpp"
#include "vecsim/rng.hpp"

namespace vecsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Two-way Manhattan grid. Roads run along every multiple of `block` in both
// axes; a CV's lane is identified by its heading and sits `lane_offset` to
// the right of the road centerline.
struct RoadNetwork {
  double extent_x = 0.0;
  double extent_y = 0.0;
  double block = 0.0;
  double lane_offset = 0.0;

  int columns() const; // vertical roads
  int rows() const;    // horizontal roads

  bool on_road(Vec2 centerline, double tol = 1e-9) const;
  bool is_intersection(Vec2 centerline, double tol = 1e-9) const;
  // Physical lane coordinate for a centerline point travelled along `heading`.
  Vec2 lane_position(Vec2 centerline, Vec2 heading) const;
  // Every lane point sampled at `step` metres; used for coverage checks.
  std::vector<Vec2> sample_lane_points(double step) const;
};

struct ApLayout {
  std::vector<Vec3> coordinates;
};

struct NetworkLayout {
  RoadNetwork roads;
  ApLayout aps;
};

struct CvKinematics {
  int cv_id = 0;
  Vec2 position; // centerline coordinate
  Vec2 heading;  // axis-aligned unit vector
  double speed = 0.0;
};

// APs are spread evenly along the two boundary roads of the long axis (one
// centred AP when B = 1) at the configured AP height.
NetworkLayout build_network(const SimConfig& config);

double distance_3d(Vec3 ap, Vec2 cv, double cv_height);

// True iff every lane point lies within `radius` of some AP.
bool covers(const NetworkLayout& layout, double radius, double cv_height, double step = 1.0);

// Directions a CV may take on arriving at an intersection: every in-grid
// direction except a U-turn, plus the U-turn when the boundary blocks
// straight travel.
std::vector<Vec2> legal_turns(const RoadNetwork& roads, Vec2 node, Vec2 heading);

std::vector<CvKinematics> initial_kinematics(const RoadNetwork& roads, int num_cvs,
                                             double v_max, Rng& rng);

std::vector<CvKinematics> step_positions(const std::vector<CvKinematics>& state,
                                         const RoadNetwork& roads, Rng& rng, double dt);

// Per-slot CV coordinates (physical lane positions), slot-major.
class PositionTrace {
public:
  PositionTrace() = default;
  PositionTrace(int num_slots, int num_cvs);

  int num_slots() const { return slots_; }
  int num_cvs() const { return cvs_; }
  Vec2 at(int slot, int cv) const { return data_[index(slot, cv)]; }
  Vec2& at(int slot, int cv) { return data_[index(slot, cv)]; }

private:
  std::size_t index(int slot, int cv) const;
  int slots_ = 0;
  int cvs_ = 0;
  std::vector<Vec2> data_;
};

// Runs the built-in lane-following model for `num_slots` slots. Slot 0 holds
// the initial placement.
PositionTrace simulate_trace(const RoadNetwork& roads, int num_cvs, int num_slots,
                             double slot_seconds, double v_max, Rng& rng);

// CSV `slot,cv_id,x,y`. Throws ParseError naming the offending row or key.
PositionTrace load_trace(const std::string& path);
void save_trace(const std::string& path, const PositionTrace& trace,
                const std::string& fingerprint);

} // namespace vecsim
