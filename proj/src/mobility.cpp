#include "vecsim/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "vecsim/csv.hpp"
#include "vecsim/errors.hpp"

namespace vecsim {

namespace {

bool near_multiple(double v, double step, double tol) {
  double q = v / step;
  return std::abs(q - std::round(q)) * step <= tol;
}

bool inside(const RoadNetwork& r, Vec2 p, double tol = 1e-9) {
  return p.x >= -tol && p.x <= r.extent_x + tol && p.y >= -tol && p.y <= r.extent_y + tol;
}

Vec2 snap_to_grid(const RoadNetwork& r, Vec2 p) {
  return {std::round(p.x / r.block) * r.block, std::round(p.y / r.block) * r.block};
}

// Distance from a centerline point to the next intersection along `heading`.
double distance_to_next_node(const RoadNetwork& r, Vec2 p, Vec2 h) {
  double along = h.x != 0.0 ? p.x : p.y;
  double dir = h.x != 0.0 ? h.x : h.y;
  double cell = along / r.block;
  double next = dir > 0 ? std::floor(cell + 1e-12) + 1.0 : std::ceil(cell - 1e-12) - 1.0;
  return std::abs(next * r.block - along);
}

} // namespace

int RoadNetwork::columns() const { return static_cast<int>(std::lround(extent_x / block)) + 1; }
int RoadNetwork::rows() const { return static_cast<int>(std::lround(extent_y / block)) + 1; }

bool RoadNetwork::on_road(Vec2 p, double tol) const {
  if (!inside(*this, p, tol)) return false;
  return near_multiple(p.x, block, tol) || near_multiple(p.y, block, tol);
}

bool RoadNetwork::is_intersection(Vec2 p, double tol) const {
  return inside(*this, p, tol) && near_multiple(p.x, block, tol) &&
         near_multiple(p.y, block, tol);
}

Vec2 RoadNetwork::lane_position(Vec2 c, Vec2 h) const {
  // Right-hand traffic: the right normal of (hx, hy) is (hy, -hx).
  return {c.x + lane_offset * h.y, c.y - lane_offset * h.x};
}

std::vector<Vec2> RoadNetwork::sample_lane_points(double step) const {
  std::vector<Vec2> pts;
  const Vec2 dirs[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int row = 0; row < rows(); ++row) {
    double y = row * block;
    for (double x = 0.0; x <= extent_x + 1e-9; x += step) {
      for (int d = 0; d < 2; ++d) pts.push_back(lane_position({x, y}, dirs[d]));
    }
  }
  for (int col = 0; col < columns(); ++col) {
    double x = col * block;
    for (double y = 0.0; y <= extent_y + 1e-9; y += step) {
      for (int d = 2; d < 4; ++d) pts.push_back(lane_position({x, y}, dirs[d]));
    }
  }
  return pts;
}

NetworkLayout build_network(const SimConfig& config) {
  if (config.grid_x_m <= 0 || config.grid_y_m <= 0 || config.block_m <= 0) {
    throw ConfigError("road network extents and block spacing must be positive");
  }
  if (!near_multiple(config.grid_x_m, config.block_m, 1e-9) ||
      !near_multiple(config.grid_y_m, config.block_m, 1e-9)) {
    throw ConfigError("block spacing must divide the grid extents");
  }
  if (config.num_aps < 1) throw ConfigError("at least one AP is required");

  NetworkLayout layout;
  layout.roads = {config.grid_x_m, config.grid_y_m, config.block_m, config.lane_offset_m};
  const double h = config.ap_height_m;
  const int b = config.num_aps;
  if (b == 1) {
    layout.aps.coordinates.push_back({config.grid_x_m / 2, config.grid_y_m / 2, h});
    return layout;
  }
  const bool long_x = config.grid_x_m >= config.grid_y_m;
  const double length = long_x ? config.grid_x_m : config.grid_y_m;
  const double across = long_x ? config.grid_y_m : config.grid_x_m;
  const int first = (b + 1) / 2;
  const int counts[2] = {first, b - first};
  const double offsets[2] = {0.0, across};
  for (int road = 0; road < 2; ++road) {
    const int n = counts[road];
    for (int i = 0; i < n; ++i) {
      double along = length / n * (i + 0.5);
      if (long_x) {
        layout.aps.coordinates.push_back({along, offsets[road], h});
      } else {
        layout.aps.coordinates.push_back({offsets[road], along, h});
      }
    }
  }
  return layout;
}

double distance_3d(Vec3 ap, Vec2 cv, double cv_height) {
  double dx = ap.x - cv.x;
  double dy = ap.y - cv.y;
  double dz = ap.z - cv_height;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool covers(const NetworkLayout& layout, double radius, double cv_height, double step) {
  for (Vec2 p : layout.roads.sample_lane_points(step)) {
    bool ok = std::any_of(layout.aps.coordinates.begin(), layout.aps.coordinates.end(),
                          [&](Vec3 ap) { return distance_3d(ap, p, cv_height) <= radius; });
    if (!ok) return false;
  }
  return true;
}

std::vector<Vec2> legal_turns(const RoadNetwork& roads, Vec2 node, Vec2 heading) {
  const Vec2 dirs[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  auto in_grid = [&](Vec2 d) {
    return inside(roads, {node.x + d.x * roads.block, node.y + d.y * roads.block});
  };
  const Vec2 reverse{-heading.x, -heading.y};
  const bool straight_blocked = !in_grid(heading);
  std::vector<Vec2> out;
  for (Vec2 d : dirs) {
    if (!in_grid(d)) continue;
    if (d == reverse && !straight_blocked) continue;
    out.push_back(d);
  }
  return out;
}

std::vector<CvKinematics> initial_kinematics(const RoadNetwork& roads, int num_cvs,
                                             double v_max, Rng& rng) {
  const int horizontal = roads.rows() * (roads.columns() - 1);
  const int vertical = roads.columns() * (roads.rows() - 1);
  std::uniform_int_distribution<int> segment(0, horizontal + vertical - 1);
  std::vector<CvKinematics> out;
  out.reserve(num_cvs);
  for (int u = 0; u < num_cvs; ++u) {
    int s = segment(rng);
    // Strictly inside the segment so the first step never starts on a node.
    double frac = 0.05 + 0.9 * uniform01(rng);
    bool positive = uniform01(rng) < 0.5;
    CvKinematics cv;
    cv.cv_id = u;
    if (s < horizontal) {
      int row = s / (roads.columns() - 1);
      int col = s % (roads.columns() - 1);
      cv.position = {(col + frac) * roads.block, row * roads.block};
      cv.heading = {positive ? 1.0 : -1.0, 0.0};
    } else {
      s -= horizontal;
      int col = s / (roads.rows() - 1);
      int row = s % (roads.rows() - 1);
      cv.position = {col * roads.block, (row + frac) * roads.block};
      cv.heading = {0.0, positive ? 1.0 : -1.0};
    }
    cv.speed = v_max * (0.5 + 0.5 * uniform01(rng));
    out.push_back(cv);
  }
  return out;
}

std::vector<CvKinematics> step_positions(const std::vector<CvKinematics>& state,
                                         const RoadNetwork& roads, Rng& rng, double dt) {
  std::vector<CvKinematics> next = state;
  if (dt <= 0.0) return next;
  for (auto& cv : next) {
    double remaining = cv.speed * dt;
    // A CV parked on a node whose heading leaves the grid (only possible for
    // externally constructed states) picks a legal direction first.
    if (roads.is_intersection(cv.position)) {
      Vec2 ahead{cv.position.x + cv.heading.x * roads.block,
                 cv.position.y + cv.heading.y * roads.block};
      if (!inside(roads, ahead)) {
        auto turns = legal_turns(roads, cv.position, cv.heading);
        std::uniform_int_distribution<std::size_t> pick(0, turns.size() - 1);
        cv.heading = turns[pick(rng)];
      }
    }
    while (remaining > 0.0) {
      double to_node = distance_to_next_node(roads, cv.position, cv.heading);
      if (remaining < to_node) {
        cv.position.x += cv.heading.x * remaining;
        cv.position.y += cv.heading.y * remaining;
        break;
      }
      cv.position.x += cv.heading.x * to_node;
      cv.position.y += cv.heading.y * to_node;
      cv.position = snap_to_grid(roads, cv.position);
      remaining -= to_node;
      auto turns = legal_turns(roads, cv.position, cv.heading);
      std::uniform_int_distribution<std::size_t> pick(0, turns.size() - 1);
      cv.heading = turns[pick(rng)];
    }
  }
  return next;
}

PositionTrace::PositionTrace(int num_slots, int num_cvs)
    : slots_(num_slots), cvs_(num_cvs),
      data_(static_cast<std::size_t>(num_slots) * static_cast<std::size_t>(num_cvs)) {}

std::size_t PositionTrace::index(int slot, int cv) const {
  if (slot < 0 || slot >= slots_ || cv < 0 || cv >= cvs_) {
    throw std::out_of_range("trace index (" + std::to_string(slot) + ", " +
                            std::to_string(cv) + ") out of range");
  }
  return static_cast<std::size_t>(slot) * cvs_ + cv;
}

PositionTrace simulate_trace(const RoadNetwork& roads, int num_cvs, int num_slots,
                             double slot_seconds, double v_max, Rng& rng) {
  PositionTrace trace(num_slots, num_cvs);
  auto state = initial_kinematics(roads, num_cvs, v_max, rng);
  for (int t = 0; t < num_slots; ++t) {
    if (t > 0) state = step_positions(state, roads, rng, slot_seconds);
    for (const auto& cv : state) {
      trace.at(t, cv.cv_id) = roads.lane_position(cv.position, cv.heading);
    }
  }
  return trace;
}

namespace {

template <typename T>
bool parse_number(const std::string& s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

} // namespace

PositionTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open trace '" + path + "'", 0);
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::map<std::pair<int, int>, Vec2> entries;
  std::set<int> slots;
  std::set<int> cvs;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"slot", "cv_id", "x", "y"}) {
        throw ParseError("expected header 'slot,cv_id,x,y'", row);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected 4 fields", row);
    int slot = 0;
    int cv = 0;
    Vec2 p;
    if (!parse_number(fields[0], slot) || !parse_number(fields[1], cv) ||
        !parse_number(fields[2], p.x) || !parse_number(fields[3], p.y) || slot < 0 || cv < 0 ||
        !std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ParseError("malformed row '" + line + "'", row);
    }
    if (!entries.emplace(std::make_pair(slot, cv), p).second) {
      throw ParseError("duplicate entry for (slot " + std::to_string(slot) + ", cv " +
                           std::to_string(cv) + ")",
                       row);
    }
    slots.insert(slot);
    cvs.insert(cv);
  }
  if (!header_seen) throw ParseError("missing header", row);
  if (entries.empty()) return {};
  const int num_slots = *slots.rbegin() + 1;
  const int num_cvs = *cvs.rbegin() + 1;
  PositionTrace trace(num_slots, num_cvs);
  for (int t = 0; t < num_slots; ++t) {
    for (int u = 0; u < num_cvs; ++u) {
      auto it = entries.find({t, u});
      if (it == entries.end()) {
        throw ParseError("missing entry for (slot " + std::to_string(t) + ", cv " +
                             std::to_string(u) + ")",
                         row);
      }
      trace.at(t, u) = it->second;
    }
  }
  return trace;
}

void save_trace(const std::string& path, const PositionTrace& trace,
                const std::string& fingerprint) {
  CsvWriter w(path, fingerprint, {"slot", "cv_id", "x", "y"});
  for (int t = 0; t < trace.num_slots(); ++t) {
    for (int u = 0; u < trace.num_cvs(); ++u) {
      Vec2 p = trace.at(t, u);
      w.field(t).field(u).field(p.x).field(p.y);
      w.end_row();
    }
  }
}

} // namespace vecsim
