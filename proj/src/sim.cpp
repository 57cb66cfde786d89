#include "hexagait/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "hexagait/text_io.hpp"

namespace hexagait::sim {

using Eigen::AngleAxisd;
using Eigen::Matrix3d;
using Eigen::Vector2d;

namespace {

constexpr double kDeg = gait::kPi / 180.0;
constexpr int kFeet = gait::kLegCount;
constexpr int kProbes = 10;
constexpr int kPoints = kFeet + kProbes;
constexpr double kMaxTip = gait::kPi / 2.0;

using PointArray = std::array<Vec3, kPoints>;

// Thorax bottom corners, bottom edge midpoints, bottom center, body center.
std::array<Vec3, kProbes> body_probes(const RobotGeometry& g) {
  const double hx = g.thorax_length / 2.0;
  const double hy = g.thorax_width / 2.0;
  const double hz = -g.thorax_height / 2.0;
  return {Vec3(hx, hy, hz),  Vec3(hx, -hy, hz),  Vec3(-hx, hy, hz), Vec3(-hx, -hy, hz),
          Vec3(hx, 0.0, hz), Vec3(-hx, 0.0, hz), Vec3(0.0, hy, hz), Vec3(0.0, -hy, hz),
          Vec3(0.0, 0.0, hz), Vec3(0.0, 0.0, 0.0)};
}

void local_points(const JointAngles& joints, const RobotGeometry& g, PointArray& out) {
  for (int leg = 0; leg < kFeet; ++leg) {
    out[leg] = foot_in_body(leg, joints[3 * leg], joints[3 * leg + 1], joints[3 * leg + 2], g);
  }
  const auto probes = body_probes(g);
  for (int k = 0; k < kProbes; ++k) out[kFeet + k] = probes[k];
}

Matrix3d yaw_matrix(double yaw) { return AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(); }

double cross2(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Ground height each point rests against: feet use their support memory,
// body probes the cell below them.
void point_heights(const PointArray& world, const std::array<double, kFeet>& support,
                   const terrain::HeightField& field, std::array<double, kPoints>& out) {
  for (int i = 0; i < kFeet; ++i) out[i] = support[i];
  for (int i = kFeet; i < kPoints; ++i) {
    out[i] = terrain::ground_height(field, world[i].x(), world[i].y());
  }
}

void to_world(const Vec3& p, const Matrix3d& r, const PointArray& local, PointArray& world) {
  for (int i = 0; i < kPoints; ++i) world[i] = p + r * local[i];
}

// Lowers or raises the body so the lowest point just touches the ground.
void settle(Vec3& position, const PointArray& world, const std::array<double, kPoints>& heights) {
  double lift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) lift = std::max(lift, heights[i] - world[i].z());
  position.z() += lift;
}

// A foot entering a cell whose top is above it stays on its previous
// support height (pressed against the face) until it clears the top.
void update_support(const Vec3& p, const Matrix3d& r, const PointArray& local,
                    const terrain::HeightField& field, double climb,
                    std::array<double, kFeet>& support) {
  for (int i = 0; i < kFeet; ++i) {
    const Vec3 f = p + r * local[i];
    const double h = terrain::ground_height(field, f.x(), f.y());
    const bool obstructed = terrain::wall_at(field, f.x(), f.y()) ||
                            (h > support[i] + climb && f.z() < h - climb);
    if (!obstructed) support[i] = h;
  }
}

struct Pivot {
  Vec3 anchor;
  Vec3 axis;  // rotating by a positive angle about this axis lowers the center
};

// Convex hull (monotone chain) of 2D points, returned as indices in
// counter-clockwise order. Collinear points collapse to the two extremes.
std::vector<int> hull_indices(const std::vector<Vector2d>& pts) {
  std::vector<int> idx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  if (idx.size() < 2) return idx;
  std::vector<int> hull(2 * idx.size());
  std::size_t k = 0;
  auto turn = [&](int o, int a, int b) { return cross2(pts[a] - pts[o], pts[b] - pts[o]); };
  for (int i : idx) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], i) <= 1e-15) --k;
    hull[k++] = i;
  }
  const std::size_t lower = k + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], *it) <= 1e-15) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  if (hull.size() == 2 && (pts[hull[0]] - pts[hull[1]]).norm() < 1e-12) hull.resize(1);
  return hull;
}

std::optional<Pivot> find_pivot(const std::vector<Vec3>& contacts, const Vec3& center) {
  std::vector<Vector2d> pts;
  pts.reserve(contacts.size());
  for (const auto& c : contacts) pts.emplace_back(c.x(), c.y());
  const Vector2d com(center.x(), center.y());
  const auto hull = hull_indices(pts);
  if (hull.empty()) return std::nullopt;

  if (hull.size() >= 3) {
    bool inside = true;
    for (std::size_t i = 0; i < hull.size() && inside; ++i) {
      const auto& a = pts[hull[i]];
      const auto& b = pts[hull[(i + 1) % hull.size()]];
      inside = cross2(b - a, com - a) >= -1e-12;
    }
    if (inside) return std::nullopt;
  }

  // Nearest hull feature to the center of mass.
  double best = std::numeric_limits<double>::infinity();
  int best_a = hull[0], best_b = -1;
  const std::size_t edges = hull.size() == 1 ? 0 : (hull.size() == 2 ? 1 : hull.size());
  if (edges == 0) best = (com - pts[hull[0]]).norm();
  for (std::size_t i = 0; i < edges; ++i) {
    const int ia = hull[i];
    const int ib = hull[(i + 1) % hull.size()];
    const Vector2d ab = pts[ib] - pts[ia];
    const double s = std::clamp((com - pts[ia]).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double d = (com - (pts[ia] + s * ab)).norm();
    if (d < best) {
      best = d;
      if (s <= 0.0) {
        best_a = ia, best_b = -1;
      } else if (s >= 1.0) {
        best_a = ib, best_b = -1;
      } else {
        best_a = ia, best_b = ib;
      }
    }
  }
  if (best < 1e-9) return std::nullopt;

  Pivot pivot;
  pivot.anchor = contacts[best_a];
  if (best_b >= 0) {
    pivot.axis = (contacts[best_b] - contacts[best_a]).normalized();
  } else {
    const Vec3 away(com.x() - pts[best_a].x(), com.y() - pts[best_a].y(), 0.0);
    pivot.axis = Vec3::UnitZ().cross(away).normalized();
  }
  if (pivot.axis.cross(center - pivot.anchor).z() > 0.0) pivot.axis = -pivot.axis;
  return pivot;
}

// Smallest rotation about the pivot that brings another point down to its
// ground height, capped at a quarter turn.
double tip_angle(const Pivot& pivot, const PointArray& world,
                 const std::array<double, kPoints>& heights, const std::array<bool, kPoints>& contact) {
  double best = kMaxTip;
  const Vec3& u = pivot.axis;
  for (int i = 0; i < kPoints; ++i) {
    if (contact[i]) continue;
    const Vec3 r = world[i] - pivot.anchor;
    const double ru = r.dot(u);
    const double a = (r - ru * u).z();
    const double b = u.cross(r).z();
    const double k = pivot.anchor.z() + ru * u.z() - heights[i];
    const double amp = std::hypot(a, b);
    if (amp < 1e-12 || std::abs(k) > amp) continue;
    const double phi = std::atan2(b, a);
    const double spread = std::acos(std::clamp(-k / amp, -1.0, 1.0));
    for (double cand : {phi - spread, phi + spread}) {
      while (cand <= 1e-12) cand += gait::kTwoPi;
      while (cand > gait::kTwoPi) cand -= gait::kTwoPi;
      best = std::min(best, cand);
    }
  }
  return best;
}

bool finite_state(const RobotState& s) {
  return s.position.allFinite() && s.orientation.coeffs().allFinite() && std::isfinite(s.time) &&
         std::all_of(s.joints.begin(), s.joints.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Vec3 RobotGeometry::hip(int leg) const {
  const double side = gait::is_right(leg) ? -1.0 : 1.0;
  const double x = leg % 3 == 0 ? thorax_length / 2.0 : (leg % 3 == 1 ? 0.0 : -thorax_length / 2.0);
  return {x, side * thorax_width / 2.0, 0.0};
}

double RobotGeometry::mount_yaw(int leg) const {
  const double side = gait::is_right(leg) ? -1.0 : 1.0;
  switch (leg % 3) {
    case 0: return side * front_mount_deg * kDeg;
    case 1: return side * middle_mount_deg * kDeg;
    default: return side * (180.0 - front_mount_deg) * kDeg;
  }
}

std::vector<std::string> validate_geometry(const RobotGeometry& g) {
  std::vector<std::string> errors;
  if (!(g.coxa_length > 0 && g.femur_length > 0 && g.tibia_length > 0)) {
    errors.emplace_back("leg segment lengths must be positive");
  }
  if (!(g.thorax_length > 0 && g.thorax_width > 0 && g.thorax_height > 0)) {
    errors.emplace_back("thorax dimensions must be positive");
  }
  if (!(g.mass > 0)) errors.emplace_back("mass must be positive");
  return errors;
}

std::vector<std::string> validate_sim_config(const SimConfig& c) {
  auto errors = validate_geometry(c.geometry);
  if (!(c.dt > 0)) errors.emplace_back("dt must be > 0");
  if (!(c.trial_duration > 0)) errors.emplace_back("trial_duration must be > 0");
  if (!(c.clock.omega > 0)) errors.emplace_back("omega must be > 0");
  if (!(c.clock.coxa_amplitude >= 0)) errors.emplace_back("coxa_amplitude must be >= 0");
  if (!(c.relaxation > 0 && c.relaxation <= 1)) errors.emplace_back("relaxation must be in (0, 1]");
  if (!(c.stability_normalization > 0)) errors.emplace_back("stability_normalization must be > 0");
  if (!(c.contact_tolerance > 0)) errors.emplace_back("contact_tolerance must be > 0");
  if (!(c.climb_tolerance >= 0)) errors.emplace_back("climb_tolerance must be >= 0");
  if (c.telemetry_stride < 1) errors.emplace_back("telemetry_stride must be >= 1");
  if (!(c.course_length > 0)) errors.emplace_back("course_length must be > 0");
  if (!(c.reverse_limit > 0)) errors.emplace_back("reverse_limit must be > 0");
  return errors;
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::TimeLimit: return "TimeLimit";
    case Termination::CourseComplete: return "CourseComplete";
    case Termination::Rollover: return "Rollover";
    case Termination::PitchOver: return "PitchOver";
    case Termination::YawOut: return "YawOut";
    case Termination::Reverse: return "Reverse";
    case Termination::Diverged: return "Diverged";
  }
  return "?";
}

std::optional<Termination> termination_from_name(std::string_view name) {
  for (int i = 0; i < kTerminationKinds; ++i) {
    const auto t = static_cast<Termination>(i);
    if (termination_name(t) == name) return t;
  }
  return std::nullopt;
}

Attitude attitude_of(const Quat& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  Attitude a;
  a.roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  a.pitch = std::asin(std::clamp(2.0 * (w * y - z * x), -1.0, 1.0));
  a.yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return a;
}

Vec3 foot_in_body(int leg, double coxa, double femur, double tibia, const RobotGeometry& g) {
  // Positive coxa swings the leg forward on both sides.
  const double yaw = g.mount_yaw(leg) + (gait::is_right(leg) ? coxa : -coxa);
  const double knee = femur + tibia;
  const double reach = g.coxa_length + g.femur_length * std::cos(femur) + g.tibia_length * std::cos(knee);
  const double height = g.femur_length * std::sin(femur) + g.tibia_length * std::sin(knee);
  return g.hip(leg) + Vec3(reach * std::cos(yaw), reach * std::sin(yaw), height);
}

std::array<Vec3, kFeet> foot_positions(const RobotState& state, const RobotGeometry& g) {
  std::array<Vec3, kFeet> out;
  const Matrix3d r = state.orientation.toRotationMatrix();
  for (int leg = 0; leg < kFeet; ++leg) {
    const auto* j = &state.joints[3 * leg];
    out[leg] = state.position + r * foot_in_body(leg, j[0], j[1], j[2], g);
  }
  return out;
}

JointAngles to_joint_angles(const gait::LegCommands& commands) {
  JointAngles out{};
  for (const auto& c : commands) {
    out[3 * c.leg] = c.coxa;
    out[3 * c.leg + 1] = c.femur;
    out[3 * c.leg + 2] = c.tibia;
  }
  return out;
}

RobotState initial_state(const gait::GaitController& controller, const terrain::HeightField& field,
                         const SimConfig& config) {
  RobotState s;
  s.position = Vec3(config.start_x, config.start_y.value_or(field.width() / 2.0), 0.0);
  s.joints = to_joint_angles(controller.commands(0.0));
  PointArray local, world;
  local_points(s.joints, config.geometry, local);
  to_world(s.position, Matrix3d::Identity(), local, world);
  for (int i = 0; i < kFeet; ++i) {
    s.support_height[i] = terrain::ground_height(field, world[i].x(), world[i].y());
  }
  std::array<double, kPoints> heights;
  point_heights(world, s.support_height, field, heights);
  settle(s.position, world, heights);
  return s;
}

RobotState step(const RobotState& s, const gait::GaitController& controller,
                const terrain::HeightField& field, const SimConfig& c) {
  const auto& g = c.geometry;
  RobotState next = s;
  next.time = s.time + c.dt;
  next.joints = to_joint_angles(controller.commands(next.time));

  PointArray old_local, new_local, old_world, world;
  local_points(s.joints, g, old_local);
  local_points(next.joints, g, new_local);
  const Matrix3d r0 = s.orientation.toRotationMatrix();
  const Vec3 p0 = s.position;
  to_world(p0, r0, old_local, old_world);

  // Points touching the ground at the start of the step stay anchored.
  std::array<double, kPoints> heights;
  point_heights(old_world, s.support_height, field, heights);
  Vector2d anchor_mean = Vector2d::Zero(), offset_mean = Vector2d::Zero();
  std::array<Vector2d, kPoints> offsets;
  std::array<bool, kPoints> anchored{};
  int anchors = 0;
  for (int i = 0; i < kPoints; ++i) {
    offsets[i] = (r0 * new_local[i]).head<2>();
    anchored[i] = old_world[i].z() - heights[i] <= c.contact_tolerance;
    if (anchored[i]) {
      anchor_mean += old_world[i].head<2>();
      offset_mean += offsets[i];
      ++anchors;
    }
  }

  // Least-squares planar rigid motion (yaw + translation) that keeps the
  // anchored points where they were under the new joint angles.
  double yaw = 0.0;
  Vector2d xy = p0.head<2>();
  if (anchors > 0) {
    anchor_mean /= anchors;
    offset_mean /= anchors;
    double sc = 0.0, sd = 0.0, spread = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      if (!anchored[i]) continue;
      const Vector2d ro = offsets[i] - offset_mean;
      const Vector2d ao = old_world[i].head<2>() - anchor_mean;
      sc += cross2(ro, ao);
      sd += ro.dot(ao);
      spread += ro.squaredNorm();
    }
    if (anchors >= 2 && spread > 1e-14) yaw = std::atan2(sc, sd);
    xy = anchor_mean - Eigen::Rotation2Dd(yaw) * offset_mean;
  }

  // Motion that would push a body point into a face or wall loses the
  // offending translation component.
  auto collides = [&](const Vector2d& cand_xy, double cand_yaw) {
    const Matrix3d r = yaw_matrix(cand_yaw) * r0;
    const Vec3 p(cand_xy.x(), cand_xy.y(), p0.z());
    for (int i = kFeet; i < kPoints; ++i) {
      const Vec3 pn = p + r * new_local[i];
      const Vec3& po = old_world[i];
      if (terrain::wall_at(field, pn.x(), pn.y()) && !terrain::wall_at(field, po.x(), po.y())) {
        return true;
      }
      const double hn = terrain::ground_height(field, pn.x(), pn.y());
      const double ho = terrain::ground_height(field, po.x(), po.y());
      if (hn > pn.z() + c.climb_tolerance && hn > ho + c.climb_tolerance) return true;
    }
    return false;
  };
  const std::array<std::pair<Vector2d, double>, 5> candidates{{
      {xy, yaw},
      {Vector2d(p0.x(), xy.y()), yaw},
      {Vector2d(xy.x(), p0.y()), yaw},
      {p0.head<2>(), yaw},
      {p0.head<2>(), 0.0},
  }};
  for (const auto& [cand_xy, cand_yaw] : candidates) {
    xy = cand_xy;
    yaw = cand_yaw;
    if (!collides(cand_xy, cand_yaw)) break;
  }

  Quat q = (Quat(AngleAxisd(yaw, Vec3::UnitZ())) * s.orientation).normalized();
  Vec3 p(xy.x(), xy.y(), p0.z());
  Matrix3d r = q.toRotationMatrix();

  update_support(p, r, new_local, field, c.climb_tolerance, next.support_height);
  to_world(p, r, new_local, world);
  point_heights(world, next.support_height, field, heights);
  settle(p, world, heights);

  // Tip about the support polygon edge when the center of mass lies outside.
  to_world(p, r, new_local, world);
  std::array<bool, kPoints> contact{};
  std::vector<Vec3> contacts;
  for (int i = 0; i < kPoints; ++i) {
    contact[i] = world[i].z() - heights[i] <= c.contact_tolerance;
    if (contact[i]) contacts.push_back(world[i]);
  }
  if (auto pivot = find_pivot(contacts, p)) {
    const double full = tip_angle(*pivot, world, heights, contact);
    const double angle = full < 1e-4 ? full : c.relaxation * full;
    const AngleAxisd tip(angle, pivot->axis);
    p = pivot->anchor + tip * (p - pivot->anchor);
    q = (Quat(tip) * q).normalized();
    r = q.toRotationMatrix();
    update_support(p, r, new_local, field, c.climb_tolerance, next.support_height);
    to_world(p, r, new_local, world);
    point_heights(world, next.support_height, field, heights);
    settle(p, world, heights);
  }

  next.position = p;
  next.orientation = q.normalized();
  if (!finite_state(next)) {
    throw SimulationDivergence(fmt::format("non-finite state at t = {}", next.time));
  }
  return next;
}

RobotState step(const RobotState& state, const gait::GaitGenome& genome,
                const terrain::HeightField& field, const SimConfig& config) {
  return step(state, gait::GaitController(genome, config.clock), field, config);
}

int feet_in_contact(const RobotState& state, const SimConfig& config) {
  const auto feet = foot_positions(state, config.geometry);
  int n = 0;
  for (int i = 0; i < kFeet; ++i) {
    if (feet[i].z() - state.support_height[i] <= config.contact_tolerance) ++n;
  }
  return n;
}

std::optional<Termination> check_termination(const Attitude& a, double displacement,
                                             const SimConfig& c) {
  if (displacement >= c.course_length) return Termination::CourseComplete;
  if (std::abs(a.roll) > c.roll_limit_deg * kDeg) return Termination::Rollover;
  if (std::abs(a.pitch) > c.pitch_limit_deg * kDeg) return Termination::PitchOver;
  if (std::abs(a.yaw) > c.yaw_limit_deg * kDeg) return Termination::YawOut;
  if (displacement < -c.reverse_limit) return Termination::Reverse;
  return std::nullopt;
}

TrialResult run_trial(const gait::GaitGenome& genome, const terrain::HeightField& field,
                      const SimConfig& config) {
  if (auto errors = validate_sim_config(config); !errors.empty()) {
    throw std::invalid_argument("invalid sim config: " + errors.front());
  }
  const gait::GaitController controller(genome, config.clock);
  TrialResult result;
  RobotState state = initial_state(controller, field, config);
  const double x0 = state.position.x();

  auto sample = [&](const RobotState& s, std::optional<Termination> term) {
    result.trace.push_back({s.time, s.position, s.orientation, feet_in_contact(s, config),
                            terrain::ground_height(field, s.position.x(), s.position.y()), term});
  };
  sample(state, std::nullopt);

  const long total = std::max(1L, std::lround(config.trial_duration / config.dt));
  double max_disp = 0.0, min_disp = 0.0, sum_dw = 0.0;
  double prev_w = state.orientation.w();
  std::optional<Termination> term;
  try {
    for (long k = 1; k <= total && !term; ++k) {
      state = step(state, controller, field, config);
      result.steps = k;
      sum_dw += std::abs(state.orientation.w() - prev_w);
      prev_w = state.orientation.w();
      const double disp = state.position.x() - x0;
      max_disp = std::max(max_disp, disp);
      min_disp = std::min(min_disp, disp);
      result.final_displacement = disp;
      result.final_attitude = attitude_of(state.orientation);
      term = check_termination(result.final_attitude, disp, config);
      if (!term && k == total) term = Termination::TimeLimit;
      if (term || k % config.telemetry_stride == 0) sample(state, term);
    }
  } catch (const SimulationDivergence&) {
    term = Termination::Diverged;
    sample(state, term);
  }
  result.termination = *term;
  result.elapsed = result.steps * config.dt;
  result.distance = std::clamp(max_disp, 0.0, config.course_length);
  result.min_displacement = min_disp;
  result.stability_raw = result.steps > 0 ? sum_dw / static_cast<double>(result.steps) : 0.0;
  return result;
}

double stability_score(double stability_raw, double normalization) {
  return std::max(0.0, 1.0 - stability_raw / normalization);
}

std::string format_trace(const TrialResult& result) {
  std::string out = "t\tx\ty\tz\tqw\tqx\tqy\tqz\ttermination\n";
  for (const auto& s : result.trace) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", format_double(s.t),
                       format_double(s.position.x()), format_double(s.position.y()),
                       format_double(s.position.z()), format_double(s.orientation.w()),
                       format_double(s.orientation.x()), format_double(s.orientation.y()),
                       format_double(s.orientation.z()),
                       s.termination ? termination_name(*s.termination) : "running");
  }
  return out;
}

}  // namespace hexagait::sim
