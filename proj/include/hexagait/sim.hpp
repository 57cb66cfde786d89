#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Geometry>

#include "hexagait/gait.hpp"
#include "hexagait/terrain.hpp"

namespace hexagait::sim {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Hexapod body and leg dimensions. Body frame: x forward, y left, z up,
/// origin at the thorax center (hip height).
struct RobotGeometry {
  double thorax_length = 0.20;
  double thorax_width = 0.09;
  double thorax_height = 0.05;
  double mass = 2.5;
  double coxa_length = 0.05;
  double femur_length = 0.08;
  double tibia_length = 0.11;
  double front_mount_deg = 45.0;   // rear legs mount at 180 - this
  double middle_mount_deg = 90.0;
  double neutral_clearance = 0.05;

  double leg_length() const { return coxa_length + femur_length + tibia_length; }
  Vec3 hip(int leg) const;
  /// Leg direction at zero coxa, radians from the body x axis.
  double mount_yaw(int leg) const;

  friend bool operator==(const RobotGeometry&, const RobotGeometry&) = default;
};

std::vector<std::string> validate_geometry(const RobotGeometry& geometry);

struct SimConfig {
  double dt = 0.02;
  double trial_duration = 90.0;
  gait::GaitClock clock{};
  RobotGeometry geometry{};

  double roll_limit_deg = 45.0;
  double pitch_limit_deg = 70.0;
  double yaw_limit_deg = 90.0;
  double reverse_limit = 0.2;
  double course_length = 8.2;

  double relaxation = 0.3;               // fraction of the remaining tip applied per step
  double stability_normalization = 0.01; // mean |dw| per step that scores 0
  double contact_tolerance = 1e-3;       // point counts as touching within this gap
  double climb_tolerance = 0.005;        // rises smaller than this are not faces

  int telemetry_stride = 10;
  double start_x = 0.0;
  std::optional<double> start_y;  // default: course centerline

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

std::vector<std::string> validate_sim_config(const SimConfig& config);

enum class Termination { TimeLimit, CourseComplete, Rollover, PitchOver, YawOut, Reverse, Diverged };
inline constexpr int kTerminationKinds = 7;

std::string_view termination_name(Termination t);
std::optional<Termination> termination_from_name(std::string_view name);

using JointAngles = std::array<double, 18>;  // per leg: coxa, femur, tibia

struct RobotState {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  JointAngles joints{};
  double time = 0.0;
  /// Ground height each foot currently stands on or is pressed against.
  /// Differs from the cell under the foot only while the foot is pushed
  /// into a face it has not cleared.
  std::array<double, gait::kLegCount> support_height{};
};

/// Intrinsic Z-Y-X (yaw, pitch, roll) angles in radians.
struct Attitude {
  double roll;
  double pitch;
  double yaw;
};
Attitude attitude_of(const Quat& q);

/// Thrown from step() when the state stops being finite.
class SimulationDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Vec3 foot_in_body(int leg, double coxa, double femur, double tibia, const RobotGeometry& geometry);
std::array<Vec3, gait::kLegCount> foot_positions(const RobotState& state,
                                                 const RobotGeometry& geometry);
JointAngles to_joint_angles(const gait::LegCommands& commands);

/// Standard start pose: on the course centerline at start_x, level, joints
/// at their t = 0 commands, settled onto the ground.
RobotState initial_state(const gait::GaitController& controller,
                         const terrain::HeightField& field, const SimConfig& config);

RobotState step(const RobotState& state, const gait::GaitController& controller,
                const terrain::HeightField& field, const SimConfig& config);
RobotState step(const RobotState& state, const gait::GaitGenome& genome,
                const terrain::HeightField& field, const SimConfig& config);

/// Number of feet within contact tolerance of their support height.
int feet_in_contact(const RobotState& state, const SimConfig& config);

struct TraceSample {
  double t;
  Vec3 position;
  Quat orientation;
  int feet_in_contact;
  double ground_under_body;  // terrain height below the body center
  std::optional<Termination> termination;  // set on the final sample
};

struct TrialResult {
  double distance = 0.0;        // max forward displacement reached, capped at course length
  double stability_raw = 0.0;   // mean |w_{k+1} - w_k| per step
  Termination termination = Termination::TimeLimit;
  double elapsed = 0.0;
  long steps = 0;
  double final_displacement = 0.0;
  double min_displacement = 0.0;
  Attitude final_attitude{0.0, 0.0, 0.0};
  std::vector<TraceSample> trace;

  bool diverged() const { return termination == Termination::Diverged; }
};

/// Termination rule evaluated after every step; nullopt keeps running.
/// Limits are strict: exactly 45 degrees of roll does not end the trial.
std::optional<Termination> check_termination(const Attitude& attitude, double displacement,
                                             const SimConfig& config);

TrialResult run_trial(const gait::GaitGenome& genome, const terrain::HeightField& field,
                      const SimConfig& config);

/// max(0, 1 - raw / normalization)
double stability_score(double stability_raw, double normalization = 0.01);

/// Telemetry rows: t x y z qw qx qy qz termination (tab separated).
std::string format_trace(const TrialResult& result);

}  // namespace hexagait::sim
