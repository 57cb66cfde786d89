#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hexagait/sim.hpp"
#include "support/genomes.hpp"
#include "support/oracles.hpp"
#include "support/sim_checks.hpp"

using namespace hexagait;
using namespace hexagait::sim;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const terrain::HeightField& flat() {
  static const auto f = terrain::build_course(1, terrain::CourseLayout::flat());
  return f;
}

const terrain::HeightField& course() {
  static const auto f = terrain::build_course(1, terrain::CourseLayout{});
  return f;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("quaternion stays unit and feet never sink over a long trial") {
  SimConfig cfg;
  const gait::GaitController ctl(genomes::seed(), cfg.clock);
  for (const auto* field : {&flat(), &course()}) {
    auto s = initial_state(ctl, *field, cfg);
    double drift = 0.0, sink = 0.0;
    for (int k = 0; k < 4500; ++k) {
      s = step(s, ctl, *field, cfg);
      drift = std::max(drift, std::abs(s.orientation.norm() - 1.0));
      sink = std::max(sink, sim_checks::worst_penetration(s, *field, cfg));
    }
    CHECK(drift < 1e-9);
    CHECK(sink <= cfg.contact_tolerance);
  }
}

TEST_CASE("seed gait keeps three feet down on flat ground") {
  SimConfig cfg;
  const auto r = run_trial(genomes::seed(), flat(), cfg);
  REQUIRE(r.trace.size() > 2);
  for (const auto& t : r.trace) CHECK(t.feet_in_contact >= 3);
  CHECK(r.elapsed <= cfg.trial_duration);
}

TEST_CASE("zero-amplitude gait stays put") {
  SimConfig cfg;
  const auto g = genomes::zero();
  const auto start = initial_state(gait::GaitController(g, cfg.clock), flat(), cfg);
  auto s = start;
  for (int k = 0; k < 50; ++k) s = step(s, g, flat(), cfg);
  CHECK((s.position - start.position).norm() < 1e-6);
  const auto r = run_trial(g, flat(), cfg);
  CHECK(r.termination == Termination::TimeLimit);
  for (const auto& t : r.trace) CHECK((t.position - start.position).norm() < 1e-6);
}

TEST_CASE("a ten times finer step agrees with the default step") {
  SimConfig coarse;
  coarse.course_length = 1000.0;  // uncapped, so the full 90 s of travel is compared
  SimConfig fine = coarse;
  fine.dt = coarse.dt / 10.0;
  fine.telemetry_stride = 100;
  const double a = run_trial(genomes::seed(), flat(), coarse).final_displacement;
  const double b = run_trial(genomes::seed(), flat(), fine).final_displacement;
  REQUIRE(b > 1.0);
  CHECK(a / b >= 0.8);
  CHECK(a / b <= 1.25);
}

TEST_CASE("foot kinematics") {
  const RobotGeometry geo;
  for (int leg = 0; leg < gait::kLegCount; ++leg) {
    const Vec3 reach = foot_in_body(leg, 0.0, 0.0, 0.0, geo) - geo.hip(leg);
    CHECK(reach.norm() == doctest::Approx(0.24).epsilon(1e-12));
    CHECK(std::abs(reach.z()) < 1e-12);
  }
  oracle::Gen gen(23);
  for (int i = 0; i < 200; ++i) {
    RobotState s;
    for (int leg = 0; leg < 3; ++leg) {
      const double c = gen.real(-0.7, 0.7), f = gen.real(-1.5, 1.5), t = gen.real(-1.5, 1.5);
      s.joints[3 * leg] = c, s.joints[3 * leg + 1] = f, s.joints[3 * leg + 2] = t;
      s.joints[3 * (leg + 3)] = c, s.joints[3 * (leg + 3) + 1] = f, s.joints[3 * (leg + 3) + 2] = t;
    }
    const auto feet = foot_positions(s, geo);
    for (int leg = 0; leg < 3; ++leg) {
      CHECK(std::abs(feet[leg].x() - feet[leg + 3].x()) < 1e-9);
      CHECK(std::abs(feet[leg].y() + feet[leg + 3].y()) < 1e-9);
      CHECK(std::abs(feet[leg].z() - feet[leg + 3].z()) < 1e-9);
    }
    RobotState moved = s;
    moved.position.x() += 0.1;
    const auto shifted = foot_positions(moved, geo);
    for (int leg = 0; leg < gait::kLegCount; ++leg) {
      CHECK((shifted[leg] - feet[leg] - Vec3(0.1, 0, 0)).norm() < 1e-12);
    }
  }
}

TEST_CASE("body center stays above the terrain at every sample") {
  SimConfig cfg;
  oracle::Gen gen(24);
  std::vector<gait::GaitGenome> gs{genomes::seed(), genomes::rollover(), genomes::pitchover()};
  for (int i = 0; i < 10; ++i) gs.push_back(gen.genome());
  for (const auto& g : gs) {
    for (const auto& t : run_trial(g, course(), cfg).trace) CHECK(t.position.z() >= t.ground_under_body);
  }
}

TEST_CASE("constructed genomes trigger each termination") {
  SimConfig cfg;
  struct Case {
    gait::GaitGenome genome;
    Termination expected;
  };
  for (const auto& [g, expected] : {Case{genomes::zero(), Termination::TimeLimit},
                                    Case{genomes::seed(), Termination::CourseComplete},
                                    Case{genomes::reverse(), Termination::Reverse},
                                    Case{genomes::rollover(), Termination::Rollover},
                                    Case{genomes::pitchover(), Termination::PitchOver},
                                    Case{genomes::yawout(), Termination::YawOut}}) {
    CAPTURE(termination_name(expected));
    CHECK(run_trial(g, flat(), cfg).termination == expected);
  }
}

TEST_CASE("termination thresholds are strict") {
  const SimConfig cfg;
  CHECK_FALSE(check_termination({45.0 * kDeg, 0, 0}, 0.0, cfg).has_value());
  CHECK(check_termination({std::nextafter(45.0 * kDeg, 1.0), 0, 0}, 0.0, cfg) == Termination::Rollover);
  CHECK(check_termination({-46.0 * kDeg, 0, 0}, 0.0, cfg) == Termination::Rollover);
  CHECK_FALSE(check_termination({0, 70.0 * kDeg, 0}, 0.0, cfg).has_value());
  CHECK(check_termination({0, -71.0 * kDeg, 0}, 0.0, cfg) == Termination::PitchOver);
  CHECK_FALSE(check_termination({0, 0, 90.0 * kDeg}, 0.0, cfg).has_value());
  CHECK(check_termination({0, 0, 91.0 * kDeg}, 0.0, cfg) == Termination::YawOut);
  CHECK_FALSE(check_termination({0, 0, 0}, -0.2, cfg).has_value());
  CHECK(check_termination({0, 0, 0}, -0.2001, cfg) == Termination::Reverse);
  CHECK(check_termination({0, 0, 0}, 8.2, cfg) == Termination::CourseComplete);
  CHECK_FALSE(check_termination({0, 0, 0}, 8.19, cfg).has_value());
  // Course completion wins over a simultaneous attitude violation.
  CHECK(check_termination({1.0, 1.5, 2.0}, 8.3, cfg) == Termination::CourseComplete);
}

TEST_CASE("attitude extraction inverts a Z-Y-X rotation") {
  oracle::Gen gen(21);
  for (int i = 0; i < 500; ++i) {
    const double roll = gen.real(-3.0, 3.0), pitch = gen.real(-1.5, 1.5), yaw = gen.real(-3.0, 3.0);
    const Quat q = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                   Eigen::AngleAxisd(roll, Vec3::UnitX());
    const auto a = attitude_of(q);
    CHECK(a.roll == doctest::Approx(roll).epsilon(1e-9));
    CHECK(a.pitch == doctest::Approx(pitch).epsilon(1e-9));
    CHECK(a.yaw == doctest::Approx(yaw).epsilon(1e-9));
  }
}

TEST_CASE("trials are deterministic") {
  SimConfig cfg;
  cfg.trial_duration = 10.0;
  oracle::Gen gen(22);
  for (int i = 0; i < 5; ++i) {
    const auto g = gen.genome();
    CHECK(format_trace(run_trial(g, course(), cfg)) == format_trace(run_trial(g, course(), cfg)));
  }
}

TEST_CASE("trace format") {
  SimConfig cfg;
  cfg.trial_duration = 1.0;
  const auto r = run_trial(genomes::zero(), flat(), cfg);
  const auto text = format_trace(r);
  CHECK(text.rfind("t\tx\ty\tz\tqw\tqx\tqy\tqz\ttermination\n", 0) == 0);
  CHECK(r.trace.size() == 6);  // steps 0, 10, ..., 50; the final step is already a stride sample
  CHECK(text.find("TimeLimit") != std::string::npos);
}

TEST_CASE("rough course slows the seed gait") {
  SimConfig cfg;
  const auto rough = run_trial(genomes::seed(), course(), cfg);
  const auto smooth = run_trial(genomes::seed(), flat(), cfg);
  CHECK(rough.distance < smooth.distance);
  CHECK(rough.elapsed <= 90.0);
}

TEST_CASE("stability score") {
  CHECK(stability_score(0.0) == 1.0);
  CHECK(stability_score(0.005) == doctest::Approx(0.5));
  CHECK(stability_score(0.02) == 0.0);
  const auto r = run_trial(genomes::seed(), flat(), SimConfig{});
  CHECK(stability_score(r.stability_raw) > 0.9);
}

TEST_CASE("configuration validation") {
  SimConfig cfg;
  CHECK(validate_sim_config(cfg).empty());
  cfg.dt = 0.0;
  CHECK_FALSE(validate_sim_config(cfg).empty());
  RobotGeometry geo;
  CHECK(validate_geometry(geo).empty());
  geo.tibia_length = -0.1;
  CHECK_FALSE(validate_geometry(geo).empty());
  CHECK(termination_from_name("PitchOver") == Termination::PitchOver);
  CHECK_FALSE(termination_from_name("Crashed").has_value());
}

}  // TEST_SUITE
