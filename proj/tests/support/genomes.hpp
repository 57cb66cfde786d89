#pragma once

// Hand-built genomes that drive the default robot on flat ground into each
// termination rule.

#include <cmath>

#include "hexagait/gait.hpp"

namespace genomes {

using namespace hexagait::gait;

inline JointWaveParams wave(double amplitude, int period, double phase, double shift) {
  return {amplitude, period, phase, shift};
}

inline GaitGenome zero() { return GaitGenome{}; }

inline GaitGenome seed() { return default_seed_genome(); }

// The seed with its front and rear waves half a cycle out: swing and stance
// swap roles and the robot backs up.
inline GaitGenome reverse() {
  auto g = default_seed_genome();
  for (auto pair : {LegPair::Front, LegPair::Rear}) {
    for (auto joint : {Joint::Femur, Joint::Tibia}) {
      auto w = g.joint(pair, joint);
      w.phase = std::fmod(w.phase + kPi, kTwoPi);
      g.set_joint(pair, joint, w);
    }
  }
  return g;
}

// Left and right femurs swing in antiphase with straight tibias.
inline GaitGenome rollover() {
  GaitGenome g;
  for (auto pair : {LegPair::Front, LegPair::Middle, LegPair::Rear}) {
    g.set_joint(pair, Joint::Femur, wave(1.7, 1, 0.0, 0.0));
    g.set_joint(pair, Joint::Tibia, wave(0.0, 1, 0.0, -1.0));
  }
  return g;
}

// Front and rear femurs pump in antiphase at double rate.
inline GaitGenome pitchover() {
  GaitGenome g;
  g.set_joint(LegPair::Front, Joint::Femur, wave(1.7, 2, 0.0, -1.0));
  g.set_joint(LegPair::Rear, Joint::Femur, wave(1.7, 2, kPi, -1.0));
  g.set_joint(LegPair::Middle, Joint::Femur, wave(1.7, 1, 0.0, -1.0));
  for (auto pair : {LegPair::Front, LegPair::Middle, LegPair::Rear}) {
    g.set_joint(pair, Joint::Tibia, wave(0.0, 1, 0.0, -1.0));
  }
  return g;
}

// Pitchover's front and rear pumping with the middle legs lifted clear.
inline GaitGenome yawout() {
  GaitGenome g;
  g.set_joint(LegPair::Front, Joint::Femur, wave(1.7, 2, 0.0, -1.0));
  g.set_joint(LegPair::Rear, Joint::Femur, wave(1.7, 2, kPi, -1.0));
  g.set_joint(LegPair::Middle, Joint::Femur, wave(0.0, 1, 0.0, -1.0));
  for (auto pair : {LegPair::Front, LegPair::Middle, LegPair::Rear}) {
    g.set_joint(pair, Joint::Tibia, wave(0.0, 1, 0.0, 0.0));
  }
  return g;
}

}  // namespace genomes
