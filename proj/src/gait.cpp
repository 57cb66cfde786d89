#include "hexagait/gait.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "hexagait/text_io.hpp"

namespace hexagait::gait {

namespace {

constexpr std::array<const char*, 3> kPairNames{"front", "middle", "rear"};
constexpr std::array<const char*, 2> kJointNames{"femur", "tibia"};
constexpr std::array<const char*, 3> kFieldNames{"phase", "range", "shift"};

std::size_t base_index(LegPair pair, Joint joint) {
  return static_cast<std::size_t>(pair) * 6 + static_cast<std::size_t>(joint) * 3;
}

}  // namespace

GaitGenome::GaitGenome() {
  genes_.fill(0.0);
  for (std::size_t i = 18; i < kGeneCount; ++i) genes_[i] = 1.0;
}

std::size_t GaitGenome::phase_index(LegPair pair, Joint joint) { return base_index(pair, joint); }
std::size_t GaitGenome::amplitude_index(LegPair pair, Joint joint) {
  return base_index(pair, joint) + 1;
}
std::size_t GaitGenome::shift_index(LegPair pair, Joint joint) {
  return base_index(pair, joint) + 2;
}
std::size_t GaitGenome::period_index(LegPair pair, Joint joint) {
  return 18 + static_cast<std::size_t>(pair) * 2 + static_cast<std::size_t>(joint);
}

JointWaveParams GaitGenome::joint(LegPair pair, Joint joint) const {
  JointWaveParams p;
  p.phase = genes_[phase_index(pair, joint)];
  p.amplitude = genes_[amplitude_index(pair, joint)];
  p.vertical_shift = genes_[shift_index(pair, joint)];
  p.period_multiplier = static_cast<int>(genes_[period_index(pair, joint)]);
  return p;
}

void GaitGenome::set_joint(LegPair pair, Joint joint, const JointWaveParams& params) {
  genes_[phase_index(pair, joint)] = params.phase;
  genes_[amplitude_index(pair, joint)] = params.amplitude;
  genes_[shift_index(pair, joint)] = params.vertical_shift;
  genes_[period_index(pair, joint)] = params.period_multiplier;
}

GeneKind gene_kind(std::size_t index) {
  if (index >= 18) return GeneKind::Period;
  switch (index % 3) {
    case 0: return GeneKind::Phase;
    case 1: return GeneKind::Amplitude;
    default: return GeneKind::Shift;
  }
}

GeneBounds gene_bounds(std::size_t index) {
  switch (gene_kind(index)) {
    case GeneKind::Phase: return {0.0, kPhaseMax};
    case GeneKind::Amplitude: return {0.0, kAmplitudeMax};
    case GeneKind::Shift: return {kShiftMin, kShiftMax};
    case GeneKind::Period: return {1.0, 2.0};
  }
  return {0.0, 0.0};
}

double gene_range_width(std::size_t index) {
  const auto b = gene_bounds(index);
  return b.hi - b.lo;
}

std::string gene_name(std::size_t index) {
  if (index >= GaitGenome::kGeneCount) return fmt::format("gene {}", index);
  if (index >= 18) {
    const auto k = index - 18;
    return fmt::format("{} {} period", kPairNames[k / 2], kJointNames[k % 2]);
  }
  return fmt::format("{} {} {}", kPairNames[index / 6], kJointNames[(index / 3) % 2],
                     kFieldNames[index % 3]);
}

BoundsError::BoundsError(std::vector<BoundsViolation> violations)
    : std::invalid_argument([&] {
        std::string msg = "genome out of bounds:";
        for (const auto& v : violations) msg += " [" + v.message + "]";
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<BoundsViolation> validate_genome(const GaitGenome& genome) {
  std::vector<BoundsViolation> out;
  for (std::size_t i = 0; i < GaitGenome::kGeneCount; ++i) {
    const double v = genome[i];
    const auto b = gene_bounds(i);
    const auto name = gene_name(i);
    if (!std::isfinite(v)) {
      out.push_back({i, v, b, fmt::format("{} is not finite", name)});
    } else if (gene_kind(i) == GeneKind::Period) {
      if (v != 1.0 && v != 2.0) {
        out.push_back({i, v, b, fmt::format("{} = {} not in {{1, 2}}", name, format_double(v))});
      }
    } else if (v < b.lo) {
      out.push_back({i, v, b, fmt::format("{} = {} < {}", name, format_double(v), format_double(b.lo))});
    } else if (v > b.hi) {
      out.push_back({i, v, b, fmt::format("{} = {} > {}", name, format_double(v), format_double(b.hi))});
    }
  }
  return out;
}

void require_valid(const GaitGenome& genome) {
  auto violations = validate_genome(genome);
  if (!violations.empty()) throw BoundsError(std::move(violations));
}

GaitGenome clamp_to_bounds(const GaitGenome& genome) {
  GaitGenome out = genome;
  for (std::size_t i = 0; i < GaitGenome::kGeneCount; ++i) {
    const auto b = gene_bounds(i);
    if (gene_kind(i) == GeneKind::Period) {
      out[i] = genome[i] >= 1.5 ? 2.0 : 1.0;
    } else {
      out[i] = std::clamp(genome[i], b.lo, b.hi);
    }
  }
  return out;
}

double gamma(double amplitude, int period_multiplier, double time, double phase,
             double vertical_shift, double omega) {
  return amplitude * std::cos(period_multiplier * omega * time + phase) + vertical_shift;
}

double coxa_phase(int leg) {
  switch (leg) {
    case kFrontLeft:
    case kRearLeft:
    case kMiddleRight: return 0.0;
    default: return kPi;
  }
}

double coxa_angle(double time, int leg, const GaitClock& clock) {
  return clock.coxa_amplitude * std::cos(clock.omega * time + coxa_phase(leg));
}

GaitController::GaitController(const GaitGenome& genome, const GaitClock& clock)
    : genome_(genome), clock_(clock) {
  require_valid(genome);
  for (int p = 0; p < 3; ++p) {
    for (int j = 0; j < 2; ++j) {
      waves_[p][j] = genome.joint(static_cast<LegPair>(p), static_cast<Joint>(j));
    }
  }
}

LegCommands GaitController::commands(double time) const {
  LegCommands out{};
  const double half_cycle = kPi / clock_.omega;
  for (int leg = 0; leg < kLegCount; ++leg) {
    const double t = is_right(leg) ? time + half_cycle : time;
    const auto& w = waves_[leg % 3];
    out[leg].leg = leg;
    out[leg].coxa = coxa_angle(time, leg, clock_);
    out[leg].femur = gamma(w[0].amplitude, w[0].period_multiplier, t, w[0].phase,
                           w[0].vertical_shift, clock_.omega);
    out[leg].tibia = gamma(w[1].amplitude, w[1].period_multiplier, t, w[1].phase,
                           w[1].vertical_shift, clock_.omega);
  }
  return out;
}

LegCommands joint_commands(const GaitGenome& genome, double time, const GaitClock& clock) {
  return GaitController(genome, clock).commands(time);
}

std::string format_genome(const GaitGenome& genome) {
  std::string out;
  for (std::size_t i = 0; i < GaitGenome::kGeneCount; ++i) {
    if (i) out += ' ';
    out += format_double(genome[i]);
  }
  return out;
}

GaitGenome parse_genome(std::string_view text) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != GaitGenome::kGeneCount) {
      throw ParseError(fmt::format("genome record has {} values, expected {}", fields.size(),
                                   GaitGenome::kGeneCount));
    }
    GaitGenome genome;
    for (std::size_t i = 0; i < GaitGenome::kGeneCount; ++i) {
      genome[i] = parse_double(fields[i], fmt::format("gene {} ({})", i, gene_name(i)));
    }
    require_valid(genome);
    return genome;
  }
  throw ParseError("genome record missing: no non-comment line found");
}

GaitGenome default_seed_genome() {
  // Tripod-aligned: the middle pair runs half a cycle off the front and
  // rear pairs. Femur and tibia shifts keep the feet close enough to the
  // body that each tripod's support triangle contains the center of mass
  // over the whole stroke.
  GaitGenome g;
  for (auto pair : {LegPair::Front, LegPair::Middle, LegPair::Rear}) {
    const double offset = pair == LegPair::Middle ? kPi : 0.0;
    g.set_joint(pair, Joint::Femur, {0.8, 1, 2.1 + offset, -0.3});
    g.set_joint(pair, Joint::Tibia, {0.4, 1, 2.4 + offset, -0.6});
  }
  return g;
}

}  // namespace hexagait::gait
