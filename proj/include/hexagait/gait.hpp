#pragma once

#include <array>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hexagait::gait {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kAmplitudeMax = 1.7;
inline constexpr double kShiftMin = -1.0;
inline constexpr double kShiftMax = 1.0;
inline constexpr double kPhaseMax = kTwoPi;

enum class LegPair { Front = 0, Middle = 1, Rear = 2 };
enum class Joint { Femur = 0, Tibia = 1 };

/// Legs in the order used everywhere: left side front-to-rear, then right.
enum Leg : int {
  kFrontLeft = 0,
  kMiddleLeft = 1,
  kRearLeft = 2,
  kFrontRight = 3,
  kMiddleRight = 4,
  kRearRight = 5,
};
inline constexpr int kLegCount = 6;

constexpr bool is_right(int leg) { return leg >= 3; }
constexpr LegPair pair_of(int leg) { return static_cast<LegPair>(leg % 3); }

/// Parameters of one joint's wave: amplitude * cos(p * w0 * t + phase) + shift.
struct JointWaveParams {
  double amplitude = 0.0;
  int period_multiplier = 1;
  double phase = 0.0;
  double vertical_shift = 0.0;
};

/// Shared clock settings: base gait angular frequency and coxa amplitude.
struct GaitClock {
  double omega = kPi;  // one gait cycle per 2 s
  double coxa_amplitude = 0.7;

  friend bool operator==(const GaitClock&, const GaitClock&) = default;
};

enum class GeneKind { Phase, Amplitude, Shift, Period };

struct GeneBounds {
  double lo;
  double hi;
};

/// The 24-gene genome. Flat layout (also the text-record column order):
///   [0..17]  per pair (front, middle, rear), per joint (femur, tibia):
///            phase, range (amplitude), vertical shift
///   [18..23] period multipliers: front femur, front tibia, middle femur,
///            middle tibia, rear femur, rear tibia
class GaitGenome {
 public:
  static constexpr std::size_t kGeneCount = 24;
  using Genes = std::array<double, kGeneCount>;

  /// Zero amplitudes/phases/shifts, all periods 1.
  GaitGenome();
  explicit GaitGenome(const Genes& genes) : genes_(genes) {}

  static std::size_t phase_index(LegPair pair, Joint joint);
  static std::size_t amplitude_index(LegPair pair, Joint joint);
  static std::size_t shift_index(LegPair pair, Joint joint);
  static std::size_t period_index(LegPair pair, Joint joint);

  JointWaveParams joint(LegPair pair, Joint joint) const;
  void set_joint(LegPair pair, Joint joint, const JointWaveParams& params);

  const Genes& genes() const { return genes_; }
  Genes& genes() { return genes_; }
  double operator[](std::size_t i) const { return genes_[i]; }
  double& operator[](std::size_t i) { return genes_[i]; }

  friend bool operator==(const GaitGenome&, const GaitGenome&) = default;

 private:
  Genes genes_;
};

GeneKind gene_kind(std::size_t index);
GeneBounds gene_bounds(std::size_t index);
/// Human-readable gene name, e.g. "front tibia range".
std::string gene_name(std::size_t index);
/// Width of the gene's legal range (2*pi for phases).
double gene_range_width(std::size_t index);

struct BoundsViolation {
  std::size_t gene;
  double value;
  GeneBounds bounds;
  std::string message;
};

/// Raised when a genome violates its bounds; lists every violation.
class BoundsError : public std::invalid_argument {
 public:
  explicit BoundsError(std::vector<BoundsViolation> violations);
  const std::vector<BoundsViolation>& violations() const { return violations_; }

 private:
  std::vector<BoundsViolation> violations_;
};

/// Every out-of-bounds (or non-finite) gene with its bound. Empty means ok.
std::vector<BoundsViolation> validate_genome(const GaitGenome& genome);
void require_valid(const GaitGenome& genome);

/// Clamps continuous genes into bounds and snaps periods to {1, 2}.
GaitGenome clamp_to_bounds(const GaitGenome& genome);

/// amplitude * cos(p * omega * t + phase) + shift
double gamma(double amplitude, int period_multiplier, double time, double phase,
             double vertical_shift, double omega = GaitClock{}.omega);

/// Tripod coxa schedule: front/rear of one side with the opposite middle
/// share phase 0; the complementary tripod runs at phase pi.
double coxa_phase(int leg);
double coxa_angle(double time, int leg, const GaitClock& clock = {});

struct JointCommand {
  int leg = 0;
  double coxa = 0.0;
  double femur = 0.0;
  double tibia = 0.0;
};
using LegCommands = std::array<JointCommand, kLegCount>;

/// Validated genome bound to a clock; evaluates joint commands cheaply.
/// Right-side legs replay the left-side waves half a gait cycle later.
class GaitController {
 public:
  GaitController(const GaitGenome& genome, const GaitClock& clock);

  LegCommands commands(double time) const;
  const GaitGenome& genome() const { return genome_; }
  const GaitClock& clock() const { return clock_; }

 private:
  GaitGenome genome_;
  GaitClock clock_;
  std::array<std::array<JointWaveParams, 2>, 3> waves_{};
};

LegCommands joint_commands(const GaitGenome& genome, double time,
                           const GaitClock& clock = {});

/// One whitespace-separated line of 24 values in flat gene order.
std::string format_genome(const GaitGenome& genome);
/// Parses the first non-comment line ('#' starts a comment). Throws
/// ParseError naming the offending gene, or BoundsError.
GaitGenome parse_genome(std::string_view text);

/// The repository's hand-tuned seed gait (femur range 0.8, tibia range 0.4).
GaitGenome default_seed_genome();

}  // namespace hexagait::gait
