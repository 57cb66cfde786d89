#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hexagait::terrain {

class LayoutError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Course geometry. x runs along the course (0 = start line), y across it
/// (0 = right wall edge). Lengths in meters.
struct CourseLayout {
  double width = 3.0;
  double length = 8.2;
  double resolution = 0.02;
  double wall_thickness = 0.04;

  double step_cell = 0.15;  // side of each constant-height step block
  double max_step_height = 0.076;

  bool beams = true;
  double beam_size = 0.114;  // square cross-section
  double beam_1_start = 3.0;
  double beam_2a_start = 4.75;
  double beam_gap = 0.35;  // clear gap between the dual beams

  bool incline = true;  // smooth ramp rising from 0 at incline_start
  double incline_start = 5.7;
  double incline_angle_deg = 45.0;

  double beam_1_end() const { return beam_1_start + beam_size; }
  double beam_2a_end() const { return beam_2a_start + beam_size; }
  double beam_2b_start() const { return beam_2a_end() + beam_gap; }
  double beam_2b_end() const { return beam_2b_start() + beam_size; }
  double incline_end() const { return length; }

  /// No steps, no beams, no incline.
  static CourseLayout flat();

  friend bool operator==(const CourseLayout&, const CourseLayout&) = default;
};

/// Empty when valid; otherwise one message per problem.
std::vector<std::string> validate_layout(const CourseLayout& layout);

struct SegmentSpan {
  std::string name;
  double start;
  double end;
};

/// Course segments in order; they tile [0, length] without overlap.
std::vector<SegmentSpan> segments(const CourseLayout& layout);

/// Immutable terrain grid. Cell (ix, iy) covers
/// [ix*res, (ix+1)*res) x [iy*res, (iy+1)*res).
class HeightField {
 public:
  HeightField(double resolution, int length_cells, int width_cells, std::uint64_t seed,
              std::vector<double> heights, std::vector<std::uint8_t> walls);

  double resolution() const { return resolution_; }
  int length_cells() const { return length_cells_; }
  int width_cells() const { return width_cells_; }
  std::uint64_t seed() const { return seed_; }
  double length() const { return length_cells_ * resolution_; }
  double width() const { return width_cells_ * resolution_; }

  double cell_height(int ix, int iy) const { return heights_[index(ix, iy)]; }
  bool is_wall(int ix, int iy) const { return walls_[index(ix, iy)] != 0; }
  double cell_center_x(int ix) const { return (ix + 0.5) * resolution_; }
  double cell_center_y(int iy) const { return (iy + 0.5) * resolution_; }

  std::span<const double> heights() const { return heights_; }
  std::span<const std::uint8_t> walls() const { return walls_; }

  friend bool operator==(const HeightField&, const HeightField&) = default;

 private:
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * width_cells_ + iy;
  }

  double resolution_;
  int length_cells_;
  int width_cells_;
  std::uint64_t seed_;
  std::vector<double> heights_;
  std::vector<std::uint8_t> walls_;
};

HeightField build_course(std::uint64_t terrain_seed, const CourseLayout& layout);

enum class SampleKind { Surface, Wall, OutOfBounds };

struct HeightSample {
  SampleKind kind;
  double height;  // cell height for Surface and Wall, 0 for OutOfBounds
};

/// Nearest-cell lookup. Points past either course end (or outside the
/// width) are OutOfBounds; wall cells report Wall.
HeightSample height_at(const HeightField& field, double x, double y);

/// Total ground height used by the simulator: behind the start line the
/// floor is flat at 0; past the far end the last row continues; y is
/// clamped to the course. Wall cells return their floor height.
double ground_height(const HeightField& field, double x, double y);
bool wall_at(const HeightField& field, double x, double y);

/// Portable text grid: magic, `footprint <width> <length>` in meters,
/// resolution, cell counts and seed lines, then `heights` (one row per x cell,
/// values across y), then `walls` (one 0/1 string per x cell).
std::string export_course(const HeightField& field);
HeightField import_course(std::string_view text);

}  // namespace hexagait::terrain
