#include "hexagait/terrain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "hexagait/rng.hpp"
#include "hexagait/text_io.hpp"

namespace hexagait::terrain {

CourseLayout CourseLayout::flat() {
  CourseLayout layout;
  layout.max_step_height = 0.0;
  layout.beams = false;
  layout.incline = false;
  return layout;
}

std::vector<std::string> validate_layout(const CourseLayout& l) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, std::string msg) {
    if (!ok) errors.push_back(std::move(msg));
  };
  require(l.resolution > 0.0, "resolution must be > 0");
  require(l.width > 0.0 && l.length > 0.0, "width and length must be > 0");
  require(l.wall_thickness >= 0.0 && 2.0 * l.wall_thickness < l.width,
          "wall_thickness must be >= 0 and leave a gap between the walls");
  require(l.step_cell > 0.0, "step_cell must be > 0");
  require(l.max_step_height >= 0.0, "max_step_height must be >= 0");
  if (l.beams) {
    require(l.beam_size > 0.0, "beam_size must be > 0");
    require(l.beam_gap >= 0.0, "beam_gap must be >= 0");
    require(l.beam_1_start > 0.0, "beam_1_start must be > 0");
    require(l.beam_1_end() <= l.beam_2a_start, "beam_1 overlaps beam_2a");
    const double limit = l.incline ? l.incline_start : l.length;
    require(l.beam_2b_end() <= limit, "beam_2b extends past the incline start / course end");
  }
  if (l.incline) {
    require(l.incline_start > 0.0 && l.incline_start < l.length,
            "incline_start must lie inside the course");
    require(l.incline_angle_deg >= 0.0 && l.incline_angle_deg < 80.0,
            "incline_angle_deg must be in [0, 80)");
  }
  for (double v : {l.width, l.length, l.resolution, l.wall_thickness, l.step_cell,
                   l.max_step_height, l.beam_size, l.beam_1_start, l.beam_2a_start, l.beam_gap,
                   l.incline_start, l.incline_angle_deg}) {
    if (!std::isfinite(v)) {
      errors.emplace_back("layout values must be finite");
      break;
    }
  }
  return errors;
}

std::vector<SegmentSpan> segments(const CourseLayout& l) {
  std::vector<SegmentSpan> out;
  const double flat_end = l.incline ? l.incline_start : l.length;
  if (l.beams) {
    out.push_back({"step_field_1", 0.0, l.beam_1_start});
    out.push_back({"beam_1", l.beam_1_start, l.beam_1_end()});
    out.push_back({"step_field_2", l.beam_1_end(), l.beam_2a_start});
    out.push_back({"beam_2a", l.beam_2a_start, l.beam_2a_end()});
    out.push_back({"beam_gap", l.beam_2a_end(), l.beam_2b_start()});
    out.push_back({"beam_2b", l.beam_2b_start(), l.beam_2b_end()});
    if (l.beam_2b_end() < flat_end) out.push_back({"step_field_3", l.beam_2b_end(), flat_end});
  } else {
    out.push_back({"step_field_1", 0.0, flat_end});
  }
  if (l.incline) out.push_back({"incline", l.incline_start, l.length});
  return out;
}

HeightField::HeightField(double resolution, int length_cells, int width_cells,
                         std::uint64_t seed, std::vector<double> heights,
                         std::vector<std::uint8_t> walls)
    : resolution_(resolution),
      length_cells_(length_cells),
      width_cells_(width_cells),
      seed_(seed),
      heights_(std::move(heights)),
      walls_(std::move(walls)) {
  const auto n = static_cast<std::size_t>(length_cells) * static_cast<std::size_t>(width_cells);
  if (resolution <= 0.0 || length_cells <= 0 || width_cells <= 0 || heights_.size() != n ||
      walls_.size() != n) {
    throw LayoutError("height field dimensions inconsistent with data");
  }
}

HeightField build_course(std::uint64_t terrain_seed, const CourseLayout& layout) {
  if (auto errors = validate_layout(layout); !errors.empty()) {
    std::string msg = "invalid course layout:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw LayoutError(msg);
  }
  const double res = layout.resolution;
  const int nx = static_cast<int>(std::lround(layout.length / res));
  const int ny = static_cast<int>(std::lround(layout.width / res));
  const int wall_cells = static_cast<int>(std::lround(layout.wall_thickness / res));

  // One uniform draw per step block, row-major over blocks.
  const int bx = static_cast<int>(std::ceil(nx * res / layout.step_cell));
  const int by = static_cast<int>(std::ceil(ny * res / layout.step_cell));
  std::vector<double> blocks(static_cast<std::size_t>(bx) * by);
  Rng rng(terrain_seed);
  for (auto& b : blocks) b = rng.uniform(0.0, layout.max_step_height);

  const double slope = std::tan(layout.incline_angle_deg * std::numbers::pi / 180.0);
  auto in_beam = [&](double x) {
    if (!layout.beams) return false;
    for (double start : {layout.beam_1_start, layout.beam_2a_start, layout.beam_2b_start()}) {
      if (x >= start && x < start + layout.beam_size) return true;
    }
    return false;
  };

  std::vector<double> heights(static_cast<std::size_t>(nx) * ny);
  std::vector<std::uint8_t> walls(heights.size(), 0);
  for (int ix = 0; ix < nx; ++ix) {
    const double xc = (ix + 0.5) * res;
    const int block_x = std::min(bx - 1, static_cast<int>(xc / layout.step_cell));
    for (int iy = 0; iy < ny; ++iy) {
      const double yc = (iy + 0.5) * res;
      const int block_y = std::min(by - 1, static_cast<int>(yc / layout.step_cell));
      double h = blocks[static_cast<std::size_t>(block_x) * by + block_y];
      if (in_beam(xc)) h = layout.beam_size;
      if (layout.incline && xc >= layout.incline_start) h = slope * (xc - layout.incline_start);
      const auto k = static_cast<std::size_t>(ix) * ny + iy;
      heights[k] = h;
      walls[k] = (iy < wall_cells || iy >= ny - wall_cells) ? 1 : 0;
    }
  }
  return HeightField(res, nx, ny, terrain_seed, std::move(heights), std::move(walls));
}

HeightSample height_at(const HeightField& field, double x, double y) {
  if (!(x >= 0.0 && x < field.length() && y >= 0.0 && y < field.width())) {
    return {SampleKind::OutOfBounds, 0.0};
  }
  const int ix = std::min(field.length_cells() - 1, static_cast<int>(x / field.resolution()));
  const int iy = std::min(field.width_cells() - 1, static_cast<int>(y / field.resolution()));
  return {field.is_wall(ix, iy) ? SampleKind::Wall : SampleKind::Surface,
          field.cell_height(ix, iy)};
}

namespace {

int clamp_cell(double coord, double res, int n) {
  if (!(coord > 0.0)) return 0;
  return std::min(n - 1, static_cast<int>(coord / res));
}

}  // namespace

double ground_height(const HeightField& field, double x, double y) {
  if (x < 0.0) return 0.0;
  const int ix = clamp_cell(x, field.resolution(), field.length_cells());
  const int iy = clamp_cell(y, field.resolution(), field.width_cells());
  return field.cell_height(ix, iy);
}

bool wall_at(const HeightField& field, double x, double y) {
  if (y < 0.0 || y >= field.width()) return true;
  const int ix = clamp_cell(x, field.resolution(), field.length_cells());
  const int iy = clamp_cell(y, field.resolution(), field.width_cells());
  return field.is_wall(ix, iy);
}

std::string export_course(const HeightField& field) {
  std::string out;
  out += "hexagait-course 1\n";
  out += "footprint " + format_double(field.width()) + " " + format_double(field.length()) + "\n";
  out += "resolution " + format_double(field.resolution()) + "\n";
  out += fmt::format("length_cells {}\nwidth_cells {}\nseed {}\n", field.length_cells(),
                     field.width_cells(), field.seed());
  out += "heights\n";
  for (int ix = 0; ix < field.length_cells(); ++ix) {
    for (int iy = 0; iy < field.width_cells(); ++iy) {
      if (iy) out += ' ';
      out += format_double(field.cell_height(ix, iy));
    }
    out += '\n';
  }
  out += "walls\n";
  for (int ix = 0; ix < field.length_cells(); ++ix) {
    for (int iy = 0; iy < field.width_cells(); ++iy) out += field.is_wall(ix, iy) ? '1' : '0';
    out += '\n';
  }
  out += "end\n";
  return out;
}

HeightField import_course(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split_fields(text, '\n')) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  std::size_t i = 0;
  auto next = [&](std::string_view what) {
    if (i >= lines.size()) throw ParseError(fmt::format("course file truncated: missing {}", what));
    return lines[i++];
  };
  auto keyed = [&](std::string_view key) {
    const auto f = split_whitespace(next(key));
    if (f.size() != 2 || f[0] != key) throw ParseError(fmt::format("course file: expected '{} <value>'", key));
    return f[1];
  };
  if (next("magic") != "hexagait-course 1") throw ParseError("course file: bad magic line");
  const auto footprint = split_whitespace(next("footprint"));
  if (footprint.size() != 3 || footprint[0] != "footprint") {
    throw ParseError("course file: expected 'footprint <width> <length>'");
  }
  const double width_m = parse_double(footprint[1], "footprint width");
  const double length_m = parse_double(footprint[2], "footprint length");
  const double res = parse_double(keyed("resolution"), "resolution");
  const auto nx = parse_int(keyed("length_cells"), "length_cells");
  const auto ny = parse_int(keyed("width_cells"), "width_cells");
  const auto seed_text = keyed("seed");
  std::uint64_t seed = 0;
  if (auto r = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), seed);
      r.ec != std::errc{} || r.ptr != seed_text.data() + seed_text.size()) {
    throw ParseError("seed: expected an unsigned integer");
  }
  if (res <= 0.0 || nx <= 0 || ny <= 0 || nx > 1'000'000 || ny > 1'000'000) {
    throw ParseError("course file: invalid dimensions");
  }
  if (std::abs(width_m - ny * res) > res / 2 || std::abs(length_m - nx * res) > res / 2) {
    throw ParseError("course file: footprint disagrees with the cell counts");
  }
  if (next("heights") != "heights") throw ParseError("course file: expected 'heights'");
  std::vector<double> heights;
  heights.reserve(static_cast<std::size_t>(nx * ny));
  for (long long ix = 0; ix < nx; ++ix) {
    const auto f = split_whitespace(next("height row"));
    if (static_cast<long long>(f.size()) != ny) {
      throw ParseError(fmt::format("course file: height row {} has {} values, expected {}", ix,
                                   f.size(), ny));
    }
    for (auto v : f) heights.push_back(parse_double(v, fmt::format("height row {}", ix)));
  }
  if (next("walls") != "walls") throw ParseError("course file: expected 'walls'");
  std::vector<std::uint8_t> walls;
  walls.reserve(heights.size());
  for (long long ix = 0; ix < nx; ++ix) {
    const auto row = next("wall row");
    if (static_cast<long long>(row.size()) != ny) {
      throw ParseError(fmt::format("course file: wall row {} has wrong length", ix));
    }
    for (char c : row) {
      if (c != '0' && c != '1') throw ParseError(fmt::format("course file: wall row {} has '{}'", ix, c));
      walls.push_back(c == '1' ? 1 : 0);
    }
  }
  if (next("end") != "end") throw ParseError("course file: expected 'end'");
  return HeightField(res, static_cast<int>(nx), static_cast<int>(ny), seed, std::move(heights),
                     std::move(walls));
}

}  // namespace hexagait::terrain
