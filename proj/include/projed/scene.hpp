#pragma once

// Layout of normal forms into positioned primitives, hit testing, and the SVG
// and character-grid renderers.
//
// Metrics are fixed so renders are reproducible: monospace advance 0.6 x size,
// line height 1.2 x size, base size 12, font steps of 2 down to 6.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "projed/normal_form.hpp"

namespace projed {

inline constexpr int kBaseFontSize = 12;
inline constexpr int kFontStep = 2;
inline constexpr int kMinFontSize = 6;
inline constexpr double kHoleRadius = 6;
inline constexpr double kArrowLength = 8;
inline constexpr double kGridOrigin = 40;
inline constexpr double kGridCell = 100;
inline constexpr double kTreeGapX = 20;
inline constexpr double kTreeGapY = 30;
inline constexpr int kTextCellWidth = 7;
inline constexpr int kTextCellHeight = 14;

struct TextSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const TextSize&, const TextSize&) = default;
};

// Width counts code points.
TextSize measure_text(std::string_view s, int size);

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct BBox {
  double x = 0, y = 0, w = 0, h = 0;
  bool contains(double px, double py) const {
    return px >= x && px <= x + w && py >= y && py <= y + h;
  }
};

struct Primitive {
  enum class Kind { Text, Line, Box, Rectangle, Ellipse, Image, Polygon, Hole, Node };
  Kind kind = Kind::Text;
  BBox box;
  std::string text;          // Text run; Image file
  double font_size = 0;
  double stroke = 0;         // Line width, Box border
  bool fill = false;
  std::vector<Point> points; // Line endpoints (polyline), Polygon vertices
  std::optional<Identity> concrete;
  std::optional<Identity> abstract;
  Menu menu;
  bool selectable = false;
  bool editable = false;     // chars runs and text holes
};

std::string_view to_string(Primitive::Kind k);

struct LayoutCache {
  std::map<Identity, Point> positions;
  std::map<Identity, std::vector<Point>> waypoints;
};

struct Viewport {
  int width = 800;
  int height = 600;
};

struct LayoutOptions {
  Viewport viewport;
  // Menu offered at a hole. Without it holes carry no menu.
  std::function<Menu(const Term& hole)> hole_menu;
};

struct Scene {
  std::vector<Primitive> primitives;
  double width = 0;
  double height = 0;
  // Where each graph node (outside thumbnails) ended up in this layout,
  // relative to its graph; the session folds these back into its cache.
  std::map<Identity, Point> placements;
  // Graphs drawn at full size, in draw order.
  std::vector<std::shared_ptr<const GraphNF>> graphs;
};

Scene layout(const NF& nf, const LayoutCache& cache, const LayoutOptions& options);
Scene layout(const NF& nf, const LayoutCache& cache = {}, Viewport viewport = {});

struct Hit {
  std::size_t index = 0;
  std::optional<Identity> concrete;
  std::optional<Identity> abstract;
};
// Topmost (last drawn) selectable primitive containing the point.
std::optional<Hit> hit_test(const Scene& scene, double x, double y);

std::string render_svg(const Scene& scene);
std::string render_text(const Scene& scene);

// Shortest decimal text with at most two fractional digits: 3, 2.5, 0.33.
std::string format_number(double v);

}  // namespace projed
