#include "projed/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace projed {

TextSize measure_text(std::string_view s, int size) {
  // Integer arithmetic keeps the half-up rounding exact: 0.6 = 6/10, 1.2 = 12/10.
  long long n = static_cast<long long>(utf8_decode(s).size());
  return {static_cast<int>((6 * n * size + 5) / 10), static_cast<int>((12LL * size + 5) / 10)};
}

std::string_view to_string(Primitive::Kind k) {
  switch (k) {
    case Primitive::Kind::Text: return "text";
    case Primitive::Kind::Line: return "line";
    case Primitive::Kind::Box: return "box";
    case Primitive::Kind::Rectangle: return "rectangle";
    case Primitive::Kind::Ellipse: return "ellipse";
    case Primitive::Kind::Image: return "image";
    case Primitive::Kind::Polygon: return "polygon";
    case Primitive::Kind::Hole: return "hole";
    case Primitive::Kind::Node: return "node";
  }
  return "text";
}

std::string format_number(double v) {
  double r = std::round(v * 100) / 100;
  if (r == 0) r = 0;  // no "-0"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, r, std::chars_format::fixed, 2);
  std::string s(buf, res.ptr);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

namespace {

struct Block {
  std::vector<Primitive> prims;
  double w = 0;
  double h = 0;
};

void translate(std::vector<Primitive>& prims, double dx, double dy) {
  for (auto& p : prims) {
    p.box.x += dx;
    p.box.y += dy;
    for (auto& pt : p.points) {
      pt.x += dx;
      pt.y += dy;
    }
  }
}

void append(std::vector<Primitive>& out, std::vector<Primitive>&& more, double dx, double dy) {
  translate(more, dx, dy);
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

struct Flow {
  double x = 0;
  double y = 0;
  double line_h = 0;
  double margin = 0;
  double max_x = 0;
  double max_y = 0;
  std::vector<Primitive>* out = nullptr;

  void take(double w, double h) {
    x += w;
    line_h = std::max(line_h, h);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y + h);
  }
};

bool is_inline(NF::Kind k) {
  switch (k) {
    case NF::Kind::NewLine:
    case NF::Kind::Text:
    case NF::Kind::Font:
    case NF::Kind::Seq:
    case NF::Kind::Tab:
    case NF::Kind::Indent:
    case NF::Kind::Underline:
    case NF::Kind::Chars:
    case NF::Kind::Hole:
      return true;
    default:
      return false;
  }
}

class Layouter {
 public:
  Layouter(const LayoutCache& cache, const LayoutOptions& options, Scene& scene)
      : cache_(cache), options_(options), scene_(scene) {}

  Block block(const NF& nf, int size) {
    if (is_inline(nf.kind)) {
      Block b;
      Flow f;
      f.out = &b.prims;
      flow(nf, size, f);
      b.w = f.max_x;
      b.h = f.max_y;
      return b;
    }
    switch (nf.kind) {
      case NF::Kind::Box: return box(nf, size);
      case NF::Kind::Ellipse:
      case NF::Kind::Rectangle: return shape(nf);
      case NF::Kind::Image: return image(nf);
      case NF::Kind::Thumbnail: return thumbnail(nf, size);
      case NF::Kind::Tree: return tree(nf, size);
      case NF::Kind::Graph: return graph(nf, size);
      default: return {};
    }
  }

 private:
  void flow(const NF& nf, int size, Flow& f) {
    switch (nf.kind) {
      case NF::Kind::Text:
        text_run(nf.text, size, f, std::nullopt, false);
        return;
      case NF::Kind::Chars: {
        // Editing a chars run over a text hole edits the hole itself.
        std::optional<Identity> id = nf.hole ? std::optional<Identity>(nf.hole->hole().id) : nf.id;
        text_run(nf.text, size, f, id, true);
        if (nf.hole) f.out->back().abstract = id;
        return;
      }
      case NF::Kind::NewLine:
        f.y += f.line_h > 0 ? f.line_h : measure_text("", size).height;
        f.x = f.margin;
        f.line_h = 0;
        f.max_y = std::max(f.max_y, f.y);
        return;
      case NF::Kind::Font: {
        int next = std::max(kMinFontSize, size + nf.amount * kFontStep);
        flow(nf.children.front(), next, f);
        return;
      }
      case NF::Kind::Seq:
        for (const auto& c : nf.children) flow(c, size, f);
        return;
      case NF::Kind::Tab: {
        double saved = f.margin;
        f.margin = f.x;
        for (const auto& c : nf.children) flow(c, size, f);
        f.margin = saved;
        return;
      }
      case NF::Kind::Indent:
        f.margin += nf.amount;
        flow(nf.children.front(), size, f);
        f.margin -= nf.amount;
        return;
      case NF::Kind::Underline: {
        std::size_t from = f.out->size();
        flow(nf.children.front(), size, f);
        std::vector<Primitive> lines;
        for (std::size_t i = from; i < f.out->size(); ++i) {
          const Primitive& p = (*f.out)[i];
          if (p.kind != Primitive::Kind::Text || p.box.w <= 0) continue;
          Primitive line;
          line.kind = Primitive::Kind::Line;
          double y = p.box.y + p.box.h - 1;
          line.box = {p.box.x, y, p.box.w, 0};
          line.points = {{p.box.x, y}, {p.box.x + p.box.w, y}};
          line.stroke = 1;
          lines.push_back(std::move(line));
        }
        f.out->insert(f.out->end(), lines.begin(), lines.end());
        return;
      }
      case NF::Kind::Hole:
        hole(nf, size, f);
        return;
      default: {
        Block b = block(nf, size);
        append(*f.out, std::move(b.prims), f.x, f.y);
        f.take(b.w, b.h);
        return;
      }
    }
  }

  void text_run(const std::string& s, int size, Flow& f, std::optional<Identity> id, bool editable) {
    TextSize m = measure_text(s, size);
    Primitive p;
    p.kind = Primitive::Kind::Text;
    // Editable runs keep at least one cell so they stay clickable when empty.
    double w = editable ? std::max(m.width, measure_text("x", size).width) : m.width;
    p.box = {f.x, f.y, w, static_cast<double>(m.height)};
    p.text = s;
    p.font_size = size;
    p.concrete = std::move(id);
    p.editable = editable;
    p.selectable = editable && p.concrete.has_value();
    f.out->push_back(std::move(p));
    f.take(w, m.height);
  }

  void hole(const NF& nf, int size, Flow& f) {
    const Hole& h = nf.hole->hole();
    if (h.kind == HoleKind::Text && !h.text.empty()) {
      text_run(h.text, size, f, h.id, true);
      f.out->back().abstract = h.id;
      return;
    }
    Primitive p;
    p.kind = Primitive::Kind::Hole;
    p.box = {f.x, f.y, 2 * kHoleRadius, 2 * kHoleRadius};
    p.concrete = h.id;
    p.abstract = h.id;
    p.selectable = true;
    p.editable = h.kind == HoleKind::Text;
    p.fill = true;
    if (options_.hole_menu) p.menu = options_.hole_menu(*nf.hole);
    f.out->push_back(std::move(p));
    f.take(2 * kHoleRadius, 2 * kHoleRadius);
  }

  Block box(const NF& nf, int size) {
    double pad = 2 + nf.border.value_or(0);
    std::vector<Block> items;
    double max_w = 0, max_h = 0, sum_w = 0, sum_h = 0;
    for (const auto& c : nf.children) {
      items.push_back(block(c, size));
      max_w = std::max(max_w, items.back().w);
      max_h = std::max(max_h, items.back().h);
      sum_w += items.back().w;
      sum_h += items.back().h;
    }
    Block out;
    switch (nf.box) {
      case BoxKind::HBox:
        out.w = 2 * pad + sum_w;
        out.h = 2 * pad + max_h;
        break;
      case BoxKind::VBox:
        out.w = 2 * pad + max_w;
        out.h = 2 * pad + sum_h;
        break;
      case BoxKind::Box:
        out.w = 2 * pad + max_w;
        out.h = 2 * pad + max_h;
        break;
    }
    Primitive frame;
    frame.kind = Primitive::Kind::Box;
    frame.box = {0, 0, out.w, out.h};
    frame.stroke = nf.border.value_or(0);
    frame.concrete = nf.id;
    frame.menu = nf.menu;
    frame.selectable = nf.id.has_value();
    out.prims.push_back(std::move(frame));

    double cursor = pad;
    for (std::size_t i = 0; i < items.size(); ++i) {
      Block& b = items[i];
      Position pos = nf.positions[i];
      double x = pad, y = pad;
      switch (nf.box) {
        case BoxKind::HBox:
          x = cursor;
          cursor += b.w;
          if (pos == Position::Centre) y = (out.h - b.h) / 2;
          if (pos == Position::Bot) y = out.h - pad - b.h;
          break;
        case BoxKind::VBox:
          y = cursor;
          cursor += b.h;
          if (pos == Position::Centre) x = (out.w - b.w) / 2;
          if (pos == Position::Right) x = out.w - pad - b.w;
          break;
        case BoxKind::Box:
          if (pos == Position::Right) x = out.w - pad - b.w;
          if (pos == Position::Bot) y = out.h - pad - b.h;
          if (pos == Position::Centre) {
            x = (out.w - b.w) / 2;
            y = (out.h - b.h) / 2;
          }
          break;
      }
      append(out.prims, std::move(b.prims), x, y);
    }
    return out;
  }

  Block shape(const NF& nf) {
    Primitive p;
    p.kind = nf.kind == NF::Kind::Ellipse ? Primitive::Kind::Ellipse : Primitive::Kind::Rectangle;
    p.box = {static_cast<double>(nf.x), static_cast<double>(nf.y), static_cast<double>(nf.w),
             static_cast<double>(nf.h)};
    p.fill = nf.fill;
    p.stroke = 1;
    p.concrete = nf.id;
    p.selectable = nf.selectable;
    Block b;
    b.w = nf.x + nf.w;
    b.h = nf.y + nf.h;
    b.prims.push_back(std::move(p));
    return b;
  }

  Block image(const NF& nf) {
    Primitive p;
    p.kind = Primitive::Kind::Image;
    p.box = {0, 0, static_cast<double>(nf.w), static_cast<double>(nf.h)};
    p.text = nf.text;
    p.concrete = nf.id;
    Block b;
    b.w = nf.w;
    b.h = nf.h;
    b.prims.push_back(std::move(p));
    return b;
  }

  Block thumbnail(const NF& nf, int size) {
    Block out;
    out.w = nf.x + nf.w;
    out.h = nf.y + nf.h;
    if (nf.children.empty()) return out;
    ++thumbnail_depth_;
    Block body = block(nf.children.front(), size);
    --thumbnail_depth_;
    double s = 1;
    if (body.w > 0 && body.h > 0) s = std::min(nf.w / body.w, nf.h / body.h);
    for (auto& p : body.prims) {
      p.box = {p.box.x * s, p.box.y * s, p.box.w * s, p.box.h * s};
      for (auto& pt : p.points) pt = {pt.x * s, pt.y * s};
      p.font_size *= s;
      p.stroke *= s;
      p.selectable = false;
      p.menu.clear();
    }
    append(out.prims, std::move(body.prims), nf.x, nf.y);
    return out;
  }

  Block tree(const NF& nf, int size) {
    Block root = block(nf.children.front(), size);
    std::vector<Block> kids;
    double row = 0, row_h = 0;
    for (std::size_t i = 1; i < nf.children.size(); ++i) {
      kids.push_back(block(nf.children[i], size));
      row += kids.back().w;
      row_h = std::max(row_h, kids.back().h);
    }
    if (kids.size() > 1) row += kTreeGapX * static_cast<double>(kids.size() - 1);
    Block out;
    out.w = std::max(root.w, row);
    out.h = root.h + (kids.empty() ? 0 : kTreeGapY + row_h);
    double rx = (out.w - root.w) / 2;
    Point from{rx + root.w / 2, root.h};
    append(out.prims, std::move(root.prims), rx, 0);
    double x = (out.w - row) / 2;
    double y = from.y + kTreeGapY;
    for (auto& k : kids) {
      Primitive line;
      line.kind = Primitive::Kind::Line;
      Point to{x + k.w / 2, y};
      line.points = {from, to};
      line.box = {std::min(from.x, to.x), from.y, std::abs(to.x - from.x), to.y - from.y};
      line.stroke = 1;
      out.prims.push_back(std::move(line));
      append(out.prims, std::move(k.prims), x, y);
      x += k.w + kTreeGapX;
    }
    return out;
  }

  struct PlacedNode {
    const GraphNode* node;
    BBox box;
  };

  static Point clip(const BBox& b, Point towards) {
    Point c{b.x + b.w / 2, b.y + b.h / 2};
    double dx = towards.x - c.x, dy = towards.y - c.y;
    if (dx == 0 && dy == 0) return c;
    double t = 1;
    if (dx != 0) t = std::min(t, (b.w / 2) / std::abs(dx));
    if (dy != 0) t = std::min(t, (b.h / 2) / std::abs(dy));
    return {c.x + dx * t, c.y + dy * t};
  }

  static Primitive arrowhead(Point tip, Point from) {
    double dx = tip.x - from.x, dy = tip.y - from.y;
    double len = std::hypot(dx, dy);
    Primitive p;
    p.kind = Primitive::Kind::Polygon;
    p.fill = true;
    if (len == 0) return p;
    double ux = dx / len, uy = dy / len;
    double bx = tip.x - kArrowLength * ux, by = tip.y - kArrowLength * uy;
    double hw = kArrowLength / 2;
    p.points = {tip, {bx - hw * uy, by + hw * ux}, {bx + hw * uy, by - hw * ux}};
    double x0 = tip.x, y0 = tip.y, x1 = tip.x, y1 = tip.y;
    for (const auto& pt : p.points) {
      x0 = std::min(x0, pt.x);
      y0 = std::min(y0, pt.y);
      x1 = std::max(x1, pt.x);
      y1 = std::max(y1, pt.y);
    }
    p.box = {x0, y0, x1 - x0, y1 - y0};
    return p;
  }

  Block graph(const NF& nf, int size) {
    const GraphNF& g = *nf.graph;
    bool full = thumbnail_depth_ == 0;
    if (full) scene_.graphs.push_back(nf.graph);

    std::vector<Block> displays;
    for (const auto& n : g.nodes) displays.push_back(block(n.display, size));

    std::vector<std::optional<Point>> where(g.nodes.size());
    std::set<std::pair<long long, long long>> occupied;
    auto cell_of = [](Point p) {
      return std::make_pair(static_cast<long long>(std::floor((p.x - kGridOrigin) / kGridCell)),
                            static_cast<long long>(std::floor((p.y - kGridOrigin) / kGridCell)));
    };
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const auto& id = g.nodes[i].id;
      if (!id) continue;
      if (auto it = cache_.positions.find(*id); it != cache_.positions.end()) {
        where[i] = it->second;
        occupied.insert(cell_of(it->second));
      }
    }
    long long columns = std::max<long long>(
        1, static_cast<long long>((options_.viewport.width - kGridOrigin) / kGridCell));
    long long next = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (where[i]) continue;
      while (occupied.count({next % columns, next / columns})) ++next;
      Point p{kGridOrigin + kGridCell * static_cast<double>(next % columns),
              kGridOrigin + kGridCell * static_cast<double>(next / columns)};
      occupied.insert({next % columns, next / columns});
      where[i] = p;
    }

    Block out;
    std::vector<PlacedNode> placed;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const GraphNode& n = g.nodes[i];
      Point p = *where[i];
      Block& d = displays[i];
      Primitive node;
      node.kind = Primitive::Kind::Node;
      node.box = {p.x, p.y, d.w, d.h};
      node.concrete = n.id;
      node.abstract = n.abstract_id;
      node.selectable = full && n.id.has_value();
      out.prims.push_back(node);
      for (auto& prim : d.prims) {
        if (!prim.abstract) prim.abstract = n.abstract_id;
      }
      append(out.prims, std::move(d.prims), p.x, p.y);
      placed.push_back({&n, node.box});
      out.w = std::max(out.w, p.x + d.w);
      out.h = std::max(out.h, p.y + d.h);
      if (full && n.id) scene_.placements.insert_or_assign(*n.id, p);
    }

    auto find_node = [&](const std::optional<Identity>& abstract) -> const PlacedNode* {
      if (!abstract) return nullptr;
      for (const auto& pn : placed) {
        if (pn.node->abstract_id == abstract) return &pn;
      }
      return nullptr;
    };

    for (const auto& e : g.edges) {
      const PlacedNode* s = find_node(e.source);
      const PlacedNode* t = find_node(e.target);
      if (!s || !t) continue;
      std::vector<Point> via;
      if (e.id) {
        if (auto it = cache_.waypoints.find(*e.id); it != cache_.waypoints.end()) via = it->second;
      }
      Point sc{s->box.x + s->box.w / 2, s->box.y + s->box.h / 2};
      Point tc{t->box.x + t->box.w / 2, t->box.y + t->box.h / 2};
      Point start = clip(s->box, via.empty() ? tc : via.front());
      Point end = clip(t->box, via.empty() ? sc : via.back());
      Primitive line;
      line.kind = Primitive::Kind::Line;
      line.points.push_back(start);
      line.points.insert(line.points.end(), via.begin(), via.end());
      line.points.push_back(end);
      double x0 = start.x, y0 = start.y, x1 = start.x, y1 = start.y;
      for (const auto& pt : line.points) {
        x0 = std::min(x0, pt.x);
        y0 = std::min(y0, pt.y);
        x1 = std::max(x1, pt.x);
        y1 = std::max(y1, pt.y);
      }
      line.box = {x0, y0, x1 - x0, y1 - y0};
      line.stroke = 1;
      line.concrete = e.id;
      line.abstract = e.id;
      Point before_end = line.points[line.points.size() - 2];
      Point after_start = line.points[1];
      out.prims.push_back(std::move(line));
      if (e.target_decoration == Decoration::Arrow) {
        out.prims.push_back(arrowhead(end, before_end));
        out.prims.back().concrete = e.id;
      }
      if (e.source_decoration == Decoration::Arrow) {
        out.prims.push_back(arrowhead(start, after_start));
        out.prims.back().concrete = e.id;
      }
      for (const auto& label : e.labels) {
        Point at = label.end == LabelEnd::Target ? end : start;
        Point other = label.end == LabelEnd::Target ? before_end : after_start;
        double dx = other.x - at.x, dy = other.y - at.y;
        double len = std::hypot(dx, dy);
        double back = std::min(20.0, len / 2);
        Point anchor = len > 0 ? Point{at.x + dx / len * back, at.y + dy / len * back} : at;
        Block b = block(label.display, size);
        for (auto& prim : b.prims) {
          if (!prim.concrete) prim.concrete = label.id;
          if (!prim.abstract) prim.abstract = e.id;
        }
        append(out.prims, std::move(b.prims), anchor.x + 4, anchor.y + 4);
        out.w = std::max(out.w, anchor.x + 4 + b.w);
        out.h = std::max(out.h, anchor.y + 4 + b.h);
      }
    }
    return out;
  }

  const LayoutCache& cache_;
  const LayoutOptions& options_;
  Scene& scene_;
  int thumbnail_depth_ = 0;
};

}  // namespace

Scene layout(const NF& nf, const LayoutCache& cache, const LayoutOptions& options) {
  Scene scene;
  Layouter l(cache, options, scene);
  Block b = l.block(nf, kBaseFontSize);
  scene.primitives = std::move(b.prims);
  double w = b.w, h = b.h;
  for (const auto& p : scene.primitives) {
    w = std::max(w, p.box.x + p.box.w);
    h = std::max(h, p.box.y + p.box.h);
  }
  scene.width = std::max<double>(options.viewport.width, std::ceil(w));
  scene.height = std::max<double>(options.viewport.height, std::ceil(h));
  return scene;
}

Scene layout(const NF& nf, const LayoutCache& cache, Viewport viewport) {
  LayoutOptions options;
  options.viewport = viewport;
  return layout(nf, cache, options);
}

std::optional<Hit> hit_test(const Scene& scene, double x, double y) {
  for (std::size_t i = scene.primitives.size(); i-- > 0;) {
    const Primitive& p = scene.primitives[i];
    if (p.selectable && p.box.contains(x, y)) return Hit{i, p.concrete, p.abstract};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string id_attr(const Primitive& p) {
  if (!p.concrete) return "";
  return " data-id=\"" + xml_escape(p.concrete->to_string()) + "\"";
}

}  // namespace

std::string render_svg(const Scene& scene) {
  const auto n = format_number;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + n(scene.width) +
         "\" height=\"" + n(scene.height) + "\" viewBox=\"0 0 " + n(scene.width) + " " +
         n(scene.height) + "\">\n";
  for (const auto& p : scene.primitives) {
    const BBox& b = p.box;
    switch (p.kind) {
      case Primitive::Kind::Text:
        out += "  <text x=\"" + n(b.x) + "\" y=\"" + n(b.y + p.font_size) + "\" font-size=\"" +
               n(p.font_size) + "\" font-family=\"monospace\"" + id_attr(p) + ">" +
               xml_escape(p.text) + "</text>\n";
        break;
      case Primitive::Kind::Line: {
        if (p.points.size() == 2) {
          out += "  <line x1=\"" + n(p.points[0].x) + "\" y1=\"" + n(p.points[0].y) + "\" x2=\"" +
                 n(p.points[1].x) + "\" y2=\"" + n(p.points[1].y) +
                 "\" stroke=\"black\" stroke-width=\"" + n(p.stroke) + "\"" + id_attr(p) + "/>\n";
        } else {
          std::string pts;
          for (const auto& pt : p.points) pts += (pts.empty() ? "" : " ") + n(pt.x) + "," + n(pt.y);
          out += "  <polyline points=\"" + pts + "\" fill=\"none\" stroke=\"black\" stroke-width=\"" +
                 n(p.stroke) + "\"" + id_attr(p) + "/>\n";
        }
        break;
      }
      case Primitive::Kind::Box:
        if (p.stroke > 0) {
          out += "  <rect x=\"" + n(b.x) + "\" y=\"" + n(b.y) + "\" width=\"" + n(b.w) +
                 "\" height=\"" + n(b.h) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"" +
                 n(p.stroke) + "\"" + id_attr(p) + "/>\n";
        }
        break;
      case Primitive::Kind::Rectangle:
        out += "  <rect x=\"" + n(b.x) + "\" y=\"" + n(b.y) + "\" width=\"" + n(b.w) +
               "\" height=\"" + n(b.h) + "\" fill=\"" + (p.fill ? "black" : "none") +
               "\" stroke=\"black\" stroke-width=\"" + n(p.stroke) + "\"" + id_attr(p) + "/>\n";
        break;
      case Primitive::Kind::Ellipse:
        out += "  <ellipse cx=\"" + n(b.x + b.w / 2) + "\" cy=\"" + n(b.y + b.h / 2) + "\" rx=\"" +
               n(b.w / 2) + "\" ry=\"" + n(b.h / 2) + "\" fill=\"" + (p.fill ? "black" : "none") +
               "\" stroke=\"black\" stroke-width=\"" + n(p.stroke) + "\"" + id_attr(p) + "/>\n";
        break;
      case Primitive::Kind::Image:
        out += "  <image x=\"" + n(b.x) + "\" y=\"" + n(b.y) + "\" width=\"" + n(b.w) +
               "\" height=\"" + n(b.h) + "\" href=\"" + xml_escape(p.text) + "\"" + id_attr(p) +
               "/>\n";
        break;
      case Primitive::Kind::Polygon: {
        std::string pts;
        for (const auto& pt : p.points) pts += (pts.empty() ? "" : " ") + n(pt.x) + "," + n(pt.y);
        out += "  <polygon points=\"" + pts + "\" fill=\"black\"" + id_attr(p) + "/>\n";
        break;
      }
      case Primitive::Kind::Hole:
        out += "  <circle cx=\"" + n(b.x + b.w / 2) + "\" cy=\"" + n(b.y + b.h / 2) + "\" r=\"" +
               n(b.w / 2) + "\" fill=\"blue\"" + id_attr(p) + "/>\n";
        break;
      case Primitive::Kind::Node:
        break;
    }
  }
  out += "</svg>\n";
  return out;
}

std::string render_text(const Scene& scene) {
  std::vector<std::u32string> grid;
  // Text that continues where the previous piece on its row ended keeps
  // going from that column, so runs do not drift apart on the coarse grid.
  std::map<std::size_t, std::pair<double, std::size_t>> row_end;
  auto put = [&](double x, double y, std::u32string_view s, double width = -1) {
    if (x < 0 || y < 0) return;
    auto row = static_cast<std::size_t>(y / kTextCellHeight);
    auto col = static_cast<std::size_t>(x / kTextCellWidth);
    if (auto it = row_end.find(row); width >= 0 && it != row_end.end() && std::abs(it->second.first - x) < 0.5)
      col = it->second.second;
    if (width >= 0) row_end[row] = {x + width, col + s.size()};
    if (grid.size() <= row) grid.resize(row + 1);
    auto& line = grid[row];
    if (line.size() < col + s.size()) line.resize(col + s.size(), U' ');
    std::copy(s.begin(), s.end(), line.begin() + static_cast<std::ptrdiff_t>(col));
  };
  for (const auto& p : scene.primitives) {
    switch (p.kind) {
      case Primitive::Kind::Hole: put(p.box.x, p.box.y, U"[●]"); break;
      case Primitive::Kind::Ellipse: put(p.box.x, p.box.y, U"[ellipse]"); break;
      case Primitive::Kind::Rectangle: put(p.box.x, p.box.y, U"[rect]"); break;
      case Primitive::Kind::Image: put(p.box.x, p.box.y, U"[image]"); break;
      default: break;
    }
  }
  for (const auto& p : scene.primitives) {
    if (p.kind == Primitive::Kind::Text) put(p.box.x, p.box.y, utf8_decode(p.text), p.box.w);
  }
  std::string out;
  for (auto& line : grid) {
    while (!line.empty() && line.back() == U' ') line.pop_back();
  }
  while (!grid.empty() && grid.back().empty()) grid.pop_back();
  for (const auto& line : grid) {
    for (char32_t c : line) out += utf8_encode(c);
    out += '\n';
  }
  return out;
}

}  // namespace projed
