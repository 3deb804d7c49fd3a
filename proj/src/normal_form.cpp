#include "projed/normal_form.hpp"

namespace projed {

namespace {

std::string path_text(const Path& p) {
  std::string out = "/";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(p[i]);
  }
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

const std::vector<std::string> kAnyNf = {
    "(nl)", "string", "int", "bool", "char", "(space)", "(font +/- nf)", "(seq nf ...)",
    "(tab nf)", "(indent int nf)", "(box ...)", "(vbox ...)", "(hbox ...)",
    "(ellipse x y w h fill sel)", "(rectangle x y w h fill sel)", "(image w h file)",
    "(underline nf)", "(chars string)", "(thumbnail x y w h nf)", "(tree nf ...+)",
    "(graph ...)", "hole"};

std::optional<Position> position_from(std::string_view s) {
  if (s == "left") return Position::Left;
  if (s == "right") return Position::Right;
  if (s == "top") return Position::Top;
  if (s == "bot" || s == "bottom") return Position::Bot;
  if (s == "centre" || s == "center") return Position::Centre;
  if (s == "align") return Position::Align;
  return std::nullopt;
}

class Validator {
 public:
  NF nf(const Term& t, Path& path) {
    NF out;
    out.path = path;
    if (t.is_atom()) {
      out.kind = NF::Kind::Text;
      out.text = t.atom().display_text();
      return out;
    }
    if (t.is_hole()) {
      out.kind = NF::Kind::Hole;
      out.id = t.hole().id;
      out.hole = t;
      return out;
    }
    const Compound& c = t.compound();
    out.id = c.id;
    const auto& kids = c.children;
    const std::string& f = c.functor;
    if (f == "nl") {
      arity(t, path, 0, "(nl)");
      out.kind = NF::Kind::NewLine;
    } else if (f == "space") {
      arity(t, path, 0, "(space)");
      out.kind = NF::Kind::Text;
      out.text = " ";
    } else if (f == "font") {
      arity(t, path, 2, "(font +/- nf)");
      const Term& dir = kids[0];
      if (dir.is_compound("+") && dir.children().empty()) {
        out.amount = 1;
      } else if (dir.is_compound("-") && dir.children().empty()) {
        out.amount = -1;
      } else {
        reject("font direction", path, 0, dir, {"(+)", "(-)"});
      }
      out.kind = NF::Kind::Font;
      out.children.push_back(child(kids[1], path, 1));
    } else if (f == "seq" || f == "tab") {
      if (f == "tab" && kids.empty()) reject("empty tab", path, t, {"(tab nf)"});
      out.kind = f == "seq" ? NF::Kind::Seq : NF::Kind::Tab;
      for (std::size_t i = 0; i < kids.size(); ++i) out.children.push_back(child(kids[i], path, i));
    } else if (f == "indent") {
      arity(t, path, 2, "(indent int nf)");
      out.kind = NF::Kind::Indent;
      out.amount = int_at(kids, 0, path);
      out.children.push_back(child(kids[1], path, 1));
    } else if (f == "underline") {
      arity(t, path, 1, "(underline nf)");
      out.kind = NF::Kind::Underline;
      out.children.push_back(child(kids[0], path, 0));
    } else if (f == "box" || f == "hbox" || f == "vbox") {
      box(out, c, path);
    } else if (f == "ellipse" || f == "rectangle") {
      if (kids.size() != 4 && kids.size() != 6) arity(t, path, 6, "(" + f + " x y w h fill sel)");
      out.kind = f == "ellipse" ? NF::Kind::Ellipse : NF::Kind::Rectangle;
      out.x = int_at(kids, 0, path);
      out.y = int_at(kids, 1, path);
      out.w = int_at(kids, 2, path);
      out.h = int_at(kids, 3, path);
      if (kids.size() == 6) {
        out.fill = bool_at(kids, 4, path);
        out.selectable = bool_at(kids, 5, path);
      }
      if (out.w < 0 || out.h < 0) reject("negative shape size", path, t, {"w >= 0", "h >= 0"});
    } else if (f == "image") {
      arity(t, path, 3, "(image w h file)");
      out.kind = NF::Kind::Image;
      out.w = int_at(kids, 0, path);
      out.h = int_at(kids, 1, path);
      if (!kids[2].is_string()) reject("image file", path, 2, kids[2], {"string"});
      out.text = kids[2].atom().as_string();
    } else if (f == "chars") {
      arity(t, path, 1, "(chars string)");
      out.kind = NF::Kind::Chars;
      const Term& s = kids[0];
      if (s.is_string()) {
        out.text = s.atom().as_string();
      } else if (s.is_hole() && s.hole().kind == HoleKind::Text) {
        out.text = s.hole().text;
        out.hole = s;
      } else {
        reject("chars contents", path, 0, s, {"string", "text hole"});
      }
    } else if (f == "thumbnail") {
      if (kids.size() != 4 && kids.size() != 5) arity(t, path, 5, "(thumbnail x y w h nf)");
      out.kind = NF::Kind::Thumbnail;
      out.x = int_at(kids, 0, path);
      out.y = int_at(kids, 1, path);
      out.w = int_at(kids, 2, path);
      out.h = int_at(kids, 3, path);
      if (kids.size() == 5) out.children.push_back(child(kids[4], path, 4));
    } else if (f == "tree") {
      if (kids.empty()) reject("tree without a root", path, t, {"(tree nf ...+)"});
      out.kind = NF::Kind::Tree;
      for (std::size_t i = 0; i < kids.size(); ++i) out.children.push_back(child(kids[i], path, i));
    } else if (f == "graph") {
      graph(out, c, path);
    } else {
      reject("'" + f + "' is not a normal form", path, t, kAnyNf);
    }
    return out;
  }

 private:
  [[noreturn]] void reject(const std::string& what, const Path& path, const Term& t,
                           std::vector<std::string> expected) {
    std::string message = what + " at " + path_text(path) + " (expected " + join(expected) + ")";
    throw NotNormalForm(message, path, t, std::move(expected));
  }
  [[noreturn]] void reject(const std::string& what, const Path& parent, std::size_t i,
                           const Term& t, std::vector<std::string> expected) {
    Path p = parent;
    p.push_back(i);
    reject(what, p, t, std::move(expected));
  }

  void arity(const Term& t, const Path& path, std::size_t n, const std::string& shape) {
    if (t.children().size() != n) {
      reject("'" + std::string(t.functor()) + "' takes " + std::to_string(n) + " argument(s)",
             path, t, {shape});
    }
  }

  NF child(const Term& t, Path& path, std::size_t i) {
    path.push_back(i);
    NF out = nf(t, path);
    path.pop_back();
    return out;
  }

  int int_at(const std::vector<Term>& kids, std::size_t i, const Path& path) {
    const Term& t = kids[i];
    if (!t.is_atom() || !t.atom().is_int()) reject("expected an integer", path, i, t, {"int"});
    return static_cast<int>(t.atom().as_int());
  }

  bool bool_at(const std::vector<Term>& kids, std::size_t i, const Path& path) {
    const Term& t = kids[i];
    if (!t.is_atom() || !t.atom().is_bool()) reject("expected a boolean", path, i, t, {"bool"});
    return t.atom().as_bool();
  }

  void box(NF& out, const Compound& c, Path& path) {
    out.kind = NF::Kind::Box;
    out.box = c.functor == "hbox" ? BoxKind::HBox : c.functor == "vbox" ? BoxKind::VBox : BoxKind::Box;
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      const Term& k = c.children[i];
      std::string_view f = k.functor();
      if (k.is_compound() && (f == "border" || f == "outline")) {
        if (k.children().size() != 1 || !k.children()[0].is_atom() ||
            !k.children()[0].atom().is_int()) {
          reject("border width", path, i, k, {"(border int)", "(outline int)"});
        }
        out.border = static_cast<int>(k.children()[0].atom().as_int());
      } else if (k.is_compound() && f == "fixed" && k.children().empty()) {
        out.fixed = true;
      } else if (k.is_compound() && f == "menu") {
        for (std::size_t j = 0; j < k.children().size(); ++j) {
          const Term& entry = k.children()[j];
          if (!entry.is_compound() || entry.children().size() != 1) {
            Path p = path;
            p.push_back(i);
            reject("menu entry", p, j, entry, {"(label message)"});
          }
          out.menu.push_back(MenuEntry{entry.compound().functor, entry.children()[0]});
        }
      } else if (auto pos = k.is_compound() ? position_from(f) : std::nullopt;
                 pos && k.children().size() == 1) {
        out.positions.push_back(*pos);
        path.push_back(i);
        out.children.push_back(child(k.children()[0], path, 0));
        path.pop_back();
      } else {
        reject("box element", path, i, k,
               {"(border int)", "(outline int)", "(menu ...)", "(fixed)",
                "(left|right|top|bot|centre|align nf)"});
      }
    }
  }

  static bool is_decoration(const Term& t) {
    return (t.is_compound("arrow") || t.is_compound("none")) && t.children().empty();
  }
  static Decoration decoration(const Term& t) {
    return t.is_compound("arrow") ? Decoration::Arrow : Decoration::None;
  }

  std::optional<Identity> abstract_ref(const Term& t, const Path& path, std::size_t i) {
    if (t.is_hole()) return t.hole().id;
    auto id = identity_from_term(t);
    if (!id) reject("abstract identity", path, i, t, {"atom", "(list atom ...)"});
    return id;
  }

  void graph(NF& out, const Compound& c, Path& path) {
    out.kind = NF::Kind::Graph;
    auto g = std::make_shared<GraphNF>();
    const auto& kids = c.children;
    if (kids.empty() || !kids[0].is_compound("edge-types")) {
      reject("graph must start with edge-types", path,
             kids.empty() ? make_compound("graph", c.id, {}) : kids[0], {"(edge-types ...)"});
    }
    for (std::size_t j = 0; j < kids[0].children().size(); ++j) {
      const Term& et = kids[0].children()[j];
      if (!et.is_compound() || et.children().size() != 2) {
        Path p = path;
        p.push_back(0);
        reject("edge type", p, j, et, {"(name (source-type) (target-type))"});
      }
      g->edge_types.push_back(EdgeType{et.compound().functor, et.children()[0], et.children()[1]});
    }
    for (std::size_t i = 1; i < kids.size(); ++i) {
      const Term& k = kids[i];
      path.push_back(i);
      if (k.is_compound("node")) {
        if (k.children().size() != 3) arity(k, path, 3, "(node (type) abstract-id nf)");
        GraphNode n{k.compound().id, k.children()[0], abstract_ref(k.children()[1], path, 1),
                    child(k.children()[2], path, 2)};
        g->nodes.push_back(std::move(n));
      } else if (k.is_compound("edge")) {
        g->edges.push_back(edge(k, path));
      } else {
        path.pop_back();
        reject("graph element", path, i, k, {"(node ...)", "(edge ...)"});
      }
      path.pop_back();
    }
    out.graph = std::move(g);
  }

  GraphEdge edge(const Term& k, Path& path) {
    const auto& e = k.children();
    GraphEdge out;
    out.id = k.compound().id;
    std::size_t base;
    if (e.size() >= 5 && is_decoration(e[2]) && is_decoration(e[4])) {
      out.type = e[0];
      base = 1;
    } else if (e.size() >= 4 && is_decoration(e[1]) && is_decoration(e[3])) {
      base = 0;
    } else {
      reject("edge shape", path, k,
             {"(edge [type] source dec target dec (label end nf) ...)"});
    }
    out.source = abstract_ref(e[base], path, base);
    out.source_decoration = decoration(e[base + 1]);
    out.target = abstract_ref(e[base + 2], path, base + 2);
    out.target_decoration = decoration(e[base + 3]);
    for (std::size_t i = base + 4; i < e.size(); ++i) {
      const Term& l = e[i];
      if (!l.is_compound("label") || l.children().size() != 2 ||
          !(l.children()[0].is_compound("source") || l.children()[0].is_compound("target"))) {
        reject("edge label", path, i, l, {"(label (source) nf)", "(label (target) nf)"});
      }
      path.push_back(i);
      EdgeLabel label{l.compound().id,
                      l.children()[0].is_compound("source") ? LabelEnd::Source : LabelEnd::Target,
                      child(l.children()[1], path, 1)};
      path.pop_back();
      out.labels.push_back(std::move(label));
    }
    return out;
  }
};

}  // namespace

NotNormalForm::NotNormalForm(const std::string& message, Path path, Term offending,
                             std::vector<std::string> expected)
    : Error("not a normal form: " + message),
      path_(std::move(path)),
      offending_(std::move(offending)),
      expected_(std::move(expected)) {}

std::string_view to_string(Position p) {
  switch (p) {
    case Position::Left: return "left";
    case Position::Right: return "right";
    case Position::Top: return "top";
    case Position::Bot: return "bot";
    case Position::Centre: return "centre";
    case Position::Align: return "align";
  }
  return "align";
}

std::string_view to_string(BoxKind k) {
  switch (k) {
    case BoxKind::Box: return "box";
    case BoxKind::HBox: return "hbox";
    case BoxKind::VBox: return "vbox";
  }
  return "box";
}

NF validate_nf(const Term& t) {
  Path path;
  return Validator().nf(t, path);
}

bool is_normal_form(const Term& t) {
  try {
    validate_nf(t);
    return true;
  } catch (const NotNormalForm&) {
    return false;
  }
}

}  // namespace projed
