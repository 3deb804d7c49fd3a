#include "projed/persist.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace projed {

namespace pt = boost::property_tree;

namespace {

// ---- identity parts --------------------------------------------------------

bool parses_as_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string percent_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '%') out += "%25";
    else if (c == ',') out += "%2C";
    else out += c;
  }
  return out;
}

std::string percent_unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (s.substr(i, 3) == "%25") out += '%';
    else if (s.substr(i, 3) == "%2C") out += ',';
    else throw PersistError("bad escape in identity part '" + std::string(s) + "'");
    i += 2;
  }
  return out;
}

std::string encode_part(const Atom& a) {
  if (a.is_int()) return std::to_string(a.as_int());
  if (a.is_bool()) return a.as_bool() ? "#t" : "#f";
  if (a.is_char()) return "#\\" + percent_escape(utf8_encode(a.as_char().value));
  const std::string& s = a.as_string();
  std::int64_t ignored = 0;
  bool ambiguous = s.empty() || s[0] == '#' || s[0] == '\'' || parses_as_int(s, ignored);
  return (ambiguous ? "'" : "") + percent_escape(s);
}

Atom decode_part(std::string_view p) {
  if (p.empty()) throw PersistError("empty identity part");
  if (!p.empty() && p[0] == '\'') return Atom(percent_unescape(p.substr(1)));
  if (p == "#t") return Atom(true);
  if (p == "#f") return Atom(false);
  if (p.substr(0, 2) == "#\\") {
    std::u32string cps = utf8_decode(percent_unescape(p.substr(2)));
    if (cps.size() != 1) throw PersistError("bad character identity part '" + std::string(p) + "'");
    return Atom(Char{cps[0]});
  }
  if (!p.empty() && p[0] == '#') throw PersistError("bad identity part '" + std::string(p) + "'");
  std::int64_t n = 0;
  if (parses_as_int(p, n)) return Atom(n);
  return Atom(percent_unescape(p));
}

// ---- writer ------------------------------------------------------------------

// Shortest text that reads back to the same double.
std::string exact_number(double v) {
  if (v == 0) v = 0;  // no -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default:
        if (c < 0x20) {
          out += "&#" + std::to_string(c) + ";";
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

using Attrs = std::vector<std::pair<std::string_view, std::string>>;

class XmlWriter {
 public:
  XmlWriter() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

  void empty(std::string_view name, const Attrs& attrs) { line(name, attrs, "/>"); }
  void open(std::string_view name, const Attrs& attrs) {
    line(name, attrs, ">");
    ++depth_;
  }
  void close(std::string_view name) {
    --depth_;
    out_.append(2 * depth_, ' ');
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }
  std::string take() { return std::move(out_); }

 private:
  void line(std::string_view name, const Attrs& attrs, std::string_view end) {
    out_.append(2 * depth_, ' ');
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attrs) {
      out_ += ' ';
      out_ += k;
      out_ += "=\"";
      out_ += xml_escape(v);
      out_ += '"';
    }
    out_ += end;
    out_ += '\n';
  }

  std::string out_;
  std::size_t depth_ = 0;
};

void write_term(XmlWriter& w, const Term& t) {
  if (t.is_atom()) {
    const Atom& a = t.atom();
    if (a.is_string()) w.empty("str", {{"v", a.as_string()}});
    else if (a.is_int()) w.empty("int", {{"v", std::to_string(a.as_int())}});
    else if (a.is_bool()) w.empty("bool", {{"v", a.as_bool() ? "#t" : "#f"}});
    else w.empty("char", {{"v", utf8_encode(a.as_char().value)}});
    return;
  }
  if (t.is_hole()) {
    const Hole& h = t.hole();
    Attrs attrs{{"id", encode_identity(h.id)},
                {"kind", std::string(to_string(h.kind))},
                {"clause", h.ref.to_string()}};
    if (h.kind == HoleKind::Text) attrs.emplace_back("text", h.text);
    if (h.shown) attrs.emplace_back("shown", "#t");
    w.empty("hole", attrs);
    return;
  }
  const Compound& c = t.compound();
  Attrs attrs{{"functor", c.functor}, {"id", encode_identity(c.id)}};
  if (c.children.empty()) {
    w.empty("term", attrs);
    return;
  }
  w.open("term", attrs);
  for (const auto& k : c.children) write_term(w, k);
  w.close("term");
}

// ---- reader ------------------------------------------------------------------

struct Reader {
  std::int64_t max_int = 0;

  static std::string attr(const pt::ptree& node, const std::string& where, const char* name,
                          bool required = true) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (attrs) {
      if (auto v = attrs->get_optional<std::string>(name)) return *v;
    }
    if (required) throw PersistError(where + ": missing attribute '" + name + "'");
    return {};
  }

  static bool has_attr(const pt::ptree& node, const char* name) {
    auto attrs = node.get_child_optional("<xmlattr>");
    return attrs && attrs->get_child_optional(name);
  }

  Identity identity(const std::string& text, const std::string& where) {
    try {
      Identity id = decode_identity(text);
      for (const auto& p : id.parts()) {
        if (p.is_int()) max_int = std::max(max_int, p.as_int());
      }
      return id;
    } catch (const Error& e) {
      throw PersistError(where + ": " + e.what());
    }
  }

  // Element children in order, skipping attributes, comments and whitespace.
  static std::vector<std::pair<std::string, const pt::ptree*>> elements(const pt::ptree& node) {
    std::vector<std::pair<std::string, const pt::ptree*>> out;
    for (const auto& [name, child] : node) {
      if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
      out.emplace_back(name, &child);
    }
    return out;
  }

  Term term(const std::string& name, const pt::ptree& node, const std::string& where) {
    auto leaf_only = [&] {
      if (!elements(node).empty()) throw PersistError(where + ": <" + name + "> takes no children");
    };
    if (name == "str") {
      leaf_only();
      return Term(Atom(attr(node, where, "v")));
    }
    if (name == "int") {
      leaf_only();
      std::int64_t n = 0;
      std::string v = attr(node, where, "v");
      if (!parses_as_int(v, n)) throw PersistError(where + ": bad integer '" + v + "'");
      return Term(Atom(n));
    }
    if (name == "bool") {
      leaf_only();
      std::string v = attr(node, where, "v");
      if (v != "#t" && v != "#f") throw PersistError(where + ": bad boolean '" + v + "'");
      return Term(Atom(v == "#t"));
    }
    if (name == "char") {
      leaf_only();
      std::u32string cps = utf8_decode(attr(node, where, "v"));
      if (cps.size() != 1) throw PersistError(where + ": a character must be one code point");
      return Term(Atom(Char{cps[0]}));
    }
    if (name == "hole") {
      leaf_only();
      Hole h{identity(attr(node, where, "id"), where), HoleKind::Choice, {}, {}, false};
      auto kind = hole_kind_from_string(attr(node, where, "kind"));
      if (!kind) throw PersistError(where + ": unknown hole kind");
      h.kind = *kind;
      auto ref = HoleRef::parse(attr(node, where, "clause"));
      if (!ref) throw PersistError(where + ": bad clause reference");
      h.ref = *ref;
      h.text = attr(node, where, "text", false);
      if (has_attr(node, "shown")) h.shown = attr(node, where, "shown") == "#t";
      return Term(std::move(h));
    }
    if (name == "term") {
      std::string functor = attr(node, where, "functor");
      if (functor.empty()) throw PersistError(where + ": empty functor");
      Identity id = identity(attr(node, where, "id"), where);
      std::vector<Term> kids;
      std::map<std::string, int> seen;
      for (const auto& [child_name, child] : elements(node)) {
        std::string child_where =
            where + "/" + child_name + "[" + std::to_string(seen[child_name]++) + "]";
        kids.push_back(term(child_name, *child, child_where));
      }
      return Term(Compound{std::move(functor), std::move(id), std::move(kids)});
    }
    throw PersistError(where + ": unknown element <" + name + ">");
  }
};

pt::ptree parse_xml(std::string_view xml) {
  std::istringstream in{std::string(xml)};
  pt::ptree tree;
  try {
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw PersistError(std::string("malformed XML: ") + e.message() + " at line " +
                       std::to_string(e.line()));
  }
  return tree;
}

std::pair<std::string, const pt::ptree*> single_root(const pt::ptree& doc) {
  auto roots = Reader::elements(doc);
  if (roots.size() != 1) throw PersistError("document must have exactly one root element");
  return roots.front();
}

double number_attr(const pt::ptree& node, const std::string& where, const char* name) {
  std::string v = Reader::attr(node, where, name);
  double d = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw PersistError(where + ": bad number '" + v + "'");
  }
  return d;
}

}  // namespace

std::string encode_identity(const Identity& id) {
  std::string out;
  for (std::size_t i = 0; i < id.parts().size(); ++i) {
    if (i) out += ',';
    out += encode_part(id.parts()[i]);
  }
  return out;
}

Identity decode_identity(std::string_view text) {
  std::vector<Atom> parts;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    parts.push_back(decode_part(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Identity(std::move(parts));
}

std::string save_term(const Term& t) {
  XmlWriter w;
  write_term(w, t);
  return w.take();
}

Term load_term(std::string_view xml) {
  pt::ptree doc = parse_xml(xml);
  auto [name, node] = single_root(doc);
  Reader r;
  Term t = r.term(name, *node, "/" + name);
  advance_identity_counter_past(r.max_int);
  return t;
}

std::string save_session(const Session& s) {
  XmlWriter w;
  w.open("session", {{"language", s.language().name},
                     {"start", s.start_clause()},
                     {"version", std::to_string(kSessionFormatVersion)}});
  w.open("abstract", {});
  write_term(w, s.abstract());
  w.close("abstract");
  const LayoutCache& cache = s.layout_cache();
  if (cache.positions.empty() && cache.waypoints.empty()) {
    w.empty("layout", {});
  } else {
    w.open("layout", {});
    for (const auto& [id, p] : cache.positions) {
      w.empty("pos", {{"id", encode_identity(id)}, {"x", exact_number(p.x)}, {"y", exact_number(p.y)}});
    }
    for (const auto& [id, pts] : cache.waypoints) {
      w.open("waypoints", {{"id", encode_identity(id)}});
      for (const auto& p : pts) w.empty("point", {{"x", exact_number(p.x)}, {"y", exact_number(p.y)}});
      w.close("waypoints");
    }
    w.close("layout");
  }
  w.close("session");
  return w.take();
}

Session load_session(std::string_view xml, std::shared_ptr<const LanguageDef> def,
                     SessionOptions options) {
  pt::ptree doc = parse_xml(xml);
  auto [name, root] = single_root(doc);
  if (name != "session") throw PersistError("/" + name + ": expected <session>");
  const std::string where = "/session";
  std::string language = Reader::attr(*root, where, "language");
  if (language != def->name) {
    throw PersistError("session was saved with language '" + language + "' but '" + def->name +
                       "' was given");
  }
  std::string version = Reader::attr(*root, where, "version");
  if (version != std::to_string(kSessionFormatVersion)) {
    throw PersistError(where + ": unsupported version " + version);
  }
  std::string start = Reader::attr(*root, where, "start");

  Reader r;
  std::optional<Term> abstract;
  LayoutCache cache;
  for (const auto& [child_name, child] : Reader::elements(*root)) {
    std::string cw = where + "/" + child_name;
    if (child_name == "abstract") {
      auto kids = Reader::elements(*child);
      if (kids.size() != 1) throw PersistError(cw + ": expected exactly one term");
      abstract = r.term(kids[0].first, *kids[0].second, cw + "/" + kids[0].first);
    } else if (child_name == "layout") {
      for (const auto& [entry_name, entry] : Reader::elements(*child)) {
        std::string ew = cw + "/" + entry_name;
        if (entry_name == "pos") {
          Identity id = r.identity(Reader::attr(*entry, ew, "id"), ew);
          cache.positions.insert_or_assign(
              id, Point{number_attr(*entry, ew, "x"), number_attr(*entry, ew, "y")});
        } else if (entry_name == "waypoints") {
          Identity id = r.identity(Reader::attr(*entry, ew, "id"), ew);
          std::vector<Point> pts;
          for (const auto& [pn, p] : Reader::elements(*entry)) {
            if (pn != "point") throw PersistError(ew + ": unknown element <" + pn + ">");
            pts.push_back({number_attr(*p, ew + "/point", "x"), number_attr(*p, ew + "/point", "y")});
          }
          cache.waypoints.insert_or_assign(id, std::move(pts));
        } else {
          throw PersistError(ew + ": unknown element <" + entry_name + ">");
        }
      }
    } else {
      throw PersistError(cw + ": unknown element <" + child_name + ">");
    }
  }
  if (!abstract) throw PersistError(where + ": missing <abstract>");
  advance_identity_counter_past(r.max_int);
  return Session::resume(std::move(def), start, std::move(*abstract), std::move(cache), options)
      .prune_layout_cache();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("error writing " + path.string());
}

LanguageDef load_language_file(const std::filesystem::path& path) {
  return parse_language_text(read_file(path));
}

}  // namespace projed
