#include "projed/term.hpp"

#include <atomic>
#include <charconv>
#include <sstream>

namespace projed {

namespace {

std::atomic<std::int64_t> identity_counter{0};

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    auto b = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = b;
    if (b >= 0xF0) {
      extra = 3;
      cp = b & 0x07;
    } else if (b >= 0xE0) {
      extra = 2;
      cp = b & 0x0F;
    } else if (b >= 0xC0) {
      extra = 1;
      cp = b & 0x1F;
    }
    ++i;
    for (int k = 0; k < extra && i < s.size(); ++k, ++i) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
    }
    out += cp;
  }
  return out;
}

std::string Atom::display_text() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return utf8_encode(v.value);
        }
      },
      value_);
}

std::string Atom::literal() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return quote_string(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "#t" : "#f";
        } else {
          switch (v.value) {
            case U' ': return "#\\space";
            case U'\n': return "#\\newline";
            case U'\t': return "#\\tab";
            default: return "#\\" + utf8_encode(v.value);
          }
        }
      },
      value_);
}

Identity::Identity(std::vector<Atom> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error("identity must have at least one part");
}

std::string Identity::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += ',';
    out += parts_[i].display_text();
  }
  return out;
}

thread_local std::optional<std::int64_t> display_counter;

Identity fresh_identity() {
  if (display_counter) return Identity{Atom("~"), Atom(++*display_counter)};
  return Identity{Atom(identity_counter.fetch_add(1) + 1)};
}

DisplayCoinage::DisplayCoinage() : saved_(display_counter) { display_counter = 0; }
DisplayCoinage::~DisplayCoinage() { display_counter = saved_; }

void advance_identity_counter_past(std::int64_t value) {
  std::int64_t current = identity_counter.load();
  while (current < value && !identity_counter.compare_exchange_weak(current, value)) {
  }
}

std::string_view to_string(HoleKind kind) {
  switch (kind) {
    case HoleKind::Choice: return "choice";
    case HoleKind::Repeat: return "repeat";
    case HoleKind::Text: return "text";
  }
  return "choice";
}

std::optional<HoleKind> hole_kind_from_string(std::string_view s) {
  if (s == "choice") return HoleKind::Choice;
  if (s == "repeat") return HoleKind::Repeat;
  if (s == "text") return HoleKind::Text;
  return std::nullopt;
}

std::string HoleRef::to_string() const {
  std::string out = clause;
  for (int step : path) out += "/" + std::to_string(step);
  return out;
}

std::optional<HoleRef> HoleRef::parse(std::string_view s) {
  HoleRef ref;
  auto slash = s.find('/');
  ref.clause = std::string(s.substr(0, slash));
  while (slash != std::string_view::npos) {
    s = s.substr(slash + 1);
    slash = s.find('/');
    auto piece = s.substr(0, slash);
    int step = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), step);
    if (ec != std::errc() || ptr != piece.data() + piece.size()) return std::nullopt;
    ref.path.push_back(step);
  }
  return ref;
}

const Identity* Term::identity() const {
  if (is_compound()) return &compound().id;
  if (is_hole()) return &hole().id;
  return nullptr;
}

const std::vector<Term>& Term::children() const {
  static const std::vector<Term> none;
  return is_compound() ? compound().children : none;
}

std::string_view Term::functor() const {
  if (is_compound()) return compound().functor;
  if (is_hole()) return "hole";
  return {};
}

bool Term::same_node(const Term& other) const {
  if (is_compound() && other.is_compound()) {
    return std::get<CompoundPtr>(node_) == std::get<CompoundPtr>(other.node_);
  }
  if (is_hole() && other.is_hole()) {
    return std::get<HolePtr>(node_) == std::get<HolePtr>(other.node_);
  }
  return false;
}

Term make_compound(std::string functor, std::optional<Identity> id, std::vector<Term> children) {
  if (functor.empty()) throw Error("functor names must be non-empty");
  return Term(Compound{std::move(functor), id ? std::move(*id) : fresh_identity(),
                       std::move(children)});
}

Term make_hole(HoleKind kind, HoleRef ref, std::string text) {
  return Term(Hole{fresh_identity(), kind, std::move(ref), std::move(text), false});
}

namespace {

bool holes_equal(const Hole& a, const Hole& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == HoleKind::Text) return a.text == b.text;
  return a.ref == b.ref && a.shown == b.shown;
}

template <bool CheckIds>
bool equal_impl(const Term& a, const Term& b) {
  if (a.same_node(b)) return true;
  if (a.is_atom() || b.is_atom()) {
    return a.is_atom() && b.is_atom() && a.atom() == b.atom();
  }
  if (a.is_hole() || b.is_hole()) {
    if (!(a.is_hole() && b.is_hole())) return false;
    if (CheckIds && !(a.hole().id == b.hole().id)) return false;
    return holes_equal(a.hole(), b.hole());
  }
  const auto& ca = a.compound();
  const auto& cb = b.compound();
  if (ca.functor != cb.functor || ca.children.size() != cb.children.size()) return false;
  if (CheckIds && !(ca.id == cb.id)) return false;
  for (std::size_t i = 0; i < ca.children.size(); ++i) {
    if (!equal_impl<CheckIds>(ca.children[i], cb.children[i])) return false;
  }
  return true;
}

bool find_impl(const Term& t, const Identity& id, Path& path) {
  if (const Identity* own = t.identity(); own && *own == id) return true;
  const auto& kids = t.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    path.push_back(i);
    if (find_impl(kids[i], id, path)) return true;
    path.pop_back();
  }
  return false;
}

}  // namespace

bool structurally_equal(const Term& a, const Term& b) { return equal_impl<false>(a, b); }

bool identical(const Term& a, const Term& b) {
  if (a.is_hole() && b.is_hole()) {
    const auto& ha = a.hole();
    const auto& hb = b.hole();
    return ha.id == hb.id && ha.kind == hb.kind && ha.ref == hb.ref && ha.text == hb.text &&
           ha.shown == hb.shown;
  }
  if (a.is_compound() && b.is_compound()) {
    const auto& ca = a.compound();
    const auto& cb = b.compound();
    if (ca.functor != cb.functor || !(ca.id == cb.id) || ca.children.size() != cb.children.size())
      return false;
    for (std::size_t i = 0; i < ca.children.size(); ++i) {
      if (!identical(ca.children[i], cb.children[i])) return false;
    }
    return true;
  }
  return equal_impl<true>(a, b);
}

std::optional<Located> find_by_identity(const Term& root, const Identity& id) {
  Path path;
  if (!find_impl(root, id, path)) return std::nullopt;
  return Located{subterm_at(root, path), path};
}

const Term& subterm_at(const Term& root, const Path& path) {
  const Term* cur = &root;
  for (std::size_t step : path) {
    const auto& kids = cur->children();
    if (step >= kids.size()) throw CorruptCacheError("path does not address a subtree");
    cur = &kids[step];
  }
  return *cur;
}

Term with_children(const Term& compound, std::vector<Term> children) {
  const auto& c = compound.compound();
  return Term(Compound{c.functor, c.id, std::move(children)});
}

namespace {

Term replace_from(const Term& node, const Path& path, std::size_t depth, Term replacement) {
  if (depth == path.size()) return replacement;
  if (!node.is_compound() || path[depth] >= node.children().size()) {
    throw CorruptCacheError("path does not address a subtree");
  }
  std::vector<Term> kids = node.children();
  kids[path[depth]] = replace_from(kids[path[depth]], path, depth + 1, std::move(replacement));
  return with_children(node, std::move(kids));
}

}  // namespace

Term replace_at_path(const Term& root, const Path& path, Term replacement) {
  return replace_from(root, path, 0, std::move(replacement));
}

Term reify_identity(const Identity& id) {
  if (id.parts().size() == 1) return Term(id.parts().front());
  std::vector<Term> parts;
  for (const auto& p : id.parts()) parts.emplace_back(p);
  return make_compound("list", std::nullopt, std::move(parts));
}

std::optional<Identity> identity_from_term(const Term& t) {
  if (t.is_atom()) return Identity{t.atom()};
  if (!t.is_compound("list") || t.children().empty()) return std::nullopt;
  std::vector<Atom> parts;
  for (const auto& c : t.children()) {
    if (!c.is_atom()) return std::nullopt;
    parts.push_back(c.atom());
  }
  return Identity(std::move(parts));
}

std::string to_sexpr(const Identity& id) {
  std::string out;
  for (std::size_t i = 0; i < id.parts().size(); ++i) {
    if (i) out += ' ';
    out += id.parts()[i].literal();
  }
  return out;
}

std::string to_sexpr(const Term& t, bool with_ids) {
  if (t.is_atom()) return t.atom().literal();
  if (t.is_hole()) {
    const auto& h = t.hole();
    std::string out = h.kind == HoleKind::Text ? "?" + quote_string(h.text) : "?";
    if (with_ids) out += "<" + to_sexpr(h.id) + ">";
    return out;
  }
  const auto& c = t.compound();
  std::string out = "(";
  out += with_ids ? "(" + c.functor + " " + to_sexpr(c.id) + ")" : c.functor;
  for (const auto& child : c.children) {
    out += ' ';
    out += to_sexpr(child, with_ids);
  }
  out += ')';
  return out;
}

}  // namespace projed
