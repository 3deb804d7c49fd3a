#include "projed/script.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "projed/persist.hpp"

namespace projed {

namespace {

const std::map<std::string, ScriptStep::Verb, std::less<>> kVerbs = {
    {"key", ScriptStep::Verb::Key},         {"dblclick", ScriptStep::Verb::DoubleClick},
    {"edge", ScriptStep::Verb::Edge},       {"menu", ScriptStep::Verb::Menu},
    {"drag", ScriptStep::Verb::Drag},       {"edit", ScriptStep::Verb::Edit},
    {"snapshot", ScriptStep::Verb::Snapshot},
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits off the first word; the rest keeps its inner spacing.
std::pair<std::string_view, std::string_view> first_word(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  std::size_t end = 0;
  while (end < s.size() && !is_space(s[end])) ++end;
  std::string_view rest = s.substr(end);
  if (!rest.empty()) rest.remove_prefix(1);
  return {s.substr(0, end), rest};
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    auto [w, rest] = first_word(s);
    if (w.empty()) break;
    out.emplace_back(w);
    s = rest;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string exact_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

Key parse_key(std::string_view token, int line) {
  if (token == "space") return Char{U' '};
  if (std::find(kNamedKeys.begin(), kNamedKeys.end(), token) != kNamedKeys.end()) {
    return std::string(token);
  }
  std::u32string cps = utf8_decode(token);
  if (cps.size() != 1) throw ScriptError("unknown key '" + std::string(token) + "'", line);
  return Char{cps[0]};
}

std::string key_token(const Key& k) {
  if (const auto* c = std::get_if<Char>(&k)) {
    return c->value == U' ' ? "space" : utf8_encode(c->value);
  }
  return std::get<std::string>(k);
}

}  // namespace

std::vector<ScriptStep> parse_script(std::string_view text) {
  std::vector<ScriptStep> steps;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    auto [verb_word, rest] = first_word(line);
    if (verb_word.empty() || verb_word[0] == '#') continue;
    auto verb = kVerbs.find(verb_word);
    if (verb == kVerbs.end()) {
      throw ScriptError("unknown command '" + std::string(verb_word) + "'", line_no);
    }
    ScriptStep step{verb->second, line_no, {}};
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (step.args.size() < lo || step.args.size() > hi) {
        throw ScriptError("wrong number of arguments to '" + std::string(verb_word) + "'", line_no);
      }
    };
    switch (step.verb) {
      case ScriptStep::Verb::Menu:
      case ScriptStep::Verb::Edit: {
        auto [id, remainder] = first_word(rest);
        if (id.empty()) throw ScriptError("missing id", line_no);
        step.args = {std::string(id), std::string(remainder)};
        if (step.verb == ScriptStep::Verb::Menu && remainder.empty()) {
          throw ScriptError("missing menu label", line_no);
        }
        break;
      }
      case ScriptStep::Verb::Key:
        step.args = words(rest);
        need(2, 2);
        parse_key(step.args[1], line_no);
        break;
      case ScriptStep::Verb::DoubleClick:
        step.args = words(rest);
        need(1, 1);
        break;
      case ScriptStep::Verb::Edge:
        step.args = words(rest);
        need(2, 3);
        break;
      case ScriptStep::Verb::Drag: {
        step.args = words(rest);
        need(3, 3);
        double d = 0;
        if (!parse_double(step.args[1], d) || !parse_double(step.args[2], d)) {
          throw ScriptError("drag needs numeric coordinates", line_no);
        }
        break;
      }
      case ScriptStep::Verb::Snapshot:
        step.args = words(rest);
        need(1, 1);
        if (!std::all_of(step.args[0].begin(), step.args[0].end(), [](char c) {
              return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
            }) || step.args[0].front() == '.') {
          throw ScriptError("bad snapshot name '" + step.args[0] + "'", line_no);
        }
        break;
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

namespace {

Identity resolve_path(std::string_view token, const Session& s) {
  Path path;
  std::string_view rest = token.substr(1);
  while (!rest.empty()) {
    auto dot = rest.find('.');
    auto piece = rest.substr(0, dot);
    std::size_t i = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), i);
    if (ec != std::errc() || ptr != piece.data() + piece.size()) {
      throw SessionError("bad path '" + std::string(token) + "'");
    }
    path.push_back(i);
    rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  }
  const Term* t = &s.abstract();
  for (std::size_t i : path) {
    if (i >= t->children().size()) throw SessionError("no subtree at " + std::string(token));
    t = &t->children()[i];
  }
  if (!t->identity()) throw SessionError(std::string(token) + " addresses an atom");
  return *t->identity();
}

}  // namespace

Identity resolve_script_id(std::string_view token, const Session& s) {
  std::vector<Atom> parts;
  while (true) {
    auto comma = token.find(',');
    auto piece = token.substr(0, comma);
    if (!piece.empty() && piece[0] == '@') {
      Identity id = resolve_path(piece, s);
      parts.insert(parts.end(), id.parts().begin(), id.parts().end());
    } else {
      try {
        parts.push_back(decode_identity(piece).parts().front());
      } catch (const Error& e) {
        throw SessionError("bad id '" + std::string(token) + "': " + e.what());
      }
    }
    if (comma == std::string_view::npos) break;
    token = token.substr(comma + 1);
  }
  return Identity(std::move(parts));
}

Session apply_step(const Session& s, const ScriptStep& step) {
  const auto& a = step.args;
  auto id = [&](std::size_t i) { return resolve_script_id(a[i], s); };
  try {
    switch (step.verb) {
      case ScriptStep::Verb::Key: {
        std::optional<Identity> sel;
        if (a[0] != "-1") sel = id(0);
        return s.dispatch(KeyPressed{sel, parse_key(a[1], step.line)});
      }
      case ScriptStep::Verb::DoubleClick:
        return s.dispatch(DoubleClick{id(0)});
      case ScriptStep::Verb::Edge: {
        Session next = s.dispatch(EdgeDrag{id(0), id(1)});
        if (next.pending_edge_choice()) {
          if (a.size() < 3) {
            return next;
          }
          return next.choose_pending(a[2]);
        }
        return next;
      }
      case ScriptStep::Verb::Menu:
        return s.dispatch(MenuSelected{id(0), a[1], std::nullopt});
      case ScriptStep::Verb::Drag: {
        double x = 0, y = 0;
        parse_double(a[1], x);
        parse_double(a[2], y);
        return s.dispatch(DragNode{id(0), x, y});
      }
      case ScriptStep::Verb::Edit:
        return s.dispatch(EditText{id(0), a[1]});
      case ScriptStep::Verb::Snapshot:
        return s;
    }
  } catch (const SessionError& e) {
    // Only id resolution throws here.
    return s.with_diagnostic(e.what());
  }
  return s;
}

std::string script_line(const Event& e, const std::string& edge_type) {
  return std::visit(
      [&](const auto& ev) -> std::string {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, KeyPressed>) {
          return "key " + (ev.selected ? encode_identity(*ev.selected) : std::string("-1")) + " " +
                 key_token(ev.key);
        } else if constexpr (std::is_same_v<T, DoubleClick>) {
          return "dblclick " + encode_identity(ev.target);
        } else if constexpr (std::is_same_v<T, NewEdge>) {
          return "edge " + encode_identity(ev.source) + " " + encode_identity(ev.target) + " " +
                 std::string(ev.type.functor());
        } else if constexpr (std::is_same_v<T, MenuSelected>) {
          return "menu " + encode_identity(ev.target) + " " + ev.label;
        } else if constexpr (std::is_same_v<T, DragNode>) {
          return "drag " + encode_identity(ev.node) + " " + exact_number(ev.x) + " " +
                 exact_number(ev.y);
        } else if constexpr (std::is_same_v<T, EditText>) {
          return "edit " + encode_identity(ev.target) + " " + ev.text;
        } else {
          std::string line = "edge " + encode_identity(ev.source) + " " + encode_identity(ev.target);
          if (!edge_type.empty()) line += " " + edge_type;
          return line;
        }
      },
      e);
}

}  // namespace projed
