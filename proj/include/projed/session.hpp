#pragma once

// The editor loop: the abstract tree, its identity cache, the layout cache and
// the scene last shown. Sessions are values; every operation returns a new
// session and leaves the old one untouched.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "projed/langdef.hpp"
#include "projed/rewrite.hpp"
#include "projed/scene.hpp"

namespace projed {

class SessionError : public Error {
 public:
  using Error::Error;
};

// Key names delivered as string atoms; everything else is a character.
inline const std::vector<std::string> kNamedKeys = {"up",   "down",  "left",
                                                    "right", "enter", "backspace"};

using Key = std::variant<Char, std::string>;

struct KeyPressed {
  std::optional<Identity> selected;
  Key key;
};
struct DoubleClick {
  Identity target;
};
struct NewEdge {
  Term type;
  Identity source;
  Identity target;
};
struct MenuSelected {
  Identity target;
  std::string label;
  std::optional<Term> message;  // looked up in the scene when absent
};
struct DragNode {
  Identity node;
  double x = 0;
  double y = 0;
};
struct EditText {
  Identity target;
  std::string text;
};
struct EdgeDrag {
  Identity source;
  Identity target;
};

using Event = std::variant<KeyPressed, DoubleClick, NewEdge, MenuSelected, DragNode, EditText,
                           EdgeDrag>;

std::string describe(const Event& e);

struct SessionOptions {
  Fuel fuel;
  Viewport viewport;
};

// An edge drag that matched several edge types waits for the user to pick one.
struct PendingEdgeChoice {
  Identity source;  // abstract identities of the two nodes
  Identity target;
  std::vector<Term> types;
  Menu menu;
};

class Session {
 public:
  // Throws LanguageError/SessionError/NotNormalForm when the start state
  // cannot be built or shown.
  static Session start(std::shared_ptr<const LanguageDef> def, const std::string& start_clause,
                       SessionOptions options = {});
  static Session resume(std::shared_ptr<const LanguageDef> def, const std::string& start_clause,
                        Term abstract, LayoutCache cache, SessionOptions options = {});

  const LanguageDef& language() const { return *def_; }
  std::shared_ptr<const LanguageDef> language_ptr() const { return def_; }
  const std::string& start_clause() const { return start_clause_; }
  const Term& abstract() const { return abstract_; }
  const Term& concrete() const { return concrete_; }
  const Scene& scene() const { return scene_; }
  const std::map<Identity, Path>& abstract_cache() const { return abstract_cache_; }
  const LayoutCache& layout_cache() const { return layout_cache_; }
  const SessionOptions& options() const { return options_; }
  // Messages from the most recent operation; empty when it went cleanly.
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }
  bool fuel_exhausted() const { return fuel_exhausted_; }
  const std::optional<PendingEdgeChoice>& pending_edge_choice() const { return pending_; }

  Menu hole_options(const Identity& hole) const;
  Session expand_hole(const Identity& hole, std::string_view choice) const;
  Session edit_string(const Identity& target, const std::string& text) const;
  std::vector<Term> allowed_edge_types(const Identity& source, const Identity& target) const;
  // Never throws for a well-formed event: failures keep the previous state
  // and report a diagnostic.
  Session dispatch(const Event& e) const;
  Session choose_pending(std::string_view label) const;
  // This session unchanged, carrying one diagnostic.
  Session with_diagnostic(std::string message, bool fuel = false) const;
  // Drops layout entries for nodes that no longer appear anywhere.
  Session prune_layout_cache() const;

  // Reified event term for events that go through the transform rules.
  Term event_term(const Event& e) const;
  // The abstract identity a concrete one stands for, if any.
  std::optional<Identity> abstract_for(const Identity& concrete) const;

 private:
  Session() = default;

  void refresh();  // cache, reduce, layout
  Session run_transform(const Term& event) const;
  Session apply_event(const Event& e) const;
  std::optional<Located> hole_at(const Identity& id) const;

  std::shared_ptr<const LanguageDef> def_;
  std::string start_clause_;
  Term abstract_ = Term(Atom(0));
  Term concrete_ = Term(Atom(0));
  Scene scene_;
  std::map<Identity, Path> abstract_cache_;
  LayoutCache layout_cache_;
  SessionOptions options_;
  std::vector<std::string> diagnostics_;
  bool fuel_exhausted_ = false;
  std::optional<PendingEdgeChoice> pending_;
};

std::map<Identity, Path> build_abstract_cache(const Term& root);

}  // namespace projed
