#pragma once

// Line-oriented event scripts for headless replay:
//
//   key <id|-1> <char|name>      names: up down left right enter backspace space
//   dblclick <id>
//   edge <src> <tgt> [type]      an edge drag; the type answers the choice menu
//   menu <id> <label>
//   drag <id> <x> <y>
//   edit <id> <text>
//   snapshot <name>
//
// Ids are identity parts joined by commas (see persist). A part written as @
// followed by a dot-separated child path stands for the parts of that
// subtree's identity in the current abstract tree (@ alone is the root), so
// `@0.1` names a tree node and `n,@0.1` a concrete id built from it. Blank
// lines and lines starting with # are ignored.

#include <string>
#include <vector>

#include "projed/session.hpp"

namespace projed {

class ScriptError : public Error {
 public:
  ScriptError(const std::string& message, int line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ScriptStep {
  enum class Verb { Key, DoubleClick, Edge, Menu, Drag, Edit, Snapshot };
  Verb verb = Verb::Key;
  int line = 0;
  std::vector<std::string> args;
};

std::vector<ScriptStep> parse_script(std::string_view text);

// Throws SessionError for paths that do not exist.
Identity resolve_script_id(std::string_view token, const Session& s);

// Runs one step other than a snapshot. Like dispatch, failures come back as
// diagnostics on the returned session.
Session apply_step(const Session& s, const ScriptStep& step);

// Script line reproducing an event; `edge_type` is added to edge drags.
std::string script_line(const Event& e, const std::string& edge_type = {});

}  // namespace projed
