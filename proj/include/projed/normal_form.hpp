#pragma once

// The displayable subset of terms. validate_nf checks a reduced term against
// the nf grammar and turns it into a typed tree for layout.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "projed/term.hpp"

namespace projed {

class NotNormalForm : public Error {
 public:
  NotNormalForm(const std::string& message, Path path, Term offending,
                std::vector<std::string> expected);

  const Path& path() const { return path_; }
  const Term& offending() const { return offending_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Path path_;
  Term offending_;
  std::vector<std::string> expected_;
};

enum class Position { Left, Right, Top, Bot, Centre, Align };
enum class BoxKind { Box, HBox, VBox };
enum class Decoration { None, Arrow };
enum class LabelEnd { Source, Target };

std::string_view to_string(Position p);
std::string_view to_string(BoxKind k);

struct MenuEntry {
  std::string label;
  Term message;
};
using Menu = std::vector<MenuEntry>;

struct NF;
struct GraphNF;

struct NF {
  enum class Kind {
    NewLine, Text, Font, Seq, Tab, Indent, Box, Ellipse, Rectangle, Image,
    Underline, Chars, Thumbnail, Tree, Graph, Hole
  };
  Kind kind = Kind::Seq;
  std::optional<Identity> id;   // identity of the source compound or hole
  Path path;                    // position in the reduced term

  std::string text;             // Text, Chars, Image file
  int amount = 0;               // Font: +1/-1; Indent: pixels
  std::vector<NF> children;     // bodies; Tree: root first; Box: items

  BoxKind box = BoxKind::Box;
  std::vector<Position> positions;  // parallel to Box items
  std::optional<int> border;
  bool fixed = false;
  Menu menu;

  int x = 0, y = 0, w = 0, h = 0;   // Ellipse, Rectangle, Thumbnail; Image uses w, h
  bool fill = false;
  bool selectable = false;

  std::shared_ptr<const GraphNF> graph;  // Graph; Thumbnail holds its body in children
  std::optional<Term> hole;              // Hole: the hole term itself
};

struct EdgeType {
  std::string name;
  Term source_type;
  Term target_type;
};

struct GraphNode {
  std::optional<Identity> id;
  Term type;
  std::optional<Identity> abstract_id;
  NF display;
};

struct EdgeLabel {
  std::optional<Identity> id;
  LabelEnd end = LabelEnd::Target;
  NF display;
};

struct GraphEdge {
  std::optional<Identity> id;
  std::optional<Term> type;
  std::optional<Identity> source;
  Decoration source_decoration = Decoration::None;
  std::optional<Identity> target;
  Decoration target_decoration = Decoration::None;
  std::vector<EdgeLabel> labels;
};

struct GraphNF {
  std::vector<EdgeType> edge_types;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
};

NF validate_nf(const Term& t);
bool is_normal_form(const Term& t);

}  // namespace projed
