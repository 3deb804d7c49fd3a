#include "projed/rewrite.hpp"

#include <cassert>

#include "projed/match.hpp"
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

bool may_match(const Pattern& p, const Term& t) {
  if (p.kind != Pattern::Kind::Comp) return true;
  return t.functor() == p.name;
}

class Walker {
 public:
  Walker(const std::vector<Rule>& rules, const LanguageDef& def) : rules_(rules), def_(def) {}

  std::optional<std::pair<Term, std::size_t>> at_node(const Term& node, const Path& path) {
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      const Rule& rule = rules_[r];
      if (!may_match(rule.pattern, node)) continue;
      auto env = match_pattern(rule.pattern, node);
      if (!env) continue;
      try {
        return std::make_pair(eval_expr(rule.body, *env, def_), r);
      } catch (const EvalError& e) {
        throw EvalError("rule " + std::to_string(r) + " (line " + std::to_string(rule.pos.line) +
                        ") at " + path_text(path) + ": " + e.what());
      }
    }
    return std::nullopt;
  }

  std::optional<RuleHit> walk(const Term& root) {
    Path path;
    return visit(root, root, path);
  }

 private:
  std::optional<RuleHit> visit(const Term& root, const Term& node, Path& path) {
    if (auto hit = at_node(node, path)) {
      return RuleHit{replace_at_path(root, path, std::move(hit->first)), hit->second, path};
    }
    const auto& kids = node.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      path.push_back(i);
      auto found = visit(root, kids[i], path);
      path.pop_back();
      if (found) return found;
    }
    return std::nullopt;
  }

  const std::vector<Rule>& rules_;
  const LanguageDef& def_;
};

}  // namespace

std::optional<RuleHit> find_and_apply(const std::vector<Rule>& rules, const Term& t,
                                      const LanguageDef& def) {
  if (rules.empty()) return std::nullopt;
  return Walker(rules, def).walk(t);
}

std::optional<Term> apply_rules_once(const std::vector<Rule>& rules, const Term& t,
                                     const LanguageDef& def) {
  auto hit = find_and_apply(rules, t, def);
  if (!hit) return std::nullopt;
  return std::move(hit->result);
}

RewriteOutcome rewrite_fixpoint(const std::vector<Rule>& rules, const Term& t, Fuel fuel,
                                const LanguageDef& def) {
  RewriteOutcome out{t, 0, RewriteStatus::Converged};
  Walker walker(rules, def);
  while (!rules.empty()) {
    auto hit = walker.walk(out.result);
    if (!hit) break;
    if (out.steps_used == fuel.max_steps) {
      out.status = RewriteStatus::FuelExhausted;
      break;
    }
    out.result = std::move(hit->result);
    ++out.steps_used;
  }
#ifndef NDEBUG
  if (out.status == RewriteStatus::Converged) assert(!walker.walk(out.result));
#endif
  return out;
}

RewriteOutcome transform(const LanguageDef& def, const Term& t, Fuel fuel) {
  return rewrite_fixpoint(def.transform_rules, t, fuel, def);
}

Term reduce(const LanguageDef& def, const Term& t, Fuel fuel) {
  DisplayCoinage coinage;
  auto out = rewrite_fixpoint(def.reduce_rules, t, fuel, def);
  if (out.status == RewriteStatus::FuelExhausted) {
    throw FuelExhaustedError("reduce did not settle within " + std::to_string(fuel.max_steps) +
                                 " steps",
                             out.result);
  }
  validate_nf(out.result);
  return out.result;
}

}  // namespace projed
