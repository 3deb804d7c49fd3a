#include "projed/sexpr.hpp"

#include <charconv>

namespace projed {

namespace {

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '"' || c == ';' || c == ' ' ||
         c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_blank();
    while (!at_end()) {
      out.push_back(read_datum());
      skip_blank();
    }
    return out;
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek() const { return text_[i_]; }

  char advance() {
    char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  SourcePos here() const { return {line_, col_}; }

  void skip_blank() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_datum() {
    SourcePos pos = here();
    char c = peek();
    if (c == '(' || c == '[') return read_list(pos);
    if (c == ')' || c == ']') throw ParseError(std::string("unexpected '") + c + "'", pos);
    if (c == '"') return read_string(pos);
    if (c == '#') return read_hash(pos);
    return read_atom(pos);
  }

  SExpr read_list(SourcePos pos) {
    char open = advance();
    char close = open == '(' ? ')' : ']';
    SExpr::List items;
    for (;;) {
      skip_blank();
      if (at_end()) throw ParseError(std::string("unbalanced '") + open + "'", pos);
      char c = peek();
      if (c == ')' || c == ']') {
        if (c != close) {
          throw ParseError(std::string("'") + open + "' closed by '" + c + "'", here());
        }
        advance();
        return SExpr{std::move(items), pos};
      }
      items.push_back(read_datum());
    }
  }

  SExpr read_string(SourcePos pos) {
    advance();
    std::string out;
    for (;;) {
      if (at_end()) throw ParseError("unterminated string", pos);
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) throw ParseError("unterminated string", pos);
        char e = advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: throw ParseError(std::string("unknown escape \\") + e, here());
        }
      } else {
        out += c;
      }
    }
    return SExpr{std::move(out), pos};
  }

  std::string read_token() {
    std::string tok;
    while (!at_end() && !is_delimiter(peek())) tok += advance();
    return tok;
  }

  SExpr read_hash(SourcePos pos) {
    advance();
    if (at_end()) throw ParseError("lone '#'", pos);
    if (peek() == '\\') {
      advance();
      if (at_end()) throw ParseError("bad character literal", pos);
      // The first character is taken even if it is a delimiter: #\( #\space
      std::string tok(1, advance());
      while (!at_end() && !is_delimiter(peek())) tok += advance();
      std::u32string cps = utf8_decode(tok);
      if (cps.size() == 1) return SExpr{Char{cps[0]}, pos};
      if (tok == "space") return SExpr{Char{U' '}, pos};
      if (tok == "newline") return SExpr{Char{U'\n'}, pos};
      if (tok == "tab") return SExpr{Char{U'\t'}, pos};
      throw ParseError("bad character literal #\\" + tok, pos);
    }
    std::string tok = read_token();
    if (tok == "t" || tok == "true") return SExpr{true, pos};
    if (tok == "f" || tok == "false") return SExpr{false, pos};
    throw ParseError("unknown syntax #" + tok, pos);
  }

  SExpr read_atom(SourcePos pos) {
    std::string tok = read_token();
    std::size_t digits_from = (tok.size() > 1 && (tok[0] == '-' || tok[0] == '+')) ? 1 : 0;
    bool numeric = digits_from < tok.size() &&
                   tok.find_first_not_of("0123456789", digits_from) == std::string::npos;
    if (numeric) {
      std::int64_t v = 0;
      const char* first = tok.data() + (tok[0] == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
      if (ec != std::errc()) throw ParseError("integer out of range: " + tok, pos);
      return SExpr{v, pos};
    }
    return SExpr{Symbol{std::move(tok)}, pos};
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

Atom SExpr::to_atom() const {
  return std::visit(
      [this](const auto& v) -> Atom {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Symbol> || std::is_same_v<T, List>) {
          throw ParseError("expected a literal", pos);
        } else {
          return Atom(v);
        }
      },
      value);
}

std::vector<SExpr> read_sexpr(std::string_view text) { return Reader(text).read_all(); }

std::string print_sexpr(const SExpr& e) {
  if (e.is_symbol()) return e.symbol();
  if (e.is_list()) {
    std::string out = "(";
    bool first = true;
    for (const auto& item : e.list()) {
      if (!first) out += ' ';
      first = false;
      out += print_sexpr(item);
    }
    return out + ")";
  }
  return e.to_atom().literal();
}

Term sexpr_to_term(const SExpr& e) {
  if (e.is_symbol()) throw ParseError("bare symbol '" + e.symbol() + "' in data", e.pos);
  if (!e.is_list()) return Term(e.to_atom());
  const auto& items = e.list();
  if (items.empty()) throw ParseError("data list must start with a functor", e.pos);
  std::string functor;
  std::optional<Identity> id;
  if (items.front().is_symbol()) {
    functor = items.front().symbol();
  } else if (items.front().is_list() && items.front().list().size() > 1 &&
             items.front().list().front().is_symbol()) {
    // ((f part ...) child ...) designates the identity
    const auto& head = items.front().list();
    functor = head.front().symbol();
    std::vector<Atom> parts;
    for (std::size_t i = 1; i < head.size(); ++i) {
      if (!head[i].is_literal()) throw ParseError("identity parts must be literals", head[i].pos);
      parts.push_back(head[i].to_atom());
    }
    id = Identity(std::move(parts));
  } else {
    throw ParseError("data list must start with a functor", e.pos);
  }
  std::vector<Term> kids;
  for (std::size_t i = 1; i < items.size(); ++i) kids.push_back(sexpr_to_term(items[i]));
  return make_compound(std::move(functor), std::move(id), std::move(kids));
}

}  // namespace projed
