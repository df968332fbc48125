#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "relcorr/lexer.hpp"
#include "relcorr/minilang.hpp"
#include "relcorr/space.hpp"
#include "relcorr/speclang.hpp"

namespace relcorr {

/// Holds parsed spaces, specs and programs loaded from files and resolves
/// references by name. Every spec/program must name a space loaded earlier;
/// name collisions within a kind are rejected.
class Workspace {
 public:
  enum class Kind { Space, Spec, Program };

  /// Parses a DSL document; the kind is determined by its leading keyword.
  Kind load_text(const std::string& text, const std::string& origin) {
    TokenCursor cur(tokenize(text));
    const Token& head = cur.peek();
    if (head.is_ident("space")) {
      SpacePtr sp = parse_space(text);
      insert(spaces_, sp->name(), sp, origin, "space");
      return Kind::Space;
    }
    std::string space_name = peek_space_name(cur, origin);
    SpacePtr sp = find_space(space_name, origin);
    if (head.is_ident("spec")) {
      SpecDefPtr def = parse_spec(text, sp);
      insert(specs_, def->name, def, origin, "spec");
      return Kind::Spec;
    }
    if (head.is_ident("prog")) {
      ProgramDefPtr def = parse_prog(text, sp);
      insert(programs_, def->name, def, origin, "program");
      return Kind::Program;
    }
    throw ParseError(head.pos,
                     origin + ": expected 'space', 'spec' or 'prog'");
  }

  Kind load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_text(buf.str(), path);
  }

  SpacePtr space(const std::string& name) const {
    auto it = spaces_.find(name);
    if (it == spaces_.end())
      throw std::runtime_error("no space named '" + name + "' is loaded");
    return it->second;
  }
  SpecDefPtr spec(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end())
      throw std::runtime_error("no spec named '" + name + "' is loaded");
    return it->second;
  }
  ProgramDefPtr program(const std::string& name) const {
    auto it = programs_.find(name);
    if (it == programs_.end())
      throw std::runtime_error("no program named '" + name + "' is loaded");
    return it->second;
  }

  const std::map<std::string, SpacePtr>& spaces() const { return spaces_; }
  const std::map<std::string, SpecDefPtr>& specs() const { return specs_; }
  const std::map<std::string, ProgramDefPtr>& programs() const {
    return programs_;
  }

  /// Name of the last spec/program loaded, in load order.
  const std::vector<std::pair<Kind, std::string>>& load_order() const {
    return load_order_;
  }

 private:
  template <typename Map, typename Value>
  void insert(Map& map, const std::string& name, Value v,
              const std::string& origin, const char* kind) {
    if (!map.emplace(name, std::move(v)).second)
      throw std::runtime_error(origin + ": a " + kind + " named '" + name +
                               "' is already loaded");
    load_order_.emplace_back(kind_of<Value>(), name);
  }

  template <typename Value>
  static Kind kind_of() {
    if constexpr (std::is_same_v<Value, SpacePtr>)
      return Kind::Space;
    else if constexpr (std::is_same_v<Value, SpecDefPtr>)
      return Kind::Spec;
    else
      return Kind::Program;
  }

  static std::string peek_space_name(TokenCursor& cur,
                                     const std::string& origin) {
    // spec/prog headers read "<kw> NAME on SPACE".
    cur.next();
    cur.next();
    if (!cur.accept_keyword("on"))
      throw std::runtime_error(origin + ": malformed header, expected 'on'");
    if (cur.peek().kind != TokKind::Ident)
      throw std::runtime_error(origin + ": malformed header, expected space name");
    return cur.peek().text;
  }

  SpacePtr find_space(const std::string& name, const std::string& origin) {
    auto it = spaces_.find(name);
    if (it == spaces_.end())
      throw std::runtime_error(origin + ": references space '" + name +
                               "', which is not loaded");
    return it->second;
  }

  std::map<std::string, SpacePtr> spaces_;
  std::map<std::string, SpecDefPtr> specs_;
  std::map<std::string, ProgramDefPtr> programs_;
  std::vector<std::pair<Kind, std::string>> load_order_;
};

}  // namespace relcorr
