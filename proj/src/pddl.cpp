#include "liftplan/pddl.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace liftplan {

SyntaxError::SyntaxError(int line, int col, const std::string& what)
    : PddlError(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
      line_(line),
      col_(col) {}

UnsupportedFeature::UnsupportedFeature(std::string feature)
    : PddlError("unsupported PDDL feature: " + feature), feature_(std::move(feature)) {}

namespace {

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
  bool is_list = false;
  std::string atom;  // lower-cased symbol when !is_list
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;

  bool is(std::string_view s) const { return !is_list && atom == s; }
  bool head_is(std::string_view s) const {
    return is_list && !items.empty() && items.front().is(s);
  }
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line, col, what); }
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  SExpr parse_toplevel() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "empty input");
    SExpr e = parse();
    skip_space();
    if (pos_ < text_.size()) throw SyntaxError(line_, col_, "trailing characters after expression");
    return e;
  }

 private:
  SExpr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "unexpected end of input");
    SExpr e;
    e.line = line_;
    e.col = col_;
    char c = text_[pos_];
    if (c == ')') throw SyntaxError(line_, col_, "unexpected ')'");
    if (c == '(') {
      advance();
      e.is_list = true;
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError(e.line, e.col, "unbalanced '('");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(parse());
      }
      return e;
    }
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')' || ch == ';') break;
      e.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      advance();
    }
    return e;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Helpers

// Unsupported requirement -> reported feature name.
const std::map<std::string, std::string, std::less<>> kUnsupportedRequirements = {
    {":conditional-effects", "when"},
    {":universal-preconditions", "forall"},
    {":existential-preconditions", "exists"},
    {":quantified-preconditions", "forall"},
    {":disjunctive-preconditions", "or"},
    {":derived-predicates", "derived-predicates"},
    {":durative-actions", "durative-actions"},
    {":numeric-fluents", "numeric-fluents"},
    {":fluents", "numeric-fluents"},
    {":timed-initial-literals", "timed-initial-literals"},
    {":duration-inequalities", "duration-inequalities"},
    {":continuous-effects", "continuous-effects"},
    {":preferences", "preferences"},
    {":constraints", "constraints"}};

const std::set<std::string, std::less<>> kUnsupportedConnectives = {
    "forall", "exists", "or", "imply", "when", "increase", "decrease", "assign",
    "scale-up", "scale-down", "either", ">", "<", ">=", "<="};

// Parses `a b - t c - u d` into (name, type) pairs; untyped names get "object".
std::vector<std::pair<std::string, std::string>> parse_typed_list(const std::vector<SExpr>& items,
                                                                  std::size_t begin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& it = items[i];
    if (it.is_list) {
      if (it.head_is("either")) throw UnsupportedFeature("either");
      it.fail("expected a name in typed list");
    }
    if (it.atom == "-") {
      if (i + 1 >= items.size()) it.fail("missing type after '-'");
      const SExpr& type = items[i + 1];
      if (type.head_is("either")) throw UnsupportedFeature("either");
      if (type.is_list) type.fail("expected a type name");
      for (auto& n : pending) out.emplace_back(std::move(n), type.atom);
      pending.clear();
      ++i;
    } else {
      pending.push_back(it.atom);
    }
  }
  for (auto& n : pending) out.emplace_back(std::move(n), "object");
  return out;
}

class DomainParser {
 public:
  explicit DomainParser(Task& task) : task_(task) {}

  void parse(const SExpr& root) {
    if (!root.head_is("define")) root.fail("expected (define ...)");
    if (root.items.size() < 2 || !root.items[1].head_is("domain") ||
        root.items[1].items.size() != 2) {
      root.fail("expected (domain <name>)");
    }
    task_.domain_name = root.items[1].items[1].atom;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& sec = root.items[i];
      if (!sec.is_list || sec.items.empty() || sec.items[0].is_list) sec.fail("expected a section");
      const std::string& key = sec.items[0].atom;
      if (key == ":requirements") {
        requirements(sec);
      } else if (key == ":types") {
        types(sec);
      } else if (key == ":constants") {
        constants(sec);
      } else if (key == ":predicates") {
        predicates(sec);
      } else if (key == ":functions") {
        functions(sec);
      } else if (key == ":action") {
        action(sec);
      } else if (key == ":derived") {
        throw UnsupportedFeature("derived");
      } else if (key == ":durative-action") {
        throw UnsupportedFeature("durative-action");
      } else {
        sec.fail("unknown domain section " + key);
      }
    }
  }

 private:
  void requirements(const SExpr& sec) {
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
      const std::string& r = sec.items[i].atom;
      if (auto it = kUnsupportedRequirements.find(r); it != kUnsupportedRequirements.end()) {
        throw UnsupportedFeature(it->second);
      }
      if (r == ":action-costs") {
        action_costs_ = true;
        spdlog::warn("requirement :action-costs is parsed but ignored; all actions have unit cost");
      }
      task_.requirements.push_back(r);
    }
  }

  void types(const SExpr& sec) {
    for (auto& [name, parent] : parse_typed_list(sec.items, 1)) {
      if (name == "object") continue;
      task_.types.push_back({name, parent});
    }
  }

  void constants(const SExpr& sec) {
    for (auto& [name, type] : parse_typed_list(sec.items, 1)) {
      if (task_.find_object(name)) sec.fail("duplicate constant " + name);
      task_.objects.push_back(name);
      task_.object_types.push_back(type);
    }
    task_.num_constants = static_cast<int>(task_.objects.size());
  }

  void predicates(const SExpr& sec) {
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
      const SExpr& p = sec.items[i];
      if (!p.is_list || p.items.empty() || p.items[0].is_list) p.fail("expected predicate declaration");
      Predicate pred;
      pred.name = p.items[0].atom;
      if (task_.find_predicate(pred.name)) p.fail("duplicate predicate " + pred.name);
      pred.arity = static_cast<int>(parse_typed_list(p.items, 1).size());
      task_.predicates.push_back(pred);
    }
  }

  void functions(const SExpr& sec) {
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
      const SExpr& f = sec.items[i];
      if (f.head_is("total-cost") && action_costs_) continue;
      if (f.is("-") || f.is("number")) continue;
      throw UnsupportedFeature("numeric-fluents");
    }
  }

  void action(const SExpr& sec) {
    if (sec.items.size() < 2 || sec.items[1].is_list) sec.fail("expected action name");
    ActionSchema schema;
    schema.name = sec.items[1].atom;
    for (const auto& s : task_.schemas) {
      if (s.name == schema.name) sec.fail("duplicate action " + schema.name);
    }
    for (std::size_t i = 2; i + 1 < sec.items.size(); i += 2) {
      const SExpr& key = sec.items[i];
      const SExpr& val = sec.items[i + 1];
      if (key.is(":parameters")) {
        if (!val.is_list) val.fail("expected parameter list");
        for (auto& [name, type] : parse_typed_list(val.items, 0)) {
          if (name.empty() || name[0] != '?') val.fail("parameter must start with '?'");
          schema.params.push_back(name.substr(1));
          schema.param_types.push_back(type == "object" ? std::string{} : type);
        }
      } else if (key.is(":precondition")) {
        precondition(val, schema);
      } else if (key.is(":effect")) {
        effect(val, schema);
      } else {
        key.fail("unknown action key " + key.atom);
      }
    }
    if (sec.items.size() % 2 != 0) sec.items.back().fail("dangling action key");
    for (const auto& a : schema.add) {
      for (const auto& d : schema.del) {
        if (a == d) {
          spdlog::warn("action {}: atom both added and deleted; keeping the add effect", schema.name);
        }
      }
    }
    std::erase_if(schema.del, [&](const LiftedAtom& d) {
      return std::find(schema.add.begin(), schema.add.end(), d) != schema.add.end();
    });
    task_.schemas.push_back(std::move(schema));
  }

  Term term(const SExpr& e, const ActionSchema& schema) {
    if (e.is_list) e.fail("expected a term");
    if (!e.atom.empty() && e.atom[0] == '?') {
      std::string v = e.atom.substr(1);
      for (std::size_t i = 0; i < schema.params.size(); ++i) {
        if (schema.params[i] == v) return Term::var(static_cast<int>(i));
      }
      e.fail("undeclared variable ?" + v + " in action " + schema.name);
    }
    auto obj = task_.find_object(e.atom);
    if (!obj) throw UndeclaredObject("undeclared constant " + e.atom + " in action " + schema.name);
    return Term::object(*obj);
  }

  LiftedAtom atom(const SExpr& e, const ActionSchema& schema) {
    if (!e.is_list || e.items.empty() || e.items[0].is_list) e.fail("expected an atom");
    const std::string& name = e.items[0].atom;
    if (kUnsupportedConnectives.count(name)) throw UnsupportedFeature(name);
    auto pred = task_.find_predicate(name);
    if (!pred) throw UndeclaredPredicate("undeclared predicate " + name + " in action " + schema.name);
    LiftedAtom a;
    a.predicate = *pred;
    for (std::size_t i = 1; i < e.items.size(); ++i) a.args.push_back(term(e.items[i], schema));
    if (static_cast<int>(a.args.size()) != task_.predicates[*pred].arity) {
      throw ArityMismatch("predicate " + name + " expects " +
                          std::to_string(task_.predicates[*pred].arity) + " arguments in action " +
                          schema.name);
    }
    return a;
  }

  void precondition(const SExpr& e, ActionSchema& schema) {
    if (e.is_list && e.items.empty()) return;  // ()
    if (e.head_is("and")) {
      for (std::size_t i = 1; i < e.items.size(); ++i) precondition(e.items[i], schema);
      return;
    }
    if (e.head_is("=")) {
      if (e.items.size() != 3) e.fail("equality takes two terms");
      schema.equalities.push_back({term(e.items[1], schema), term(e.items[2], schema), false});
      return;
    }
    if (e.head_is("not")) {
      if (e.items.size() != 2) e.fail("not takes one argument");
      const SExpr& inner = e.items[1];
      if (inner.head_is("=")) {
        if (inner.items.size() != 3) inner.fail("equality takes two terms");
        schema.equalities.push_back(
            {term(inner.items[1], schema), term(inner.items[2], schema), true});
        return;
      }
      throw UnsupportedFeature("negative-preconditions");
    }
    schema.pre.push_back(atom(e, schema));
  }

  void effect(const SExpr& e, ActionSchema& schema) {
    if (e.is_list && e.items.empty()) return;
    if (e.head_is("and")) {
      for (std::size_t i = 1; i < e.items.size(); ++i) effect(e.items[i], schema);
      return;
    }
    if (e.head_is("increase") && action_costs_) return;
    if (e.head_is("when")) throw UnsupportedFeature("conditional-effects");
    if (e.head_is("not")) {
      if (e.items.size() != 2) e.fail("not takes one argument");
      schema.del.push_back(atom(e.items[1], schema));
      return;
    }
    schema.add.push_back(atom(e, schema));
  }

  Task& task_;
  bool action_costs_ = false;
};

class ProblemParser {
 public:
  explicit ProblemParser(Task& task) : task_(task) {}

  void parse(const SExpr& root) {
    if (!root.head_is("define")) root.fail("expected (define ...)");
    if (root.items.size() < 2 || !root.items[1].head_is("problem") ||
        root.items[1].items.size() != 2) {
      root.fail("expected (problem <name>)");
    }
    task_.problem_name = root.items[1].items[1].atom;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
      const SExpr& sec = root.items[i];
      if (!sec.is_list || sec.items.empty() || sec.items[0].is_list) sec.fail("expected a section");
      const std::string& key = sec.items[0].atom;
      if (key == ":domain") {
        if (sec.items.size() != 2) sec.fail("expected (:domain <name>)");
        if (sec.items[1].atom != task_.domain_name) {
          spdlog::warn("problem refers to domain '{}' but domain is '{}'", sec.items[1].atom,
                       task_.domain_name);
        }
      } else if (key == ":requirements") {
        continue;
      } else if (key == ":objects") {
        for (auto& [name, type] : parse_typed_list(sec.items, 1)) {
          if (task_.find_object(name)) {
            spdlog::warn("object {} declared twice; keeping the first declaration", name);
            continue;
          }
          task_.objects.push_back(name);
          task_.object_types.push_back(type);
        }
      } else if (key == ":init") {
        for (std::size_t j = 1; j < sec.items.size(); ++j) {
          const SExpr& a = sec.items[j];
          if (a.head_is("=")) continue;  // numeric initialisation, e.g. (= (total-cost) 0)
          task_.init.push_back(ground_atom(a));
        }
      } else if (key == ":goal") {
        if (sec.items.size() != 2) sec.fail("expected one goal formula");
        goal(sec.items[1]);
      } else if (key == ":metric") {
        continue;
      } else {
        sec.fail("unknown problem section " + key);
      }
    }
    std::sort(task_.init.begin(), task_.init.end());
    task_.init.erase(std::unique(task_.init.begin(), task_.init.end()), task_.init.end());
    std::sort(task_.goal.begin(), task_.goal.end());
    task_.goal.erase(std::unique(task_.goal.begin(), task_.goal.end()), task_.goal.end());
  }

 private:
  GroundAtom ground_atom(const SExpr& e) {
    if (!e.is_list || e.items.empty() || e.items[0].is_list) e.fail("expected a ground atom");
    const std::string& name = e.items[0].atom;
    if (name == "not") throw UnsupportedFeature("negative-goals");
    if (kUnsupportedConnectives.count(name)) throw UnsupportedFeature(name);
    auto pred = task_.find_predicate(name);
    if (!pred) throw UndeclaredPredicate("undeclared predicate " + name);
    GroundAtom a;
    a.predicate = *pred;
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      const SExpr& arg = e.items[i];
      if (arg.is_list) arg.fail("expected an object name");
      auto obj = task_.find_object(arg.atom);
      if (!obj) throw UndeclaredObject("undeclared object " + arg.atom);
      a.args.push_back(*obj);
    }
    if (static_cast<int>(a.args.size()) != task_.predicates[*pred].arity) {
      throw ArityMismatch("predicate " + name + " expects " +
                          std::to_string(task_.predicates[*pred].arity) + " arguments");
    }
    return a;
  }

  void goal(const SExpr& e) {
    if (e.is_list && e.items.empty()) return;
    if (e.head_is("and")) {
      for (std::size_t i = 1; i < e.items.size(); ++i) goal(e.items[i]);
      return;
    }
    task_.goal.push_back(ground_atom(e));
  }

  Task& task_;
};

std::string term_to_string(const Term& t, const ActionSchema& s, const Task& task) {
  return t.is_var() ? "?" + s.params[t.index] : task.objects[t.index];
}

std::string lifted_to_string(const LiftedAtom& a, const ActionSchema& s, const Task& task) {
  std::string out = "(" + task.predicates[a.predicate].name;
  for (const auto& t : a.args) out += " " + term_to_string(t, s, task);
  return out + ")";
}

std::string typed_names(const std::vector<std::string>& names, const std::vector<std::string>& types,
                        std::size_t begin, std::size_t end, const std::string& prefix = "") {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out += " ";
    out += prefix + names[i];
    const std::string& t = types[i];
    if (!t.empty() && t != "object") out += " - " + t;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Task

std::optional<PredicateId> Task::find_predicate(std::string_view name) const {
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (predicates[i].name == name) return static_cast<PredicateId>(i);
  }
  return std::nullopt;
}

std::optional<ObjectId> Task::find_object(std::string_view name) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i] == name) return static_cast<ObjectId>(i);
  }
  return std::nullopt;
}

std::optional<SchemaId> Task::find_schema(std::string_view name) const {
  for (std::size_t i = 0; i < schemas.size(); ++i) {
    if (schemas[i].name == name) return static_cast<SchemaId>(i);
  }
  return std::nullopt;
}

void Task::finalize() {
  for (auto& p : predicates) p.is_static = true;
  for (const auto& s : schemas) {
    for (const auto& a : s.add) predicates[a.predicate].is_static = false;
    for (const auto& a : s.del) predicates[a.predicate].is_static = false;
  }
  const unsigned __int128 n = std::max<std::size_t>(objects.size(), 1);
  pred_offset_.assign(predicates.size() + 1, 0);
  unsigned __int128 offset = 0;
  for (std::size_t p = 0; p < predicates.size(); ++p) {
    pred_offset_[p] = static_cast<AtomId>(offset);
    unsigned __int128 size = 1;
    for (int i = 0; i < predicates[p].arity; ++i) {
      size *= n;
      if (size > (static_cast<unsigned __int128>(1) << 62)) {
        throw PddlError("atom space too large to encode for predicate " + predicates[p].name);
      }
    }
    offset += size;
    if (offset > (static_cast<unsigned __int128>(1) << 62)) {
      throw PddlError("atom space too large to encode");
    }
  }
  pred_offset_[predicates.size()] = static_cast<AtomId>(offset);

  static_atoms_.clear();
  static_tuples_.assign(predicates.size(), {});
  for (const auto& a : init) {
    if (!predicates[a.predicate].is_static) continue;
    static_atoms_.push_back(atom_id(a));
  }
  std::sort(static_atoms_.begin(), static_atoms_.end());
  static_atoms_.erase(std::unique(static_atoms_.begin(), static_atoms_.end()), static_atoms_.end());
  for (AtomId id : static_atoms_) {
    GroundAtom a = decode(id);
    auto& tuples = static_tuples_[a.predicate];
    tuples.insert(tuples.end(), a.args.begin(), a.args.end());
  }
}

AtomId Task::atom_id(PredicateId pred, const ObjectId* args) const {
  const AtomId n = std::max<std::size_t>(objects.size(), 1);
  AtomId local = 0;
  for (int i = predicates[pred].arity - 1; i >= 0; --i) local = local * n + static_cast<AtomId>(args[i]);
  return pred_offset_[pred] + local;
}

AtomId Task::atom_id(const GroundAtom& atom) const { return atom_id(atom.predicate, atom.args.data()); }

PredicateId Task::predicate_of(AtomId id) const {
  auto it = std::upper_bound(pred_offset_.begin(), pred_offset_.end(), id);
  return static_cast<PredicateId>(it - pred_offset_.begin() - 1);
}

GroundAtom Task::decode(AtomId id) const {
  GroundAtom a;
  a.predicate = predicate_of(id);
  const AtomId n = std::max<std::size_t>(objects.size(), 1);
  AtomId local = id - pred_offset_[a.predicate];
  a.args.resize(predicates[a.predicate].arity);
  for (int i = 0; i < predicates[a.predicate].arity; ++i) {
    a.args[i] = static_cast<ObjectId>(local % n);
    local /= n;
  }
  return a;
}

bool Task::has_static_atom(AtomId id) const {
  return std::binary_search(static_atoms_.begin(), static_atoms_.end(), id);
}

std::vector<AtomId> Task::initial_fluents() const {
  std::vector<AtomId> out;
  for (const auto& a : init) {
    if (!predicates[a.predicate].is_static) out.push_back(atom_id(a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AtomId> Task::goal_ids() const {
  std::vector<AtomId> out;
  for (const auto& a : goal) out.push_back(atom_id(a));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string Task::atom_to_string(const GroundAtom& atom) const {
  std::string out = "(" + predicates[atom.predicate].name;
  for (ObjectId o : atom.args) out += " " + objects[o];
  return out + ")";
}

std::string Task::atom_to_string(AtomId id) const { return atom_to_string(decode(id)); }

bool operator==(const Task& a, const Task& b) {
  if (a.predicates.size() != b.predicates.size()) return false;
  for (std::size_t i = 0; i < a.predicates.size(); ++i) {
    if (a.predicates[i].name != b.predicates[i].name ||
        a.predicates[i].arity != b.predicates[i].arity ||
        a.predicates[i].is_static != b.predicates[i].is_static) {
      return false;
    }
  }
  auto sorted = [](std::vector<GroundAtom> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  return a.domain_name == b.domain_name && a.problem_name == b.problem_name &&
         a.types == b.types && a.schemas == b.schemas && a.objects == b.objects &&
         a.object_types == b.object_types && a.num_constants == b.num_constants &&
         sorted(a.init) == sorted(b.init) && sorted(a.goal) == sorted(b.goal);
}

// ---------------------------------------------------------------------------
// Operations

Task parse_domain(std::string_view text) {
  Task task;
  DomainParser(task).parse(Lexer(text).parse_toplevel());
  task.finalize();
  return task;
}

Task parse_instance(std::string_view text, const Task& domain) {
  Task task = domain;
  task.problem_name.clear();
  task.init.clear();
  task.goal.clear();
  task.objects.resize(task.num_constants);
  task.object_types.resize(task.num_constants);
  ProblemParser(task).parse(Lexer(text).parse_toplevel());
  task.finalize();
  return compile_types(task);
}

Task compile_types(const Task& input) {
  Task task = input;
  bool typed = !task.types.empty();
  for (const auto& t : task.object_types) typed = typed || (!t.empty() && t != "object");
  for (const auto& s : task.schemas) {
    for (const auto& t : s.param_types) typed = typed || !t.empty();
  }
  if (!typed) return task;

  std::map<std::string, std::string> parent;
  for (const auto& t : task.types) parent[t.name] = t.parent;
  auto check_known = [&](const std::string& t) {
    if (t.empty() || t == "object") return;
    if (!parent.count(t)) throw UnknownType("unknown type " + t);
  };
  for (const auto& [name, par] : parent) check_known(par);

  // One static unary predicate per type, in declaration order.
  std::map<std::string, PredicateId> type_pred;
  for (const auto& t : task.types) {
    if (type_pred.count(t.name)) continue;
    std::string name = t.name;
    if (task.find_predicate(name)) name += "-type";
    type_pred[t.name] = static_cast<PredicateId>(task.predicates.size());
    task.predicates.push_back({name, 1, true, true});
  }
  auto ancestors = [&](const std::string& t) {
    std::vector<PredicateId> out;
    std::string cur = t;
    std::set<std::string> seen;
    while (!cur.empty() && cur != "object") {
      check_known(cur);
      if (!seen.insert(cur).second) throw UnknownType("cyclic type hierarchy at " + cur);
      out.push_back(type_pred.at(cur));
      cur = parent[cur];
    }
    return out;
  };

  for (std::size_t o = 0; o < task.objects.size(); ++o) {
    for (PredicateId p : ancestors(task.object_types[o])) {
      task.init.push_back({p, {static_cast<ObjectId>(o)}});
    }
    task.object_types[o] = "object";
  }
  for (auto& s : task.schemas) {
    for (std::size_t i = 0; i < s.params.size(); ++i) {
      const std::string& t = s.param_types[i];
      if (t.empty() || t == "object") continue;
      check_known(t);
      s.pre.push_back({type_pred.at(t), {Term::var(static_cast<int>(i))}});
      s.param_types[i].clear();
    }
  }
  task.types.clear();
  std::sort(task.init.begin(), task.init.end());
  task.init.erase(std::unique(task.init.begin(), task.init.end()), task.init.end());
  task.finalize();
  return task;
}

std::vector<PredicateId> static_predicates(const Task& task) {
  std::vector<bool> in_effect(task.predicates.size(), false);
  for (const auto& s : task.schemas) {
    for (const auto& a : s.add) in_effect[a.predicate] = true;
    for (const auto& a : s.del) in_effect[a.predicate] = true;
  }
  std::vector<PredicateId> out;
  for (std::size_t p = 0; p < task.predicates.size(); ++p) {
    if (!in_effect[p]) out.push_back(static_cast<PredicateId>(p));
  }
  return out;
}

std::string domain_to_pddl(const Task& task) {
  std::ostringstream os;
  os << "(define (domain " << task.domain_name << ")\n";
  if (!task.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : task.requirements) os << " " << r;
    os << ")\n";
  }
  if (!task.types.empty()) {
    os << "  (:types";
    for (const auto& t : task.types) os << " " << t.name << " - " << (t.parent.empty() ? "object" : t.parent);
    os << ")\n";
  }
  if (task.num_constants > 0) {
    os << "  (:constants "
       << typed_names(task.objects, task.object_types, 0, task.num_constants) << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : task.predicates) {
    os << " (" << p.name;
    for (int i = 0; i < p.arity; ++i) os << " ?x" << i;
    os << ")";
  }
  os << ")\n";
  for (const auto& s : task.schemas) {
    os << "  (:action " << s.name << "\n";
    os << "    :parameters (" << typed_names(s.params, s.param_types, 0, s.params.size(), "?")
       << ")\n";
    os << "    :precondition (and";
    for (const auto& a : s.pre) os << " " << lifted_to_string(a, s, task);
    for (const auto& e : s.equalities) {
      std::string eq = "(= " + term_to_string(e.lhs, s, task) + " " + term_to_string(e.rhs, s, task) + ")";
      os << " " << (e.negated ? "(not " + eq + ")" : eq);
    }
    os << ")\n    :effect (and";
    for (const auto& a : s.add) os << " " << lifted_to_string(a, s, task);
    for (const auto& a : s.del) os << " (not " << lifted_to_string(a, s, task) << ")";
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string problem_to_pddl(const Task& task) {
  std::ostringstream os;
  os << "(define (problem " << task.problem_name << ")\n";
  os << "  (:domain " << task.domain_name << ")\n";
  os << "  (:objects "
     << typed_names(task.objects, task.object_types, task.num_constants, task.objects.size())
     << ")\n";
  os << "  (:init";
  for (const auto& a : task.init) os << "\n    " << task.atom_to_string(a);
  os << ")\n  (:goal (and";
  for (const auto& a : task.goal) os << "\n    " << task.atom_to_string(a);
  os << ")))\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace liftplan
