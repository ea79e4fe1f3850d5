#include "testscope/extract/extractor.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

namespace testscope {

namespace fs = std::filesystem;
using java::ParsedFile;
using java::Receiver;

std::string to_string(JUnitStyle style) {
  switch (style) {
    case JUnitStyle::V3:
      return "3";
    case JUnitStyle::V4:
      return "4";
    case JUnitStyle::Both:
      break;
  }
  return "both";
}

JUnitStyle parse_junit_style(std::string_view text) {
  if (text == "3") return JUnitStyle::V3;
  if (text == "4") return JUnitStyle::V4;
  if (text == "both") return JUnitStyle::Both;
  throw ConfigError("junit-style must be 3, 4 or both, got '" + std::string(text) + "'");
}

std::string to_string(SourceRootKind kind) {
  switch (kind) {
    case SourceRootKind::ProductionRoot:
      return "ProductionRoot";
    case SourceRootKind::TestRoot:
      return "TestRoot";
    case SourceRootKind::Mixed:
      break;
  }
  return "Mixed";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::regex glob_regex(const std::string& glob) {
  std::string re;
  for (std::size_t i = 0; i < glob.size(); ++i) {
    char c = glob[i];
    if (c == '*') {
      if (i + 1 < glob.size() && glob[i + 1] == '*') {
        if (i + 2 < glob.size() && glob[i + 2] == '/') {
          re += "(?:.*/)?";
          i += 2;
        } else {
          re += ".*";
          ++i;
        }
      } else {
        re += "[^/]*";
      }
    } else if (c == '?') {
      re += "[^/]";
    } else if (c == '[') {
      auto close = glob.find(']', i + 1);
      if (close == std::string::npos) throw ConfigError("unterminated '[' in glob '" + glob + "'");
      std::string set = glob.substr(i + 1, close - i - 1);
      if (!set.empty() && set[0] == '!') set[0] = '^';
      re += "[" + set + "]";
      i = close;
    } else if (std::string_view("\\^$.|+(){}").find(c) != std::string_view::npos) {
      re += '\\';
      re += c;
    } else {
      re += c;
    }
  }
  try {
    return std::regex(re);
  } catch (const std::regex_error&) {
    throw ConfigError("invalid glob '" + glob + "'");
  }
}

std::vector<std::regex> compile_globs(const std::vector<std::string>& globs) {
  std::vector<std::regex> out;
  for (const auto& g : globs) out.push_back(glob_regex(g));
  return out;
}

bool any_match(const std::vector<std::regex>& res, const std::string& path) {
  return std::any_of(res.begin(), res.end(),
                     [&](const std::regex& r) { return std::regex_match(path, r); });
}

bool test_named(const std::string& stem) {
  static const std::regex re("^Test.*|.*(Test|Tests|TestCase)$");
  return std::regex_match(stem, re);
}

bool has_test_segment(const fs::path& rel, const ExtractionConfig& config) {
  for (auto it = rel.begin(); it != rel.end(); ++it) {
    if (std::next(it) == rel.end()) break;  // file name
    std::string seg = lower(it->string());
    for (const auto& t : config.testSegments) {
      if (seg == lower(t)) return true;
    }
  }
  return false;
}

bool is_test_segment(const std::string& seg, const ExtractionConfig& config) {
  std::string s = lower(seg);
  return std::any_of(config.testSegments.begin(), config.testSegments.end(),
                     [&](const std::string& t) { return lower(t) == s; });
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string latin1_to_utf8(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  for (unsigned char c : in) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

std::string normalized_encoding(const std::string& name) {
  std::string n = lower(name);
  if (n == "utf-8" || n == "utf8") return "utf-8";
  if (n == "iso-8859-1" || n == "latin1" || n == "latin-1" || n == "iso8859-1") return "latin1";
  throw ConfigError("unsupported source encoding '" + name + "'");
}

struct Candidate {
  fs::path absolute;
  std::string relative;
};

std::vector<Candidate> list_sources(const fs::path& root, const ExtractionConfig& config,
                                    const std::vector<std::regex>& include,
                                    const std::vector<std::regex>& exclude) {
  std::vector<Candidate> out;
  if (fs::is_regular_file(root)) {
    out.push_back({root, root.filename().generic_string()});
    return out;
  }
  auto options = fs::directory_options::skip_permission_denied;
  if (config.followSymlinks) options |= fs::directory_options::follow_directory_symlink;
  for (auto it = fs::recursive_directory_iterator(root, options);
       it != fs::recursive_directory_iterator(); ++it) {
    const auto& entry = *it;
    if (!config.followSymlinks && entry.is_symlink()) {
      continue;
    }
    if (!entry.is_regular_file()) continue;
    std::string rel = entry.path().lexically_relative(root).generic_string();
    if (!any_match(include, rel) || any_match(exclude, rel)) continue;
    out.push_back({entry.path(), rel});
  }
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.relative < b.relative; });
  return out;
}

std::string package_of(const std::string& content) {
  static const std::regex re(R"((?:^|\n)\s*package\s+([A-Za-z_$][\w$]*(?:\s*\.\s*[A-Za-z_$][\w$]*)*)\s*;)");
  std::smatch m;
  if (!std::regex_search(content, m, re)) return "";
  std::string p = m[1].str();
  p.erase(std::remove_if(p.begin(), p.end(), [](unsigned char c) { return std::isspace(c); }),
          p.end());
  return p;
}

// ---------------------------------------------------------------------------
// Linking

std::string join(const std::vector<std::string>& names, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) s += (i == from ? "" : ".") + names[i];
  return s;
}

std::string strip_generics(const std::string& written) {
  std::string out;
  int depth = 0;
  for (char c : written) {
    if (c == '<') ++depth;
    else if (c == '>') --depth;
    else if (depth == 0 && c != ' ') out += c;
  }
  return out;
}

int arity_of(std::string_view simpleName) {
  auto slash = simpleName.find('/');
  if (slash == std::string_view::npos) return -1;
  int n = 0;
  for (std::size_t i = slash + 1; i < simpleName.size() && std::isdigit(static_cast<unsigned char>(simpleName[i])); ++i) {
    n = n * 10 + (simpleName[i] - '0');
  }
  return n;
}

struct FileLink {
  const ParsedFile* file = nullptr;
  std::vector<std::optional<EntityId>> drafts;
  std::vector<std::size_t> callRelation;
};

struct TypeResult {
  enum class Kind { Class, External, Unknown } kind = Kind::Unknown;
  EntityId cls;
  bool superOnly = false;
};

class Linker {
 public:
  explicit Linker(FactModel& model) : model_(model) {}

  void add(FileLink link) { files_.push_back(std::move(link)); }

  void link(ExtractionDiagnostics& diag) {
    for (auto& f : files_) link_inheritance(f);
    for (auto& f : files_) link_declared_types(f);
    build_unique_index();
    resolve_invocations();
    for (auto& f : files_) link_accesses(f);
    for (std::size_t r : model_.relations_of(RelationKind::Invocation)) {
      ++diag.callSites;
      if (!model_.relation(r).resolved()) ++diag.unresolvedInvocationCount;
    }
    for (std::size_t r : model_.relations_of(RelationKind::Inheritance)) {
      if (!model_.relation(r).resolved()) ++diag.unresolvedInheritance;
    }
  }

  // Idempotent: only unresolved call relations are looked at.
  std::size_t resolve_invocations() {
    std::size_t resolved = 0;
    for (auto& f : files_) {
      for (std::size_t i = 0; i < f.file->calls.size(); ++i) {
        std::size_t rel = f.callRelation[i];
        if (model_.relation(rel).resolved()) continue;
        if (auto target = resolve_call(f, i)) {
          model_.resolve_relation(rel, *target);
          ++resolved;
        }
      }
    }
    return resolved;
  }

 private:
  FactModel& model_;
  std::vector<FileLink> files_;
  std::unordered_map<std::string, std::vector<EntityId>> byName_;

  const Entity& ent(EntityId id) const { return model_.entity(id); }

  std::optional<EntityId> class_of(const FileLink& f, int draft) const {
    if (draft < 0) return std::nullopt;
    const auto& d = f.file->entities[static_cast<std::size_t>(draft)];
    if (d.kind == EntityKind::Class) return f.drafts[static_cast<std::size_t>(draft)];
    return class_of(f, d.parent);
  }

  std::optional<EntityId> outer_class(EntityId c) const {
    const auto& e = ent(c);
    if (e.parent && ent(*e.parent).kind == EntityKind::Class) return e.parent;
    return std::nullopt;
  }

  std::vector<EntityId> supertypes(EntityId c) const {
    return model_.neighbors(c, RelationKind::Inheritance, Direction::Out);
  }

  // Breadth-first walk over `start` and its supertypes.
  template <typename Visit>
  std::optional<EntityId> walk_hierarchy(EntityId start, bool includeSelf, Visit visit) const {
    std::deque<EntityId> queue;
    std::unordered_set<EntityId> seen{start};
    if (includeSelf) {
      queue.push_back(start);
    } else {
      for (auto s : supertypes(start)) {
        if (seen.insert(s).second) queue.push_back(s);
      }
    }
    while (!queue.empty()) {
      EntityId c = queue.front();
      queue.pop_front();
      if (auto hit = visit(c)) return hit;
      for (auto s : supertypes(c)) {
        if (seen.insert(s).second) queue.push_back(s);
      }
    }
    return std::nullopt;
  }

  std::optional<EntityId> member_class(EntityId c, const std::string& name) const {
    return walk_hierarchy(c, true, [&](EntityId k) -> std::optional<EntityId> {
      for (auto child : model_.children(k)) {
        const auto& e = ent(child);
        if (e.kind != EntityKind::Class) continue;
        const auto& s = e.simpleName;
        if (s == name || (s.size() > name.size() + 1 && s.ends_with("$" + name))) return child;
      }
      return std::nullopt;
    });
  }

  std::optional<EntityId> resolve_simple_type(const FileLink& f, std::optional<EntityId> ctx,
                                              const std::string& name) const {
    for (auto c = ctx; c; c = outer_class(*c)) {
      if (ent(*c).simpleName == name) return c;
      if (auto m = member_class(*c, name)) return m;
    }
    const ParsedFile& pf = *f.file;
    for (const auto& imp : pf.imports) {
      if (imp == name || imp.ends_with("." + name)) {
        if (auto hit = model_.resolve(imp, EntityKind::Class)) return hit;
      }
    }
    std::string local = pf.packageName.empty() ? name : pf.packageName + "." + name;
    if (auto hit = model_.resolve(local, EntityKind::Class)) return hit;
    for (const auto& w : pf.wildcardImports) {
      if (auto hit = model_.resolve(w + "." + name, EntityKind::Class)) return hit;
    }
    return std::nullopt;
  }

  std::optional<EntityId> resolve_type(const FileLink& f, std::optional<EntityId> ctx,
                                       const std::string& written) const {
    std::string s = strip_generics(written);
    if (s.empty() || s.ends_with("]")) return std::nullopt;
    auto dot = s.find('.');
    if (dot == std::string::npos) return resolve_simple_type(f, ctx, s);
    if (auto full = model_.resolve(s, EntityKind::Class)) return full;
    if (auto head = resolve_simple_type(f, ctx, s.substr(0, dot))) {
      return model_.resolve(ent(*head).qualifiedName + s.substr(dot), EntityKind::Class);
    }
    return std::nullopt;
  }

  std::string qualify_external(const FileLink& f, const std::string& written) const {
    std::string s = strip_generics(written);
    std::string head = s.substr(0, s.find('.'));
    for (const auto& imp : f.file->imports) {
      if (imp.ends_with("." + head)) return imp + s.substr(head.size());
    }
    return s;
  }

  std::optional<EntityId> declared_class(EntityId member) const {
    const auto& t = ent(member).declaredType;
    if (t.empty()) return std::nullopt;
    return model_.resolve(t, EntityKind::Class);
  }

  std::optional<EntityId> find_field(EntityId cls, const std::string& name) const {
    return walk_hierarchy(cls, true, [&](EntityId k) -> std::optional<EntityId> {
      for (auto child : model_.children(k)) {
        const auto& e = ent(child);
        if (e.kind == EntityKind::Attribute && e.simpleName == name) return child;
      }
      return std::nullopt;
    });
  }

  std::optional<EntityId> find_field_in_scope(EntityId ctx, const std::string& name) const {
    for (std::optional<EntityId> c = ctx; c; c = outer_class(*c)) {
      if (auto f = find_field(*c, name)) return f;
    }
    return std::nullopt;
  }

  std::optional<EntityId> method_in(EntityId cls, const std::string& name, int arity,
                                    bool ctor) const {
    for (auto child : model_.children(cls)) {
      const auto& e = ent(child);
      if (e.kind != EntityKind::Method) continue;
      if (e.has(EntityFlag::Constructor) != ctor) continue;
      if (arity_of(e.simpleName) != arity) continue;
      if (!ctor && base_method_name(e.simpleName) != name) continue;
      return child;
    }
    return std::nullopt;
  }

  std::optional<EntityId> find_method(EntityId cls, const std::string& name, int arity,
                                      bool includeSelf) const {
    return walk_hierarchy(cls, includeSelf, [&](EntityId k) {
      return method_in(k, name, arity, false);
    });
  }

  // ---- passes ----

  void link_inheritance(FileLink& f) {
    for (std::size_t r = 0; r < f.file->inherits.size(); ++r) {
      const auto& h = f.file->inherits[r];
      auto self = f.drafts[static_cast<std::size_t>(h.type)];
      if (!self) continue;
      auto ctx = outer_class(*self);
      auto target = resolve_type(f, ctx, h.written);
      Relation rel;
      rel.kind = RelationKind::Inheritance;
      rel.from = *self;
      rel.site = SourceLocation{f.file->path, h.line, h.line};
      if (target && *target != *self) {
        rel.to = target;
        rel.target = ent(*target).qualifiedName;
      } else {
        rel.target = qualify_external(f, h.written);
      }
      model_.add_relation(std::move(rel));
    }
  }

  void link_declared_types(FileLink& f) {
    for (std::size_t i = 0; i < f.file->entities.size(); ++i) {
      const auto& d = f.file->entities[i];
      if (d.declaredType.empty() || !f.drafts[i]) continue;
      auto ctx = class_of(f, static_cast<int>(i));
      if (auto c = resolve_type(f, ctx, d.declaredType)) {
        model_.set_declared_type(*f.drafts[i], ent(*c).qualifiedName);
      }
    }
  }

  void build_unique_index() {
    for (const auto& e : model_.entities()) {
      if (e.kind != EntityKind::Method || e.has(EntityFlag::Constructor)) continue;
      std::string key = std::string(base_method_name(e.simpleName)) + "/" +
                        std::to_string(arity_of(e.simpleName));
      byName_[key].push_back(e.id);
    }
  }

  std::optional<EntityId> unique_match(const std::string& name, int arity) const {
    auto it = byName_.find(name + "/" + std::to_string(arity));
    if (it == byName_.end() || it->second.size() != 1) return std::nullopt;
    return it->second.front();
  }

  TypeResult external() const { return TypeResult{TypeResult::Kind::External, {}, false}; }
  TypeResult of_class(std::optional<EntityId> c) const {
    if (!c) return external();
    return TypeResult{TypeResult::Kind::Class, *c, false};
  }

  TypeResult type_of(const FileLink& f, int method, const Receiver& r) const {
    auto ctx = class_of(f, method);
    switch (r.kind) {
      case Receiver::Kind::Implicit:
      case Receiver::Kind::This:
        return of_class(ctx);
      case Receiver::Kind::Super: {
        TypeResult t = of_class(ctx);
        t.superOnly = true;
        return t;
      }
      case Receiver::Kind::Name:
        return name_type(f, ctx, r, nullptr);
      case Receiver::Kind::Call: {
        std::size_t rel = f.callRelation[static_cast<std::size_t>(r.call)];
        const auto& relation = model_.relation(rel);
        if (!relation.to) return external();
        const auto& callee = ent(*relation.to);
        if (callee.has(EntityFlag::Constructor)) return of_class(callee.parent);
        return of_class(declared_class(*relation.to));
      }
      case Receiver::Kind::Field: {
        TypeResult base = type_of(f, method, *r.base);
        if (base.kind != TypeResult::Kind::Class) return base;
        auto field = find_field(base.cls, r.field);
        if (!field) return external();
        return of_class(declared_class(*field));
      }
      case Receiver::Kind::New:
        return of_class(resolve_type(f, ctx, r.typeName));
      case Receiver::Kind::Unknown:
        break;
    }
    return TypeResult{};
  }

  // Walks a dotted name. Fields touched along the way go to `touched`.
  TypeResult name_type(const FileLink& f, std::optional<EntityId> ctx, const Receiver& r,
                       std::vector<EntityId>* touched) const {
    const auto& names = r.names;
    if (r.untypedLocal) return external();
    std::optional<EntityId> cur;
    std::size_t idx = 0;
    if (r.localType) {
      cur = resolve_type(f, ctx, *r.localType);
      idx = 1;
    } else if (auto field = ctx ? find_field_in_scope(*ctx, names[0]) : std::nullopt) {
      if (touched) touched->push_back(*field);
      cur = declared_class(*field);
      idx = 1;
    } else {
      for (std::size_t k = names.size(); k >= 1; --k) {
        if (auto t = resolve_type(f, ctx, join(names, 0, k))) {
          cur = t;
          idx = k;
          break;
        }
      }
      if (!cur) return external();
    }
    for (; idx < names.size(); ++idx) {
      if (!cur) return external();
      auto field = find_field(*cur, names[idx]);
      if (!field) return external();
      if (touched) touched->push_back(*field);
      cur = declared_class(*field);
    }
    return of_class(cur);
  }

  std::optional<EntityId> resolve_call(const FileLink& f, std::size_t index) const {
    const auto& call = f.file->calls[index];
    const Receiver& r = *call.receiver;
    auto ctx = class_of(f, call.caller);
    if (call.constructor) {
      if (r.kind == Receiver::Kind::This) {
        return ctx ? method_in(*ctx, "", call.arity, true) : std::nullopt;
      }
      if (r.kind == Receiver::Kind::Super) {
        if (!ctx) return std::nullopt;
        for (auto s : supertypes(*ctx)) {
          if (auto m = method_in(s, "", call.arity, true)) return m;
        }
        return std::nullopt;
      }
      auto cls = resolve_type(f, ctx, r.typeName);
      return cls ? method_in(*cls, "", call.arity, true) : std::nullopt;
    }
    if (r.kind == Receiver::Kind::Implicit) {
      for (auto c = ctx; c; c = outer_class(*c)) {
        if (auto m = find_method(*c, call.name, call.arity, true)) return m;
      }
      for (const auto& s : f.file->staticImports) {
        auto dot = s.rfind('.');
        if (dot == std::string::npos || s.substr(dot + 1) != call.name) continue;
        if (auto cls = resolve_type(f, std::nullopt, s.substr(0, dot))) {
          if (auto m = find_method(*cls, call.name, call.arity, true)) return m;
        }
      }
      for (const auto& s : f.file->staticWildcards) {
        if (auto cls = resolve_type(f, std::nullopt, s)) {
          if (auto m = find_method(*cls, call.name, call.arity, true)) return m;
        }
      }
      return unique_match(call.name, call.arity);
    }
    TypeResult t = type_of(f, call.caller, r);
    switch (t.kind) {
      case TypeResult::Kind::Class:
        return find_method(t.cls, call.name, call.arity, !t.superOnly);
      case TypeResult::Kind::External:
        return std::nullopt;
      case TypeResult::Kind::Unknown:
        break;
    }
    return unique_match(call.name, call.arity);
  }

  void link_accesses(FileLink& f) {
    std::set<std::pair<EntityId, EntityId>> seen;
    for (const auto& a : f.file->accesses) {
      auto method = f.drafts[static_cast<std::size_t>(a.method)];
      if (!method) continue;
      std::vector<EntityId> touched;
      const Receiver& r = *a.target;
      auto ctx = class_of(f, a.method);
      if (r.kind == Receiver::Kind::Name) {
        name_type(f, ctx, r, &touched);
      } else if (r.kind == Receiver::Kind::Field) {
        TypeResult base = type_of(f, a.method, *r.base);
        if (base.kind == TypeResult::Kind::Class) {
          if (auto field = find_field(base.cls, r.field)) touched.push_back(*field);
        }
      }
      for (auto field : touched) {
        if (!seen.insert({*method, field}).second) continue;
        Relation rel;
        rel.kind = RelationKind::AttributeAccess;
        rel.from = *method;
        rel.to = field;
        rel.target = ent(field).qualifiedName;
        rel.site = SourceLocation{f.file->path, a.line, a.line};
        model_.add_relation(std::move(rel));
      }
    }
  }
};

std::string call_descriptor(const java::CallDraft& c) {
  std::string suffix = "/" + std::to_string(c.arity);
  if (c.constructor) {
    switch (c.receiver->kind) {
      case Receiver::Kind::This:
        return "this" + suffix;
      case Receiver::Kind::Super:
        return "super" + suffix;
      default:
        return "new " + strip_generics(c.receiver->typeName) + suffix;
    }
  }
  std::string base = c.receiver->describe();
  return (base.empty() ? "" : base + ".") + c.name + suffix;
}

}  // namespace

SourceRootKind classify_source_root(const fs::path& root, const ExtractionConfig& config) {
  if (!fs::exists(root)) throw NoRootFound(root.string());
  fs::path norm = fs::absolute(root).lexically_normal();
  std::vector<std::string> segs;
  for (const auto& s : norm) {
    if (!s.empty() && s != "/") segs.push_back(s.string());
  }
  while (!segs.empty() && segs.back().empty()) segs.pop_back();
  if (!segs.empty()) {
    const std::string& last = segs.back();
    if (is_test_segment(last, config)) return SourceRootKind::TestRoot;
    if (segs.size() >= 2 && is_test_segment(segs[segs.size() - 2], config) &&
        (last == "java" || last == "src")) {
      return SourceRootKind::TestRoot;
    }
  }
  if (!fs::is_directory(root)) return SourceRootKind::ProductionRoot;

  auto include = compile_globs(config.includeGlobs);
  auto exclude = compile_globs(config.excludeGlobs);
  std::map<std::string, std::pair<int, int>> perPackage;  // tests, production
  int tests = 0;
  int production = 0;
  for (const auto& c : list_sources(root, config, include, exclude)) {
    std::string pkg = package_of(read_file(c.absolute));
    bool isTest = test_named(c.absolute.stem().string());
    auto& slot = perPackage[pkg];
    (isTest ? slot.first : slot.second)++;
    (isTest ? tests : production)++;
  }
  for (const auto& [pkg, counts] : perPackage) {
    if (counts.first > 0 && counts.second > 0) return SourceRootKind::Mixed;
  }
  if (tests > 0 && production == 0) return SourceRootKind::TestRoot;
  return SourceRootKind::ProductionRoot;
}

std::vector<ParseOutcome> parse_sources_serial(const std::vector<SourceFile>& files) {
  std::vector<ParseOutcome> out(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      out[i].file = java::parse_java(files[i].content, files[i].path);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  }
  return out;
}

std::vector<ParseOutcome> parse_sources(const std::vector<SourceFile>& files) {
  std::vector<ParseOutcome> out(files.size());
  const auto n = static_cast<std::ptrdiff_t>(files.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(i);
    try {
      out[k].file = java::parse_java(files[k].content, files[k].path);
    } catch (const std::exception& e) {
      out[k].error = e.what();
    }
  }
  return out;
}

namespace {

std::optional<EntityId> ensure_package(FactModel& model, const std::string& name) {
  if (name.empty()) return std::nullopt;
  std::optional<EntityId> parent;
  std::string qn;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto dot = name.find('.', start);
    std::string seg = name.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    qn += (qn.empty() ? "" : ".") + seg;
    if (auto existing = model.resolve(qn, EntityKind::Package)) {
      parent = existing;
    } else {
      parent = model.add_entity(EntityKind::Package, seg, parent);
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return parent;
}

}  // namespace

ExtractionResult link_files(std::vector<ParseOutcome> outcomes,
                            const std::vector<SourceFile>& files,
                            const ExtractionConfig& config) {
  ExtractionResult result;
  FactModel& model = result.model;
  auto& diag = result.diagnostics;
  std::vector<std::regex> generated;
  for (const auto& p : config.generatorHeaderPatterns) {
    try {
      generated.emplace_back(p);
    } catch (const std::regex_error&) {
      throw ConfigError("invalid generator header pattern '" + p + "'");
    }
  }

  Linker linker(model);
  std::vector<std::unique_ptr<ParsedFile>> keep;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    const auto& src = files[i];
    if (!o.file) {
      ++diag.parseFailures;
      diag.perFileErrors.push_back({src.path, o.error});
      spdlog::warn("skipping {}: {}", src.path, o.error);
      continue;
    }
    auto pf = std::make_unique<ParsedFile>(std::move(*o.file));

    // Check every qualified name before touching the model so a file is
    // either merged whole or skipped.
    std::string prefix = pf->packageName.empty() ? "" : pf->packageName + ".";
    std::vector<std::string> qns(pf->entities.size());
    std::set<std::pair<std::string, EntityKind>> local;
    std::string clash;
    for (std::size_t d = 0; d < pf->entities.size(); ++d) {
      const auto& e = pf->entities[d];
      qns[d] = (e.parent < 0 ? prefix : qns[static_cast<std::size_t>(e.parent)] + ".") + e.simpleName;
      if (model.resolve(qns[d], e.kind) || !local.insert({qns[d], e.kind}).second) {
        clash = qns[d];
        break;
      }
    }
    if (!clash.empty()) {
      ++diag.parseFailures;
      std::string msg = "duplicate qualified name " + clash;
      diag.perFileErrors.push_back({src.path, msg});
      spdlog::warn("skipping {}: {}", src.path, msg);
      continue;
    }

    bool isGenerated = false;
    for (const auto& c : pf->headerComments) {
      for (const auto& re : generated) {
        if (std::regex_search(c, re)) isGenerated = true;
      }
    }

    FileLink link;
    link.file = pf.get();
    auto pkg = ensure_package(model, pf->packageName);
    link.drafts.resize(pf->entities.size());
    for (std::size_t d = 0; d < pf->entities.size(); ++d) {
      const auto& e = pf->entities[d];
      auto parent = e.parent < 0 ? pkg : link.drafts[static_cast<std::size_t>(e.parent)];
      EntityFlags flags = e.flags;
      if (e.kind == EntityKind::Class) {
        flags.set(EntityFlag::Generated, isGenerated);
        flags.set(EntityFlag::TestPath, src.testPath);
      }
      auto id = model.add_entity(e.kind, e.simpleName, parent,
                                 SourceLocation{src.path, e.firstLine, e.lastLine}, flags);
      if (!e.declaredType.empty()) model.set_declared_type(id, e.declaredType);
      for (const auto& a : e.annotations) model.add_annotation(id, a);
      link.drafts[d] = id;
    }
    for (const auto& c : pf->calls) {
      Relation rel;
      rel.kind = RelationKind::Invocation;
      rel.from = *link.drafts[static_cast<std::size_t>(c.caller)];
      rel.target = call_descriptor(c);
      rel.site = SourceLocation{src.path, c.line, c.line};
      link.callRelation.push_back(model.add_relation(std::move(rel)));
    }
    ++diag.filesParsed;
    linker.add(std::move(link));
    keep.push_back(std::move(pf));
  }
  linker.link(diag);
  return result;
}

ExtractionResult extract_tree(const ExtractionConfig& config) {
  if (config.roots.empty()) throw ConfigError("no source roots given");
  std::string encoding = normalized_encoding(config.sourceEncoding);
  auto include = compile_globs(config.includeGlobs);
  auto exclude = compile_globs(config.excludeGlobs);
  for (const auto& root : config.roots) {
    if (!fs::exists(root)) throw NoRootFound(root.string());
  }

  std::vector<SourceFile> files;
  for (const auto& root : config.roots) {
    SourceRootKind kind = classify_source_root(root, config);
    std::string label;
    if (config.roots.size() > 1) {
      label = fs::absolute(root).lexically_normal().filename().generic_string();
      if (label.empty()) label = fs::absolute(root).lexically_normal().parent_path().filename().generic_string();
      label += "/";
    }
    for (const auto& c : list_sources(root, config, include, exclude)) {
      SourceFile sf;
      sf.path = label + c.relative;
      sf.content = read_file(c.absolute);
      if (encoding == "latin1") sf.content = latin1_to_utf8(sf.content);
      sf.testPath = kind == SourceRootKind::TestRoot ||
                    has_test_segment(fs::path(c.relative), config);
      files.push_back(std::move(sf));
    }
  }
  std::size_t scanned = files.size();
  auto outcomes = parse_sources(files);
  ExtractionResult result = link_files(std::move(outcomes), files, config);
  result.diagnostics.filesScanned = scanned;
  spdlog::info("extracted {} entities from {} files ({} failed)", result.model.entity_count(),
               result.diagnostics.filesParsed, result.diagnostics.parseFailures);
  return result;
}

}  // namespace testscope
