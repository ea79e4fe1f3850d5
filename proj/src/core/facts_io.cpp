#include "testscope/core/facts_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace testscope {

using nlohmann::json;

namespace {

json location_to_json(const std::optional<SourceLocation>& loc) {
  if (!loc) return nullptr;
  return json{{"file", loc->file}, {"firstLine", loc->firstLine}, {"lastLine", loc->lastLine}};
}

json flags_to_json(EntityFlags flags) {
  json out = json::array();
  for (const auto& f : kFlagNames) {
    if (flags.has(f.flag)) out.push_back(std::string(f.name));
  }
  return out;
}

// --- validation helpers -----------------------------------------------------

const json& member(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaViolation(path + "/" + key, "required field missing");
  return *it;
}

std::string string_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_string()) throw SchemaViolation(path + "/" + key, "expected string");
  return v.get<std::string>();
}

std::int64_t int_value(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaViolation(path, "expected integer");
  return v.get<std::int64_t>();
}

std::optional<SourceLocation> location_from_json(const json& v, const std::string& path) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_object()) throw SchemaViolation(path, "expected object or null");
  SourceLocation loc;
  loc.file = string_field(v, "file", path);
  loc.firstLine = static_cast<int>(int_value(member(v, "firstLine", path), path + "/firstLine"));
  loc.lastLine = static_cast<int>(int_value(member(v, "lastLine", path), path + "/lastLine"));
  if (loc.firstLine < 0 || loc.lastLine < loc.firstLine) {
    throw SchemaViolation(path, "invalid line span");
  }
  return loc;
}

EntityFlags flags_from_json(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaViolation(path, "expected array");
  EntityFlags flags;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    if (!v[i].is_string()) throw SchemaViolation(p, "expected string");
    auto name = v[i].get<std::string>();
    auto it = std::find_if(std::begin(kFlagNames), std::end(kFlagNames),
                           [&](const FlagName& f) { return f.name == name; });
    if (it == std::end(kFlagNames)) throw SchemaViolation(p, "unknown flag '" + name + "'");
    flags.set(it->flag);
  }
  return flags;
}

struct EntityRecord {
  std::int64_t localId = 0;
  EntityKind kind = EntityKind::Package;
  std::string simpleName;
  std::string qualifiedName;
  std::optional<std::int64_t> parent;
  std::optional<SourceLocation> location;
  EntityFlags flags;
  std::string declaredType;
  std::vector<std::string> annotations;
  std::string path;
};

}  // namespace

json facts_to_json(const FactModel& model) {
  std::vector<EntityId> order;
  order.reserve(model.entity_count());
  for (const Entity& e : model.entities()) order.push_back(e.id);
  std::sort(order.begin(), order.end(), [&](EntityId a, EntityId b) {
    const Entity& ea = model.entity(a);
    const Entity& eb = model.entity(b);
    return std::tie(ea.qualifiedName, ea.kind) < std::tie(eb.qualifiedName, eb.kind);
  });
  std::vector<std::int64_t> ordinal(model.entity_count());
  for (std::size_t i = 0; i < order.size(); ++i) ordinal[order[i].index()] = static_cast<std::int64_t>(i);

  json entities = json::array();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Entity& e = model.entity(order[i]);
    json item;
    item["id"] = i;
    item["kind"] = std::string(to_string(e.kind));
    item["simpleName"] = e.simpleName;
    item["qualifiedName"] = e.qualifiedName;
    item["parent"] = e.parent ? json(ordinal[e.parent->index()]) : json(nullptr);
    item["sourceLocation"] = location_to_json(e.location);
    item["flags"] = flags_to_json(e.flags);
    item["declaredType"] = e.declaredType;
    item["annotations"] = e.annotations;
    entities.push_back(std::move(item));
  }

  struct Row {
    RelationKind kind;
    std::int64_t from;
    std::int64_t to;
    const Relation* rel;
  };
  std::vector<Row> rows;
  for (const Relation& r : model.relations()) {
    if (r.kind == RelationKind::Containment) continue;
    rows.push_back({r.kind, ordinal[r.from.index()],
                    r.to ? ordinal[r.to->index()] : std::numeric_limits<std::int64_t>::max(), &r});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    auto siteKey = [](const Relation& r) {
      return r.site ? std::make_tuple(r.site->file, r.site->firstLine, r.site->lastLine)
                    : std::make_tuple(std::string(), -1, -1);
    };
    return std::make_tuple(a.kind, a.from, a.to, std::cref(a.rel->target), siteKey(*a.rel)) <
           std::make_tuple(b.kind, b.from, b.to, std::cref(b.rel->target), siteKey(*b.rel));
  });
  json relations = json::array();
  for (const Row& row : rows) {
    const Relation& r = *row.rel;
    json item;
    item["kind"] = std::string(to_string(r.kind));
    item["from"] = row.from;
    item["to"] = r.to ? json(row.to) : json(nullptr);
    item["target"] = r.target;
    item["site"] = location_to_json(r.site);
    item["resolved"] = r.resolved();
    relations.push_back(std::move(item));
  }

  json doc;
  doc["format"] = std::string(kFactsFormat);
  doc["version"] = kFactsVersion;
  doc["entities"] = std::move(entities);
  doc["relations"] = std::move(relations);
  return doc;
}

std::string export_facts(const FactModel& model) {
  return facts_to_json(model).dump(2) + "\n";
}

FactModel import_facts(const json& doc) {
  if (!doc.is_object()) throw SchemaViolation("", "document must be an object");
  if (string_field(doc, "format", "") != kFactsFormat) {
    throw SchemaViolation("/format", "expected \"" + std::string(kFactsFormat) + "\"");
  }
  if (int_value(member(doc, "version", ""), "/version") != kFactsVersion) {
    throw SchemaViolation("/version", "unsupported version");
  }
  const json& ents = member(doc, "entities", "");
  const json& rels = member(doc, "relations", "");
  if (!ents.is_array()) throw SchemaViolation("/entities", "expected array");
  if (!rels.is_array()) throw SchemaViolation("/relations", "expected array");

  std::vector<EntityRecord> records;
  std::map<std::int64_t, std::size_t> byLocal;
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const std::string path = "/entities/" + std::to_string(i);
    const json& e = ents[i];
    if (!e.is_object()) throw SchemaViolation(path, "expected object");
    EntityRecord rec;
    rec.path = path;
    rec.localId = int_value(member(e, "id", path), path + "/id");
    auto kindText = string_field(e, "kind", path);
    auto kind = parse_entity_kind(kindText);
    if (!kind) throw SchemaViolation(path + "/kind", "unknown entity kind '" + kindText + "'");
    rec.kind = *kind;
    rec.simpleName = string_field(e, "simpleName", path);
    if (rec.simpleName.empty()) throw SchemaViolation(path + "/simpleName", "must not be empty");
    rec.qualifiedName = string_field(e, "qualifiedName", path);
    const json& parent = member(e, "parent", path);
    if (!parent.is_null()) rec.parent = int_value(parent, path + "/parent");
    if (auto it = e.find("sourceLocation"); it != e.end()) {
      rec.location = location_from_json(*it, path + "/sourceLocation");
    }
    if (auto it = e.find("flags"); it != e.end()) rec.flags = flags_from_json(*it, path + "/flags");
    if (auto it = e.find("declaredType"); it != e.end()) {
      if (!it->is_string()) throw SchemaViolation(path + "/declaredType", "expected string");
      rec.declaredType = it->get<std::string>();
    }
    if (auto it = e.find("annotations"); it != e.end()) {
      if (!it->is_array()) throw SchemaViolation(path + "/annotations", "expected array");
      for (std::size_t a = 0; a < it->size(); ++a) {
        if (!(*it)[a].is_string()) {
          throw SchemaViolation(path + "/annotations/" + std::to_string(a), "expected string");
        }
        rec.annotations.push_back((*it)[a].get<std::string>());
      }
    }
    if (!byLocal.emplace(rec.localId, records.size()).second) {
      throw SchemaViolation(path + "/id", "duplicate id " + std::to_string(rec.localId));
    }
    records.push_back(std::move(rec));
  }

  // Parents must exist and chains must terminate.
  std::vector<int> depth(records.size(), -1);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<std::size_t> chain;
    std::size_t cur = i;
    while (depth[cur] < 0) {
      chain.push_back(cur);
      if (chain.size() > records.size()) {
        throw DanglingContainment(records[i].path + ": containment cycle");
      }
      if (!records[cur].parent) {
        depth[cur] = 0;
        chain.pop_back();
        break;
      }
      auto it = byLocal.find(*records[cur].parent);
      if (it == byLocal.end()) {
        throw DanglingContainment(records[cur].path + "/parent: undeclared entity " +
                                  std::to_string(*records[cur].parent));
      }
      cur = it->second;
    }
    int d = depth[cur];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth[*it] = ++d;
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return depth[a] < depth[b]; });

  FactModel model;
  std::map<std::int64_t, EntityId> idOf;
  for (std::size_t idx : order) {
    const EntityRecord& rec = records[idx];
    std::optional<EntityId> parent;
    if (rec.parent) parent = idOf.at(*rec.parent);
    EntityId id;
    try {
      id = model.add_entity(rec.kind, rec.simpleName, parent, rec.location, rec.flags);
    } catch (const Error& err) {
      throw SchemaViolation(rec.path, err.what());
    }
    if (model.entity(id).qualifiedName != rec.qualifiedName) {
      throw SchemaViolation(rec.path + "/qualifiedName",
                            "expected '" + model.entity(id).qualifiedName + "'");
    }
    if (!rec.declaredType.empty()) model.set_declared_type(id, rec.declaredType);
    for (const auto& a : rec.annotations) model.add_annotation(id, a);
    idOf.emplace(rec.localId, id);
  }

  for (std::size_t i = 0; i < rels.size(); ++i) {
    const std::string path = "/relations/" + std::to_string(i);
    const json& r = rels[i];
    if (!r.is_object()) throw SchemaViolation(path, "expected object");
    auto kindText = string_field(r, "kind", path);
    auto kind = parse_relation_kind(kindText);
    if (!kind) throw SchemaViolation(path + "/kind", "unknown relation kind '" + kindText + "'");
    auto fromLocal = int_value(member(r, "from", path), path + "/from");
    auto from = idOf.find(fromLocal);
    if (from == idOf.end()) throw SchemaViolation(path + "/from", "undeclared source entity");
    const json& toValue = member(r, "to", path);
    const json& resolvedValue = member(r, "resolved", path);
    if (!resolvedValue.is_boolean()) throw SchemaViolation(path + "/resolved", "expected boolean");
    bool resolvedFlag = resolvedValue.get<bool>();
    if (resolvedFlag == toValue.is_null()) {
      throw SchemaViolation(path, "'resolved' disagrees with 'to'");
    }
    Relation rel;
    rel.kind = *kind;
    rel.from = from->second;
    if (auto it = r.find("target"); it != r.end()) {
      if (!it->is_string()) throw SchemaViolation(path + "/target", "expected string");
      rel.target = it->get<std::string>();
    }
    if (auto it = r.find("site"); it != r.end()) rel.site = location_from_json(*it, path + "/site");
    if (!toValue.is_null()) {
      auto toLocal = int_value(toValue, path + "/to");
      if (auto to = idOf.find(toLocal); to != idOf.end()) {
        rel.to = to->second;
      } else if (rel.target.empty()) {
        rel.target = "#" + std::to_string(toLocal);
      }
    }
    if (rel.kind == RelationKind::Containment) {
      const Entity& child = rel.to ? model.entity(*rel.to) : model.entity(rel.from);
      if (!rel.to || child.parent != rel.from) {
        throw SchemaViolation(path, "containment entry disagrees with parent fields");
      }
      continue;
    }
    try {
      model.add_relation(std::move(rel));
    } catch (const Error& err) {
      throw SchemaViolation(path, err.what());
    }
  }
  return model;
}

FactModel import_facts_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation("", std::string("malformed document: ") + e.what());
  }
  return import_facts(doc);
}

FactModel read_facts_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read facts file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return import_facts_text(buf.str());
}

void write_facts_file(const FactModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write facts file: " + path);
  out << export_facts(model);
}

}  // namespace testscope
