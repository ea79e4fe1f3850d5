#include "testscope/core/fact_model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace testscope {

namespace {

bool parent_kind_ok(EntityKind child, std::optional<EntityKind> parent) {
  switch (child) {
    case EntityKind::Package:
      return !parent || *parent == EntityKind::Package;
    case EntityKind::Class:
      return !parent || *parent == EntityKind::Package ||
             *parent == EntityKind::Class;
    case EntityKind::Method:
    case EntityKind::Attribute:
      return parent && *parent == EntityKind::Class;
  }
  return false;
}

}  // namespace

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Package: return "Package";
    case EntityKind::Class: return "Class";
    case EntityKind::Method: return "Method";
    case EntityKind::Attribute: return "Attribute";
  }
  return "?";
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Containment: return "Containment";
    case RelationKind::Inheritance: return "Inheritance";
    case RelationKind::Invocation: return "Invocation";
    case RelationKind::AttributeAccess: return "AttributeAccess";
  }
  return "?";
}

std::optional<EntityKind> parse_entity_kind(std::string_view text) {
  for (auto k : {EntityKind::Package, EntityKind::Class, EntityKind::Method,
                 EntityKind::Attribute}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view text) {
  for (auto k : {RelationKind::Containment, RelationKind::Inheritance,
                 RelationKind::Invocation, RelationKind::AttributeAccess}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view base_method_name(std::string_view simpleName) {
  auto slash = simpleName.find('/');
  return slash == std::string_view::npos ? simpleName : simpleName.substr(0, slash);
}

void FactModel::require_mutable() const {
  if (frozen_) throw FrozenModel();
}

const Entity& FactModel::entity(EntityId id) const {
  if (!contains(id)) {
    throw UnknownEntity("unknown entity id " + std::to_string(id.value()));
  }
  return entities_[id.index()];
}

FactModel::Adjacency& FactModel::adjacency(EntityId id, RelationKind kind) {
  return adjacency_[id.index() * kRelationKindCount + static_cast<std::size_t>(kind)];
}

const FactModel::Adjacency* FactModel::adjacency_if(EntityId id,
                                                    RelationKind kind) const {
  auto slot = id.index() * kRelationKindCount + static_cast<std::size_t>(kind);
  return slot < adjacency_.size() ? &adjacency_[slot] : nullptr;
}

EntityId FactModel::add_entity(EntityKind kind, std::string_view simpleName,
                               std::optional<EntityId> parent,
                               std::optional<SourceLocation> location,
                               EntityFlags flags) {
  require_mutable();
  if (simpleName.empty()) throw Error("entity simple name must not be empty");

  std::optional<EntityKind> parentKind;
  std::string qualified;
  if (parent) {
    const Entity& p = entity(*parent);
    parentKind = p.kind;
    qualified = p.qualifiedName + "." + std::string(simpleName);
  } else {
    qualified = std::string(simpleName);
  }
  if (!parent_kind_ok(kind, parentKind)) {
    std::ostringstream os;
    os << to_string(kind) << " '" << simpleName << "' cannot be contained in "
       << (parentKind ? to_string(*parentKind) : std::string_view("the root"));
    throw InvalidParentKind(os.str());
  }
  if (resolve(qualified, kind)) throw DuplicateQualifiedName(qualified);

  EntityId id(static_cast<std::uint32_t>(entities_.size()));
  Entity e;
  e.id = id;
  e.kind = kind;
  e.simpleName = std::string(simpleName);
  e.qualifiedName = qualified;
  e.parent = parent;
  e.location = std::move(location);
  e.flags = flags;
  entities_.push_back(std::move(e));
  adjacency_.resize(entities_.size() * kRelationKindCount);
  name_index_[qualified].push_back(id);

  if (parent) {
    Relation c;
    c.kind = RelationKind::Containment;
    c.from = *parent;
    c.to = id;
    c.target = qualified;
    push_relation(std::move(c));
  }
  return id;
}

void FactModel::set_declared_type(EntityId id, std::string type) {
  require_mutable();
  entity(id);
  entities_[id.index()].declaredType = std::move(type);
}

void FactModel::add_annotation(EntityId id, std::string annotation) {
  require_mutable();
  entity(id);
  entities_[id.index()].annotations.push_back(std::move(annotation));
}

void FactModel::set_flags(EntityId id, EntityFlags flags) {
  require_mutable();
  entity(id);
  entities_[id.index()].flags = flags;
}

void FactModel::check_endpoint_kinds(const Relation& r) const {
  const Entity& from = entity(r.from);
  auto fail = [&](const char* what) {
    throw Error(std::string(to_string(r.kind)) + " relation: " + what);
  };
  switch (r.kind) {
    case RelationKind::Containment:
      fail("containment is recorded through add_entity");
      break;
    case RelationKind::Inheritance:
      if (from.kind != EntityKind::Class) fail("source must be a Class");
      if (r.to && entity(*r.to).kind != EntityKind::Class) fail("target must be a Class");
      break;
    case RelationKind::Invocation:
      if (from.kind != EntityKind::Method) fail("source must be a Method");
      if (r.to && entity(*r.to).kind != EntityKind::Method) fail("target must be a Method");
      break;
    case RelationKind::AttributeAccess:
      if (from.kind != EntityKind::Method) fail("source must be a Method");
      if (r.to && entity(*r.to).kind != EntityKind::Attribute) {
        fail("target must be an Attribute");
      }
      break;
  }
}

std::size_t FactModel::push_relation(Relation relation) {
  std::size_t index = relations_.size();
  auto kind = relation.kind;
  adjacency(relation.from, kind).out.push_back(index);
  if (relation.to) adjacency(*relation.to, kind).in.push_back(index);
  by_kind_[static_cast<std::size_t>(kind)].push_back(index);
  relations_.push_back(std::move(relation));
  return index;
}

std::size_t FactModel::add_relation(Relation relation) {
  require_mutable();
  check_endpoint_kinds(relation);
  return push_relation(std::move(relation));
}

void FactModel::resolve_relation(std::size_t index, EntityId to) {
  require_mutable();
  Relation& r = relations_.at(index);
  if (r.to) {
    if (*r.to == to) return;
    throw Error("relation " + std::to_string(index) + " is already resolved");
  }
  Relation probe = r;
  probe.to = to;
  check_endpoint_kinds(probe);
  r.to = to;
  auto& in = adjacency(to, r.kind).in;
  in.insert(std::lower_bound(in.begin(), in.end(), index), index);
}

std::optional<EntityId> FactModel::resolve(std::string_view qualifiedName) const {
  auto it = name_index_.find(qualifiedName);
  if (it == name_index_.end() || it->second.empty()) return std::nullopt;
  return it->second.front();
}

std::optional<EntityId> FactModel::resolve(std::string_view qualifiedName,
                                           EntityKind kind) const {
  auto it = name_index_.find(qualifiedName);
  if (it == name_index_.end()) return std::nullopt;
  for (EntityId id : it->second) {
    if (entities_[id.index()].kind == kind) return id;
  }
  return std::nullopt;
}

std::span<const std::size_t> FactModel::edges(EntityId id, RelationKind kind,
                                              Direction direction) const {
  entity(id);
  const Adjacency* a = adjacency_if(id, kind);
  if (!a) return {};
  return direction == Direction::Out ? std::span<const std::size_t>(a->out)
                                     : std::span<const std::size_t>(a->in);
}

std::vector<EntityId> FactModel::neighbors(EntityId id, RelationKind kind,
                                           Direction direction) const {
  std::vector<EntityId> result;
  std::set<EntityId> seen;
  for (std::size_t index : edges(id, kind, direction)) {
    const Relation& r = relations_[index];
    if (!r.to) continue;
    EntityId other = direction == Direction::Out ? *r.to : r.from;
    if (seen.insert(other).second) result.push_back(other);
  }
  return result;
}

std::vector<EntityId> FactModel::children(EntityId id) const {
  return neighbors(id, RelationKind::Containment, Direction::Out);
}

std::vector<EntityId> FactModel::roots() const {
  std::vector<EntityId> result;
  for (const Entity& e : entities_) {
    if (!e.parent) result.push_back(e.id);
  }
  return result;
}

std::size_t FactModel::depth(EntityId id) const {
  std::size_t d = 0;
  const Entity* e = &entity(id);
  while (e->parent) {
    e = &entity(*e->parent);
    if (++d > entities_.size()) throw Error("containment cycle detected");
  }
  return d;
}

std::optional<EntityId> FactModel::enclosing(EntityId id, EntityKind kind) const {
  std::optional<EntityId> cur = id;
  while (cur) {
    const Entity& e = entity(*cur);
    if (e.kind == kind) return cur;
    cur = e.parent;
  }
  return std::nullopt;
}

std::vector<std::string> FactModel::audit() const {
  std::vector<std::string> issues;
  auto report = [&](std::string msg) { issues.push_back(std::move(msg)); };

  // Containment: each entity has at most one incoming containment edge that
  // matches its parent link, and parent chains terminate.
  for (const Entity& e : entities_) {
    auto in = neighbors(e.id, RelationKind::Containment, Direction::In);
    if (in.size() > 1) report(e.qualifiedName + ": more than one container");
    if (e.parent) {
      if (in.size() != 1 || in.front() != *e.parent) {
        report(e.qualifiedName + ": parent link and containment edge disagree");
      }
      const Entity& p = entities_.at(e.parent->index());
      if (!parent_kind_ok(e.kind, p.kind)) {
        report(e.qualifiedName + ": invalid parent kind");
      }
      if (e.qualifiedName != p.qualifiedName + "." + e.simpleName) {
        report(e.qualifiedName + ": qualified name does not follow its parent");
      }
    } else {
      if (!in.empty()) report(e.qualifiedName + ": containment edge without parent");
      if (!parent_kind_ok(e.kind, std::nullopt)) {
        report(e.qualifiedName + ": requires a parent");
      }
      if (e.qualifiedName != e.simpleName) {
        report(e.qualifiedName + ": root qualified name differs from simple name");
      }
    }
    std::size_t steps = 0;
    for (auto cur = e.parent; cur; cur = entities_.at(cur->index()).parent) {
      if (++steps > entities_.size()) {
        report(e.qualifiedName + ": containment cycle");
        break;
      }
    }
  }

  // Name index is a bijection onto entities (per kind).
  std::size_t indexed = 0;
  for (const auto& [name, ids] : name_index_) {
    std::set<EntityKind> kinds;
    for (EntityId id : ids) {
      ++indexed;
      if (!contains(id) || entities_[id.index()].qualifiedName != name) {
        report("name index entry '" + name + "' points at the wrong entity");
      } else if (!kinds.insert(entities_[id.index()].kind).second) {
        report("name index entry '" + name + "' repeats a kind");
      }
    }
  }
  if (indexed != entities_.size()) report("name index size differs from entity count");

  // Relation endpoints and adjacency coherence.
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const Relation& r = relations_[i];
    if (!contains(r.from)) {
      report("relation " + std::to_string(i) + ": missing source");
      continue;
    }
    if (r.to && !contains(*r.to)) {
      report("relation " + std::to_string(i) + ": missing target");
      continue;
    }
    auto out = edges(r.from, r.kind, Direction::Out);
    if (std::find(out.begin(), out.end(), i) == out.end()) {
      report("relation " + std::to_string(i) + ": absent from outgoing index");
    }
    if (r.to) {
      auto in = edges(*r.to, r.kind, Direction::In);
      if (std::find(in.begin(), in.end(), i) == in.end()) {
        report("relation " + std::to_string(i) + ": absent from incoming index");
      }
    }
    const auto& bucket = by_kind_[static_cast<std::size_t>(r.kind)];
    if (!std::binary_search(bucket.begin(), bucket.end(), i)) {
      report("relation " + std::to_string(i) + ": absent from kind index");
    }
  }
  std::array<std::size_t, kRelationKindCount> outCount{}, inCount{}, resolvedCount{};
  for (const Relation& r : relations_) {
    if (r.to) ++resolvedCount[static_cast<std::size_t>(r.kind)];
  }
  for (std::size_t e = 0; e < entities_.size(); ++e) {
    for (std::size_t k = 0; k < kRelationKindCount; ++k) {
      const Adjacency& a = adjacency_[e * kRelationKindCount + k];
      outCount[k] += a.out.size();
      inCount[k] += a.in.size();
    }
  }
  for (std::size_t k = 0; k < kRelationKindCount; ++k) {
    if (outCount[k] != by_kind_[k].size()) {
      report(std::string(to_string(static_cast<RelationKind>(k))) +
             ": outgoing index size mismatch");
    }
    if (inCount[k] != resolvedCount[k]) {
      report(std::string(to_string(static_cast<RelationKind>(k))) +
             ": incoming index describes a different edge set");
    }
  }
  return issues;
}

}  // namespace testscope
