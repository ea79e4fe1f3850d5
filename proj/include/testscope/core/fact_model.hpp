#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "testscope/core/entity.hpp"
#include "testscope/core/errors.hpp"

namespace testscope {

/// Language-independent object-oriented fact model: packages, classes,
/// methods and attributes joined by containment, inheritance, invocation and
/// attribute-access relations.
///
/// Construction is single-writer. `freeze()` makes the model immutable; frozen
/// models are shared as `std::shared_ptr<const FactModel>` and may be read
/// concurrently.
class FactModel {
 public:
  FactModel() = default;

  /// Inserts an entity below `parent` and records the containment edge.
  /// Throws DuplicateQualifiedName, InvalidParentKind or UnknownEntity.
  EntityId add_entity(EntityKind kind, std::string_view simpleName,
                      std::optional<EntityId> parent = std::nullopt,
                      std::optional<SourceLocation> location = std::nullopt,
                      EntityFlags flags = {});

  void set_declared_type(EntityId id, std::string type);
  void add_annotation(EntityId id, std::string annotation);
  void set_flags(EntityId id, EntityFlags flags);

  /// Adds a non-containment relation and returns its index. When resolved,
  /// endpoint kinds are checked against the relation kind.
  std::size_t add_relation(Relation relation);

  /// Points a previously unresolved relation at `to`. Re-resolving to the
  /// same target is a no-op.
  void resolve_relation(std::size_t index, EntityId to);

  std::optional<EntityId> resolve(std::string_view qualifiedName) const;
  std::optional<EntityId> resolve(std::string_view qualifiedName,
                                  EntityKind kind) const;

  /// Resolved relations of one kind touching `id`, deduplicated, in insertion
  /// order of the first relation reaching each neighbor.
  std::vector<EntityId> neighbors(EntityId id, RelationKind kind,
                                  Direction direction) const;

  /// Raw relation indices (resolved or not) of `kind` leaving or entering
  /// `id`, in insertion order. Per call site, no deduplication.
  std::span<const std::size_t> edges(EntityId id, RelationKind kind,
                                     Direction direction) const;

  const Entity& entity(EntityId id) const;
  bool contains(EntityId id) const noexcept { return id.index() < entities_.size(); }
  std::span<const Entity> entities() const noexcept { return entities_; }
  std::size_t entity_count() const noexcept { return entities_.size(); }

  const Relation& relation(std::size_t index) const { return relations_.at(index); }
  std::span<const Relation> relations() const noexcept { return relations_; }
  std::span<const std::size_t> relations_of(RelationKind kind) const noexcept {
    return by_kind_[static_cast<std::size_t>(kind)];
  }
  std::size_t relation_count(RelationKind kind) const noexcept {
    return relations_of(kind).size();
  }

  std::vector<EntityId> children(EntityId id) const;
  std::vector<EntityId> roots() const;
  std::size_t depth(EntityId id) const;

  /// Nearest ancestor-or-self of the given kind.
  std::optional<EntityId> enclosing(EntityId id, EntityKind kind) const;

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  /// Full consistency check. Returns one message per violated invariant.
  std::vector<std::string> audit() const;

 private:
  struct Adjacency {
    std::vector<std::size_t> out;
    std::vector<std::size_t> in;
  };

  void require_mutable() const;
  void check_endpoint_kinds(const Relation& r) const;
  std::size_t push_relation(Relation relation);
  Adjacency& adjacency(EntityId id, RelationKind kind);
  const Adjacency* adjacency_if(EntityId id, RelationKind kind) const;

  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  std::array<std::vector<std::size_t>, kRelationKindCount> by_kind_;
  // entity index * kRelationKindCount + kind
  std::vector<Adjacency> adjacency_;
  // Qualified names may repeat across kinds (a nested class and a field can
  // share a name); at most one entity per (name, kind).
  std::map<std::string, std::vector<EntityId>, std::less<>> name_index_;
  bool frozen_ = false;
};

using FrozenFactModel = std::shared_ptr<const FactModel>;

inline FrozenFactModel freeze(FactModel model) {
  model.freeze();
  return std::make_shared<const FactModel>(std::move(model));
}

}  // namespace testscope
