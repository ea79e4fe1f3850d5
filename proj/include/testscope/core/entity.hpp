#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace testscope {

/// Dense identifier assigned at insertion. Never reused within a model.
class EntityId {
 public:
  constexpr EntityId() = default;
  constexpr explicit EntityId(std::uint32_t value) : value_(value) {}

  constexpr std::uint32_t value() const noexcept { return value_; }
  constexpr std::size_t index() const noexcept { return value_; }

  friend constexpr auto operator<=>(EntityId, EntityId) = default;

 private:
  std::uint32_t value_ = 0;
};

enum class EntityKind : std::uint8_t { Package, Class, Method, Attribute };

enum class RelationKind : std::uint8_t {
  Containment,
  Inheritance,
  Invocation,
  AttributeAccess,
};

inline constexpr std::size_t kRelationKindCount = 4;

enum class Direction : std::uint8_t { In, Out };

enum class EntityFlag : std::uint8_t {
  Interface = 1u << 0,
  Abstract = 1u << 1,
  Static = 1u << 2,
  Constructor = 1u << 3,
  Generated = 1u << 4,
  Private = 1u << 5,
  // Source file sits under a test-looking path (hint only).
  TestPath = 1u << 6,
};

class EntityFlags {
 public:
  constexpr EntityFlags() = default;
  constexpr EntityFlags(EntityFlag f) : bits_(static_cast<std::uint8_t>(f)) {}  // NOLINT

  constexpr bool has(EntityFlag f) const noexcept {
    return (bits_ & static_cast<std::uint8_t>(f)) != 0;
  }
  constexpr EntityFlags& set(EntityFlag f, bool on = true) noexcept {
    if (on) {
      bits_ |= static_cast<std::uint8_t>(f);
    } else {
      bits_ &= static_cast<std::uint8_t>(~static_cast<std::uint8_t>(f));
    }
    return *this;
  }
  constexpr std::uint8_t bits() const noexcept { return bits_; }
  static constexpr EntityFlags from_bits(std::uint8_t b) {
    EntityFlags f;
    f.bits_ = b;
    return f;
  }

  friend constexpr EntityFlags operator|(EntityFlags a, EntityFlags b) {
    return from_bits(static_cast<std::uint8_t>(a.bits_ | b.bits_));
  }
  friend constexpr bool operator==(EntityFlags, EntityFlags) = default;

 private:
  std::uint8_t bits_ = 0;
};

inline constexpr EntityFlags operator|(EntityFlag a, EntityFlag b) {
  return EntityFlags(a) | EntityFlags(b);
}

/// All flags in serialization order, paired with their external names.
struct FlagName {
  EntityFlag flag;
  std::string_view name;
};
inline constexpr FlagName kFlagNames[] = {
    {EntityFlag::Interface, "isInterface"},
    {EntityFlag::Abstract, "isAbstract"},
    {EntityFlag::Static, "isStatic"},
    {EntityFlag::Constructor, "isConstructor"},
    {EntityFlag::Generated, "isGenerated"},
    {EntityFlag::Private, "isPrivate"},
    {EntityFlag::TestPath, "inTestRoot"},
};

struct SourceLocation {
  std::string file;
  int firstLine = 0;
  int lastLine = 0;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

struct Entity {
  EntityId id;
  EntityKind kind = EntityKind::Package;
  std::string simpleName;
  std::string qualifiedName;
  std::optional<EntityId> parent;
  std::optional<SourceLocation> location;
  EntityFlags flags;
  // Attribute: declared type. Method: return type. Qualified when it names an
  // in-model class, otherwise the type as written.
  std::string declaredType;
  std::vector<std::string> annotations;

  bool has(EntityFlag f) const noexcept { return flags.has(f); }
};

struct Relation {
  RelationKind kind = RelationKind::Invocation;
  EntityId from;
  // Empty when unresolved.
  std::optional<EntityId> to;
  // Descriptor of the intended target; the only target information carried by
  // unresolved relations.
  std::string target;
  std::optional<SourceLocation> site;

  bool resolved() const noexcept { return to.has_value(); }
};

std::string_view to_string(EntityKind kind);
std::string_view to_string(RelationKind kind);
std::optional<EntityKind> parse_entity_kind(std::string_view text);
std::optional<RelationKind> parse_relation_kind(std::string_view text);

/// Method simple names carry an arity suffix ("scan/0"); this strips it.
std::string_view base_method_name(std::string_view simpleName);

}  // namespace testscope

template <>
struct std::hash<testscope::EntityId> {
  std::size_t operator()(testscope::EntityId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value());
  }
};
