#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "testscope/core/entity.hpp"

namespace testscope {

enum class ViewKind { SystemWide, UnitUnderTest, TestCase };
enum class NodeShape { Square, Circle, MetaBox };
enum class NodeFill { ProductionWhite, TestBlack, MetaNeutral };
enum class EdgeKind { Containment, Coverage, Dependency };

std::string_view to_string(ViewKind kind);
std::string_view to_string(NodeShape shape);
std::string_view to_string(NodeFill fill);
std::string_view to_string(EdgeKind kind);

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct ViewNode {
  std::string id;  // qualified name, or "#Fixture" / "#TestCommands"
  std::string label;
  NodeShape shape = NodeShape::Square;
  NodeFill fill = NodeFill::ProductionWhite;
  std::optional<EntityId> entity;
  std::string entityKind;  // Package, Class, Method, Meta
  std::string role;        // TestRole name, empty for packages and meta nodes
  bool inherited = false;  // inherited test command, drawn dashed
  std::optional<Point> position;
};

struct ViewEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::Containment;
  std::size_t weight = 1;
  bool setup = false;  // coverage edge originating in a setup method
};

struct GraphDocument {
  ViewKind viewKind = ViewKind::SystemWide;
  std::optional<EntityId> focus;
  std::string focusName;
  std::vector<ViewNode> nodes;
  std::vector<ViewEdge> edges;
  std::map<std::string, std::string> meta;

  const ViewNode* find(std::string_view id) const;
  /// Endpoints exist and node ids are unique.
  std::vector<std::string> audit() const;
};

enum class ExportFormat { DOT, GraphML, JSON };
ExportFormat parse_export_format(std::string_view text);

std::string export_document(const GraphDocument& doc, ExportFormat format);
nlohmann::json document_to_json(const GraphDocument& doc);
std::string export_dot(const GraphDocument& doc);
std::string export_graphml(const GraphDocument& doc);

/// Inverse of document_to_json. Entity ids are not carried by the JSON form
/// and stay empty. Throws SchemaViolation.
GraphDocument document_from_json(const nlohmann::json& j);

}  // namespace testscope
