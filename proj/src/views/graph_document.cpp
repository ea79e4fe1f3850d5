#include "testscope/views/graph_document.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "testscope/core/errors.hpp"

namespace testscope {

std::string_view to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::SystemWide:
      return "SystemWide";
    case ViewKind::UnitUnderTest:
      return "UnitUnderTest";
    case ViewKind::TestCase:
      break;
  }
  return "TestCase";
}

std::string_view to_string(NodeShape shape) {
  switch (shape) {
    case NodeShape::Square:
      return "Square";
    case NodeShape::Circle:
      return "Circle";
    case NodeShape::MetaBox:
      break;
  }
  return "MetaBox";
}

std::string_view to_string(NodeFill fill) {
  switch (fill) {
    case NodeFill::ProductionWhite:
      return "ProductionWhite";
    case NodeFill::TestBlack:
      return "TestBlack";
    case NodeFill::MetaNeutral:
      break;
  }
  return "MetaNeutral";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Containment:
      return "Containment";
    case EdgeKind::Coverage:
      return "Coverage";
    case EdgeKind::Dependency:
      break;
  }
  return "Dependency";
}

const ViewNode* GraphDocument::find(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::vector<std::string> GraphDocument::audit() const {
  std::vector<std::string> out;
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second) out.push_back("duplicate node id " + n.id);
  }
  for (const auto& e : edges) {
    if (!ids.count(e.from)) out.push_back("edge source missing: " + e.from);
    if (!ids.count(e.to)) out.push_back("edge target missing: " + e.to);
    if (e.weight < 1) out.push_back("edge weight below 1: " + e.from + " -> " + e.to);
  }
  return out;
}

ExportFormat parse_export_format(std::string_view text) {
  if (text == "dot") return ExportFormat::DOT;
  if (text == "graphml") return ExportFormat::GraphML;
  if (text == "json") return ExportFormat::JSON;
  throw ConfigError("unknown format '" + std::string(text) + "' (dot, graphml, json)");
}

namespace {

// Shortest round-trip representation keeps exports byte-stable.
std::string num(double v) { return fmt::format("{}", v); }

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string_view dot_shape(NodeShape s) {
  switch (s) {
    case NodeShape::Square:
      return "box";
    case NodeShape::Circle:
      return "circle";
    case NodeShape::MetaBox:
      break;
  }
  return "folder";
}

std::string_view fill_color(NodeFill f) {
  switch (f) {
    case NodeFill::ProductionWhite:
      return "white";
    case NodeFill::TestBlack:
      return "black";
    case NodeFill::MetaNeutral:
      break;
  }
  return "lightgray";
}

}  // namespace

std::string export_dot(const GraphDocument& doc) {
  std::ostringstream out;
  out << "digraph " << dot_quote(std::string(to_string(doc.viewKind))) << " {\n";
  if (!doc.focusName.empty()) out << "  graph [label=" << dot_quote(doc.focusName) << "];\n";
  for (const auto& [k, v] : doc.meta) {
    out << "  // " << k << ": " << v << "\n";
  }
  out << "  node [style=filled, fontsize=10];\n";
  for (const auto& n : doc.nodes) {
    out << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.label)
        << ", shape=" << dot_shape(n.shape) << ", fillcolor=" << fill_color(n.fill)
        << ", fontcolor=" << (n.fill == NodeFill::TestBlack ? "white" : "black");
    if (n.inherited) out << ", style=\"filled,dashed\"";
    if (n.position) out << ", pos=" << dot_quote(num(n.position->x) + "," + num(n.position->y));
    out << "];\n";
  }
  for (const auto& e : doc.edges) {
    out << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to) << " [class="
        << dot_quote(std::string(to_string(e.kind))) << ", weight=" << e.weight;
    switch (e.kind) {
      case EdgeKind::Containment:
        out << ", arrowhead=none";
        break;
      case EdgeKind::Coverage:
        out << ", color=" << (e.setup ? "gray40" : "black");
        break;
      case EdgeKind::Dependency:
        out << ", style=dashed";
        break;
    }
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_graphml(const GraphDocument& doc) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      << "  <key id=\"shape\" for=\"node\" attr.name=\"shape\" attr.type=\"string\"/>\n"
      << "  <key id=\"fill\" for=\"node\" attr.name=\"fill\" attr.type=\"string\"/>\n"
      << "  <key id=\"entityKind\" for=\"node\" attr.name=\"entityKind\" attr.type=\"string\"/>\n"
      << "  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n"
      << "  <key id=\"inherited\" for=\"node\" attr.name=\"inherited\" attr.type=\"boolean\"/>\n"
      << "  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n"
      << "  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n"
      << "  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
      << "  <key id=\"setup\" for=\"edge\" attr.name=\"setup\" attr.type=\"boolean\"/>\n"
      << "  <graph id=\"" << to_string(doc.viewKind) << "\" edgedefault=\"directed\">\n";
  for (const auto& n : doc.nodes) {
    out << "    <node id=\"" << xml_escape(n.id) << "\">\n"
        << "      <data key=\"label\">" << xml_escape(n.label) << "</data>\n"
        << "      <data key=\"shape\">" << to_string(n.shape) << "</data>\n"
        << "      <data key=\"fill\">" << to_string(n.fill) << "</data>\n"
        << "      <data key=\"entityKind\">" << xml_escape(n.entityKind) << "</data>\n"
        << "      <data key=\"role\">" << xml_escape(n.role) << "</data>\n"
        << "      <data key=\"inherited\">" << (n.inherited ? "true" : "false") << "</data>\n";
    if (n.position) {
      out << "      <data key=\"x\">" << num(n.position->x) << "</data>\n"
          << "      <data key=\"y\">" << num(n.position->y) << "</data>\n";
    }
    out << "    </node>\n";
  }
  std::size_t index = 0;
  for (const auto& e : doc.edges) {
    out << "    <edge id=\"e" << index++ << "\" source=\"" << xml_escape(e.from) << "\" target=\""
        << xml_escape(e.to) << "\">\n"
        << "      <data key=\"kind\">" << to_string(e.kind) << "</data>\n"
        << "      <data key=\"weight\">" << e.weight << "</data>\n"
        << "      <data key=\"setup\">" << (e.setup ? "true" : "false") << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

nlohmann::json document_to_json(const GraphDocument& doc) {
  using nlohmann::json;
  json nodes = json::array();
  for (const auto& n : doc.nodes) {
    json node{{"id", n.id},
              {"label", n.label},
              {"shape", to_string(n.shape)},
              {"fill", to_string(n.fill)},
              {"entityKind", n.entityKind},
              {"role", n.role},
              {"inherited", n.inherited}};
    node["position"] = n.position ? json{{"x", n.position->x}, {"y", n.position->y}} : json(nullptr);
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const auto& e : doc.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"kind", to_string(e.kind)},
                     {"weight", e.weight},
                     {"setup", e.setup}});
  }
  json meta = json::object();
  for (const auto& [k, v] : doc.meta) meta[k] = v;
  return json{{"viewKind", to_string(doc.viewKind)},
              {"focus", doc.focusName.empty() ? json(nullptr) : json(doc.focusName)},
              {"meta", meta},
              {"nodes", nodes},
              {"edges", edges}};
}

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& text, const E (&values)[N], const std::string& path) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw SchemaViolation(path, "unknown value '" + text + "'");
}

constexpr ViewKind kViewKinds[] = {ViewKind::SystemWide, ViewKind::UnitUnderTest, ViewKind::TestCase};
constexpr NodeShape kShapes[] = {NodeShape::Square, NodeShape::Circle, NodeShape::MetaBox};
constexpr NodeFill kFills[] = {NodeFill::ProductionWhite, NodeFill::TestBlack, NodeFill::MetaNeutral};
constexpr EdgeKind kEdgeKinds[] = {EdgeKind::Containment, EdgeKind::Coverage, EdgeKind::Dependency};

}  // namespace

GraphDocument document_from_json(const nlohmann::json& j) {
  GraphDocument doc;
  try {
    doc.viewKind = parse_enum(j.at("viewKind").get<std::string>(), kViewKinds, "/viewKind");
    if (!j.at("focus").is_null()) doc.focusName = j.at("focus").get<std::string>();
    for (const auto& [k, v] : j.at("meta").items()) doc.meta[k] = v.get<std::string>();
    std::size_t i = 0;
    for (const auto& n : j.at("nodes")) {
      std::string at = "/nodes/" + std::to_string(i++);
      ViewNode node;
      node.id = n.at("id").get<std::string>();
      node.label = n.at("label").get<std::string>();
      node.shape = parse_enum(n.at("shape").get<std::string>(), kShapes, at + "/shape");
      node.fill = parse_enum(n.at("fill").get<std::string>(), kFills, at + "/fill");
      node.entityKind = n.at("entityKind").get<std::string>();
      node.role = n.at("role").get<std::string>();
      node.inherited = n.at("inherited").get<bool>();
      const auto& pos = n.at("position");
      if (!pos.is_null()) node.position = Point{pos.at("x").get<double>(), pos.at("y").get<double>()};
      doc.nodes.push_back(std::move(node));
    }
    i = 0;
    for (const auto& e : j.at("edges")) {
      std::string at = "/edges/" + std::to_string(i++);
      ViewEdge edge;
      edge.from = e.at("from").get<std::string>();
      edge.to = e.at("to").get<std::string>();
      edge.kind = parse_enum(e.at("kind").get<std::string>(), kEdgeKinds, at + "/kind");
      edge.weight = e.at("weight").get<std::size_t>();
      edge.setup = e.at("setup").get<bool>();
      doc.edges.push_back(std::move(edge));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaViolation("/view", e.what());
  }
  return doc;
}

std::string export_document(const GraphDocument& doc, ExportFormat format) {
  switch (format) {
    case ExportFormat::DOT:
      return export_dot(doc);
    case ExportFormat::GraphML:
      return export_graphml(doc);
    case ExportFormat::JSON:
      break;
  }
  return document_to_json(doc).dump(2) + "\n";
}

}  // namespace testscope
