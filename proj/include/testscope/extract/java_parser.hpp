#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testscope/core/entity.hpp"
#include "testscope/extract/java_lexer.hpp"

namespace testscope::java {

/// Syntactic description of the expression a call or field access is made on.
/// Names are resolved later, once every file of the tree has been parsed.
struct Receiver {
  enum class Kind {
    Implicit,  // unqualified call: foo()
    This,
    Super,
    Name,      // dotted identifier chain: a.b.c
    Call,      // result of an earlier call in the same file
    Field,     // base.field
    New,       // new T(...)
    Unknown,   // cast, array element, literal, parenthesized expression...
  };

  Kind kind = Kind::Unknown;
  std::vector<std::string> names;        // Name
  std::optional<std::string> localType;  // Name: first segment is a typed local
  bool untypedLocal = false;             // Name: first segment is a var/lambda local
  int call = -1;                         // Call
  std::shared_ptr<const Receiver> base;  // Field
  std::string field;                     // Field
  std::string typeName;                  // New

  std::string describe() const;
};

using ReceiverPtr = std::shared_ptr<const Receiver>;

struct DraftEntity {
  EntityKind kind = EntityKind::Class;
  std::string simpleName;
  int parent = -1;  // draft index; -1 places a type in the file's package
  int firstLine = 0;
  int lastLine = 0;
  EntityFlags flags;
  std::string declaredType;  // as written
  std::vector<std::string> annotations;
};

struct CallDraft {
  int caller = -1;  // draft index of the calling method
  std::string name;
  int arity = 0;
  bool constructor = false;
  ReceiverPtr receiver;
  int line = 0;
};

struct AccessDraft {
  int method = -1;
  ReceiverPtr target;  // a Name or Field receiver
  int line = 0;
};

struct InheritDraft {
  int type = -1;
  std::string written;
  int line = 0;
};

struct ParsedFile {
  std::string path;  // root-relative, '/'-separated
  std::string packageName;
  std::vector<std::string> imports;          // a.b.C
  std::vector<std::string> wildcardImports;  // a.b (from a.b.*)
  std::vector<std::string> staticImports;    // a.b.C.member
  std::vector<std::string> staticWildcards;  // a.b.C (from a.b.C.*)
  std::vector<std::string> headerComments;
  std::vector<DraftEntity> entities;
  std::vector<CallDraft> calls;
  std::vector<AccessDraft> accesses;
  std::vector<InheritDraft> inherits;
};

/// Parses one compilation unit. Throws ParseError on malformed input.
ParsedFile parse_java(std::string_view source, std::string path);

}  // namespace testscope::java
