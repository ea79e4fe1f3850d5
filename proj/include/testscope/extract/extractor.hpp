#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "testscope/core/fact_model.hpp"
#include "testscope/extract/java_parser.hpp"

namespace testscope {

enum class JUnitStyle { V3, V4, Both };

std::string to_string(JUnitStyle style);
JUnitStyle parse_junit_style(std::string_view text);

struct ExtractionConfig {
  std::vector<std::filesystem::path> roots;
  std::vector<std::string> includeGlobs{"**/*.java"};
  std::vector<std::string> excludeGlobs;
  std::string sourceEncoding = "UTF-8";  // or ISO-8859-1
  bool followSymlinks = false;
  // Regular expressions matched against comments preceding the first token.
  std::vector<std::string> generatorHeaderPatterns{
      "@generated", "Generated [Bb]y", "DO NOT EDIT", "[Aa]uto-?generated",
      "[Tt]his file was generated"};
  // Directory names marking a test source tree.
  std::vector<std::string> testSegments{"test", "tests"};
};

struct FileFailure {
  std::string file;
  std::string message;
};

struct ExtractionDiagnostics {
  std::size_t filesScanned = 0;
  std::size_t filesParsed = 0;
  std::size_t parseFailures = 0;
  std::vector<FileFailure> perFileErrors;
  std::size_t callSites = 0;
  std::size_t unresolvedInvocationCount = 0;
  std::size_t unresolvedInheritance = 0;
};

struct ExtractionResult {
  FactModel model;
  ExtractionDiagnostics diagnostics;
};

enum class SourceRootKind { ProductionRoot, TestRoot, Mixed };

std::string to_string(SourceRootKind kind);

/// Decides from the path and, when the path is not conclusive, from the
/// package layout of the files below it. A root is Mixed when some package
/// holds both test-named and production files.
SourceRootKind classify_source_root(const std::filesystem::path& root,
                                    const ExtractionConfig& config = {});

/// Walks every root, parses matching files and links names across files.
/// Throws NoRootFound when a root does not exist, ConfigError on invalid
/// globs or encodings. Files that fail to parse are reported and skipped.
ExtractionResult extract_tree(const ExtractionConfig& config);

/// One source file read from disk, ready for parsing.
struct SourceFile {
  std::string path;  // root-relative
  std::string content;
  bool testPath = false;
};

struct ParseOutcome {
  std::optional<java::ParsedFile> file;
  std::string error;
};

/// Parsing kernels. Both return outcomes in input order; the parallel
/// version distributes files over OpenMP threads.
std::vector<ParseOutcome> parse_sources(const std::vector<SourceFile>& files);
std::vector<ParseOutcome> parse_sources_serial(const std::vector<SourceFile>& files);

/// Builds a model from parsed files (in the given order) and resolves
/// cross-file names. `testPath` flags are applied per file.
ExtractionResult link_files(std::vector<ParseOutcome> outcomes,
                            const std::vector<SourceFile>& files,
                            const ExtractionConfig& config);

}  // namespace testscope
