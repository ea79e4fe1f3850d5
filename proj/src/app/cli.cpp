#include "testscope/app/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "testscope/app/config.hpp"
#include "testscope/app/pipeline.hpp"
#include "testscope/app/server.hpp"
#include "testscope/core/errors.hpp"
#include "testscope/core/facts_io.hpp"
#include "testscope/extract/extractor.hpp"

namespace testscope {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string configPath;
  std::vector<std::string> settings;
  std::string logLevel = "info";

  std::vector<std::string> roots;
  std::string out;
  std::string facts;
  std::string name;
  std::vector<std::string> thresholds;
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  std::string encoding;
  std::string junitStyle;

  std::string bundle;
  std::string kind;
  std::string focus;
  std::string format;
  std::vector<std::string> packages;
  std::string failOn = "none";

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string assets;
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

RunConfig load_run_config(const Options& o) {
  RunConfig config;
  std::string path = o.configPath;
  if (path.empty()) {
    if (const char* env = std::getenv(std::string(kConfigEnv).c_str())) path = env;
  }
  if (!path.empty()) {
    if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path);
    load_config_file(config, path);
  }
  for (const auto& s : o.settings) apply_assignment(config, s);
  if (!o.roots.empty()) config.extract.roots.assign(o.roots.begin(), o.roots.end());
  if (!o.include.empty()) config.extract.includeGlobs = o.include;
  if (!o.exclude.empty()) config.extract.excludeGlobs = o.exclude;
  if (!o.encoding.empty()) config.extract.sourceEncoding = o.encoding;
  if (!o.junitStyle.empty()) config.classify.junitStyle = parse_junit_style(o.junitStyle);
  for (const auto& t : o.thresholds) {
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--threshold expects key=value, got '" + t + "'");
    set_threshold(config.thresholds, t.substr(0, eq), t.substr(eq + 1));
  }
  validate(config);
  return config;
}

ExtractionResult run_extract(const RunConfig& config) {
  if (config.extract.roots.empty()) throw ConfigError("no source roots given (--root)");
  ExtractionResult r = extract_tree(config.extract);
  const auto& d = r.diagnostics;
  spdlog::info("files scanned {}, parsed {}, failed {}; call sites {}, unresolved invocations {}",
               d.filesScanned, d.filesParsed, d.parseFailures, d.callSites, d.unresolvedInvocationCount);
  for (const auto& f : d.perFileErrors) spdlog::warn("{}: {}", f.file, f.message);
  return r;
}

int cmd_extract(const Options& o, std::ostream& out) {
  RunConfig config = load_run_config(o);
  ExtractionResult r = run_extract(config);
  write_output(o.out, export_facts(r.model), out);
  return kExitOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  RunConfig config = load_run_config(o);
  BundleMeta meta;
  FrozenFactModel facts;
  if (!o.facts.empty()) {
    if (!fs::is_regular_file(o.facts)) throw ConfigError("facts file not found: " + o.facts);
    facts = freeze(read_facts_file(o.facts));
    meta.name = fs::path(o.facts).stem().string();
    meta.sourcesModified = newest_modification({o.facts});
  } else {
    ExtractionResult r = run_extract(config);
    facts = freeze(std::move(r.model));
    for (const auto& root : config.extract.roots) meta.roots.push_back(root.string());
    fs::path first = config.extract.roots.front();
    meta.name = (first.has_filename() ? first : first.parent_path()).filename().string();
    meta.sourcesModified = newest_modification(meta.roots);
  }
  if (!o.name.empty()) meta.name = o.name;
  Analysis analysis = analyze(facts, config);
  nlohmann::json bundle = make_bundle(analysis, config, meta);
  write_output(o.out, bundle.dump() + "\n", out);
  out << render_summary(summarize(analysis));
  return kExitOk;
}

std::shared_ptr<Bundle> open_bundle(const Options& o) {
  if (!fs::is_regular_file(o.bundle)) throw ConfigError("bundle not found: " + o.bundle);
  return Bundle::load(o.bundle);
}

int cmd_view(const Options& o, std::ostream& out) {
  auto bundle = open_bundle(o);
  ViewRequest kind = parse_view_request(o.kind);
  ExportFormat format = parse_export_format(o.format.empty() ? "json" : o.format);
  std::optional<std::string> focus;
  if (!o.focus.empty()) focus = o.focus;
  if (kind != ViewRequest::SystemWide && !focus) throw UnknownFocus("--focus is required for this view");
  std::optional<std::vector<std::string>> filter;
  if (!o.packages.empty()) filter = o.packages;
  std::string text = format == ExportFormat::JSON
                         ? view_body(bundle->view(kind, focus, filter))
                         : export_document(bundle->view_document(kind, focus, filter), format);
  write_output(o.out, text, out);
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  auto bundle = open_bundle(o);
  if (o.failOn != "none" && o.failOn != "threat") {
    throw ConfigError("--fail-on expects none or threat, got '" + o.failOn + "'");
  }
  std::string format = o.format.empty() ? "text" : o.format;
  if (format == "text") {
    write_output(o.out, bundle->report_text(), out);
  } else if (format == "json") {
    write_output(o.out, view_body(bundle->report()), out);
  } else {
    throw ConfigError("report format must be text or json, got '" + format + "'");
  }
  return o.failOn == "threat" && bundle->has_threats() ? kExitThreats : kExitOk;
}

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Options& o, std::ostream& out) {
  auto bundle = open_bundle(o);
  ServeOptions so;
  so.host = o.host;
  so.port = o.port;
  if (!o.assets.empty()) so.assets = o.assets;
  ApiServer server(bundle, so);
  out << "serving " << o.bundle << " on http://" << so.host << ":" << server.port() << "/" << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.run();
  g_server = nullptr;
  return kExitOk;
}

void setup_logging(const std::string& level, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto logger = std::make_shared<spdlog::logger>("testscope", sink);
  logger->set_pattern("testscope: %l: %v");
  auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off") throw ConfigError("unknown log level '" + level + "'");
  logger->set_level(lvl);
  spdlog::set_default_logger(logger);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Static exploration of xUnit test suites", "testscope"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--config", o.configPath, "Config file (default: $TESTSCOPE_CONFIG)");
  app.add_option("--set", o.settings, "Override a config key: section.key=value");
  app.add_option("--log-level", o.logLevel, "trace, debug, info, warn, error, off");

  auto add_roots = [&](CLI::App* c) {
    c->add_option("--root", o.roots, "Source root (repeatable)");
    c->add_option("--include", o.include, "Include glob (repeatable)");
    c->add_option("--exclude", o.exclude, "Exclude glob (repeatable)");
    c->add_option("--encoding", o.encoding, "Source encoding: UTF-8 or ISO-8859-1");
    c->add_option("--junit-style", o.junitStyle, "3, 4 or both");
  };

  auto* extract = app.add_subcommand("extract", "Parse sources into a facts file");
  add_roots(extract);
  extract->add_option("--out", o.out, "Facts file (default: standard output)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Run the full pipeline and write a bundle");
  add_roots(analyze_cmd);
  analyze_cmd->add_option("--facts", o.facts, "Analyze an existing facts file instead of sources");
  analyze_cmd->add_option("--out", o.out, "Bundle file")->required();
  analyze_cmd->add_option("--name", o.name, "Corpus name recorded in the bundle");
  analyze_cmd->add_option("--threshold", o.thresholds, "Indicator threshold key=value (repeatable)");

  auto* view = app.add_subcommand("view", "Export one view from a bundle");
  view->add_option("--bundle", o.bundle, "Bundle file")->required();
  view->add_option("--kind", o.kind, "system-wide, unit or testcase")->required();
  view->add_option("--focus", o.focus, "Qualified class name for unit and testcase views");
  view->add_option("--format", o.format, "dot, graphml or json");
  view->add_option("--package", o.packages, "System-wide package filter (repeatable)");
  view->add_option("--out", o.out, "Output file (default: standard output)");

  auto* report_cmd = app.add_subcommand("report", "Print the indicator report");
  report_cmd->add_option("--bundle", o.bundle, "Bundle file")->required();
  report_cmd->add_option("--format", o.format, "text or json");
  report_cmd->add_option("--fail-on", o.failOn, "none or threat");
  report_cmd->add_option("--out", o.out, "Output file (default: standard output)");

  auto* serve = app.add_subcommand("serve", "Serve a bundle over HTTP");
  serve->add_option("--bundle", o.bundle, "Bundle file")->required();
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port");
  serve->add_option("--assets", o.assets, "Viewer assets directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidInput;
  }

  try {
    setup_logging(o.logLevel, err);
    if (extract->parsed()) return cmd_extract(o, out);
    if (analyze_cmd->parsed()) return cmd_analyze(o, out);
    if (view->parsed()) return cmd_view(o, out);
    if (report_cmd->parsed()) return cmd_report(o, out);
    if (serve->parsed()) return cmd_serve(o, out);
  } catch (const UnknownFocus& e) {
    err << "testscope: unknown focus: " << e.what() << "\n";
    return kExitUnknownFocus;
  } catch (const UnknownPackage& e) {
    err << "testscope: unknown package: " << e.what() << "\n";
    return kExitUnknownFocus;
  } catch (const NoRootFound& e) {
    err << "testscope: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const ConfigError& e) {
    err << "testscope: configuration error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const SchemaViolation& e) {
    err << "testscope: schema violation: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const PortInUse& e) {
    err << "testscope: port in use: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "testscope: error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace testscope
