#include "testscope/app/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace testscope {

namespace {

constexpr std::string_view kUnitPrefix = "/api/view/unit/";
constexpr std::string_view kTestCasePrefix = "/api/view/testcase/";

ApiResponse ok(const nlohmann::json& j) { return ApiResponse{200, "application/json", view_body(j)}; }

std::vector<std::string> split_packages(std::string_view q) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= q.size()) {
    auto end = q.find(',', start);
    if (end == std::string_view::npos) end = q.size();
    if (end > start) out.emplace_back(q.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

const char* const kIndexPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>testscope</title></head><body>"
    "<h1>testscope</h1><p>No viewer assets mounted. Endpoints:</p><ul>"
    "<li><a href=\"/api/bundle/meta\">/api/bundle/meta</a></li>"
    "<li><a href=\"/api/view/system-wide\">/api/view/system-wide</a></li>"
    "<li>/api/view/unit/{qualifiedName}</li><li>/api/view/testcase/{qualifiedName}</li>"
    "<li><a href=\"/api/report\">/api/report</a></li></ul></body></html>";

}  // namespace

ApiResponse problem(int status, std::string_view title, std::string_view detail) {
  nlohmann::json body{{"type", "about:blank"}, {"title", title}, {"status", status}, {"detail", detail}};
  return ApiResponse{status, "application/problem+json", body.dump(2) + "\n"};
}

ApiResponse ApiService::get(std::string_view path, std::string_view packagesQuery) const {
  try {
    if (path == "/api/bundle/meta") return ok(bundle_->meta());
    if (path == "/api/report") return ok(bundle_->report());
    if (path == "/api/view/system-wide") {
      std::optional<std::vector<std::string>> filter;
      if (!packagesQuery.empty()) filter = split_packages(packagesQuery);
      return ok(bundle_->view(ViewRequest::SystemWide, std::nullopt, filter));
    }
    if (path.substr(0, kUnitPrefix.size()) == kUnitPrefix && path.size() > kUnitPrefix.size()) {
      return ok(bundle_->view(ViewRequest::Unit, std::string(path.substr(kUnitPrefix.size()))));
    }
    if (path.substr(0, kTestCasePrefix.size()) == kTestCasePrefix && path.size() > kTestCasePrefix.size()) {
      return ok(bundle_->view(ViewRequest::TestCase, std::string(path.substr(kTestCasePrefix.size()))));
    }
  } catch (const UnknownFocus& e) {
    return problem(404, "Unknown focus", e.what());
  } catch (const UnknownPackage& e) {
    return problem(404, "Unknown package", e.what());
  }
  return problem(404, "Not Found", "no endpoint " + std::string(path));
}

ApiServer::ApiServer(std::shared_ptr<const Bundle> bundle, const ServeOptions& options)
    : server_(std::make_unique<httplib::Server>()), service_(std::move(bundle)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::string packages = req.has_param("packages") ? req.get_param_value("packages") : "";
    ApiResponse r;
    try {
      r = service_.get(req.path, packages);
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      r = problem(500, "Internal Server Error", e.what());
    }
    res.status = r.status;
    res.set_content(r.body, r.contentType.c_str());
  };
  server_->Get(R"(/api/.*)", handler);
  if (options.assets) {
    if (!server_->set_mount_point("/", *options.assets)) {
      throw ConfigError("assets directory not found: " + *options.assets);
    }
  } else {
    server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kIndexPage, "text/html");
    });
  }
  // Read-only service: every other method is refused.
  auto refuse = [](const httplib::Request&, httplib::Response& res) {
    auto p = problem(405, "Method Not Allowed", "the service is read-only");
    res.status = p.status;
    res.set_content(p.body, p.contentType.c_str());
  };
  server_->Post(R"(.*)", refuse);
  server_->Put(R"(.*)", refuse);
  server_->Delete(R"(.*)", refuse);
  server_->Patch(R"(.*)", refuse);

  // httplib's default sets SO_REUSEPORT, which lets a second server share a
  // busy port silently.
  server_->set_socket_options([](auto sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  if (options.port == 0) {
    port_ = server_->bind_to_any_port(options.host);
    if (port_ < 0) throw PortInUse(options.host + ":0");
  } else {
    if (!server_->bind_to_port(options.host, options.port)) {
      throw PortInUse(options.host + ":" + std::to_string(options.port));
    }
    port_ = options.port;
  }
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::run() { server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_) server_->stop();
}

}  // namespace testscope
