#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "testscope/app/pipeline.hpp"
#include "testscope/core/errors.hpp"

namespace httplib {
class Server;
}

namespace testscope {

class PortInUse : public Error {
 public:
  explicit PortInUse(const std::string& where) : Error("cannot bind " + where) {}
};

struct ApiResponse {
  int status = 200;
  std::string contentType = "application/json";
  std::string body;
};

/// Read-only endpoints over one bundle, independent of the transport:
///   GET /api/bundle/meta
///   GET /api/view/system-wide[?packages=a,b]
///   GET /api/view/unit/{qualifiedName}
///   GET /api/view/testcase/{qualifiedName}
///   GET /api/report
/// Unknown paths and foci answer 404 with an application/problem+json body.
class ApiService {
 public:
  explicit ApiService(std::shared_ptr<const Bundle> bundle) : bundle_(std::move(bundle)) {}
  ApiResponse get(std::string_view path, std::string_view packagesQuery = {}) const;

 private:
  std::shared_ptr<const Bundle> bundle_;
};

ApiResponse problem(int status, std::string_view title, std::string_view detail);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::string> assets;
};

class ApiServer {
 public:
  /// Binds immediately. Throws PortInUse.
  ApiServer(std::shared_ptr<const Bundle> bundle, const ServeOptions& options);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  int port() const noexcept { return port_; }
  /// Blocks until stop().
  void run();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  ApiService service_;
  int port_ = 0;
};

}  // namespace testscope
