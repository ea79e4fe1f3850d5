#pragma once

#include <stdexcept>
#include <string>

namespace testscope {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateQualifiedName : public Error {
 public:
  explicit DuplicateQualifiedName(const std::string& name)
      : Error("duplicate qualified name: " + name), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class InvalidParentKind : public Error {
 public:
  using Error::Error;
};

class UnknownEntity : public Error {
 public:
  using Error::Error;
};

class FrozenModel : public Error {
 public:
  FrozenModel() : Error("model is frozen") {}
};

/// A document failed validation. `path()` is a JSON-pointer-like location.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class DanglingContainment : public Error {
 public:
  using Error::Error;
};

class NoRootFound : public Error {
 public:
  explicit NoRootFound(const std::string& root)
      : Error("source root not found: " + root), root_(root) {}
  const std::string& root() const noexcept { return root_; }

 private:
  std::string root_;
};

class NotATestCase : public Error {
 public:
  using Error::Error;
};

class NotAProductionClass : public Error {
 public:
  using Error::Error;
};

class UnknownPackage : public Error {
 public:
  using Error::Error;
};

class UnknownFocus : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace testscope
