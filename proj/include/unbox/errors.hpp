#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unbox {

// Base for all failures caused by the data being processed (malformed
// files, invariant violations, missing artifacts). The CLI maps these to
// exit code 2; usage/config problems map to exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : DataError(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class DuplicateIdError : public DataError {
 public:
  explicit DuplicateIdError(const std::string& id)
      : DataError("duplicate comment id: \"" + id + "\""), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class InvalidUtf8Error : public DataError {
 public:
  InvalidUtf8Error(const std::string& what, std::size_t byte_offset)
      : DataError(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class EmptyDatasetError : public DataError {
 public:
  explicit EmptyDatasetError(const std::string& what) : DataError(what) {}
};

class MissingArtifactError : public DataError {
 public:
  explicit MissingArtifactError(const std::string& path)
      : DataError("missing artifact: " + path + " (run the preceding stage first)") {}
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Remote fetch failures.
class FetchError : public DataError {
 public:
  enum class Kind { auth, quota, not_found, network };
  FetchError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace unbox
