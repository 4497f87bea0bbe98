#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vtsql {

enum class Errc {
  ArityMismatch,
  SyntaxError,
  SchemaError,
  RuntimeError,
  NotAPolygon,
  InvalidGeometry,
  HeaderMismatch,
  KindError,
  SairSyntaxError,
  SairSchemaError,
  EmptyCorpus,
  UnknownZone,
  UnknownTool,
  ArgSchemaError,
  Timeout,
  HttpError,
  ScriptMiss,
  GuardViolation,
  SpecInvalid,
  Io,
  Config,
};

std::string_view errc_name(Errc code) noexcept;

// Single exception type for the library. Optional details are filled in
// where the failing stage knows them (parsers know positions, resolvers
// know the offending identifier and a likely correction).
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::size_t position() const noexcept { return position_; }
  const std::string& token() const noexcept { return token_; }
  const std::string& suggestion() const noexcept { return suggestion_; }
  int status() const noexcept { return status_; }

  Error& at(std::size_t position) {
    position_ = position;
    return *this;
  }
  Error& with_token(std::string token) {
    token_ = std::move(token);
    return *this;
  }
  Error& with_suggestion(std::string suggestion) {
    suggestion_ = std::move(suggestion);
    return *this;
  }
  Error& with_status(int status) {
    status_ = status;
    return *this;
  }

 private:
  Errc code_;
  std::size_t position_ = npos;
  std::string token_;
  std::string suggestion_;
  int status_ = 0;
};

}  // namespace vtsql
