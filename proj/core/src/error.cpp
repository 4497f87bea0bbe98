#include "vtsql/error.hpp"

namespace vtsql {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ArityMismatch: return "ARITY_MISMATCH";
    case Errc::SyntaxError: return "SYNTAX_ERROR";
    case Errc::SchemaError: return "SCHEMA_ERROR";
    case Errc::RuntimeError: return "RUNTIME_ERROR";
    case Errc::NotAPolygon: return "NOT_A_POLYGON";
    case Errc::InvalidGeometry: return "INVALID_GEOMETRY";
    case Errc::HeaderMismatch: return "HEADER_MISMATCH";
    case Errc::KindError: return "KIND_ERROR";
    case Errc::SairSyntaxError: return "SAIR_SYNTAX_ERROR";
    case Errc::SairSchemaError: return "SAIR_SCHEMA_ERROR";
    case Errc::EmptyCorpus: return "EMPTY_CORPUS";
    case Errc::UnknownZone: return "UNKNOWN_ZONE";
    case Errc::UnknownTool: return "UNKNOWN_TOOL";
    case Errc::ArgSchemaError: return "ARG_SCHEMA_ERROR";
    case Errc::Timeout: return "TIMEOUT";
    case Errc::HttpError: return "HTTP_ERROR";
    case Errc::ScriptMiss: return "SCRIPT_MISS";
    case Errc::GuardViolation: return "GUARD_VIOLATION";
    case Errc::SpecInvalid: return "SPEC_INVALID";
    case Errc::Io: return "IO_ERROR";
    case Errc::Config: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace vtsql
