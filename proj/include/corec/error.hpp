#pragma once

#include <stdexcept>
#include <string>

namespace corec {

enum class ErrKind {
  Overflow,
  TypeError,
  UnresolvedRef,
  FuelExhausted,
  IndexMismatch,
  EmptyChunk,
  EmptyChunkDemand,
  NonProductiveTopLevel,
  CodeMismatch,
  HeadMismatch,
  MiddleMismatch,
  BadIndex,
  HypothesisViolated,
  NotASolution,
  ParseError,
  UsageError,
  Internal,
};

const char* err_kind_name(ErrKind k);

// `index` is the element/proof position where the failure surfaced, -1 when
// the error is not positional.
struct Error : std::runtime_error {
  ErrKind kind;
  long long index;

  Error(ErrKind k, const std::string& msg, long long idx = -1)
      : std::runtime_error(msg), kind(k), index(idx) {}
};

[[noreturn]] inline void fail(ErrKind k, const std::string& msg, long long idx = -1) {
  throw Error(k, msg, idx);
}

}  // namespace corec
