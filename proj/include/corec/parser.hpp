#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corec/chunk_lang.hpp"
#include "corec/stream_lang.hpp"

namespace corec {

struct SurfaceExpr;
using SurfaceExprPtr = std::shared_ptr<const SurfaceExpr>;

struct ELit {
  Value v;
};
struct EName {
  std::string name;
};
struct EConsS {
  SurfaceExprPtr head, tail;
};
struct EDelay {
  SurfaceExprPtr arg;
};
struct EEnd {
  SurfaceExprPtr arg;
};
struct EZip {
  std::string op;
  SurfaceExprPtr left, right;
};
struct EMap {
  std::string op;
  SurfaceExprPtr arg;
};
struct ETail {
  SurfaceExprPtr arg;
};
struct EForget {
  SurfaceExprPtr arg;
};
struct EEvens {
  SurfaceExprPtr arg;
};
struct EInterleave {
  SurfaceExprPtr left, right;
};
struct EMerge {
  SurfaceExprPtr left, right;
};

struct SurfaceExpr {
  std::variant<ELit, EName, EConsS, EDelay, EEnd, EZip, EMap, ETail, EForget, EEvens,
               EInterleave, EMerge>
      node;
  int line = 0, col = 0;
};

struct SourceDef {
  std::string name;
  std::optional<std::string> elem_type;        // "Nat" | "Bool" when a signature is given
  std::optional<ChunkSignature> sig;           // chunk annotation, when given
  SurfaceExprPtr body;
  int line = 0, col = 0;
};

struct SourceModule {
  std::vector<SourceDef> defs;
};

// Errors carry "line L, column C" positions.
SourceModule parse_module(const std::string& text);
std::string print_module(const SourceModule& m);

enum class DefLang { Plain, Chunked };

struct ElabRejection {
  std::string def;
  std::string message;
};

// A parsed module split into the two definition environments. Definitions
// whose surface form does not fit their language (a chunk construct without
// a chunk signature, a misplaced delay, a cross-language reference) land in
// `rejections` instead.
struct ModuleEnvs {
  std::shared_ptr<DefEnv> stream_env;
  std::shared_ptr<ChunkDefEnv> chunk_env;
  std::map<std::string, DefLang> lang;
  std::vector<ElabRejection> rejections;
};

ModuleEnvs elaborate(const SourceModule& m);

}  // namespace corec
