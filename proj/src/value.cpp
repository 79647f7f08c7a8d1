#include "corec/value.hpp"

namespace corec {

const char* err_kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::Overflow: return "Overflow";
    case ErrKind::TypeError: return "TypeError";
    case ErrKind::UnresolvedRef: return "UnresolvedRef";
    case ErrKind::FuelExhausted: return "FuelExhausted";
    case ErrKind::IndexMismatch: return "IndexMismatch";
    case ErrKind::EmptyChunk: return "EmptyChunk";
    case ErrKind::EmptyChunkDemand: return "EmptyChunkDemand";
    case ErrKind::NonProductiveTopLevel: return "NonProductiveTopLevel";
    case ErrKind::CodeMismatch: return "CodeMismatch";
    case ErrKind::HeadMismatch: return "HeadMismatch";
    case ErrKind::MiddleMismatch: return "MiddleMismatch";
    case ErrKind::BadIndex: return "BadIndex";
    case ErrKind::HypothesisViolated: return "HypothesisViolated";
    case ErrKind::NotASolution: return "NotASolution";
    case ErrKind::ParseError: return "ParseError";
    case ErrKind::UsageError: return "UsageError";
    case ErrKind::Internal: return "Internal";
  }
  return "Unknown";
}

std::string to_string(const Value& v) {
  if (v.is_bool) return v.num ? "true" : "false";
  return std::to_string(v.num);
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrKind::Overflow, "integer overflow in add");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) fail(ErrKind::Overflow, "integer overflow in sub");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrKind::Overflow, "integer overflow in mul");
  return r;
}

}  // namespace

Value apply_bin(BinOp op, const Value& a, const Value& b) {
  switch (op) {
    case BinOp::Add: return Value::integer(checked_add(a.as_int(), b.as_int()));
    case BinOp::Sub: return Value::integer(checked_sub(a.as_int(), b.as_int()));
    case BinOp::Mul: return Value::integer(checked_mul(a.as_int(), b.as_int()));
    case BinOp::Max: return Value::integer(std::max(a.as_int(), b.as_int()));
    case BinOp::Min: return Value::integer(std::min(a.as_int(), b.as_int()));
  }
  fail(ErrKind::Internal, "unknown binary operator");
}

Value apply_un(const UnOp& op, const Value& a) {
  switch (op.kind) {
    case UnOp::Kind::Suc: return Value::integer(checked_add(a.as_int(), 1));
    case UnOp::Kind::Not: return Value::boolean(!a.as_bool());
    case UnOp::Kind::Id: return a;
    case UnOp::Kind::AddConst: return Value::integer(checked_add(a.as_int(), op.k));
    case UnOp::Kind::MulConst: return Value::integer(checked_mul(a.as_int(), op.k));
  }
  fail(ErrKind::Internal, "unknown unary operator");
}

std::optional<BinOp> bin_op_by_name(const std::string& name) {
  if (name == "add") return BinOp::Add;
  if (name == "sub") return BinOp::Sub;
  if (name == "mul") return BinOp::Mul;
  if (name == "max") return BinOp::Max;
  if (name == "min") return BinOp::Min;
  return std::nullopt;
}

std::optional<UnOp> un_op_by_name(const std::string& name) {
  if (name == "suc") return UnOp{UnOp::Kind::Suc, 0};
  if (name == "not") return UnOp{UnOp::Kind::Not, 0};
  if (name == "id") return UnOp{UnOp::Kind::Id, 0};
  if (name == "double") return UnOp{UnOp::Kind::MulConst, 2};
  auto tail_int = [&](const std::string& prefix) -> std::optional<std::int64_t> {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
      return std::nullopt;
    std::int64_t v = 0;
    for (std::size_t i = prefix.size(); i < name.size(); ++i) {
      char c = name[i];
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
    }
    return v;
  };
  if (auto k = tail_int("plus")) return UnOp{UnOp::Kind::AddConst, *k};
  if (auto k = tail_int("mul")) return UnOp{UnOp::Kind::MulConst, *k};
  return std::nullopt;
}

std::string bin_op_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "add";
    case BinOp::Sub: return "sub";
    case BinOp::Mul: return "mul";
    case BinOp::Max: return "max";
    case BinOp::Min: return "min";
  }
  return "?";
}

std::string un_op_name(const UnOp& op) {
  switch (op.kind) {
    case UnOp::Kind::Suc: return "suc";
    case UnOp::Kind::Not: return "not";
    case UnOp::Kind::Id: return "id";
    case UnOp::Kind::AddConst: return "plus" + std::to_string(op.k);
    case UnOp::Kind::MulConst: return "mul" + std::to_string(op.k);
  }
  return "?";
}

}  // namespace corec
