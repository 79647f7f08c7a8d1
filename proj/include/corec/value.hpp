#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "corec/error.hpp"

namespace corec {

// Stream elements: 64-bit signed integers and booleans. Arithmetic overflow
// raises Error(Overflow) instead of wrapping.
struct Value {
  bool is_bool = false;
  std::int64_t num = 0;

  static Value integer(std::int64_t v) { return Value{false, v}; }
  static Value boolean(bool b) { return Value{true, b ? 1 : 0}; }

  std::int64_t as_int() const {
    if (is_bool) fail(ErrKind::TypeError, "expected an integer, got a boolean");
    return num;
  }
  bool as_bool() const {
    if (!is_bool) fail(ErrKind::TypeError, "expected a boolean, got an integer");
    return num != 0;
  }

  friend bool operator==(const Value& a, const Value& b) {
    return a.is_bool == b.is_bool && a.num == b.num;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  // Ordering used by merge; booleans sort as 0/1.
  friend bool operator<(const Value& a, const Value& b) { return a.num < b.num; }
};

std::string to_string(const Value& v);

enum class BinOp { Add, Sub, Mul, Max, Min };

// Unary operators form a small registry so programs stay serializable:
// suc, not, id, plus<k>, mul<k> (with "double" as an alias for mul2).
struct UnOp {
  enum class Kind { Suc, Not, Id, AddConst, MulConst };
  Kind kind = Kind::Id;
  std::int64_t k = 0;

  friend bool operator==(const UnOp& a, const UnOp& b) {
    return a.kind == b.kind && a.k == b.k;
  }
};

Value apply_bin(BinOp op, const Value& a, const Value& b);
Value apply_un(const UnOp& op, const Value& a);

std::optional<BinOp> bin_op_by_name(const std::string& name);
std::optional<UnOp> un_op_by_name(const std::string& name);
std::string bin_op_name(BinOp op);
std::string un_op_name(const UnOp& op);

}  // namespace corec
