#pragma once

#include <cstdint>
#include <memory>

#include "corec/error.hpp"
#include "corec/value.hpp"

namespace corec {

struct StreamMemo;  // per-definition unfolding chains (stream language)
struct ChunkMemo;   // whnf results keyed by program node (chunk language)
struct ProofMemo;   // whnf results keyed by proof node (proof language)

enum class EvalMode { Naive, Memoized };

// One evaluation session: operator counters, the whnf step budget, and the
// memoization tables when running in memoized mode. Single-owner; a session
// must outlive every stream produced under it.
class EvalSession {
 public:
  static constexpr std::uint64_t kDefaultFuel = 1000000;

  explicit EvalSession(EvalMode mode = EvalMode::Naive,
                       std::uint64_t fuel = kDefaultFuel)
      : mode_(mode), fuel_(fuel) {}

  EvalSession(const EvalSession&) = delete;
  EvalSession& operator=(const EvalSession&) = delete;

  EvalMode mode() const { return mode_; }
  std::uint64_t fuel() const { return fuel_; }

  std::uint64_t add_count() const { return add_count_; }
  std::uint64_t op_count() const { return op_count_; }
  std::uint64_t whnf_steps() const { return whnf_steps_; }

  // Resets the per-element step budget; called at each output element.
  void begin_element() { element_steps_ = 0; }

  // One whnf step. Throws FuelExhausted when the per-element budget runs out
  // (a checker escape or a misregistered rule, never a checked program).
  void tick() {
    ++whnf_steps_;
    if (++element_steps_ > fuel_)
      fail(ErrKind::FuelExhausted,
           "whnf step budget exhausted (" + std::to_string(fuel_) + " steps per element)");
  }

  Value bin(BinOp op, const Value& a, const Value& b) {
    ++op_count_;
    if (op == BinOp::Add) ++add_count_;
    return apply_bin(op, a, b);
  }

  Value un(const UnOp& op, const Value& a) {
    ++op_count_;
    return apply_un(op, a);
  }

  std::uint64_t trans_count() const { return trans_count_; }
  void count_trans() { ++trans_count_; }

  // Guards against unbounded C++ recursion before the step budget trips.
  struct DepthGuard {
    EvalSession& s;
    explicit DepthGuard(EvalSession& sess) : s(sess) {
      if (++s.depth_ > kMaxDepth)
        fail(ErrKind::FuelExhausted, "whnf recursion depth limit exceeded");
    }
    ~DepthGuard() { --s.depth_; }
  };

  std::shared_ptr<StreamMemo> stream_memo;
  std::shared_ptr<ChunkMemo> chunk_memo;
  std::shared_ptr<ProofMemo> proof_memo;

 private:
  static constexpr std::uint64_t kMaxDepth = 40000;

  EvalMode mode_;
  std::uint64_t fuel_;
  std::uint64_t add_count_ = 0;
  std::uint64_t op_count_ = 0;
  std::uint64_t whnf_steps_ = 0;
  std::uint64_t element_steps_ = 0;
  std::uint64_t trans_count_ = 0;
  std::uint64_t depth_ = 0;
};

}  // namespace corec
