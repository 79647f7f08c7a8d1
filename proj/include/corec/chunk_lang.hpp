#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corec/codata.hpp"
#include "corec/session.hpp"
#include "corec/value.hpp"

namespace corec {

// Eventually periodic sequence of chunk sizes: a finite prefix followed by a
// repeated period. Entries may be zero in synthesized claims; declared
// pattern signatures require every entry >= 1.
class EPSeq {
 public:
  EPSeq() : period_{1} { rebuild(); }
  EPSeq(std::vector<std::uint64_t> prefix, std::vector<std::uint64_t> period);

  std::uint64_t at(std::size_t k) const;
  // Sum of entries [0, k).
  std::uint64_t sum_before(std::size_t k) const;

  const std::vector<std::uint64_t>& prefix() const { return prefix_; }
  const std::vector<std::uint64_t>& period() const { return period_; }
  std::uint64_t period_sum() const { return period_sum_; }

  EPSeq normalized() const;
  friend bool operator==(const EPSeq& a, const EPSeq& b);

 private:
  void rebuild();
  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> period_;
  std::vector<std::uint64_t> prefix_sums_;  // prefix_sums_[i] = sum of prefix[0..i)
  std::vector<std::uint64_t> period_sums_;
  std::uint64_t period_sum_ = 0;
};

// Production claim: `current` elements remain in the chunk under
// construction; `upcoming` lists the sizes of the chunks behind successive
// delays. cumulative(k) is the claimed element count available after
// forcing k delays.
struct IndexState {
  std::uint64_t current = 0;
  EPSeq upcoming;

  std::uint64_t cumulative(std::size_t k) const { return current + upcoming.sum_before(k); }
  IndexState normalized() const { return {current, upcoming.normalized()}; }
  std::string to_text() const;
  friend bool operator==(const IndexState& a, const IndexState& b);
};

// True iff a.cumulative(k) >= b.cumulative(k) for every k.
bool state_dominates(const IndexState& a, const IndexState& b);

IndexState state_cons(const IndexState& rest);
// Closes the current chunk; requires rest.current >= 1 (no empty chunks).
IndexState state_endchunk(const IndexState& rest);
// Drops one element of the chunk under construction; requires current >= 1.
IndexState state_tail(const IndexState& arg);
IndexState state_forget(const IndexState& arg);
// Exact transfer for taking every other element: C'(k) = ceil(C(k)/2).
IndexState state_evens(const IndexState& arg);
// Exact transfer for strict alternation starting left:
// C'(k) = min(2*C_left(k), 2*C_right(k)+1).
IndexState state_interleave(const IndexState& l, const IndexState& r);

struct ChunkSignature {
  enum class Disc { Bool, Fixed, Pattern };
  Disc disc = Disc::Bool;
  bool flag = true;                          // Bool
  std::uint64_t chunk = 1, first = 1;        // Fixed: m, n
  std::vector<std::uint64_t> pre, per;       // Pattern

  static ChunkSignature boolean(bool flag);
  static ChunkSignature fixed(std::uint64_t m, std::uint64_t n);
  static ChunkSignature pattern(std::vector<std::uint64_t> pre, std::vector<std::uint64_t> per);

  IndexState state() const;
  std::string to_text() const;
};

struct ChunkProg;
using ChunkProgPtr = std::shared_ptr<const ChunkProg>;

struct CDelayed {
  ChunkProgPtr prog;
};

// End of the current chunk; the paper-style bracket around the delayed rest.
struct CEnd {
  CDelayed rest;
};
struct CCons {
  Value head;
  ChunkProgPtr rest;
};
struct CTail {
  ChunkProgPtr arg;
};
struct CForget {
  ChunkProgPtr arg;
};
struct CZip {
  BinOp op;
  ChunkProgPtr left, right;
};
struct CMapN {
  UnOp op;
  ChunkProgPtr arg;
};
// skip is the parity offset into the source (0 from the surface syntax; 1
// arises during evaluation when a chunk ends between a kept element and a
// skipped one).
struct CEvens {
  ChunkProgPtr arg;
  int skip = 0;
};
// Strict alternation; pending values are elements already pulled from a side
// whose chunk closed while the other side still had output to give.
struct CInterleave {
  std::vector<Value> pending_left;
  ChunkProgPtr left;
  std::vector<Value> pending_right;
  ChunkProgPtr right;
  bool right_first = false;
};
struct CRef {
  std::string name;
};

struct ChunkProg {
  std::variant<CEnd, CCons, CTail, CForget, CZip, CMapN, CEvens, CInterleave, CRef> node;
};

ChunkProgPtr cp_end(ChunkProgPtr delayed_rest);
ChunkProgPtr cp_cons(Value head, ChunkProgPtr rest);
ChunkProgPtr cp_tail(ChunkProgPtr arg);
ChunkProgPtr cp_forget(ChunkProgPtr arg);
ChunkProgPtr cp_zip(BinOp op, ChunkProgPtr l, ChunkProgPtr r);
ChunkProgPtr cp_map(UnOp op, ChunkProgPtr arg);
ChunkProgPtr cp_evens(ChunkProgPtr arg, int skip = 0);
ChunkProgPtr cp_interleave(ChunkProgPtr l, ChunkProgPtr r);
ChunkProgPtr cp_interleave_state(std::vector<Value> pl, ChunkProgPtr l, std::vector<Value> pr,
                                 ChunkProgPtr r, bool right_first);
ChunkProgPtr cp_ref(std::string name);

// One whole chunk: the values before the next delay, plus the program
// exposed behind that delay.
struct ChunkWhnf {
  std::vector<Value> items;
  ChunkProgPtr rest;
};

struct ChunkDef {
  ChunkSignature sig;
  ChunkProgPtr body;
};

class ChunkDefEnv {
 public:
  void add_def(const std::string& name, ChunkSignature sig, ChunkProgPtr body);
  const ChunkDef* find_def(const std::string& name) const;
  const std::map<std::string, ChunkDef>& defs() const { return defs_; }

 private:
  std::map<std::string, ChunkDef> defs_;
};

struct ChunkDiag {
  enum class Kind { IndexMismatch, EmptyChunk, Unresolved, UndelayedRef };
  Kind kind;
  std::string def;
  std::string path;
  std::string detail;
  std::string message() const;
};

struct ChunkReport {
  std::vector<ChunkDiag> diags;
  bool ok() const { return diags.empty(); }
};

// Index checking: synthesizes each body's production claim bottom-up (using
// declared signatures at references) and accepts when it dominates the
// declared claim. Also requires every reference to sit behind at least one
// chunk boundary, which keeps whnf a terminating structural recursion.
ChunkReport check_chunk_typing(const ChunkDefEnv& env);

ChunkWhnf whnf_chunk(const ChunkProgPtr& p, const ChunkDefEnv& env, EvalSession& sess);

// Emits elements across chunk boundaries. When `boundary_trace` is given,
// the cumulative element count is appended at every boundary crossing, so
// boundary_trace[k] is the number of elements produced from chunks 0..k.
Stream interpret_chunk(ChunkProgPtr p, const ChunkSignature& sig,
                       std::shared_ptr<const ChunkDefEnv> env, std::shared_ptr<EvalSession> sess,
                       std::shared_ptr<std::vector<std::uint64_t>> boundary_trace = nullptr);

// The two-in, two-out map variant; the semantics oracle for chunk-size
// discussions.
Stream map2_reference(std::function<Value(Value)> f, Stream s);

struct StreamProg;
// Erases chunk boundaries and indices, re-reading the program in the plain
// stream language. Fails (nullopt) on constructs the stream language lacks
// (tail, forget, evens, interleave).
std::optional<std::shared_ptr<const StreamProg>> erase_to_stream_lang(const ChunkProgPtr& p);

// whnf results keyed by program node; shared substructure between the
// unfoldings of a definition makes chunk evaluation near-linear.
struct ChunkMemo {
  std::map<ChunkProgPtr, ChunkWhnf, std::owner_less<ChunkProgPtr>> cache;
};

}  // namespace corec
