#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "corec/codata.hpp"
#include "corec/session.hpp"
#include "corec/value.hpp"

namespace corec {

struct StreamProg;
using StreamProgPtr = std::shared_ptr<const StreamProg>;

// Delayed position: the coinductive marker separating one production step
// from the next.
struct SDelayed {
  StreamProgPtr prog;
};

struct SCons {
  Value head;
  SDelayed tail;
};
struct SZipWith {
  BinOp op;
  StreamProgPtr left, right;
};
struct SMap {
  UnOp op;
  StreamProgPtr arg;
};
struct SMerge {
  StreamProgPtr left, right;
};
struct SUserFun {
  std::string fn;
  StreamProgPtr arg;
};
struct SEmbed {
  Stream stream;
};
struct SRef {
  std::string name;
};
// Memoized-mode handle: the stream of definition `name` dropped by `index`.
// Produced during evaluation, never written by hand.
struct SRefAt {
  std::string name;
  std::uint64_t index;
};
// Placeholder for the argument's tail inside a whnf-rule template.
struct STailHole {};

struct StreamProg {
  std::variant<SCons, SZipWith, SMap, SMerge, SUserFun, SEmbed, SRef, SRefAt, STailHole> node;
};

StreamProgPtr sp_cons(Value head, StreamProgPtr delayed_tail);
StreamProgPtr sp_zipwith(BinOp op, StreamProgPtr l, StreamProgPtr r);
StreamProgPtr sp_map(UnOp op, StreamProgPtr arg);
StreamProgPtr sp_merge(StreamProgPtr l, StreamProgPtr r);
StreamProgPtr sp_userfun(std::string fn, StreamProgPtr arg);
StreamProgPtr sp_embed(Stream s);
StreamProgPtr sp_ref(std::string name);
StreamProgPtr sp_refat(std::string name, std::uint64_t index);
StreamProgPtr sp_tailhole();

// Weak head normal form: one exposed element; the tail stays a program.
struct StreamWhnf {
  Value head;
  StreamProgPtr tail;
};

// Non-recursive whnf rule for a user function: the result head is
// head_op(argument head) and the result tail is the template with every
// tail-hole replaced by the argument's tail program. Rules cannot invoke
// the normalizer, so they are non-recursive by construction.
struct WhnfRule {
  UnOp head_op;
  StreamProgPtr tail_template;
};

class DefEnv {
 public:
  void add_def(const std::string& name, StreamProgPtr body);
  void add_rule(const std::string& fn, WhnfRule rule);

  const StreamProgPtr* find_def(const std::string& name) const;
  const WhnfRule* find_rule(const std::string& fn) const;
  const std::map<std::string, StreamProgPtr>& defs() const { return defs_; }

 private:
  std::map<std::string, StreamProgPtr> defs_;
  std::map<std::string, WhnfRule> rules_;
};

struct GuardViolation {
  enum class Kind { Undelayed, Unresolved };
  Kind kind;
  std::string def;      // definition being checked
  std::string name;     // the offending reference
  std::string path;     // node trail from the definition root
  std::string message() const;
};

struct GuardReport {
  std::vector<GuardViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Guardedness: every reference, in every definition body and rule template,
// must sit under at least one delayed position; all references must resolve.
GuardReport check_guarded(const DefEnv& env);

StreamWhnf whnf(const StreamProgPtr& p, const DefEnv& env, EvalSession& sess);
StreamWhnf zipwith_whnf(BinOp op, const StreamWhnf& a, const StreamWhnf& b, EvalSession& sess);
StreamWhnf merge_whnf(const StreamWhnf& a, const StreamWhnf& b);

// Corecursive interpretation. Memoized mode shares per-definition unfoldings
// through the session; naive mode shares nothing.
Stream interpret(StreamProgPtr p, std::shared_ptr<const DefEnv> env,
                 std::shared_ptr<EvalSession> sess);

// The embedding of host streams into the program language; interpretation
// is the identity on observations.
StreamProgPtr embed_stream(Stream s);

// Replaces every reference to `name` in `body` (a definition used as the
// right-hand side of an equation) with `replacement`.
StreamProgPtr subst_ref(const StreamProgPtr& body, const std::string& name,
                        const StreamProgPtr& replacement);

std::string to_text(const StreamProgPtr& p);

// Per-definition unfolding chains for memoized mode; heads[i] is element i of
// the named definition, next is the program whose whnf yields heads.size().
struct StreamMemo {
  struct Chain {
    std::vector<Value> heads;
    StreamProgPtr next;
    bool advancing = false;
  };
  std::map<std::string, Chain> chains;
};

}  // namespace corec
