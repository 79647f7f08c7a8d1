#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corec/chunk_lang.hpp"
#include "corec/codata.hpp"
#include "corec/session.hpp"
#include "corec/stream_lang.hpp"

namespace corec {

// A stream designator: a named corecursive definition (stream or chunk
// language) or a host stream, dropped by `drops` elements. Advancing a
// designator is lazy — nothing is forced until the head is demanded.
// Identity is designator identity — same base and drop count, or the same
// host cell — not semantic equality.
struct Desig {
  std::optional<std::string> name;
  Stream stream;
  std::uint64_t drops = 0;

  static Desig named(std::string n) {
    Desig d;
    d.name = std::move(n);
    return d;
  }
  static Desig host(Stream s) {
    Desig d;
    d.stream = std::move(s);
    return d;
  }
  std::string show() const {
    std::string base = name ? *name : "<stream>";
    return drops ? base + "+" + std::to_string(drops) : base;
  }
};

// Resolution context: interprets named definitions once (memoized, cached
// cells) so designator tails are pointer-stable.
class ProofCtx {
 public:
  ProofCtx(std::shared_ptr<const DefEnv> streams, std::shared_ptr<const ChunkDefEnv> chunks);

  bool has(const std::string& name) const;
  Stream resolve(const Desig& d);
  // Designator of the tail. A named definition whose body is a cons of a
  // bare reference stays name-based (repeat x unfolds to repeat x).
  Desig advance(const Desig& d);
  bool desig_same(const Desig& a, const Desig& b);

  EvalSession& session() { return *sess_; }
  const DefEnv* stream_env() const { return streams_.get(); }
  std::shared_ptr<const DefEnv> stream_env_ptr() const { return streams_; }

 private:
  std::shared_ptr<const DefEnv> streams_;
  std::shared_ptr<const ChunkDefEnv> chunks_;
  std::shared_ptr<EvalSession> sess_;
  std::map<std::string, Stream> cache_;
};

struct EqProof;
using EqProofPtr = std::shared_ptr<const EqProof>;
using LazyProof = Lazy<EqProofPtr>;

struct QCons {
  Value x;
  LazyProof rest;
};
struct QTrans {
  Desig mid;
  EqProofPtr left, right;
};
struct QRefl {
  Desig s;
};
struct QZipCong {
  BinOp op;
  EqProofPtr a, b;
};
struct QUfunCong {
  std::string fn;
  EqProofPtr p;
};
// Lazy completeness embedding: element-by-element comparison of two
// designators, so no a-priori bound is needed.
struct QComplete {
  Desig a, b;
};

struct EqProof {
  std::variant<QCons, QTrans, QRefl, QZipCong, QUfunCong, QComplete> node;
};

EqProofPtr eq_cons(Value x, LazyProof rest);
EqProofPtr eq_trans(Desig mid, EqProofPtr left, EqProofPtr right);
EqProofPtr eq_refl(Desig s);
EqProofPtr eq_zip_cong(BinOp op, EqProofPtr a, EqProofPtr b);
EqProofPtr eq_ufun_cong(std::string fn, EqProofPtr p);
EqProofPtr eq_complete(Desig a, Desig b);

struct EqWhnf {
  Value x;
  EqProofPtr rest;
};

// One proof step. Transitivity chains require equal heads (HeadMismatch
// otherwise); reflexivity and completeness evaluate their designators.
// Results are shared per session by proof node, which keeps circular proofs
// (whose residuals mention the root) linear in the checked depth.
EqWhnf proof_whnf(const EqProofPtr& p, ProofCtx& cx);

struct ProofMemo {
  std::map<EqProofPtr, EqWhnf, std::owner_less<EqProofPtr>> cache;
};

struct ProofOutcome {
  bool ok = false;
  long long index = -1;  // first failing position when !ok
  std::string message;

  static ProofOutcome pass() { return {true, -1, "ok"}; }
};

// ok iff `depth` iterated whnf steps produce heads matching both designated
// streams at every position.
ProofOutcome proof_check(const EqProofPtr& p, const Desig& s1, const Desig& s2,
                         std::uint64_t depth, ProofCtx& cx);

// The iterate fusion proof: map h (iterate f1 x) = iterate f2 (h x), given
// the commuting hypothesis h(f1 v) = f2(h v). The hypothesis is validated at
// every unfolded element; a violation raises HypothesisViolated with the
// probed value.
EqProofPtr build_fusion_proof(UnOp h, UnOp f1, UnOp f2, Value x);

// Uniqueness of guarded equations: `rhs_def` names a stream definition whose
// self-references mark the equation's unknown. Both candidates are checked
// to be solutions (NotASolution outcome otherwise); then the congruence
// proof shaped after the definition body is checked to `depth`.
ProofOutcome verify_unique(const std::string& rhs_def, const Desig& ms, const Desig& ns,
                           std::uint64_t depth, ProofCtx& cx);

// Hypothesis-list proofs with a circular soundness unfolding.
struct HypProof;
using HypProofPtr = std::shared_ptr<const HypProof>;

struct HCons {
  Value x;
  HypProofPtr sub;
};
struct HHyp {
  std::size_t i;
};
struct HTrans {
  Desig mid;
  HypProofPtr left, right;
};

struct HypProof {
  std::variant<HCons, HHyp, HTrans> node;
};

HypProofPtr hp_cons(Value x, HypProofPtr sub);
HypProofPtr hp_hyp(std::size_t i);
HypProofPtr hp_trans(Desig mid, HypProofPtr left, HypProofPtr right);

using HypContext = std::vector<std::pair<Desig, Desig>>;

// Structural validity: cons steps need equal observed heads and extend the
// context with the goal pair; hyp(i) needs H[i] to designate the goal pair.
ProofOutcome hyp_check(const HypContext& H, const HypProofPtr& p, const Desig& s1,
                       const Desig& s2, ProofCtx& cx);

// Transcribes the hypothesis proof into an equality proof — the cons clause
// appends the proof being built to the validation list — then checks it.
ProofOutcome hyp_sound(const std::vector<LazyProof>& validations, const HypProofPtr& p,
                       const Desig& s1, const Desig& s2, std::uint64_t depth, ProofCtx& cx);

}  // namespace corec
