#include "corec/proof_lang.hpp"

namespace corec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

EqProofPtr mkq(decltype(EqProof::node) node) {
  return std::make_shared<const EqProof>(EqProof{std::move(node)});
}

std::function<Value(Value)> un_fn(UnOp op) {
  return [op](Value v) { return apply_un(op, v); };
}

}  // namespace

ProofCtx::ProofCtx(std::shared_ptr<const DefEnv> streams, std::shared_ptr<const ChunkDefEnv> chunks)
    : streams_(std::move(streams)),
      chunks_(std::move(chunks)),
      sess_(std::make_shared<EvalSession>(EvalMode::Memoized)) {
  if (!streams_) streams_ = std::make_shared<DefEnv>();
  if (!chunks_) chunks_ = std::make_shared<ChunkDefEnv>();
}

bool ProofCtx::has(const std::string& name) const {
  return streams_->find_def(name) != nullptr || chunks_->find_def(name) != nullptr;
}

Stream ProofCtx::resolve(const Desig& d) {
  Stream s;
  if (!d.name) {
    if (!d.stream.valid()) fail(ErrKind::Internal, "empty designator");
    s = d.stream;
  } else if (auto it = cache_.find(*d.name); it != cache_.end()) {
    s = it->second;
  } else {
    if (streams_->find_def(*d.name)) {
      s = interpret(sp_ref(*d.name), streams_, sess_);
    } else if (const ChunkDef* def = chunks_->find_def(*d.name)) {
      s = interpret_chunk(cp_ref(*d.name), def->sig, chunks_, sess_);
    } else {
      fail(ErrKind::UnresolvedRef, "unknown stream '" + *d.name + "'");
    }
    cache_.emplace(*d.name, s);
  }
  for (std::uint64_t i = 0; i < d.drops; ++i) s = s.tail();
  return s;
}

Desig ProofCtx::advance(const Desig& d) {
  if (d.name && d.drops == 0) {
    // A definition that unfolds to a cons of a bare reference has that
    // reference as its tail, designator for designator.
    if (const StreamProgPtr* body = streams_->find_def(*d.name)) {
      if (const SCons* c = std::get_if<SCons>(&(*body)->node))
        if (const SRef* r = std::get_if<SRef>(&c->tail.prog->node))
          if (streams_->find_def(r->name)) return Desig::named(r->name);
    }
  }
  Desig next = d;
  ++next.drops;
  return next;
}

bool ProofCtx::desig_same(const Desig& a, const Desig& b) {
  if (a.name && b.name && *a.name == *b.name && a.drops == b.drops) return true;
  if (!a.name && !b.name && a.stream.same_cell(b.stream) && a.drops == b.drops) return true;
  return resolve(a).same_cell(resolve(b));
}

EqProofPtr eq_cons(Value x, LazyProof rest) { return mkq(QCons{x, std::move(rest)}); }
EqProofPtr eq_trans(Desig mid, EqProofPtr left, EqProofPtr right) {
  return mkq(QTrans{std::move(mid), std::move(left), std::move(right)});
}
EqProofPtr eq_refl(Desig s) { return mkq(QRefl{std::move(s)}); }
EqProofPtr eq_zip_cong(BinOp op, EqProofPtr a, EqProofPtr b) {
  return mkq(QZipCong{op, std::move(a), std::move(b)});
}
EqProofPtr eq_ufun_cong(std::string fn, EqProofPtr p) {
  return mkq(QUfunCong{std::move(fn), std::move(p)});
}
EqProofPtr eq_complete(Desig a, Desig b) { return mkq(QComplete{std::move(a), std::move(b)}); }

namespace {

// Maps a whnf-rule tail template onto congruence proofs: the hole becomes
// the argument proof, function nodes become their own congruences.
EqProofPtr cong_template(const StreamProgPtr& tpl, const EqProofPtr& hole) {
  return std::visit(
      overloaded{
          [&](const STailHole&) -> EqProofPtr { return hole; },
          [&](const SUserFun& n) -> EqProofPtr {
            return eq_ufun_cong(n.fn, cong_template(n.arg, hole));
          },
          [&](const SCons& n) -> EqProofPtr {
            return eq_cons(n.head, LazyProof::ready(cong_template(n.tail.prog, hole)));
          },
          [&](const SZipWith& n) -> EqProofPtr {
            return eq_zip_cong(n.op, cong_template(n.left, hole),
                               cong_template(n.right, hole));
          },
          [&](const auto&) -> EqProofPtr {
            fail(ErrKind::TypeError, "no congruence rule for this template node");
          },
      },
      tpl->node);
}

}  // namespace

EqWhnf proof_whnf(const EqProofPtr& p, ProofCtx& cx) {
  cx.session().tick();
  EvalSession::DepthGuard guard(cx.session());
  if (!cx.session().proof_memo) cx.session().proof_memo = std::make_shared<ProofMemo>();
  auto& cache = cx.session().proof_memo->cache;
  if (auto hit = cache.find(p); hit != cache.end()) return hit->second;
  EqWhnf result = std::visit(
      overloaded{
          [&](const QCons& n) -> EqWhnf { return {n.x, n.rest.force()}; },
          [&](const QRefl& n) -> EqWhnf {
            Stream s = cx.resolve(n.s);
            return {s.head(), eq_refl(cx.advance(n.s))};
          },
          [&](const QTrans& n) -> EqWhnf {
            cx.session().count_trans();
            EqWhnf wl = proof_whnf(n.left, cx);
            EqWhnf wr = proof_whnf(n.right, cx);
            if (wl.x != wr.x)
              fail(ErrKind::HeadMismatch, "transitivity joins proofs of " + to_string(wl.x) +
                                              " and " + to_string(wr.x));
            Value mid_head = cx.resolve(n.mid).head();
            if (mid_head != wl.x)
              fail(ErrKind::HeadMismatch, "middle stream has head " + to_string(mid_head) +
                                              ", proof claims " + to_string(wl.x));
            return {wl.x, eq_trans(cx.advance(n.mid), wl.rest, wr.rest)};
          },
          [&](const QZipCong& n) -> EqWhnf {
            EqWhnf wa = proof_whnf(n.a, cx);
            EqWhnf wb = proof_whnf(n.b, cx);
            return {cx.session().bin(n.op, wa.x, wb.x), eq_zip_cong(n.op, wa.rest, wb.rest)};
          },
          [&](const QUfunCong& n) -> EqWhnf {
            const WhnfRule* rule = cx.stream_env()->find_rule(n.fn);
            if (!rule)
              fail(ErrKind::UnresolvedRef, "unregistered function '" + n.fn + "'");
            EqWhnf w = proof_whnf(n.p, cx);
            return {cx.session().un(rule->head_op, w.x),
                    cong_template(rule->tail_template, w.rest)};
          },
          [&](const QComplete& n) -> EqWhnf {
            Stream a = cx.resolve(n.a), b = cx.resolve(n.b);
            if (a.head() != b.head())
              fail(ErrKind::HeadMismatch, "streams differ: " + to_string(a.head()) + " vs " +
                                              to_string(b.head()));
            return {a.head(), eq_complete(cx.advance(n.a), cx.advance(n.b))};
          },
      },
      p->node);
  cache.emplace(p, result);
  return result;
}

ProofOutcome proof_check(const EqProofPtr& p, const Desig& s1, const Desig& s2,
                         std::uint64_t depth, ProofCtx& cx) {
  Desig a = s1, b = s2;
  EqProofPtr cur = p;
  std::uint64_t i = 0;
  try {
    for (; i < depth; ++i) {
      cx.session().begin_element();
      EqWhnf w = proof_whnf(cur, cx);
      Value ha = cx.resolve(a).head();
      Value hb = cx.resolve(b).head();
      if (w.x != ha || w.x != hb)
        return {false, static_cast<long long>(i),
                "proof claims " + to_string(w.x) + " but streams have " + to_string(ha) +
                    " and " + to_string(hb)};
      if (i + 1 == depth) break;
      a = cx.advance(a);
      b = cx.advance(b);
      cur = w.rest;
    }
  } catch (const Error& e) {
    long long at = e.index >= 0 ? e.index : static_cast<long long>(i);
    return {false, at, std::string(err_kind_name(e.kind)) + ": " + e.what()};
  }
  return ProofOutcome::pass();
}

namespace {

// Proves iterate f2 a = iterate f2 b elementwise; the head equality is the
// commuting hypothesis instance probed at `probe`.
EqProofPtr iterate_cong(UnOp f2, Value a, Value b, Value probe) {
  if (a != b)
    fail(ErrKind::HypothesisViolated,
         "h(f1 v) = " + to_string(a) + " but f2(h v) = " + to_string(b) + " at v = " +
             to_string(probe),
         probe.num);
  return eq_cons(a, LazyProof([f2, a, b, probe] {
                   return iterate_cong(f2, apply_un(f2, a), apply_un(f2, b), probe);
                 }));
}

EqProofPtr fusion_at(UnOp h, UnOp f1, UnOp f2, Value v) {
  Value hv = apply_un(h, v);
  Value f1v = apply_un(f1, v);
  Value hf1 = apply_un(h, f1v);
  Value f2h = apply_un(f2, hv);
  if (hf1 != f2h)
    fail(ErrKind::HypothesisViolated,
         "h(f1 v) = " + to_string(hf1) + " but f2(h v) = " + to_string(f2h) + " at v = " +
             to_string(v),
         v.num);
  return eq_cons(hv, LazyProof([h, f1, f2, v, f1v, hf1, f2h] {
    Stream mid1 = iterate_stream(un_fn(f2), hf1);
    Stream mid2 = iterate_stream(un_fn(f2), f2h);
    // Definitional steps on both ends collapse to reflexivity after one
    // evaluation step; the corecursive call and the congruence carry the
    // content.
    return eq_trans(Desig::host(mid1), fusion_at(h, f1, f2, f1v),
                    eq_trans(Desig::host(mid2), iterate_cong(f2, hf1, f2h, v),
                             eq_refl(Desig::host(mid2))));
  }));
}

}  // namespace

EqProofPtr build_fusion_proof(UnOp h, UnOp f1, UnOp f2, Value x) {
  return fusion_at(h, f1, f2, x);
}

namespace {

// Congruence proof shaped after a definition body; self-references become
// the proof under construction.
EqProofPtr cong_of_body(const StreamProgPtr& body, const std::string& self_name,
                        const LazyProof& self) {
  return std::visit(
      overloaded{
          [&](const SCons& n) -> EqProofPtr {
            StreamProgPtr rest = n.tail.prog;
            std::string name = self_name;
            LazyProof s = self;
            return eq_cons(n.head,
                           LazyProof([rest, name, s] { return cong_of_body(rest, name, s); }));
          },
          [&](const SZipWith& n) -> EqProofPtr {
            return eq_zip_cong(n.op, cong_of_body(n.left, self_name, self),
                               cong_of_body(n.right, self_name, self));
          },
          [&](const SUserFun& n) -> EqProofPtr {
            return eq_ufun_cong(n.fn, cong_of_body(n.arg, self_name, self));
          },
          [&](const SRef& n) -> EqProofPtr {
            if (n.name == self_name) return self.force();
            return eq_refl(Desig::named(n.name));
          },
          [&](const SEmbed& n) -> EqProofPtr { return eq_refl(Desig::host(n.stream)); },
          [&](const auto&) -> EqProofPtr {
            fail(ErrKind::TypeError,
                 "equation body uses a combinator without a congruence rule");
          },
      },
      body->node);
}

}  // namespace

ProofOutcome verify_unique(const std::string& rhs_def, const Desig& ms, const Desig& ns,
                           std::uint64_t depth, ProofCtx& cx) {
  const StreamProgPtr* body = cx.stream_env()->find_def(rhs_def);
  if (!body) fail(ErrKind::UnresolvedRef, "unknown equation '" + rhs_def + "'");

  auto rhs_of = [&](const Stream& s) {
    StreamProgPtr prog = subst_ref(*body, rhs_def, embed_stream(s));
    auto sess = std::make_shared<EvalSession>(EvalMode::Memoized);
    return interpret(prog, cx.stream_env_ptr(), sess);
  };

  Stream sm = cx.resolve(ms), sn = cx.resolve(ns);
  Stream rm = rhs_of(sm), rn = rhs_of(sn);

  ProofOutcome sol = proof_check(eq_complete(ms, Desig::host(rm)), ms, Desig::host(rm), depth, cx);
  if (!sol.ok)
    return {false, sol.index,
            "NotASolution: " + ms.show() + " does not satisfy " + rhs_def + " at index " +
                std::to_string(sol.index)};
  sol = proof_check(eq_complete(ns, Desig::host(rn)), ns, Desig::host(rn), depth, cx);
  if (!sol.ok)
    return {false, sol.index,
            "NotASolution: " + ns.show() + " does not satisfy " + rhs_def + " at index " +
                std::to_string(sol.index)};

  // ms = rhs(ms) = rhs(ns) = ns, with the middle step by congruence whose
  // recursive positions are this very proof.
  auto hole = std::make_shared<std::weak_ptr<const EqProof>>();
  LazyProof self([hole]() -> EqProofPtr {
    EqProofPtr p = hole->lock();
    if (!p) fail(ErrKind::Internal, "congruence proof outlived its root");
    return p;
  });
  EqProofPtr cong = cong_of_body(*body, rhs_def, self);
  EqProofPtr proof = eq_trans(Desig::host(rm), eq_complete(ms, Desig::host(rm)),
                              eq_trans(Desig::host(rn), cong,
                                       eq_complete(Desig::host(rn), ns)));
  *hole = proof;
  return proof_check(proof, ms, ns, depth, cx);
}

HypProofPtr hp_cons(Value x, HypProofPtr sub) {
  return std::make_shared<const HypProof>(HypProof{HCons{x, std::move(sub)}});
}
HypProofPtr hp_hyp(std::size_t i) {
  return std::make_shared<const HypProof>(HypProof{HHyp{i}});
}
HypProofPtr hp_trans(Desig mid, HypProofPtr left, HypProofPtr right) {
  return std::make_shared<const HypProof>(HypProof{HTrans{std::move(mid), std::move(left),
                                                          std::move(right)}});
}

namespace {

ProofOutcome hyp_check_at(const HypContext& H, const HypProofPtr& p, const Desig& s1,
                          const Desig& s2, std::size_t depth_index, ProofCtx& cx) {
  return std::visit(
      overloaded{
          [&](const HCons& n) -> ProofOutcome {
            Value ha = cx.resolve(s1).head();
            Value hb = cx.resolve(s2).head();
            if (ha != n.x || hb != n.x)
              return {false, static_cast<long long>(depth_index),
                      "HeadMismatch: proof claims " + to_string(n.x) + " but streams have " +
                          to_string(ha) + " and " + to_string(hb)};
            HypContext H2;
            H2.reserve(H.size() + 1);
            H2.emplace_back(s1, s2);
            H2.insert(H2.end(), H.begin(), H.end());
            return hyp_check_at(H2, n.sub, cx.advance(s1), cx.advance(s2), depth_index + 1, cx);
          },
          [&](const HHyp& n) -> ProofOutcome {
            if (n.i >= H.size())
              return {false, static_cast<long long>(depth_index),
                      "BadIndex: hypothesis " + std::to_string(n.i) + " of " +
                          std::to_string(H.size())};
            if (!cx.desig_same(H[n.i].first, s1) || !cx.desig_same(H[n.i].second, s2))
              return {false, static_cast<long long>(depth_index),
                      "BadIndex: hypothesis " + std::to_string(n.i) +
                          " designates different streams"};
            return ProofOutcome::pass();
          },
          [&](const HTrans& n) -> ProofOutcome {
            try {
              cx.resolve(n.mid);
            } catch (const Error& e) {
              return {false, static_cast<long long>(depth_index),
                      std::string("MiddleMismatch: ") + e.what()};
            }
            ProofOutcome l = hyp_check_at(H, n.left, s1, n.mid, depth_index, cx);
            if (!l.ok) return l;
            return hyp_check_at(H, n.right, n.mid, s2, depth_index, cx);
          },
      },
      p->node);
}

EqProofPtr transcribe(const std::vector<LazyProof>& valid, const HypProofPtr& p, const Desig& s1,
                      const Desig& s2, ProofCtx& cx) {
  return std::visit(
      overloaded{
          [&](const HHyp& n) -> EqProofPtr {
            if (n.i >= valid.size())
              fail(ErrKind::BadIndex, "hypothesis " + std::to_string(n.i) + " of " +
                                          std::to_string(valid.size()));
            return valid[n.i].force();
          },
          [&](const HTrans& n) -> EqProofPtr {
            return eq_trans(n.mid, transcribe(valid, n.left, s1, n.mid, cx),
                            transcribe(valid, n.right, n.mid, s2, cx));
          },
          [&](const HCons& n) -> EqProofPtr {
            // The circular step: the proof being built joins the validation
            // list seen by its own subproof.
            auto hole = std::make_shared<std::weak_ptr<const EqProof>>();
            LazyProof self([hole]() -> EqProofPtr {
              EqProofPtr q = hole->lock();
              if (!q) fail(ErrKind::Internal, "circular proof outlived its root");
              return q;
            });
            std::vector<LazyProof> valid2;
            valid2.reserve(valid.size() + 1);
            valid2.push_back(self);
            valid2.insert(valid2.end(), valid.begin(), valid.end());
            HypProofPtr sub = n.sub;
            Desig a = s1, b = s2;
            // cx outlives the transcribed proof: forcing happens only inside
            // hyp_sound's subsequent check.
            ProofCtx* cxp = &cx;
            EqProofPtr proof =
                eq_cons(n.x, LazyProof([valid2, sub, a, b, cxp] {
                          return transcribe(valid2, sub, cxp->advance(a), cxp->advance(b), *cxp);
                        }));
            *hole = proof;
            return proof;
          },
      },
      p->node);
}

}  // namespace

ProofOutcome hyp_check(const HypContext& H, const HypProofPtr& p, const Desig& s1,
                       const Desig& s2, ProofCtx& cx) {
  try {
    return hyp_check_at(H, p, s1, s2, 0, cx);
  } catch (const Error& e) {
    return {false, e.index, std::string(err_kind_name(e.kind)) + ": " + e.what()};
  }
}

ProofOutcome hyp_sound(const std::vector<LazyProof>& validations, const HypProofPtr& p,
                       const Desig& s1, const Desig& s2, std::uint64_t depth, ProofCtx& cx) {
  try {
    EqProofPtr proof = transcribe(validations, p, s1, s2, cx);
    return proof_check(proof, s1, s2, depth, cx);
  } catch (const Error& e) {
    return {false, e.index, std::string(err_kind_name(e.kind)) + ": " + e.what()};
  }
}

}  // namespace corec
