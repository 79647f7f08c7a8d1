#include <random>

#include "corec/chunk_lang.hpp"
#include "corec/stream_lang.hpp"
#include "doctest.h"

using namespace corec;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }
Value B(bool b) { return Value::boolean(b); }

std::vector<Value> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> out;
  for (auto x : xs) out.push_back(I(x));
  return out;
}

UnOp u_suc{UnOp::Kind::Suc, 0};
UnOp u_not{UnOp::Kind::Not, 0};

// fib = 0 :: end delay (1 :: zipWith add (forget fib) (tail fib)) @bool(true)
std::shared_ptr<ChunkDefEnv> fib6_env() {
  auto env = std::make_shared<ChunkDefEnv>();
  ChunkProgPtr body = cp_cons(
      I(0), cp_end(cp_cons(I(1), cp_zip(BinOp::Add, cp_forget(cp_ref("fib")),
                                        cp_tail(cp_ref("fib"))))));
  env->add_def("fib", ChunkSignature::boolean(true), body);
  return env;
}

std::shared_ptr<ChunkDefEnv> nats_envs() {
  auto env = std::make_shared<ChunkDefEnv>();
  env->add_def("nats11", ChunkSignature::fixed(1, 1),
               cp_cons(I(0), cp_end(cp_map(u_suc, cp_ref("nats11")))));
  env->add_def("nats22", ChunkSignature::fixed(2, 2),
               cp_cons(I(0), cp_cons(I(1), cp_end(cp_map(u_suc, cp_ref("nats22"))))));
  return env;
}

std::shared_ptr<ChunkDefEnv> tm_env() {
  auto env = std::make_shared<ChunkDefEnv>();
  ChunkProgPtr body = cp_cons(
      B(false), cp_end(cp_interleave(cp_map(u_not, cp_evens(cp_ref("tm"))),
                                     cp_tail(cp_ref("tm")))));
  env->add_def("tm", ChunkSignature::pattern({1}, {1}), body);
  return env;
}

std::vector<Value> run_prefix(const std::string& name, std::shared_ptr<ChunkDefEnv> env,
                              std::size_t n) {
  const ChunkDef* def = env->find_def(name);
  auto sess = std::make_shared<EvalSession>(EvalMode::Naive);
  return take_prefix(interpret_chunk(cp_ref(name), def->sig, env, sess), n);
}

std::vector<Value> fib_oracle(std::size_t n) {
  std::vector<Value> out;
  std::int64_t a = 0, b = 1;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(I(a));
    std::int64_t t = a + b;
    a = b;
    b = t;
  }
  return out;
}

std::vector<Value> thue_morse_oracle(std::size_t n) {
  std::vector<Value> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(B(__builtin_popcountll(i) % 2 == 1));
  return out;
}

}  // namespace

TEST_CASE("EPSeq normalization and equality") {
  CHECK(EPSeq({1}, {1}) == EPSeq({}, {1}));
  CHECK(EPSeq({}, {2, 1, 2, 1}) == EPSeq({}, {2, 1}));
  CHECK(EPSeq({2, 1}, {2, 1}) == EPSeq({}, {2, 1}));
  CHECK_FALSE(EPSeq({}, {1, 2}) == EPSeq({}, {2, 1}));
  EPSeq s({3, 1}, {2, 5});
  CHECK(s.at(0) == 3);
  CHECK(s.at(1) == 1);
  CHECK(s.at(2) == 2);
  CHECK(s.at(5) == 5);
  CHECK(s.sum_before(0) == 0);
  CHECK(s.sum_before(4) == 3 + 1 + 2 + 5);
  CHECK(s.sum_before(6) == 3 + 1 + 2 + 5 + 2 + 5);
}

TEST_CASE("state dominance compares cumulative claims everywhere") {
  IndexState one{1, EPSeq({}, {1})};
  IndexState two{2, EPSeq({}, {2})};
  CHECK(state_dominates(two, one));
  CHECK_FALSE(state_dominates(one, two));
  CHECK(state_dominates(one, one));
  IndexState early{1, EPSeq({2}, {1})};
  CHECK(state_dominates(early, one));
  CHECK_FALSE(state_dominates(one, early));
  // a higher eventual rate does not excuse falling behind early
  IndexState slow_start{0, EPSeq({}, {3})};
  CHECK_FALSE(state_dominates(slow_start, one));
}

TEST_CASE("evens transfer is the exact ceil-half of cumulatives") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::uint64_t> pre, per;
    std::size_t np = rng() % 3, nq = 1 + rng() % 3;
    for (std::size_t i = 0; i < np; ++i) pre.push_back(rng() % 4);
    for (std::size_t i = 0; i < nq; ++i) per.push_back(rng() % 4);
    if (std::all_of(per.begin(), per.end(), [](auto v) { return v == 0; })) per[0] = 1;
    IndexState s{rng() % 4, EPSeq(pre, per)};
    IndexState e = state_evens(s);
    for (std::size_t k = 0; k < 40; ++k)
      CHECK(e.cumulative(k) == (s.cumulative(k) + 1) / 2);
  }
}

TEST_CASE("interleave transfer matches strict alternation exactly") {
  std::mt19937_64 rng(22);
  auto alternation = [](std::uint64_t l, std::uint64_t r) { return std::min(2 * l, 2 * r + 1); };
  for (int trial = 0; trial < 30; ++trial) {
    auto mk = [&]() {
      std::vector<std::uint64_t> pre, per;
      std::size_t np = rng() % 3, nq = 1 + rng() % 3;
      for (std::size_t i = 0; i < np; ++i) pre.push_back(rng() % 3);
      for (std::size_t i = 0; i < nq; ++i) per.push_back(rng() % 3);
      if (std::all_of(per.begin(), per.end(), [](auto v) { return v == 0; })) per[0] = 1;
      return IndexState{rng() % 3, EPSeq(pre, per)};
    };
    IndexState l = mk(), r = mk();
    IndexState v = state_interleave(l, r);
    for (std::size_t k = 0; k < 60; ++k)
      CHECK(v.cumulative(k) == alternation(l.cumulative(k), r.cumulative(k)));
  }
}

TEST_CASE("signature states") {
  CHECK(ChunkSignature::boolean(true).state() == IndexState{1, EPSeq({}, {1})});
  CHECK(ChunkSignature::boolean(false).state() == IndexState{0, EPSeq({}, {1})});
  CHECK(ChunkSignature::fixed(2, 1).state() == IndexState{1, EPSeq({}, {2})});
  CHECK(ChunkSignature::pattern({1, 3}, {2}).state() == IndexState{1, EPSeq({3}, {2})});
  CHECK_THROWS_AS(ChunkSignature::fixed(0, 1), Error);
  CHECK_THROWS_AS(ChunkSignature::pattern({1, 0}, {1}), Error);
}

TEST_CASE("checker accepts the paper corpus") {
  CHECK(check_chunk_typing(*fib6_env()).ok());
  CHECK(check_chunk_typing(*nats_envs()).ok());
  CHECK(check_chunk_typing(*tm_env()).ok());
}

TEST_CASE("checker rejects nats2 at (2,1)") {
  ChunkDefEnv env;
  env.add_def("nats2", ChunkSignature::fixed(2, 1),
              cp_cons(I(0), cp_end(cp_map(u_suc, cp_ref("nats2")))));
  ChunkReport r = check_chunk_typing(env);
  REQUIRE_FALSE(r.ok());
  CHECK(r.diags[0].kind == ChunkDiag::Kind::IndexMismatch);
}

TEST_CASE("checker rejects the indexed form of bad") {
  ChunkDefEnv env;
  env.add_def("bad", ChunkSignature::boolean(true),
              cp_tail(cp_cons(I(0), cp_end(cp_ref("bad")))));
  ChunkReport r = check_chunk_typing(env);
  REQUIRE_FALSE(r.ok());
  CHECK(r.diags[0].kind == ChunkDiag::Kind::IndexMismatch);
  CHECK(r.diags[0].def == "bad");
}

TEST_CASE("checker requires references behind a chunk boundary") {
  ChunkDefEnv env;
  env.add_def("x", ChunkSignature::fixed(1, 1), cp_cons(I(0), cp_end(cp_ref("x"))));
  env.add_def("y", ChunkSignature::fixed(1, 1), cp_interleave(cp_ref("y"), cp_ref("y")));
  ChunkReport r = check_chunk_typing(env);
  bool found = false;
  for (const auto& d : r.diags)
    found = found || (d.def == "y" && d.kind == ChunkDiag::Kind::UndelayedRef);
  CHECK(found);
  for (const auto& d : r.diags) CHECK(d.def != "x");
}

TEST_CASE("checker rejects zipWith over unequal indices") {
  ChunkDefEnv env;
  env.add_def("z", ChunkSignature::boolean(true),
              cp_cons(I(0), cp_zip(BinOp::Add, cp_cons(I(1), cp_end(cp_ref("z"))),
                                   cp_end(cp_ref("z")))));
  ChunkReport r = check_chunk_typing(env);
  REQUIRE_FALSE(r.ok());
  bool found = false;
  for (const auto& d : r.diags)
    found = found || d.detail.find("zipWith") != std::string::npos;
  CHECK(found);
}

TEST_CASE("checker reports empty chunks") {
  ChunkDefEnv env;
  env.add_def("e", ChunkSignature::fixed(2, 0),
              cp_end(cp_end(cp_cons(I(0), cp_cons(I(1), cp_end(cp_ref("e")))))));
  ChunkReport r = check_chunk_typing(env);
  REQUIRE_FALSE(r.ok());
  CHECK(r.diags[0].kind == ChunkDiag::Kind::EmptyChunk);
}

TEST_CASE("whnf_chunk computes one whole chunk") {
  auto env = fib6_env();
  EvalSession sess;
  ChunkWhnf w = whnf_chunk(cp_ref("fib"), *env, sess);
  CHECK(w.items == ints({0}));

  ChunkWhnf w2 = whnf_chunk(cp_map(u_suc, cp_cons(I(1), cp_cons(I(2), cp_end(cp_ref("fib"))))),
                            *env, sess);
  CHECK(w2.items == ints({2, 3}));

  ChunkProgPtr r = cp_ref("fib");
  ChunkWhnf w3 = whnf_chunk(cp_tail(cp_cons(I(3), cp_cons(I(4), cp_end(r)))), *env, sess);
  CHECK(w3.items == ints({4}));
  CHECK(w3.rest == r);
}

TEST_CASE("tail of an empty chunk is a dynamic error") {
  ChunkDefEnv env;
  env.add_def("q", ChunkSignature::fixed(1, 1), cp_cons(I(0), cp_end(cp_ref("q"))));
  EvalSession sess;
  try {
    whnf_chunk(cp_tail(cp_end(cp_ref("q"))), env, sess);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrKind::EmptyChunkDemand);
  }
}

TEST_CASE("the indexed form of bad fails fast when the checker is bypassed") {
  ChunkDefEnv env;
  env.add_def("bad", ChunkSignature::boolean(true),
              cp_tail(cp_cons(I(0), cp_end(cp_ref("bad")))));
  auto envp = std::make_shared<ChunkDefEnv>(env);
  auto sess = std::make_shared<EvalSession>(EvalMode::Naive, 100000);
  try {
    take_prefix(interpret_chunk(cp_ref("bad"), ChunkSignature::boolean(true), envp, sess), 3);
    CHECK(false);
  } catch (const Error& e) {
    bool dynamic_guard = e.kind == ErrKind::EmptyChunkDemand || e.kind == ErrKind::FuelExhausted;
    CHECK(dynamic_guard);
  }
}

TEST_CASE("interpret_chunk: fib, nats, thue-morse") {
  CHECK(run_prefix("fib", fib6_env(), 8) == fib_oracle(8));
  // nats22 solves x(0)=0, x(1)=1, x(k) = x(k-2)+1
  std::vector<Value> rec{I(0), I(1)};
  while (rec.size() < 12) rec.push_back(I(rec[rec.size() - 2].as_int() + 1));
  CHECK(run_prefix("nats22", nats_envs(), 12) == rec);
  CHECK(run_prefix("nats11", nats_envs(), 6) == ints({0, 1, 2, 3, 4, 5}));
  CHECK(run_prefix("tm", tm_env(), 8) == thue_morse_oracle(8));
  CHECK(run_prefix("tm", tm_env(), 64) == thue_morse_oracle(64));
}

TEST_CASE("interpret_chunk refuses signatures with an empty first chunk") {
  ChunkDefEnv env;
  env.add_def("f", ChunkSignature::boolean(false), cp_end(cp_cons(I(1), cp_end(cp_ref("f")))));
  auto envp = std::make_shared<ChunkDefEnv>(env);
  auto sess = std::make_shared<EvalSession>();
  try {
    interpret_chunk(cp_ref("f"), ChunkSignature::boolean(false), envp, sess);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrKind::NonProductiveTopLevel);
  }
}

TEST_CASE("map2_reference") {
  auto suc = [](Value v) { return I(v.as_int() + 1); };
  CHECK(take_prefix(map2_reference(suc, naturals()), 4) == ints({1, 2, 3, 4}));
  auto ident = [](Value v) { return v; };
  CHECK(bisimilar_to_depth(map2_reference(ident, naturals()), naturals(), 20));
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::uint64_t seed = rng();
    Stream s = stream_from_fn(
        [seed](std::uint64_t i) { return I(static_cast<std::int64_t>((seed + 7 * i) % 93)); });
    CHECK(bisimilar_to_depth(map_stream(suc, s), map2_reference(suc, s), 50));
  }
}

TEST_CASE("forget is semantically the identity") {
  auto env = fib6_env();
  ChunkProgPtr noforget = cp_cons(
      I(0), cp_end(cp_cons(I(1), cp_zip(BinOp::Add, cp_ref("fib"), cp_tail(cp_ref("fib"))))));
  auto sess1 = std::make_shared<EvalSession>();
  auto sess2 = std::make_shared<EvalSession>();
  Stream a = interpret_chunk(cp_ref("fib"), ChunkSignature::boolean(true), env, sess1);
  Stream b = interpret_chunk(noforget, ChunkSignature::boolean(true), env, sess2);
  CHECK(bisimilar_to_depth(a, b, 90));
}

TEST_CASE("index erasure agrees with the plain stream language") {
  auto cenv = nats_envs();
  auto senv = std::make_shared<DefEnv>();
  for (const auto& [name, def] : cenv->defs()) {
    auto erased = erase_to_stream_lang(def.body);
    REQUIRE(erased.has_value());
    senv->add_def(name, *erased);
  }
  CHECK(check_guarded(*senv).ok());
  for (const auto& [name, def] : cenv->defs()) {
    auto sess1 = std::make_shared<EvalSession>();
    auto sess2 = std::make_shared<EvalSession>(EvalMode::Memoized);
    Stream chunked = interpret_chunk(cp_ref(name), def.sig, cenv, sess1);
    Stream plain = interpret(sp_ref(name), senv, sess2);
    CHECK(bisimilar_to_depth(chunked, plain, 100));
  }
  CHECK_FALSE(erase_to_stream_lang(cp_tail(cp_ref("x"))).has_value());
}

TEST_CASE("schedule arithmetic: claims never exceed actual production") {
  auto env = tm_env();
  auto trace = std::make_shared<std::vector<std::uint64_t>>();
  auto sess = std::make_shared<EvalSession>();
  Stream s = interpret_chunk(cp_ref("tm"), env->find_def("tm")->sig, env, sess, trace);
  take_prefix(s, 150);
  IndexState declared = env->find_def("tm")->sig.state();
  REQUIRE(trace->size() > 50);
  for (std::size_t k = 0; k <= 50; ++k)
    CHECK(declared.cumulative(k) <= (*trace)[k]);
}

namespace {

ChunkProgPtr gen_body(std::mt19937_64& rng, int depth, const std::string& self) {
  if (depth <= 0) {
    int k = 1 + static_cast<int>(rng() % 2);
    ChunkProgPtr p = cp_end(cp_ref(self));
    for (int i = 0; i < k; ++i)
      p = cp_cons(I(static_cast<std::int64_t>(rng() % 5)), p);
    return p;
  }
  switch (rng() % 8) {
    case 0:
      return cp_cons(I(static_cast<std::int64_t>(rng() % 5)), gen_body(rng, depth - 1, self));
    case 1:
      return cp_end(gen_body(rng, depth - 1, self));
    case 2:
      return cp_map(u_suc, gen_body(rng, depth - 1, self));
    case 3: {
      // shared operand keeps the indices equal by construction
      ChunkProgPtr t = gen_body(rng, depth - 1, self);
      return cp_zip(rng() % 2 ? BinOp::Max : BinOp::Min, t, t);
    }
    case 4:
      return cp_tail(cp_cons(I(static_cast<std::int64_t>(rng() % 5)),
                             gen_body(rng, depth - 1, self)));
    case 5:
      return cp_forget(cp_cons(I(static_cast<std::int64_t>(rng() % 5)),
                               gen_body(rng, depth - 1, self)));
    case 6:
      return cp_evens(gen_body(rng, depth - 1, self));
    default:
      return cp_interleave(gen_body(rng, depth - 1, self), gen_body(rng, depth - 1, self));
  }
}

std::vector<ChunkSignature> signature_menu() {
  return {ChunkSignature::boolean(true),     ChunkSignature::fixed(1, 1),
          ChunkSignature::fixed(2, 2),       ChunkSignature::fixed(2, 1),
          ChunkSignature::fixed(3, 2),       ChunkSignature::pattern({1}, {1}),
          ChunkSignature::pattern({2}, {1}), ChunkSignature::pattern({1}, {2, 1}),
          ChunkSignature::pattern({1, 2}, {2})};
}

}  // namespace

TEST_CASE("checker soundness at desk scale on random accepted programs") {
  std::mt19937_64 rng(2024);
  auto menu = signature_menu();
  int accepted = 0, attempts = 0;
  while (accepted < 200 && attempts < 8000) {
    ++attempts;
    ChunkProgPtr body = gen_body(rng, 1 + static_cast<int>(rng() % 3), "self");
    for (const ChunkSignature& sig : menu) {
      ChunkDefEnv env;
      env.add_def("self", sig, body);
      if (!check_chunk_typing(env).ok()) continue;
      ++accepted;
      auto envp = std::make_shared<ChunkDefEnv>(std::move(env));
      auto sess = std::make_shared<EvalSession>();
      auto trace = std::make_shared<std::vector<std::uint64_t>>();
      Stream s = interpret_chunk(cp_ref("self"), sig, envp, sess, trace);
      std::vector<Value> prefix = take_prefix(s, 200);
      CHECK(prefix.size() == 200);
      IndexState declared = sig.state();
      for (std::size_t k = 0; k + 1 < trace->size() && k <= 50; ++k)
        CHECK(declared.cumulative(k) <= (*trace)[k]);
      break;
    }
  }
  CHECK(accepted == 200);
}
