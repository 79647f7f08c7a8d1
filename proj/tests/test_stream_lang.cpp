#include <algorithm>
#include <random>
#include <set>

#include "corec/stream_lang.hpp"
#include "doctest.h"

using namespace corec;

namespace {

Value I(std::int64_t v) { return Value::integer(v); }

std::vector<Value> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> out;
  for (auto x : xs) out.push_back(I(x));
  return out;
}

UnOp u_suc{UnOp::Kind::Suc, 0};
UnOp u_id{UnOp::Kind::Id, 0};
UnOp u_mul(std::int64_t k) { return UnOp{UnOp::Kind::MulConst, k}; }

std::shared_ptr<DefEnv> fib_env() {
  auto env = std::make_shared<DefEnv>();
  env->add_def("fib", sp_cons(I(0), sp_zipwith(BinOp::Add, sp_ref("fib"),
                                               sp_cons(I(1), sp_ref("fib")))));
  return env;
}

std::shared_ptr<DefEnv> nats_env() {
  auto env = std::make_shared<DefEnv>();
  env->add_def("nats", sp_cons(I(0), sp_map(u_suc, sp_ref("nats"))));
  return env;
}

std::shared_ptr<DefEnv> hamming_env() {
  auto env = std::make_shared<DefEnv>();
  env->add_def("hamming",
               sp_cons(I(1), sp_merge(sp_map(u_mul(2), sp_ref("hamming")),
                                      sp_merge(sp_map(u_mul(3), sp_ref("hamming")),
                                               sp_map(u_mul(5), sp_ref("hamming"))))));
  return env;
}

// phi (x :: xs) = x :: phi (phi xs)
std::shared_ptr<DefEnv> phi_env() {
  auto env = std::make_shared<DefEnv>();
  env->add_rule("phi", WhnfRule{u_id, sp_userfun("phi", sp_userfun("phi", sp_tailhole()))});
  env->add_def("phiex", sp_cons(I(0), sp_userfun("phi", sp_ref("phiex"))));
  return env;
}

std::vector<Value> run_prefix(StreamProgPtr p, std::shared_ptr<const DefEnv> env, std::size_t n,
                              EvalMode mode = EvalMode::Naive) {
  auto sess = std::make_shared<EvalSession>(mode);
  return take_prefix(interpret(std::move(p), std::move(env), sess), n);
}

std::vector<Value> fib_oracle(std::size_t n) {
  std::vector<Value> out;
  std::int64_t a = 0, b = 1;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(I(a));
    std::int64_t next = a + b;
    a = b;
    b = next;
  }
  return out;
}

std::vector<Value> hamming_oracle(std::size_t n) {
  std::set<std::int64_t> seen;
  for (std::int64_t a = 1; a < (1LL << 40); a *= 2)
    for (std::int64_t b = a; b < (1LL << 40); b *= 3)
      for (std::int64_t c = b; c < (1LL << 40); c *= 5) seen.insert(c);
  std::vector<Value> out;
  for (auto it = seen.begin(); out.size() < n && it != seen.end(); ++it) out.push_back(I(*it));
  return out;
}

// Fixpoint iteration for phi(s) = s0 :: phi(phi(tail s)) over finite prefixes.
std::vector<Value> phi_oracle_iter(int k, const std::vector<Value>& s) {
  if (k == 0 || s.empty()) return {};
  std::vector<Value> tail(s.begin() + 1, s.end());
  std::vector<Value> inner = phi_oracle_iter(k - 1, tail);
  std::vector<Value> outer = phi_oracle_iter(k - 1, inner);
  std::vector<Value> out{s[0]};
  out.insert(out.end(), outer.begin(), outer.end());
  return out;
}

}  // namespace

TEST_CASE("check_guarded accepts the guarded corpus") {
  CHECK(check_guarded(*fib_env()).ok());
  CHECK(check_guarded(*nats_env()).ok());
  CHECK(check_guarded(*hamming_env()).ok());
  CHECK(check_guarded(*phi_env()).ok());
}

TEST_CASE("check_guarded rejects undelayed self-reference with a path") {
  DefEnv env;
  env.add_def("x", sp_ref("x"));
  GuardReport r = check_guarded(env);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == GuardViolation::Kind::Undelayed);
  CHECK(r.violations[0].def == "x");
  CHECK(r.violations[0].path == "x");
}

TEST_CASE("check_guarded flags undelayed references through operators") {
  DefEnv env;
  env.add_def("y", sp_zipwith(BinOp::Add, sp_ref("y"), sp_cons(I(1), sp_ref("y"))));
  GuardReport r = check_guarded(env);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].path == "y.zipWith.left");
}

TEST_CASE("check_guarded reports unresolved references") {
  DefEnv env;
  env.add_def("a", sp_cons(I(0), sp_ref("missing")));
  GuardReport r = check_guarded(env);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == GuardViolation::Kind::Unresolved);
  CHECK(r.violations[0].name == "missing");
}

TEST_CASE("check_guarded accepts mutual delayed references") {
  DefEnv env;
  env.add_def("a", sp_cons(I(0), sp_ref("b")));
  env.add_def("b", sp_cons(I(1), sp_ref("a")));
  CHECK(check_guarded(env).ok());
}

TEST_CASE("whnf exposes one constructor") {
  DefEnv env;
  EvalSession sess;
  StreamProgPtr p = sp_map(u_suc, sp_ref("q"));
  StreamWhnf w = whnf(sp_cons(I(5), p), env, sess);
  CHECK(w.head == I(5));
  CHECK(w.tail == p);
}

TEST_CASE("whnf of zipWith combines sub-whnfs") {
  DefEnv env;
  EvalSession sess;
  StreamProgPtr a = sp_embed(naturals());
  StreamProgPtr b = sp_embed(naturals());
  StreamWhnf w =
      whnf(sp_zipwith(BinOp::Add, sp_cons(I(1), a), sp_cons(I(2), b)), env, sess);
  CHECK(w.head == I(3));
  const SZipWith* z = std::get_if<SZipWith>(&w.tail->node);
  REQUIRE(z != nullptr);
  CHECK(z->left == a);
  CHECK(z->right == b);
}

TEST_CASE("whnf unfolds a reference one step") {
  auto env = fib_env();
  EvalSession sess;
  StreamWhnf w = whnf(sp_ref("fib"), *env, sess);
  CHECK(w.head == I(0));
  const SZipWith* z = std::get_if<SZipWith>(&w.tail->node);
  REQUIRE(z != nullptr);
  CHECK(std::get_if<SRef>(&z->left->node) != nullptr);
}

TEST_CASE("zipwith_whnf") {
  EvalSession sess;
  StreamProgPtr p = sp_ref("p"), q = sp_ref("q");
  StreamWhnf w = zipwith_whnf(BinOp::Add, {I(2), p}, {I(3), q}, sess);
  CHECK(w.head == I(5));
  CHECK(zipwith_whnf(BinOp::Add, {I(0), p}, {I(0), q}, sess).head == I(0));
  CHECK(zipwith_whnf(BinOp::Max, {I(1), p}, {I(7), q}, sess).head == I(7));
  CHECK(sess.op_count() == 3);
  CHECK(sess.add_count() == 2);
}

TEST_CASE("merge_whnf is an ordered duplicate-collapsing merge") {
  StreamProgPtr p = sp_ref("p"), q = sp_ref("q");
  StreamWhnf less = merge_whnf({I(2), p}, {I(3), q});
  CHECK(less.head == I(2));
  {
    const SMerge* m = std::get_if<SMerge>(&less.tail->node);
    REQUIRE(m != nullptr);
    CHECK(m->left == p);
    const SCons* c = std::get_if<SCons>(&m->right->node);
    REQUIRE(c != nullptr);
    CHECK(c->head == I(3));
    CHECK(c->tail.prog == q);
  }
  StreamWhnf equal = merge_whnf({I(4), p}, {I(4), q});
  CHECK(equal.head == I(4));
  {
    const SMerge* m = std::get_if<SMerge>(&equal.tail->node);
    REQUIRE(m != nullptr);
    CHECK(m->left == p);
    CHECK(m->right == q);
  }
  StreamWhnf greater = merge_whnf({I(9), p}, {I(6), q});
  CHECK(greater.head == I(6));
}

TEST_CASE("interpret: fib, nats, hamming") {
  CHECK(run_prefix(sp_ref("fib"), fib_env(), 8) == ints({0, 1, 1, 2, 3, 5, 8, 13}));
  CHECK(run_prefix(sp_ref("nats"), nats_env(), 5) == ints({0, 1, 2, 3, 4}));
  CHECK(run_prefix(sp_ref("hamming"), hamming_env(), 10) == hamming_oracle(10));
  CHECK(run_prefix(sp_ref("hamming"), hamming_env(), 25) == hamming_oracle(25));
}

TEST_CASE("interpret agrees across modes") {
  CHECK(run_prefix(sp_ref("fib"), fib_env(), 20, EvalMode::Memoized) == fib_oracle(20));
  CHECK(run_prefix(sp_ref("hamming"), hamming_env(), 25, EvalMode::Memoized) ==
        hamming_oracle(25));
  DefEnv mutual;
  mutual.add_def("a", sp_cons(I(0), sp_map(u_suc, sp_ref("b"))));
  mutual.add_def("b", sp_cons(I(10), sp_map(u_suc, sp_ref("a"))));
  auto env = std::make_shared<DefEnv>(mutual);
  CHECK(run_prefix(sp_ref("a"), env, 10, EvalMode::Naive) ==
        run_prefix(sp_ref("a"), env, 10, EvalMode::Memoized));
}

TEST_CASE("embed_stream is the identity on observations") {
  CHECK(run_prefix(embed_stream(naturals()), std::make_shared<DefEnv>(), 4) ==
        ints({0, 1, 2, 3}));
  DefEnv env;
  EvalSession sess;
  Stream s = naturals();
  CHECK(whnf(embed_stream(s), env, sess).head == s.head());
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    std::uint64_t seed = rng();
    Stream r = stream_from_fn(
        [seed](std::uint64_t i) { return I(static_cast<std::int64_t>((seed + i) % 97)); });
    auto sess2 = std::make_shared<EvalSession>(EvalMode::Naive);
    CHECK(bisimilar_to_depth(interpret(embed_stream(r), std::make_shared<DefEnv>(), sess2), r,
                             40));
  }
}

TEST_CASE("nested user-function applications") {
  auto env = phi_env();

  // phi over an embedded stream, prefix checked against the fixpoint oracle
  auto sess = std::make_shared<EvalSession>(EvalMode::Naive);
  Stream got = interpret(sp_userfun("phi", embed_stream(naturals())), env, sess);
  std::vector<Value> nat64;
  for (int i = 0; i < 64; ++i) nat64.push_back(I(i));
  std::vector<Value> oracle = phi_oracle_iter(6, nat64);
  REQUIRE(oracle.size() >= 3);
  CHECK(take_prefix(got, 3) == std::vector<Value>(oracle.begin(), oracle.begin() + 3));

  // the checker accepts the guarded definition that uses phi
  CHECK(check_guarded(*env).ok());
  CHECK(run_prefix(sp_ref("phiex"), env, 4) == ints({0, 0, 0, 0}));
}

namespace {

StreamProgPtr random_prog(std::mt19937_64& rng, int depth) {
  if (depth == 0) {
    if (rng() % 2 == 0) {
      std::uint64_t seed = rng() % 50;
      return sp_embed(stream_from_fn(
          [seed](std::uint64_t i) { return I(static_cast<std::int64_t>((seed + 3 * i) % 101)); }));
    }
    return sp_cons(I(static_cast<std::int64_t>(rng() % 10)), sp_ref("nats"));
  }
  switch (rng() % 4) {
    case 0:
      return sp_cons(I(static_cast<std::int64_t>(rng() % 10)), random_prog(rng, depth - 1));
    case 1:
      return sp_zipwith(rng() % 2 ? BinOp::Max : BinOp::Add, random_prog(rng, depth - 1),
                        random_prog(rng, depth - 1));
    case 2:
      return sp_map(rng() % 2 ? u_suc : u_mul(2), random_prog(rng, depth - 1));
    default:
      return random_prog(rng, depth - 1);
  }
}

}  // namespace

TEST_CASE("zipWith is homomorphic under interpretation") {
  std::mt19937_64 rng(17);
  auto env = nats_env();
  for (int trial = 0; trial < 30; ++trial) {
    StreamProgPtr p = random_prog(rng, 3);
    StreamProgPtr q = random_prog(rng, 3);
    BinOp op = trial % 2 ? BinOp::Add : BinOp::Min;
    std::size_t n = 1 + rng() % 50;
    auto whole = run_prefix(sp_zipwith(op, p, q), env, n);
    auto left = run_prefix(p, env, n);
    auto right = run_prefix(q, env, n);
    bool all = true;
    for (std::size_t i = 0; i < n; ++i)
      all = all && whole[i] == apply_bin(op, left[i], right[i]);
    CHECK(all);
  }
}

TEST_CASE("fib satisfies its defining equation to depth 50") {
  auto sess = std::make_shared<EvalSession>(EvalMode::Memoized);
  Stream fib = interpret(sp_ref("fib"), fib_env(), sess);
  // 0 :: zipWith add fib (1 :: fib), built from the interpreted stream
  struct Zip {
    static Stream add(Stream a, Stream b) {
      return Stream::make(apply_bin(BinOp::Add, a.head(), b.head()),
                          [a, b] { return add(a.tail(), b.tail()); });
    }
  };
  Stream one_fib = Stream::make(I(1), [fib] { return fib; });
  Stream rhs = Stream::make(I(0), [fib, one_fib] { return Zip::add(fib, one_fib); });
  CHECK(bisimilar_to_depth(fib, rhs, 50));
}

TEST_CASE("guardedness bounds work: corpus evaluates without fuel exhaustion") {
  CHECK(run_prefix(sp_ref("nats"), nats_env(), 200).size() == 200);
  CHECK(run_prefix(sp_ref("hamming"), hamming_env(), 200, EvalMode::Memoized).size() == 200);
  // 64-bit elements cap Fibonacci at index 92; past that the defined failure
  // is an overflow error, never fuel exhaustion
  CHECK(run_prefix(sp_ref("fib"), fib_env(), 93, EvalMode::Memoized).size() == 93);
  try {
    run_prefix(sp_ref("fib"), fib_env(), 94, EvalMode::Memoized);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrKind::Overflow);
  }
}

TEST_CASE("naive mode recomputes; memoized mode shares") {
  auto env = fib_env();

  // exact per-element additions in naive mode follow the recurrence
  // c(0)=0, c(1)=1, c(k)=1+c(k-1)+c(k-2)
  std::size_t n = 18;
  std::vector<std::uint64_t> naive_adds;
  {
    auto sess = std::make_shared<EvalSession>(EvalMode::Naive);
    Stream s = interpret(sp_ref("fib"), env, sess);
    std::uint64_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s.head();
      naive_adds.push_back(sess->add_count() - last);
      last = sess->add_count();
      s = s.tail();
    }
  }
  std::vector<std::uint64_t> expect{0, 1};
  while (expect.size() < n)
    expect.push_back(1 + expect[expect.size() - 1] + expect[expect.size() - 2]);
  CHECK(naive_adds == expect);
  for (std::size_t k = 3; k < n; ++k)
    CHECK(naive_adds[k] >= naive_adds[k - 1] + naive_adds[k - 2]);

  // memoized mode: forcing element n costs at most 2n additions in total
  for (std::size_t m : {5u, 10u, 25u}) {
    auto sess = std::make_shared<EvalSession>(EvalMode::Memoized);
    take_prefix(interpret(sp_ref("fib"), env, sess), m + 1);
    CHECK(sess->add_count() <= 2 * m);
  }
}

TEST_CASE("nats operator counts: quadratic naive, linear memoized") {
  auto env = nats_env();
  std::size_t n = 20;
  auto naive = std::make_shared<EvalSession>(EvalMode::Naive);
  take_prefix(interpret(sp_ref("nats"), env, naive), n);
  CHECK(naive->op_count() == n * (n - 1) / 2);
  auto memo = std::make_shared<EvalSession>(EvalMode::Memoized);
  take_prefix(interpret(sp_ref("nats"), env, memo), n);
  CHECK(memo->op_count() == n - 1);
}

TEST_CASE("an unguarded definition burns fuel instead of diverging") {
  auto env = std::make_shared<DefEnv>();
  env->add_def("x", sp_ref("x"));
  // checker rejects it; evaluating anyway (the checker bypassed) must fail fast
  CHECK_FALSE(check_guarded(*env).ok());
  auto sess = std::make_shared<EvalSession>(EvalMode::Naive, 10000);
  CHECK_THROWS_AS(interpret(sp_ref("x"), env, sess), Error);
  auto sess2 = std::make_shared<EvalSession>(EvalMode::Memoized, 10000);
  CHECK_THROWS_AS(interpret(sp_ref("x"), env, sess2), Error);
}

TEST_CASE("subst_ref replaces self-references") {
  auto env = fib_env();
  StreamProgPtr body = *env->find_def("fib");
  StreamProgPtr applied = subst_ref(body, "fib", embed_stream(naturals()));
  // 0 :: zipWith add nats (1 :: nats) = 0,1,1,3,5,7,...
  CHECK(run_prefix(applied, env, 5) == ints({0, 1, 1, 3, 5}));
}
