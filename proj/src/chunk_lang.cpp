#include "corec/chunk_lang.hpp"

#include <algorithm>
#include <numeric>

#include "corec/stream_lang.hpp"

namespace corec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kScheduleCap = 200000;

std::size_t lcm_capped(std::size_t a, std::size_t b) {
  std::size_t l = std::lcm(a, b);
  if (l == 0 || l > kScheduleCap)
    fail(ErrKind::Internal, "schedule period too large");
  return l;
}

}  // namespace

// -- EPSeq --------------------------------------------------------------------

EPSeq::EPSeq(std::vector<std::uint64_t> prefix, std::vector<std::uint64_t> period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) fail(ErrKind::Internal, "schedule period must be nonempty");
  rebuild();
}

void EPSeq::rebuild() {
  prefix_sums_.assign(prefix_.size() + 1, 0);
  for (std::size_t i = 0; i < prefix_.size(); ++i)
    prefix_sums_[i + 1] = prefix_sums_[i] + prefix_[i];
  period_sums_.assign(period_.size() + 1, 0);
  for (std::size_t i = 0; i < period_.size(); ++i)
    period_sums_[i + 1] = period_sums_[i] + period_[i];
  period_sum_ = period_sums_.back();
}

std::uint64_t EPSeq::at(std::size_t k) const {
  if (k < prefix_.size()) return prefix_[k];
  return period_[(k - prefix_.size()) % period_.size()];
}

std::uint64_t EPSeq::sum_before(std::size_t k) const {
  if (k <= prefix_.size()) return prefix_sums_[k];
  std::size_t rem = k - prefix_.size();
  std::size_t full = rem / period_.size();
  std::size_t part = rem % period_.size();
  return prefix_sums_[prefix_.size()] + full * period_sum_ + period_sums_[part];
}

EPSeq EPSeq::normalized() const {
  std::vector<std::uint64_t> per = period_;
  for (std::size_t d = 1; d <= per.size(); ++d) {
    if (per.size() % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < per.size() && repeats; ++i) repeats = per[i] == per[i - d];
    if (repeats) {
      per.resize(d);
      break;
    }
  }
  std::vector<std::uint64_t> pre = prefix_;
  while (!pre.empty() && pre.back() == per.back()) {
    std::rotate(per.begin(), per.end() - 1, per.end());
    pre.pop_back();
  }
  return EPSeq(std::move(pre), std::move(per));
}

bool operator==(const EPSeq& a, const EPSeq& b) {
  EPSeq na = a.normalized(), nb = b.normalized();
  return na.prefix_ == nb.prefix_ && na.period_ == nb.period_;
}

std::string IndexState::to_text() const {
  std::string s = std::to_string(current) + " now, then [";
  const auto& pre = upcoming.prefix();
  const auto& per = upcoming.period();
  for (std::size_t i = 0; i < pre.size(); ++i) s += (i ? "," : "") + std::to_string(pre[i]);
  s += ";";
  for (std::size_t i = 0; i < per.size(); ++i) s += (i ? "," : "") + std::to_string(per[i]);
  s += "]";
  return s;
}

bool operator==(const IndexState& a, const IndexState& b) {
  return a.current == b.current && a.upcoming == b.upcoming;
}

bool state_dominates(const IndexState& a, const IndexState& b) {
  std::size_t pa = a.upcoming.prefix().size(), pb = b.upcoming.prefix().size();
  std::size_t la = a.upcoming.period().size(), lb = b.upcoming.period().size();
  std::size_t P = std::max(pa, pb);
  std::size_t L = lcm_capped(la, lb);
  for (std::size_t k = 0; k <= P + L; ++k)
    if (a.cumulative(k) < b.cumulative(k)) return false;
  long long delta = static_cast<long long>(a.upcoming.period_sum() * (L / la)) -
                    static_cast<long long>(b.upcoming.period_sum() * (L / lb));
  return delta >= 0;
}

// -- transfer functions -------------------------------------------------------

IndexState state_cons(const IndexState& rest) { return {rest.current + 1, rest.upcoming}; }

IndexState state_endchunk(const IndexState& rest) {
  if (rest.current == 0) fail(ErrKind::EmptyChunk, "chunk closed with no elements");
  std::vector<std::uint64_t> pre;
  pre.reserve(rest.upcoming.prefix().size() + 1);
  pre.push_back(rest.current);
  pre.insert(pre.end(), rest.upcoming.prefix().begin(), rest.upcoming.prefix().end());
  return {0, EPSeq(std::move(pre), rest.upcoming.period()).normalized()};
}

IndexState state_tail(const IndexState& arg) {
  if (arg.current == 0)
    fail(ErrKind::IndexMismatch, "tail needs an element in the chunk under construction");
  return {arg.current - 1, arg.upcoming};
}

IndexState state_forget(const IndexState& arg) {
  if (arg.current == 0)
    fail(ErrKind::IndexMismatch, "forget needs a finished element in the current chunk");
  return {arg.current - 1, arg.upcoming};
}

IndexState state_evens(const IndexState& arg) {
  std::size_t P = arg.upcoming.prefix().size();
  std::size_t L = arg.upcoming.period().size();
  std::size_t Lr = (arg.upcoming.period_sum() % 2 != 0) ? 2 * L : L;
  auto chalf = [&](std::size_t k) { return (arg.cumulative(k) + 1) / 2; };
  std::vector<std::uint64_t> entries;
  entries.reserve(P + Lr);
  for (std::size_t k = 0; k < P + Lr; ++k) entries.push_back(chalf(k + 1) - chalf(k));
  std::vector<std::uint64_t> pre(entries.begin(), entries.begin() + P);
  std::vector<std::uint64_t> per(entries.begin() + P, entries.end());
  return {chalf(0), EPSeq(std::move(pre), std::move(per)).normalized()};
}

IndexState state_interleave(const IndexState& l, const IndexState& r) {
  std::size_t P = std::max(l.upcoming.prefix().size(), r.upcoming.prefix().size());
  std::size_t Ll = l.upcoming.period().size(), Lr = r.upcoming.period().size();
  std::size_t L = lcm_capped(Ll, Lr);
  long long delta = 2 * (static_cast<long long>(l.upcoming.period_sum() * (L / Ll)) -
                         static_cast<long long>(r.upcoming.period_sum() * (L / Lr)));
  auto D = [&](std::size_t k) {
    return 2 * static_cast<long long>(l.cumulative(k)) -
           (2 * static_cast<long long>(r.cumulative(k)) + 1);
  };
  // Find the point after which the min branch is fixed (delta != 0) or the
  // branch pattern repeats (delta == 0). Exact: beyond the prefixes,
  // D(k + L) = D(k) + delta.
  std::size_t kstar = P;
  if (delta != 0) {
    for (std::size_t start = P;; start += L) {
      if (start > P + kScheduleCap) fail(ErrKind::Internal, "interleave schedule did not settle");
      bool all_pos = true, all_neg = true;
      for (std::size_t k = start; k < start + L; ++k) {
        long long d = D(k);
        all_pos = all_pos && d > 0;
        all_neg = all_neg && d < 0;
      }
      if ((delta > 0 && all_pos) || (delta < 0 && all_neg)) {
        kstar = start;
        break;
      }
    }
  }
  auto cmin = [&](std::size_t k) {
    return std::min(2 * l.cumulative(k), 2 * r.cumulative(k) + 1);
  };
  std::vector<std::uint64_t> entries;
  entries.reserve(kstar + L);
  for (std::size_t k = 0; k < kstar + L; ++k) entries.push_back(cmin(k + 1) - cmin(k));
  std::vector<std::uint64_t> pre(entries.begin(), entries.begin() + kstar);
  std::vector<std::uint64_t> per(entries.begin() + kstar, entries.end());
  return {cmin(0), EPSeq(std::move(pre), std::move(per)).normalized()};
}

// -- signatures ---------------------------------------------------------------

ChunkSignature ChunkSignature::boolean(bool flag) {
  ChunkSignature s;
  s.disc = Disc::Bool;
  s.flag = flag;
  return s;
}

ChunkSignature ChunkSignature::fixed(std::uint64_t m, std::uint64_t n) {
  if (m < 1) fail(ErrKind::ParseError, "chunk size must be at least 1");
  ChunkSignature s;
  s.disc = Disc::Fixed;
  s.chunk = m;
  s.first = n;
  return s;
}

ChunkSignature ChunkSignature::pattern(std::vector<std::uint64_t> pre,
                                       std::vector<std::uint64_t> per) {
  if (pre.empty() || per.empty())
    fail(ErrKind::ParseError, "pattern signature needs a prefix and a period");
  for (auto v : pre)
    if (v == 0) fail(ErrKind::ParseError, "pattern chunks must be nonempty");
  for (auto v : per)
    if (v == 0) fail(ErrKind::ParseError, "pattern chunks must be nonempty");
  ChunkSignature s;
  s.disc = Disc::Pattern;
  s.pre = std::move(pre);
  s.per = std::move(per);
  return s;
}

IndexState ChunkSignature::state() const {
  switch (disc) {
    case Disc::Bool:
      return {flag ? std::uint64_t{1} : std::uint64_t{0}, EPSeq({}, {1})};
    case Disc::Fixed:
      return {first, EPSeq({}, {chunk})};
    case Disc::Pattern: {
      std::vector<std::uint64_t> rest(pre.begin() + 1, pre.end());
      return {pre[0], EPSeq(std::move(rest), per)};
    }
  }
  fail(ErrKind::Internal, "unknown signature discipline");
}

std::string ChunkSignature::to_text() const {
  switch (disc) {
    case Disc::Bool:
      return std::string("@bool(") + (flag ? "true" : "false") + ")";
    case Disc::Fixed:
      return "@(" + std::to_string(chunk) + "," + std::to_string(first) + ")";
    case Disc::Pattern: {
      std::string s = "@pattern[";
      for (std::size_t i = 0; i < pre.size(); ++i) s += (i ? "," : "") + std::to_string(pre[i]);
      s += ";";
      for (std::size_t i = 0; i < per.size(); ++i) s += (i ? "," : "") + std::to_string(per[i]);
      return s + "]";
    }
  }
  fail(ErrKind::Internal, "unknown signature discipline");
}

// -- AST ----------------------------------------------------------------------

namespace {
ChunkProgPtr mk(ChunkProg p) { return std::make_shared<const ChunkProg>(std::move(p)); }
}  // namespace

ChunkProgPtr cp_end(ChunkProgPtr delayed_rest) { return mk({CEnd{CDelayed{std::move(delayed_rest)}}}); }
ChunkProgPtr cp_cons(Value head, ChunkProgPtr rest) { return mk({CCons{head, std::move(rest)}}); }
ChunkProgPtr cp_tail(ChunkProgPtr arg) { return mk({CTail{std::move(arg)}}); }
ChunkProgPtr cp_forget(ChunkProgPtr arg) { return mk({CForget{std::move(arg)}}); }
ChunkProgPtr cp_zip(BinOp op, ChunkProgPtr l, ChunkProgPtr r) {
  return mk({CZip{op, std::move(l), std::move(r)}});
}
ChunkProgPtr cp_map(UnOp op, ChunkProgPtr arg) { return mk({CMapN{op, std::move(arg)}}); }
ChunkProgPtr cp_evens(ChunkProgPtr arg, int skip) { return mk({CEvens{std::move(arg), skip}}); }
ChunkProgPtr cp_interleave(ChunkProgPtr l, ChunkProgPtr r) {
  return mk({CInterleave{{}, std::move(l), {}, std::move(r), false}});
}
ChunkProgPtr cp_interleave_state(std::vector<Value> pl, ChunkProgPtr l, std::vector<Value> pr,
                                 ChunkProgPtr r, bool right_first) {
  return mk({CInterleave{std::move(pl), std::move(l), std::move(pr), std::move(r), right_first}});
}
ChunkProgPtr cp_ref(std::string name) { return mk({CRef{std::move(name)}}); }

void ChunkDefEnv::add_def(const std::string& name, ChunkSignature sig, ChunkProgPtr body) {
  defs_[name] = ChunkDef{std::move(sig), std::move(body)};
}

const ChunkDef* ChunkDefEnv::find_def(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

std::string ChunkDiag::message() const {
  switch (kind) {
    case Kind::IndexMismatch: return "IndexMismatch at " + path + ": " + detail;
    case Kind::EmptyChunk: return "EmptyChunk at " + path + ": " + detail;
    case Kind::Unresolved: return "unresolved reference at " + path + ": " + detail;
    case Kind::UndelayedRef: return "unguarded reference at " + path + ": " + detail;
  }
  return detail;
}

// -- index checking -----------------------------------------------------------

namespace {

struct ChunkChecker {
  const ChunkDefEnv& env;
  std::string def;
  std::vector<ChunkDiag>& diags;

  void diag(ChunkDiag::Kind kind, const std::string& path, const std::string& detail) {
    diags.push_back({kind, def, path, detail});
  }

  std::optional<IndexState> synth(const ChunkProgPtr& p, std::size_t delays,
                                  const std::string& path) {
    return std::visit(
        overloaded{
            [&](const CEnd& n) -> std::optional<IndexState> {
              auto s = synth(n.rest.prog, delays + 1, path + ".end");
              if (!s) return std::nullopt;
              if (s->current == 0) {
                diag(ChunkDiag::Kind::EmptyChunk, path, "chunk closed with no elements");
                return std::nullopt;
              }
              return state_endchunk(*s);
            },
            [&](const CCons& n) -> std::optional<IndexState> {
              auto s = synth(n.rest, delays, path + ".cons");
              if (!s) return std::nullopt;
              return state_cons(*s);
            },
            [&](const CTail& n) -> std::optional<IndexState> {
              auto s = synth(n.arg, delays, path + ".tail");
              if (!s) return std::nullopt;
              if (s->current == 0) {
                diag(ChunkDiag::Kind::IndexMismatch, path,
                     "tail needs an element in the current chunk (found " + s->to_text() + ")");
                return std::nullopt;
              }
              return state_tail(*s);
            },
            [&](const CForget& n) -> std::optional<IndexState> {
              auto s = synth(n.arg, delays, path + ".forget");
              if (!s) return std::nullopt;
              if (s->current == 0) {
                diag(ChunkDiag::Kind::IndexMismatch, path,
                     "forget needs an element in the current chunk (found " + s->to_text() + ")");
                return std::nullopt;
              }
              return state_forget(*s);
            },
            [&](const CZip& n) -> std::optional<IndexState> {
              auto a = synth(n.left, delays, path + ".zipWith.left");
              auto b = synth(n.right, delays, path + ".zipWith.right");
              if (!a || !b) return std::nullopt;
              if (!(a->normalized() == b->normalized())) {
                diag(ChunkDiag::Kind::IndexMismatch, path,
                     "zipWith needs equal indices; left " + a->to_text() + ", right " +
                         b->to_text());
                return std::nullopt;
              }
              return a;
            },
            [&](const CMapN& n) -> std::optional<IndexState> {
              return synth(n.arg, delays, path + ".map");
            },
            [&](const CEvens& n) -> std::optional<IndexState> {
              auto s = synth(n.arg, delays, path + ".evens");
              if (!s) return std::nullopt;
              return state_evens(*s);
            },
            [&](const CInterleave& n) -> std::optional<IndexState> {
              auto a = synth(n.left, delays, path + ".interleave.left");
              auto b = synth(n.right, delays, path + ".interleave.right");
              if (!a || !b) return std::nullopt;
              a->current += n.pending_left.size();
              b->current += n.pending_right.size();
              return state_interleave(*a, *b);
            },
            [&](const CRef& n) -> std::optional<IndexState> {
              const ChunkDef* d = env.find_def(n.name);
              if (!d) {
                diag(ChunkDiag::Kind::Unresolved, path, "'" + n.name + "'");
                return std::nullopt;
              }
              if (delays == 0)
                diag(ChunkDiag::Kind::UndelayedRef, path,
                     "reference '" + n.name + "' must sit behind a chunk boundary");
              return d->sig.state();
            },
        },
        p->node);
  }
};

}  // namespace

ChunkReport check_chunk_typing(const ChunkDefEnv& env) {
  ChunkReport report;
  for (const auto& [name, def] : env.defs()) {
    ChunkChecker checker{env, name, report.diags};
    std::size_t before = report.diags.size();
    auto s = checker.synth(def.body, 0, name);
    if (s && report.diags.size() == before) {
      IndexState declared = def.sig.state();
      if (!state_dominates(*s, declared))
        report.diags.push_back({ChunkDiag::Kind::IndexMismatch, name, name,
                                "declared " + def.sig.to_text() + " = " + declared.to_text() +
                                    " but body produces " + s->to_text()});
    }
  }
  return report;
}

// -- whnf ---------------------------------------------------------------------

namespace {

ChunkWhnf whnf_chunk_impl(const ChunkProgPtr& p, const ChunkDefEnv& env, EvalSession& sess) {
  sess.tick();
  EvalSession::DepthGuard guard(sess);
  if (!sess.chunk_memo) sess.chunk_memo = std::make_shared<ChunkMemo>();
  auto hit = sess.chunk_memo->cache.find(p);
  if (hit != sess.chunk_memo->cache.end()) return hit->second;

  ChunkWhnf result = std::visit(
      overloaded{
          [&](const CEnd& n) -> ChunkWhnf { return {{}, n.rest.prog}; },
          [&](const CCons& n) -> ChunkWhnf {
            ChunkWhnf w = whnf_chunk_impl(n.rest, env, sess);
            std::vector<Value> items;
            items.reserve(w.items.size() + 1);
            items.push_back(n.head);
            items.insert(items.end(), w.items.begin(), w.items.end());
            return {std::move(items), w.rest};
          },
          [&](const CTail& n) -> ChunkWhnf {
            ChunkWhnf w = whnf_chunk_impl(n.arg, env, sess);
            if (w.items.empty())
              fail(ErrKind::EmptyChunkDemand, "tail demanded an element of an empty chunk");
            return {{w.items.begin() + 1, w.items.end()}, w.rest};
          },
          [&](const CForget& n) -> ChunkWhnf { return whnf_chunk_impl(n.arg, env, sess); },
          [&](const CZip& n) -> ChunkWhnf {
            ChunkWhnf wl = whnf_chunk_impl(n.left, env, sess);
            ChunkWhnf wr = whnf_chunk_impl(n.right, env, sess);
            std::size_t m = std::min(wl.items.size(), wr.items.size());
            std::vector<Value> items;
            items.reserve(m);
            for (std::size_t i = 0; i < m; ++i)
              items.push_back(sess.bin(n.op, wl.items[i], wr.items[i]));
            auto side = [&](const ChunkWhnf& w) -> ChunkProgPtr {
              if (m == w.items.size()) return w.rest;
              ChunkProgPtr prog = cp_end(w.rest);
              for (std::size_t i = w.items.size(); i-- > m;) prog = cp_cons(w.items[i], prog);
              return prog;
            };
            return {std::move(items), cp_zip(n.op, side(wl), side(wr))};
          },
          [&](const CMapN& n) -> ChunkWhnf {
            ChunkWhnf w = whnf_chunk_impl(n.arg, env, sess);
            std::vector<Value> items;
            items.reserve(w.items.size());
            for (const Value& v : w.items) items.push_back(sess.un(n.op, v));
            return {std::move(items), cp_map(n.op, w.rest)};
          },
          [&](const CEvens& n) -> ChunkWhnf {
            ChunkWhnf w = whnf_chunk_impl(n.arg, env, sess);
            std::vector<Value> items;
            for (std::size_t i = static_cast<std::size_t>(n.skip); i < w.items.size(); i += 2)
              items.push_back(w.items[i]);
            int skip = static_cast<int>((n.skip + w.items.size()) % 2);
            return {std::move(items), cp_evens(w.rest, skip)};
          },
          [&](const CInterleave& n) -> ChunkWhnf {
            ChunkWhnf wl = whnf_chunk_impl(n.left, env, sess);
            ChunkWhnf wr = whnf_chunk_impl(n.right, env, sess);
            std::vector<Value> avail_l = n.pending_left;
            avail_l.insert(avail_l.end(), wl.items.begin(), wl.items.end());
            std::vector<Value> avail_r = n.pending_right;
            avail_r.insert(avail_r.end(), wr.items.begin(), wr.items.end());
            std::vector<Value> out;
            std::size_t il = 0, ir = 0;
            bool right_turn = n.right_first;
            for (;;) {
              if (!right_turn) {
                if (il >= avail_l.size()) break;
                out.push_back(avail_l[il++]);
              } else {
                if (ir >= avail_r.size()) break;
                out.push_back(avail_r[ir++]);
              }
              right_turn = !right_turn;
            }
            std::vector<Value> keep_l(avail_l.begin() + il, avail_l.end());
            std::vector<Value> keep_r(avail_r.begin() + ir, avail_r.end());
            return {std::move(out), cp_interleave_state(std::move(keep_l), wl.rest,
                                                        std::move(keep_r), wr.rest, right_turn)};
          },
          [&](const CRef& n) -> ChunkWhnf {
            const ChunkDef* d = env.find_def(n.name);
            if (!d) fail(ErrKind::UnresolvedRef, "unresolved reference '" + n.name + "'");
            return whnf_chunk_impl(d->body, env, sess);
          },
      },
      p->node);

  sess.chunk_memo->cache.emplace(p, result);
  return result;
}

}  // namespace

ChunkWhnf whnf_chunk(const ChunkProgPtr& p, const ChunkDefEnv& env, EvalSession& sess) {
  return whnf_chunk_impl(p, env, sess);
}

namespace {

// The caller resets the element budget; crossings of empty chunks keep
// charging the same element, so a run of endchunks with no cons in sight
// burns fuel instead of spinning.
Stream chunk_emit(ChunkWhnf w, std::size_t i, std::uint64_t emitted,
                  std::shared_ptr<const ChunkDefEnv> env, std::shared_ptr<EvalSession> sess,
                  std::shared_ptr<std::vector<std::uint64_t>> trace, bool memo) {
  while (i >= w.items.size()) {
    if (trace) trace->push_back(emitted);
    w = whnf_chunk(w.rest, *env, *sess);
    i = 0;
  }
  Value head = w.items[i];
  return Stream::make(
      head,
      [w, i, emitted, env, sess, trace, memo] {
        sess->begin_element();
        return chunk_emit(w, i + 1, emitted + 1, env, sess, trace, memo);
      },
      memo);
}

}  // namespace

Stream interpret_chunk(ChunkProgPtr p, const ChunkSignature& sig,
                       std::shared_ptr<const ChunkDefEnv> env, std::shared_ptr<EvalSession> sess,
                       std::shared_ptr<std::vector<std::uint64_t>> boundary_trace) {
  if (sig.state().current == 0)
    fail(ErrKind::NonProductiveTopLevel,
         "signature " + sig.to_text() + " admits an empty first chunk");
  sess->begin_element();
  ChunkWhnf w = whnf_chunk(p, *env, *sess);
  bool memo = sess->mode() == EvalMode::Memoized;
  return chunk_emit(std::move(w), 0, 0, std::move(env), std::move(sess),
                    std::move(boundary_trace), memo);
}

Stream map2_reference(std::function<Value(Value)> f, Stream s) {
  Stream t = s.tail();  // pattern matching is strict: two in before two out
  Value a = f(s.head());
  Value b = f(t.head());
  Stream rest = t.tail();
  return Stream::make(a, [b, f, rest] {
    return Stream::make(b, [f, rest] { return map2_reference(f, rest); });
  });
}

std::optional<StreamProgPtr> erase_to_stream_lang(const ChunkProgPtr& p) {
  return std::visit(
      overloaded{
          [&](const CEnd& n) { return erase_to_stream_lang(n.rest.prog); },
          [&](const CCons& n) -> std::optional<StreamProgPtr> {
            auto rest = erase_to_stream_lang(n.rest);
            if (!rest) return std::nullopt;
            return sp_cons(n.head, *rest);
          },
          [&](const CTail&) -> std::optional<StreamProgPtr> { return std::nullopt; },
          [&](const CForget&) -> std::optional<StreamProgPtr> { return std::nullopt; },
          [&](const CZip& n) -> std::optional<StreamProgPtr> {
            auto a = erase_to_stream_lang(n.left);
            auto b = erase_to_stream_lang(n.right);
            if (!a || !b) return std::nullopt;
            return sp_zipwith(n.op, *a, *b);
          },
          [&](const CMapN& n) -> std::optional<StreamProgPtr> {
            auto a = erase_to_stream_lang(n.arg);
            if (!a) return std::nullopt;
            return sp_map(n.op, *a);
          },
          [&](const CEvens&) -> std::optional<StreamProgPtr> { return std::nullopt; },
          [&](const CInterleave&) -> std::optional<StreamProgPtr> { return std::nullopt; },
          [&](const CRef& n) -> std::optional<StreamProgPtr> { return sp_ref(n.name); },
      },
      p->node);
}

}  // namespace corec
