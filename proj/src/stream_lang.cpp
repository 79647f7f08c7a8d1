#include "corec/stream_lang.hpp"

#include <functional>

namespace corec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

StreamProgPtr mk(StreamProg p) { return std::make_shared<const StreamProg>(std::move(p)); }

}  // namespace

StreamProgPtr sp_cons(Value head, StreamProgPtr delayed_tail) {
  return mk({SCons{head, SDelayed{std::move(delayed_tail)}}});
}
StreamProgPtr sp_zipwith(BinOp op, StreamProgPtr l, StreamProgPtr r) {
  return mk({SZipWith{op, std::move(l), std::move(r)}});
}
StreamProgPtr sp_map(UnOp op, StreamProgPtr arg) { return mk({SMap{op, std::move(arg)}}); }
StreamProgPtr sp_merge(StreamProgPtr l, StreamProgPtr r) {
  return mk({SMerge{std::move(l), std::move(r)}});
}
StreamProgPtr sp_userfun(std::string fn, StreamProgPtr arg) {
  return mk({SUserFun{std::move(fn), std::move(arg)}});
}
StreamProgPtr sp_embed(Stream s) { return mk({SEmbed{std::move(s)}}); }
StreamProgPtr sp_ref(std::string name) { return mk({SRef{std::move(name)}}); }
StreamProgPtr sp_refat(std::string name, std::uint64_t index) {
  return mk({SRefAt{std::move(name), index}});
}
StreamProgPtr sp_tailhole() { return mk({STailHole{}}); }

void DefEnv::add_def(const std::string& name, StreamProgPtr body) {
  defs_[name] = std::move(body);
}

void DefEnv::add_rule(const std::string& fn, WhnfRule rule) {
  if (!rule.tail_template)
    fail(ErrKind::Internal, "whnf rule for '" + fn + "' has no tail template");
  rules_[fn] = std::move(rule);
}

const StreamProgPtr* DefEnv::find_def(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

const WhnfRule* DefEnv::find_rule(const std::string& fn) const {
  auto it = rules_.find(fn);
  return it == rules_.end() ? nullptr : &it->second;
}

std::string GuardViolation::message() const {
  if (kind == Kind::Unresolved)
    return "unresolved reference '" + name + "' (at " + path + ")";
  return "reference '" + name + "' is not guarded by a delay (at " + path + ")";
}

namespace {

void check_prog(const DefEnv& env, const std::string& def, const StreamProgPtr& p,
                std::size_t delays, const std::string& path, bool allow_holes,
                std::vector<GuardViolation>& out) {
  std::visit(
      overloaded{
          [&](const SCons& n) {
            check_prog(env, def, n.tail.prog, delays + 1, path + ".cons.delay", allow_holes, out);
          },
          [&](const SZipWith& n) {
            check_prog(env, def, n.left, delays, path + ".zipWith.left", allow_holes, out);
            check_prog(env, def, n.right, delays, path + ".zipWith.right", allow_holes, out);
          },
          [&](const SMap& n) {
            check_prog(env, def, n.arg, delays, path + ".map", allow_holes, out);
          },
          [&](const SMerge& n) {
            check_prog(env, def, n.left, delays, path + ".merge.left", allow_holes, out);
            check_prog(env, def, n.right, delays, path + ".merge.right", allow_holes, out);
          },
          [&](const SUserFun& n) {
            if (!env.find_rule(n.fn))
              out.push_back({GuardViolation::Kind::Unresolved, def, n.fn, path});
            check_prog(env, def, n.arg, delays, path + "." + n.fn, allow_holes, out);
          },
          [&](const SEmbed&) {},
          [&](const SRef& n) {
            if (!env.find_def(n.name))
              out.push_back({GuardViolation::Kind::Unresolved, def, n.name, path});
            else if (delays == 0)
              out.push_back({GuardViolation::Kind::Undelayed, def, n.name, path});
          },
          [&](const SRefAt& n) {
            if (!env.find_def(n.name))
              out.push_back({GuardViolation::Kind::Unresolved, def, n.name, path});
          },
          [&](const STailHole&) {
            if (!allow_holes)
              out.push_back({GuardViolation::Kind::Unresolved, def, "<hole>", path});
          },
      },
      p->node);
}

}  // namespace

GuardReport check_guarded(const DefEnv& env) {
  GuardReport report;
  for (const auto& [name, body] : env.defs())
    check_prog(env, name, body, 0, name, false, report.violations);
  // Rule templates only need their references to resolve: a template is
  // spliced in as a whnf tail, which already sits behind one production step.
  return report;
}

namespace {

StreamProgPtr instantiate_template(const StreamProgPtr& tpl, const StreamProgPtr& hole) {
  return std::visit(
      overloaded{
          [&](const SCons& n) -> StreamProgPtr {
            return sp_cons(n.head, instantiate_template(n.tail.prog, hole));
          },
          [&](const SZipWith& n) -> StreamProgPtr {
            return sp_zipwith(n.op, instantiate_template(n.left, hole),
                              instantiate_template(n.right, hole));
          },
          [&](const SMap& n) -> StreamProgPtr {
            return sp_map(n.op, instantiate_template(n.arg, hole));
          },
          [&](const SMerge& n) -> StreamProgPtr {
            return sp_merge(instantiate_template(n.left, hole),
                            instantiate_template(n.right, hole));
          },
          [&](const SUserFun& n) -> StreamProgPtr {
            return sp_userfun(n.fn, instantiate_template(n.arg, hole));
          },
          [&](const SEmbed&) -> StreamProgPtr { return tpl; },
          [&](const SRef&) -> StreamProgPtr { return tpl; },
          [&](const SRefAt&) -> StreamProgPtr { return tpl; },
          [&](const STailHole&) -> StreamProgPtr { return hole; },
      },
      tpl->node);
}

// Advances the memo chain of `name` until element `index` is known.
const Value& chain_head(const std::string& name, std::uint64_t index, const DefEnv& env,
                        EvalSession& sess);

StreamWhnf whnf_impl(const StreamProgPtr& p, const DefEnv& env, EvalSession& sess) {
  sess.tick();
  EvalSession::DepthGuard guard(sess);
  return std::visit(
      overloaded{
          [&](const SCons& n) -> StreamWhnf { return {n.head, n.tail.prog}; },
          [&](const SZipWith& n) -> StreamWhnf {
            StreamWhnf a = whnf_impl(n.left, env, sess);
            StreamWhnf b = whnf_impl(n.right, env, sess);
            return zipwith_whnf(n.op, a, b, sess);
          },
          [&](const SMap& n) -> StreamWhnf {
            StreamWhnf a = whnf_impl(n.arg, env, sess);
            return {sess.un(n.op, a.head), sp_map(n.op, a.tail)};
          },
          [&](const SMerge& n) -> StreamWhnf {
            StreamWhnf a = whnf_impl(n.left, env, sess);
            StreamWhnf b = whnf_impl(n.right, env, sess);
            return merge_whnf(a, b);
          },
          [&](const SUserFun& n) -> StreamWhnf {
            const WhnfRule* rule = env.find_rule(n.fn);
            if (!rule) fail(ErrKind::UnresolvedRef, "unregistered function '" + n.fn + "'");
            StreamWhnf a = whnf_impl(n.arg, env, sess);
            return {sess.un(rule->head_op, a.head),
                    instantiate_template(rule->tail_template, a.tail)};
          },
          [&](const SEmbed& n) -> StreamWhnf {
            return {n.stream.head(), sp_embed(n.stream.tail())};
          },
          [&](const SRef& n) -> StreamWhnf {
            if (!env.find_def(n.name))
              fail(ErrKind::UnresolvedRef, "unresolved reference '" + n.name + "'");
            if (sess.mode() == EvalMode::Memoized) {
              Value h = chain_head(n.name, 0, env, sess);
              return {h, sp_refat(n.name, 1)};
            }
            // Iterative unfolding so reference cycles burn fuel instead of
            // C++ stack.
            StreamProgPtr cur = *env.find_def(n.name);
            while (const SRef* r = std::get_if<SRef>(&cur->node)) {
              sess.tick();
              const StreamProgPtr* next = env.find_def(r->name);
              if (!next) fail(ErrKind::UnresolvedRef, "unresolved reference '" + r->name + "'");
              cur = *next;
            }
            return whnf_impl(cur, env, sess);
          },
          [&](const SRefAt& n) -> StreamWhnf {
            Value h = chain_head(n.name, n.index, env, sess);
            return {h, sp_refat(n.name, n.index + 1)};
          },
          [&](const STailHole&) -> StreamWhnf {
            fail(ErrKind::Internal, "whnf of an uninstantiated rule template");
          },
      },
      p->node);
}

const Value& chain_head(const std::string& name, std::uint64_t index, const DefEnv& env,
                        EvalSession& sess) {
  if (!sess.stream_memo) sess.stream_memo = std::make_shared<StreamMemo>();
  StreamMemo::Chain& chain = sess.stream_memo->chains[name];
  if (!chain.next && chain.heads.empty()) {
    const StreamProgPtr* body = env.find_def(name);
    if (!body) fail(ErrKind::UnresolvedRef, "unresolved reference '" + name + "'");
    chain.next = *body;
  }
  if (index < chain.heads.size()) return chain.heads[index];
  if (chain.advancing)
    fail(ErrKind::FuelExhausted,
         "definition '" + name + "' demands its own element " + std::to_string(index) +
             " before producing it");
  chain.advancing = true;
  while (chain.heads.size() <= index) {
    StreamWhnf w = whnf_impl(chain.next, env, sess);
    chain.heads.push_back(w.head);
    chain.next = w.tail;
  }
  chain.advancing = false;
  return chain.heads[index];
}

}  // namespace

StreamWhnf whnf(const StreamProgPtr& p, const DefEnv& env, EvalSession& sess) {
  return whnf_impl(p, env, sess);
}

StreamWhnf zipwith_whnf(BinOp op, const StreamWhnf& a, const StreamWhnf& b, EvalSession& sess) {
  return {sess.bin(op, a.head, b.head), sp_zipwith(op, a.tail, b.tail)};
}

StreamWhnf merge_whnf(const StreamWhnf& a, const StreamWhnf& b) {
  if (a.head == b.head) return {a.head, sp_merge(a.tail, b.tail)};
  if (a.head < b.head) return {a.head, sp_merge(a.tail, sp_cons(b.head, b.tail))};
  return {b.head, sp_merge(sp_cons(a.head, a.tail), b.tail)};
}

namespace {

Stream interpret_from(StreamProgPtr p, std::shared_ptr<const DefEnv> env,
                      std::shared_ptr<EvalSession> sess) {
  sess->begin_element();
  StreamWhnf w = whnf(p, *env, *sess);
  StreamProgPtr tail = w.tail;
  bool memo = sess->mode() == EvalMode::Memoized;
  return Stream::make(
      w.head, [tail, env, sess] { return interpret_from(tail, env, sess); }, memo);
}

}  // namespace

Stream interpret(StreamProgPtr p, std::shared_ptr<const DefEnv> env,
                 std::shared_ptr<EvalSession> sess) {
  return interpret_from(std::move(p), std::move(env), std::move(sess));
}

StreamProgPtr embed_stream(Stream s) { return sp_embed(std::move(s)); }

StreamProgPtr subst_ref(const StreamProgPtr& body, const std::string& name,
                        const StreamProgPtr& replacement) {
  return std::visit(
      overloaded{
          [&](const SCons& n) -> StreamProgPtr {
            return sp_cons(n.head, subst_ref(n.tail.prog, name, replacement));
          },
          [&](const SZipWith& n) -> StreamProgPtr {
            return sp_zipwith(n.op, subst_ref(n.left, name, replacement),
                              subst_ref(n.right, name, replacement));
          },
          [&](const SMap& n) -> StreamProgPtr {
            return sp_map(n.op, subst_ref(n.arg, name, replacement));
          },
          [&](const SMerge& n) -> StreamProgPtr {
            return sp_merge(subst_ref(n.left, name, replacement),
                            subst_ref(n.right, name, replacement));
          },
          [&](const SUserFun& n) -> StreamProgPtr {
            return sp_userfun(n.fn, subst_ref(n.arg, name, replacement));
          },
          [&](const SEmbed&) -> StreamProgPtr { return body; },
          [&](const SRef& n) -> StreamProgPtr {
            return n.name == name ? replacement : body;
          },
          [&](const SRefAt&) -> StreamProgPtr { return body; },
          [&](const STailHole&) -> StreamProgPtr { return body; },
      },
      body->node);
}

std::string to_text(const StreamProgPtr& p) {
  return std::visit(
      overloaded{
          [&](const SCons& n) {
            return to_string(n.head) + " :: delay (" + to_text(n.tail.prog) + ")";
          },
          [&](const SZipWith& n) {
            return "zipWith " + bin_op_name(n.op) + " (" + to_text(n.left) + ") (" +
                   to_text(n.right) + ")";
          },
          [&](const SMap& n) { return "map " + un_op_name(n.op) + " (" + to_text(n.arg) + ")"; },
          [&](const SMerge& n) {
            return "merge (" + to_text(n.left) + ") (" + to_text(n.right) + ")";
          },
          [&](const SUserFun& n) { return n.fn + " (" + to_text(n.arg) + ")"; },
          [&](const SEmbed&) { return std::string("<stream>"); },
          [&](const SRef& n) { return n.name; },
          [&](const SRefAt& n) { return n.name + "@" + std::to_string(n.index); },
          [&](const STailHole&) { return std::string("<hole>"); },
      },
      p->node);
}

}  // namespace corec
