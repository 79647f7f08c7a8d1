#include "corec/universe_lang.hpp"

#include <atomic>

namespace corec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

UCodePtr mkc(UCode c) { return std::make_shared<const UCode>(std::move(c)); }

}  // namespace

UCodePtr uc_tree(UCodePtr a) { return mkc({UCode::K::Tree, std::move(a), nullptr}); }
UCodePtr uc_stream(UCodePtr a) { return mkc({UCode::K::Stream, std::move(a), nullptr}); }
UCodePtr uc_prod(UCodePtr a, UCodePtr b) {
  return mkc({UCode::K::Prod, std::move(a), std::move(b)});
}
UCodePtr uc_atom_elem() {
  static UCodePtr c = mkc({UCode::K::AtomElem, nullptr, nullptr});
  return c;
}
UCodePtr uc_atom_stream() {
  static UCodePtr c = mkc({UCode::K::AtomStream, nullptr, nullptr});
  return c;
}

bool code_equal(const UCodePtr& a, const UCodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->k != b->k) return false;
  switch (a->k) {
    case UCode::K::Tree:
    case UCode::K::Stream:
      return code_equal(a->a, b->a);
    case UCode::K::Prod:
      return code_equal(a->a, b->a) && code_equal(a->b, b->b);
    case UCode::K::AtomElem:
    case UCode::K::AtomStream:
      return true;
  }
  return false;
}

std::string code_text(const UCodePtr& c) {
  if (!c) return "?";
  switch (c->k) {
    case UCode::K::Tree: return "tree(" + code_text(c->a) + ")";
    case UCode::K::Stream: return "stream(" + code_text(c->a) + ")";
    case UCode::K::Prod: return "(" + code_text(c->a) + " x " + code_text(c->b) + ")";
    case UCode::K::AtomElem: return "elem";
    case UCode::K::AtomStream: return "hoststream";
  }
  return "?";
}

namespace {

void require_code(bool ok, const std::string& what) {
  if (!ok) fail(ErrKind::CodeMismatch, what);
}

UWhnfPtr mkw(UCodePtr code, decltype(UWhnf::node) node) {
  return std::make_shared<const UWhnf>(UWhnf{std::move(code), std::move(node)});
}

UProgPtr mkp(UCodePtr code, decltype(UProg::node) node) {
  return std::make_shared<const UProg>(UProg{std::move(code), std::move(node)});
}

}  // namespace

UWhnfPtr uw_leaf(UCodePtr elem) { return mkw(uc_tree(std::move(elem)), WLeaf{}); }

UWhnfPtr uw_node(UDelayed left, UWhnfPtr label, UDelayed right) {
  UCodePtr tree_code = uc_tree(label->code);
  require_code(code_equal(left.prog->code, tree_code), "node: left subtree code mismatch");
  require_code(code_equal(right.prog->code, tree_code), "node: right subtree code mismatch");
  return mkw(tree_code, WNode{std::move(left), std::move(label), std::move(right)});
}

UWhnfPtr uw_cons(UWhnfPtr head, UDelayed tail) {
  UCodePtr stream_code = uc_stream(head->code);
  require_code(code_equal(tail.prog->code, stream_code), "cons: tail code mismatch");
  return mkw(stream_code, WConsU{std::move(head), std::move(tail)});
}

UWhnfPtr uw_pair(UWhnfPtr a, UWhnfPtr b) {
  UCodePtr code = uc_prod(a->code, b->code);
  return mkw(std::move(code), WPairU{std::move(a), std::move(b)});
}

UWhnfPtr uw_atom_elem(Value v) { return mkw(uc_atom_elem(), WAtomElem{v}); }
UWhnfPtr uw_atom_stream(Stream s) { return mkw(uc_atom_stream(), WAtomStream{std::move(s)}); }

UProgPtr up_done(UWhnfPtr w) {
  UCodePtr code = w->code;
  return mkp(std::move(code), PDone{std::move(w)});
}

UProgPtr up_fst(UProgPtr p) {
  require_code(p->code->k == UCode::K::Prod, "fst needs a product code");
  UCodePtr code = p->code->a;
  return mkp(std::move(code), PFst{std::move(p)});
}

UProgPtr up_snd(UProgPtr p) {
  require_code(p->code->k == UCode::K::Prod, "snd needs a product code");
  UCodePtr code = p->code->b;
  return mkp(std::move(code), PSnd{std::move(p)});
}

UProgPtr up_lab(InfTree t, UProgPtr labels) {
  require_code(code_equal(labels->code, uc_stream(uc_atom_stream())),
               "lab needs a stream of host streams, got " + code_text(labels->code));
  UCodePtr code = uc_prod(uc_tree(uc_atom_elem()), uc_stream(uc_atom_stream()));
  return mkp(std::move(code), PLab{std::move(t), std::move(labels)});
}

UProgPtr up_ref(std::string name, UCodePtr code) {
  return mkp(std::move(code), PRefU{std::move(name)});
}

void UDefEnv::add_def(const std::string& name, UProgPtr body) { defs_[name] = std::move(body); }

const UProgPtr* UDefEnv::find_def(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

UWhnfPtr fst_whnf(const UWhnfPtr& w) {
  const WPairU* p = std::get_if<WPairU>(&w->node);
  if (!p) fail(ErrKind::CodeMismatch, "fst of a non-pair whnf");
  return p->first;
}

UWhnfPtr snd_whnf(const UWhnfPtr& w) {
  const WPairU* p = std::get_if<WPairU>(&w->node);
  if (!p) fail(ErrKind::CodeMismatch, "snd of a non-pair whnf");
  return p->second;
}

UWhnfPtr lab_whnf(const InfTree& t, const UWhnfPtr& bss) {
  const WConsU* cell = std::get_if<WConsU>(&bss->node);
  if (!cell) fail(ErrKind::CodeMismatch, "lab needs a cons of label streams");
  if (t.is_leaf()) return uw_pair(uw_leaf(uc_atom_elem()), bss);
  const WAtomStream* head = std::get_if<WAtomStream>(&cell->head->node);
  if (!head) fail(ErrKind::CodeMismatch, "lab needs host streams as level labels");
  Value b = head->s.head();
  Stream bs_rest = head->s.tail();
  UProgPtr x = up_lab(t.left(), cell->tail.prog);
  UProgPtr y = up_lab(t.right(), up_snd(x));
  return uw_pair(uw_node(UDelayed{up_fst(x)}, uw_atom_elem(b), UDelayed{up_fst(y)}),
                 uw_cons(uw_atom_stream(bs_rest), UDelayed{up_snd(y)}));
}

UWhnfPtr whnf_u(const UProgPtr& p, const UDefEnv& env, EvalSession& sess) {
  sess.tick();
  EvalSession::DepthGuard guard(sess);
  return std::visit(
      overloaded{
          [&](const PDone& n) -> UWhnfPtr { return n.w; },
          [&](const PFst& n) -> UWhnfPtr { return fst_whnf(whnf_u(n.p, env, sess)); },
          [&](const PSnd& n) -> UWhnfPtr { return snd_whnf(whnf_u(n.p, env, sess)); },
          [&](const PLab& n) -> UWhnfPtr {
            return lab_whnf(n.t, whnf_u(n.labels, env, sess));
          },
          [&](const PRefU& n) -> UWhnfPtr {
            const UProgPtr* body = env.find_def(n.name);
            if (!body) fail(ErrKind::UnresolvedRef, "unresolved reference '" + n.name + "'");
            return whnf_u(*body, env, sess);
          },
      },
      p->node);
}

namespace {

UValuePtr mkv(UCodePtr code, decltype(UValue::v) v) {
  return std::make_shared<const UValue>(UValue{std::move(code), std::move(v)});
}

UValuePtr interp_whnf(const UWhnfPtr& w, std::shared_ptr<const UDefEnv> env,
                      std::shared_ptr<EvalSession> sess);

UValuePtr interp_prog(const UProgPtr& p, std::shared_ptr<const UDefEnv> env,
                      std::shared_ptr<EvalSession> sess) {
  sess->begin_element();
  return interp_whnf(whnf_u(p, *env, *sess), env, sess);
}

BasicInfTree<UValuePtr> value_tree(const UValuePtr& v) {
  const auto* t = std::get_if<BasicInfTree<UValuePtr>>(&v->v);
  if (!t) fail(ErrKind::CodeMismatch, "expected a tree value");
  return *t;
}

BasicStream<UValuePtr> value_stream(const UValuePtr& v) {
  const auto* s = std::get_if<BasicStream<UValuePtr>>(&v->v);
  if (!s) fail(ErrKind::CodeMismatch, "expected a stream value");
  return *s;
}

UValuePtr interp_whnf(const UWhnfPtr& w, std::shared_ptr<const UDefEnv> env,
                      std::shared_ptr<EvalSession> sess) {
  return std::visit(
      overloaded{
          [&](const WLeaf&) -> UValuePtr {
            return mkv(w->code, BasicInfTree<UValuePtr>::leaf());
          },
          [&](const WNode& n) -> UValuePtr {
            UProgPtr l = n.left.prog, r = n.right.prog;
            auto tree = BasicInfTree<UValuePtr>::node(
                Lazy<BasicInfTree<UValuePtr>>(
                    [l, env, sess] { return value_tree(interp_prog(l, env, sess)); }),
                interp_whnf(n.label, env, sess),
                Lazy<BasicInfTree<UValuePtr>>(
                    [r, env, sess] { return value_tree(interp_prog(r, env, sess)); }));
            return mkv(w->code, std::move(tree));
          },
          [&](const WConsU& n) -> UValuePtr {
            UProgPtr t = n.tail.prog;
            auto stream = BasicStream<UValuePtr>::make(
                interp_whnf(n.head, env, sess),
                [t, env, sess] { return value_stream(interp_prog(t, env, sess)); });
            return mkv(w->code, std::move(stream));
          },
          [&](const WPairU& n) -> UValuePtr {
            return mkv(w->code, std::make_pair(interp_whnf(n.first, env, sess),
                                               interp_whnf(n.second, env, sess)));
          },
          [&](const WAtomElem& n) -> UValuePtr { return mkv(w->code, n.v); },
          [&](const WAtomStream& n) -> UValuePtr { return mkv(w->code, n.s); },
      },
      w->node);
}

}  // namespace

UValuePtr interpret_u(const UProgPtr& p, std::shared_ptr<const UDefEnv> env,
                      std::shared_ptr<EvalSession> sess) {
  return interp_prog(p, std::move(env), std::move(sess));
}

namespace {

InfTree as_value_tree(const BasicInfTree<UValuePtr>& t) {
  if (t.is_leaf()) return InfTree::leaf();
  const Value* label = std::get_if<Value>(&t.label()->v);
  if (!label) fail(ErrKind::CodeMismatch, "tree labels are not plain elements");
  Value v = *label;
  return InfTree::node(Lazy<InfTree>([t] { return as_value_tree(t.left()); }), v,
                       Lazy<InfTree>([t] { return as_value_tree(t.right()); }));
}

}  // namespace

InfTree uvalue_as_tree(const UValuePtr& v) { return as_value_tree(value_tree(v)); }

InfTree label(const InfTree& t, Stream bs) {
  static std::atomic<std::uint64_t> counter{0};
  std::string name = "label'" + std::to_string(counter.fetch_add(1));
  UCodePtr code = uc_prod(uc_tree(uc_atom_elem()), uc_stream(uc_atom_stream()));
  auto env = std::make_shared<UDefEnv>();
  UProgPtr self = up_ref(name, code);
  env->add_def(name, up_lab(t, up_done(uw_cons(uw_atom_stream(std::move(bs)),
                                               UDelayed{up_snd(self)}))));
  auto sess = std::make_shared<EvalSession>(EvalMode::Naive);
  return uvalue_as_tree(interpret_u(up_fst(self), env, sess));
}

bool check_label_correct(const FinTree& t, Stream bs) {
  InfTree original = tree_from_fin(t);
  InfTree relabelled = label(original, bs);
  for (std::size_t d = 0; d <= t.height(); ++d)
    if (!tree_truncate(original, d).same_shape(tree_truncate(relabelled, d))) return false;
  std::size_t count = t.node_count();
  std::vector<Value> labels = colist_prefix(bfs_labels(relabelled), count + 1);
  return labels.size() == count && labels == take_prefix(bs, count);
}

}  // namespace corec
