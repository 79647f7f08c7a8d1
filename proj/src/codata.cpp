#include "corec/codata.hpp"

#include <cctype>

namespace corec {

// -- FinTree ------------------------------------------------------------------

FinTree FinTree::node(FinTree left, Value label, FinTree right) {
  return FinTree(std::make_shared<Node>(Node{std::move(left), label, std::move(right)}));
}

const Value& FinTree::label() const {
  if (!node_) fail(ErrKind::Internal, "label of a finite leaf");
  return node_->label;
}

const FinTree& FinTree::left() const {
  if (!node_) fail(ErrKind::Internal, "left of a finite leaf");
  return node_->left;
}

const FinTree& FinTree::right() const {
  if (!node_) fail(ErrKind::Internal, "right of a finite leaf");
  return node_->right;
}

std::size_t FinTree::node_count() const {
  if (!node_) return 0;
  return 1 + node_->left.node_count() + node_->right.node_count();
}

std::size_t FinTree::height() const {
  if (!node_) return 0;
  return 1 + std::max(node_->left.height(), node_->right.height());
}

bool FinTree::same_shape(const FinTree& o) const {
  if (is_leaf() != o.is_leaf()) return false;
  if (is_leaf()) return true;
  return node_->left.same_shape(o.node_->left) && node_->right.same_shape(o.node_->right);
}

bool operator==(const FinTree& a, const FinTree& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return true;
  return a.label() == b.label() && a.left() == b.left() && a.right() == b.right();
}

std::string FinTree::to_text() const {
  if (is_leaf()) return "leaf";
  return "(" + left().to_text() + " " + to_string(label()) + " " + right().to_text() + ")";
}

namespace {

struct TreeParser {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  [[noreturn]] void error(const std::string& msg) {
    fail(ErrKind::ParseError, "tree literal: " + msg + " at offset " + std::to_string(i));
  }

  bool eat(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  Value value() {
    skip_ws();
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || std::isdigit(static_cast<unsigned char>(s[i])))) {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      return Value::integer(std::stoll(s.substr(start, i - start)));
    }
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    std::string word = s.substr(start, i - start);
    if (word == "true") return Value::boolean(true);
    if (word == "false") return Value::boolean(false);
    error("expected a label");
  }

  FinTree tree() {
    skip_ws();
    if (eat('(')) {
      FinTree l = tree();
      Value x = value();
      FinTree r = tree();
      if (!eat(')')) error("expected ')'");
      return FinTree::node(std::move(l), x, std::move(r));
    }
    std::size_t start = i;
    while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    if (s.substr(start, i - start) == "leaf") return FinTree::leaf();
    i = start;
    error("expected 'leaf' or '('");
  }
};

}  // namespace

FinTree FinTree::parse(const std::string& text) {
  TreeParser p{text};
  FinTree t = p.tree();
  p.skip_ws();
  if (p.i != text.size()) p.error("trailing input");
  return t;
}

// -- SP -----------------------------------------------------------------------

SP::ExprPtr SP::Expr::constant(Value v) {
  auto e = std::make_shared<Expr>();
  e->k = K::Const;
  e->c = v;
  return e;
}

SP::ExprPtr SP::Expr::input(std::size_t back) {
  auto e = std::make_shared<Expr>();
  e->k = K::Input;
  e->back = back;
  return e;
}

SP::ExprPtr SP::Expr::bin(BinOp op, ExprPtr x, ExprPtr y) {
  auto e = std::make_shared<Expr>();
  e->k = K::Bin;
  e->bop = op;
  e->a = std::move(x);
  e->b = std::move(y);
  return e;
}

SP::ExprPtr SP::Expr::un(UnOp op, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->k = K::Un;
  e->uop = op;
  e->a = std::move(x);
  return e;
}

SP::RecipePtr SP::Recipe::emit(ExprPtr out, RecipePtr next) {
  auto r = std::make_shared<Recipe>();
  r->k = K::Emit;
  r->out = std::move(out);
  r->next = std::move(next);
  return r;
}

SP::RecipePtr SP::Recipe::read(RecipePtr next) {
  auto r = std::make_shared<Recipe>();
  r->k = K::Read;
  r->next = std::move(next);
  return r;
}

SP::RecipePtr SP::Recipe::restart() {
  auto r = std::make_shared<Recipe>();
  r->k = K::Restart;
  return r;
}

namespace {

void validate_expr(const SP::Expr& e, std::size_t reads) {
  switch (e.k) {
    case SP::Expr::K::Const:
      return;
    case SP::Expr::K::Input:
      if (e.back >= reads)
        fail(ErrKind::TypeError, "stream processor output refers to an unread input element");
      return;
    case SP::Expr::K::Bin:
      validate_expr(*e.a, reads);
      validate_expr(*e.b, reads);
      return;
    case SP::Expr::K::Un:
      validate_expr(*e.a, reads);
      return;
  }
}

void validate_recipe(const SP::Recipe& r, std::size_t emits, std::size_t reads) {
  switch (r.k) {
    case SP::Recipe::K::Emit:
      validate_expr(*r.out, reads);
      validate_recipe(*r.next, emits + 1, reads);
      return;
    case SP::Recipe::K::Read:
      validate_recipe(*r.next, emits, reads + 1);
      return;
    case SP::Recipe::K::Restart:
      if (emits == 0)
        fail(ErrKind::TypeError,
             "stream processor restart must be guarded by at least one put");
      return;
  }
}

Value eval_expr(const SP::Expr& e, const std::vector<Value>& env) {
  switch (e.k) {
    case SP::Expr::K::Const:
      return e.c;
    case SP::Expr::K::Input:
      return env[env.size() - 1 - e.back];
    case SP::Expr::K::Bin:
      return apply_bin(e.bop, eval_expr(*e.a, env), eval_expr(*e.b, env));
    case SP::Expr::K::Un:
      return apply_un(e.uop, eval_expr(*e.a, env));
  }
  fail(ErrKind::Internal, "unknown expression");
}

}  // namespace

SP SP::make(RecipePtr root) {
  if (!root) fail(ErrKind::Internal, "null stream processor recipe");
  validate_recipe(*root, 0, 0);
  return SP(root, root, {});
}

SP::SP(RecipePtr root, RecipePtr cur, std::vector<Value> env)
    : root_(std::move(root)), cur_(std::move(cur)), env_(std::move(env)) {
  settle();
}

void SP::settle() {
  while (cur_->k == Recipe::K::Restart) {
    cur_ = root_;
    env_.clear();
  }
}

SP::Kind SP::kind() const {
  return cur_->k == Recipe::K::Emit ? Kind::Put : Kind::Get;
}

Value SP::put_value() const {
  if (kind() != Kind::Put) fail(ErrKind::Internal, "put_value on a get node");
  return eval_expr(*cur_->out, env_);
}

SP SP::put_rest() const {
  if (kind() != Kind::Put) fail(ErrKind::Internal, "put_rest on a get node");
  return SP(root_, cur_->next, env_);
}

SP SP::get_feed(Value consumed) const {
  if (kind() != Kind::Get) fail(ErrKind::Internal, "get_feed on a put node");
  std::vector<Value> env = env_;
  env.push_back(consumed);
  return SP(root_, cur_->next, std::move(env));
}

namespace {

Stream sp_run_from(SP sp, Stream in) {
  while (sp.kind() == SP::Kind::Get) {
    sp = sp.get_feed(in.head());
    in = in.tail();
  }
  Value out = sp.put_value();
  SP rest = sp.put_rest();
  return Stream::make(out, [rest, in] { return sp_run_from(rest, in); });
}

}  // namespace

Stream sp_run(const SP& sp, Stream input) { return sp_run_from(sp, std::move(input)); }

// -- trees --------------------------------------------------------------------

namespace {

Colist bfs_step(std::deque<Lazy<InfTree>> queue) {
  while (!queue.empty()) {
    InfTree t = queue.front().force();
    queue.pop_front();
    if (t.is_leaf()) continue;
    queue.push_back(t.left_lazy());
    queue.push_back(t.right_lazy());
    Value x = t.label();
    auto rest = queue;
    return Colist::cons(x, [rest] { return bfs_step(rest); });
  }
  return Colist::nil();
}

}  // namespace

Colist bfs_labels(const InfTree& t) {
  std::deque<Lazy<InfTree>> q;
  q.push_back(Lazy<InfTree>::ready(t));
  return bfs_step(std::move(q));
}

FinTree tree_truncate(const InfTree& t, std::size_t depth) {
  if (depth == 0 || t.is_leaf()) return FinTree::leaf();
  return FinTree::node(tree_truncate(t.left(), depth - 1), t.label(),
                       tree_truncate(t.right(), depth - 1));
}

InfTree tree_from_fin(const FinTree& t) {
  if (t.is_leaf()) return InfTree::leaf();
  FinTree l = t.left(), r = t.right();
  return InfTree::node(Lazy<InfTree>([l] { return tree_from_fin(l); }), t.label(),
                       Lazy<InfTree>([r] { return tree_from_fin(r); }));
}

InfTree full_tree(Value v) {
  return InfTree::node(Lazy<InfTree>([v] { return full_tree(v); }), v,
                       Lazy<InfTree>([v] { return full_tree(v); }));
}

// -- stream helpers -----------------------------------------------------------

Stream map_stream(std::function<Value(Value)> f, Stream s) {
  return Stream::make(f(s.head()), [f, s] { return map_stream(f, s.tail()); });
}

Stream iterate_stream(std::function<Value(Value)> f, Value x) {
  return Stream::make(x, [f, x] { return iterate_stream(f, f(x)); });
}

namespace {

Stream stream_from_fn_at(const std::function<Value(std::uint64_t)>& f, std::uint64_t i) {
  return Stream::make(f(i), [f, i] { return stream_from_fn_at(f, i + 1); });
}

}  // namespace

Stream stream_from_fn(std::function<Value(std::uint64_t)> f) {
  return stream_from_fn_at(f, 0);
}

Stream repeat_stream(Value v) { return Stream::cyclic(v); }

Stream naturals() {
  return iterate_stream([](Value v) { return Value::integer(v.as_int() + 1); },
                        Value::integer(0));
}

}  // namespace corec
