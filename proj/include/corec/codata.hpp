#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "corec/error.hpp"
#include "corec/value.hpp"

namespace corec {

// Memoized suspension. force() evaluates at most once.
template <class T>
class Lazy {
  struct State {
    std::function<T()> gen;
    std::shared_ptr<const T> val;
  };
  std::shared_ptr<State> s_;

 public:
  Lazy() = default;
  explicit Lazy(std::function<T()> gen)
      : s_(std::make_shared<State>(State{std::move(gen), nullptr})) {}

  static Lazy ready(T v) {
    Lazy l;
    l.s_ = std::make_shared<State>(State{nullptr, std::make_shared<const T>(std::move(v))});
    return l;
  }

  bool has_value() const { return s_ && s_->val != nullptr; }

  const T& force() const {
    if (!s_) fail(ErrKind::Internal, "forcing an empty suspension");
    if (!s_->val) {
      s_->val = std::make_shared<const T>(s_->gen());
      s_->gen = nullptr;
    }
    return *s_->val;
  }
};

// An infinite stream: an eagerly available head plus a suspended tail.
// Whether tails are cached is chosen by the producer (memoize flag).
// Values are immutable after construction and may move between threads;
// forcing the same suspension from two threads at once is not supported.
template <class T>
class BasicStream {
 public:
  struct Cell;
  using CellPtr = std::shared_ptr<const Cell>;

  BasicStream() = default;

  static BasicStream make(T head, std::function<BasicStream()> tail, bool memoize = true);
  // A one-cell loop: tail() is the stream itself.
  static BasicStream cyclic(T head);
  // Cycle through the given values forever; cells are shared, so dropping
  // values.size() elements returns to the same cell.
  static BasicStream cycle(std::vector<T> values);

  bool valid() const { return cell_ != nullptr; }
  const T& head() const;
  BasicStream tail() const;
  bool same_cell(const BasicStream& o) const { return cell_ == o.cell_; }

 private:
  explicit BasicStream(CellPtr c) : cell_(std::move(c)) {}
  CellPtr cell_;
};

template <class T>
struct BasicStream<T>::Cell {
  T head;
  mutable std::function<BasicStream<T>()> gen;
  mutable CellPtr cached;
  bool memo = true;
};

template <class T>
BasicStream<T> BasicStream<T>::make(T head, std::function<BasicStream()> tail, bool memoize) {
  auto c = std::make_shared<Cell>();
  c->head = std::move(head);
  c->gen = std::move(tail);
  c->memo = memoize;
  return BasicStream(std::move(c));
}

template <class T>
BasicStream<T> BasicStream<T>::cyclic(T head) {
  auto c = std::make_shared<Cell>();
  c->head = std::move(head);
  c->memo = true;
  std::weak_ptr<const Cell> w = c;
  c->gen = [w] { return BasicStream(w.lock()); };
  return BasicStream(std::move(c));
}

template <class T>
BasicStream<T> BasicStream<T>::cycle(std::vector<T> values) {
  if (values.empty()) fail(ErrKind::Internal, "cycle of no values");
  std::vector<std::shared_ptr<Cell>> cells;
  cells.reserve(values.size());
  for (auto& v : values) {
    auto c = std::make_shared<Cell>();
    c->head = std::move(v);
    c->memo = true;
    cells.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::weak_ptr<const Cell> w = cells[(i + 1) % cells.size()];
    cells[i]->gen = [w] { return BasicStream(w.lock()); };
  }
  // Keep the whole ring alive from any entry point.
  auto ring = std::make_shared<std::vector<std::shared_ptr<Cell>>>(cells);
  for (auto& c : *ring) {
    auto old = std::move(c->gen);
    c->gen = [old, ring] { return old(); };
  }
  return BasicStream(CellPtr(cells[0]));
}

template <class T>
const T& BasicStream<T>::head() const {
  if (!cell_) fail(ErrKind::Internal, "head of an empty stream handle");
  return cell_->head;
}

template <class T>
BasicStream<T> BasicStream<T>::tail() const {
  if (!cell_) fail(ErrKind::Internal, "tail of an empty stream handle");
  if (cell_->cached) return BasicStream(cell_->cached);
  BasicStream t = cell_->gen();
  if (!t.cell_) fail(ErrKind::Internal, "stream tail produced no cell");
  if (cell_->memo) {
    cell_->cached = t.cell_;
    cell_->gen = nullptr;
  }
  return t;
}

using Stream = BasicStream<Value>;

// Potentially infinite list: nil, or a head plus a suspended colist.
template <class T>
class BasicColist {
 public:
  struct Cell;
  using CellPtr = std::shared_ptr<const Cell>;

  BasicColist() = default;
  static BasicColist nil() { return {}; }
  static BasicColist cons(T head, std::function<BasicColist()> tail, bool memoize = true);

  bool is_nil() const { return cell_ == nullptr; }
  const T& head() const;
  BasicColist tail() const;

 private:
  explicit BasicColist(CellPtr c) : cell_(std::move(c)) {}
  CellPtr cell_;
};

template <class T>
struct BasicColist<T>::Cell {
  T head;
  mutable std::function<BasicColist<T>()> gen;
  mutable CellPtr cached;
  mutable bool have_cached = false;
  bool memo = true;
};

template <class T>
BasicColist<T> BasicColist<T>::cons(T head, std::function<BasicColist()> tail, bool memoize) {
  auto c = std::make_shared<Cell>();
  c->head = std::move(head);
  c->gen = std::move(tail);
  c->memo = memoize;
  return BasicColist(std::move(c));
}

template <class T>
const T& BasicColist<T>::head() const {
  if (!cell_) fail(ErrKind::Internal, "head of nil");
  return cell_->head;
}

template <class T>
BasicColist<T> BasicColist<T>::tail() const {
  if (!cell_) fail(ErrKind::Internal, "tail of nil");
  if (cell_->have_cached) return BasicColist(cell_->cached);
  BasicColist t = cell_->gen();
  if (cell_->memo) {
    cell_->cached = t.cell_;
    cell_->have_cached = true;
    cell_->gen = nullptr;
  }
  return t;
}

using Colist = BasicColist<Value>;

// Potentially infinite binary tree with suspended children.
template <class T>
class BasicInfTree {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  BasicInfTree() = default;
  static BasicInfTree leaf() { return {}; }
  static BasicInfTree node(Lazy<BasicInfTree> left, T label, Lazy<BasicInfTree> right);

  bool is_leaf() const { return node_ == nullptr; }
  const T& label() const;
  BasicInfTree left() const;
  BasicInfTree right() const;
  Lazy<BasicInfTree> left_lazy() const;
  Lazy<BasicInfTree> right_lazy() const;

 private:
  explicit BasicInfTree(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;
};

template <class T>
struct BasicInfTree<T>::Node {
  Lazy<BasicInfTree<T>> left;
  T label;
  Lazy<BasicInfTree<T>> right;
};

template <class T>
BasicInfTree<T> BasicInfTree<T>::node(Lazy<BasicInfTree> left, T label, Lazy<BasicInfTree> right) {
  auto n = std::make_shared<Node>(Node{std::move(left), std::move(label), std::move(right)});
  return BasicInfTree(std::move(n));
}

template <class T>
const T& BasicInfTree<T>::label() const {
  if (!node_) fail(ErrKind::Internal, "label of a leaf");
  return node_->label;
}

template <class T>
BasicInfTree<T> BasicInfTree<T>::left() const {
  if (!node_) fail(ErrKind::Internal, "left of a leaf");
  return node_->left.force();
}

template <class T>
BasicInfTree<T> BasicInfTree<T>::right() const {
  if (!node_) fail(ErrKind::Internal, "right of a leaf");
  return node_->right.force();
}

template <class T>
Lazy<BasicInfTree<T>> BasicInfTree<T>::left_lazy() const {
  if (!node_) fail(ErrKind::Internal, "left of a leaf");
  return node_->left;
}

template <class T>
Lazy<BasicInfTree<T>> BasicInfTree<T>::right_lazy() const {
  if (!node_) fail(ErrKind::Internal, "right of a leaf");
  return node_->right;
}

using InfTree = BasicInfTree<Value>;

// Finite tree value, e.g. the result of a depth truncation.
class FinTree {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  FinTree() = default;
  static FinTree leaf() { return {}; }
  static FinTree node(FinTree left, Value label, FinTree right);

  bool is_leaf() const { return node_ == nullptr; }
  const Value& label() const;
  const FinTree& left() const;
  const FinTree& right() const;

  std::size_t node_count() const;
  std::size_t height() const;
  bool same_shape(const FinTree& o) const;

  std::string to_text() const;                      // "leaf" | "(l X r)"
  static FinTree parse(const std::string& text);    // inverse of to_text

  friend bool operator==(const FinTree& a, const FinTree& b);

 private:
  explicit FinTree(NodePtr n) : node_(std::move(n)) {}
  NodePtr node_;
};

struct FinTree::Node {
  FinTree left;
  Value label;
  FinTree right;
};

// Stream processor: put emits, get consumes one input element. Values are
// positions inside a finite recipe; get continuations are decision recipes
// over the elements consumed since the last restart, so chains of
// consecutive gets are finite by construction.
class SP {
 public:
  struct Expr;
  struct Recipe;
  using ExprPtr = std::shared_ptr<const Expr>;
  using RecipePtr = std::shared_ptr<const Recipe>;

  struct Expr {
    enum class K { Const, Input, Bin, Un };
    K k = K::Const;
    Value c;
    std::size_t back = 0;  // Input: 0 is the most recently consumed element
    BinOp bop = BinOp::Add;
    UnOp uop;
    ExprPtr a, b;

    static ExprPtr constant(Value v);
    static ExprPtr input(std::size_t back);
    static ExprPtr bin(BinOp op, ExprPtr x, ExprPtr y);
    static ExprPtr un(UnOp op, ExprPtr x);
  };

  struct Recipe {
    enum class K { Emit, Read, Restart };
    K k = K::Restart;
    ExprPtr out;     // Emit
    RecipePtr next;  // Emit, Read

    static RecipePtr emit(ExprPtr out, RecipePtr next);
    static RecipePtr read(RecipePtr next);
    static RecipePtr restart();
  };

  // Validates the recipe: every leaf is a restart, every restart sits under
  // at least one emit, and input references are bound by enclosing reads.
  static SP make(RecipePtr root);

  enum class Kind { Put, Get };
  Kind kind() const;
  Value put_value() const;
  SP put_rest() const;
  SP get_feed(Value consumed) const;

 private:
  SP(RecipePtr root, RecipePtr cur, std::vector<Value> env);
  void settle();

  RecipePtr root_;
  RecipePtr cur_;
  std::vector<Value> env_;
};

// -- kernel operations -------------------------------------------------------

template <class T>
std::vector<T> take_prefix(BasicStream<T> s, std::size_t n) {
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(s.head());
    if (i + 1 < n) s = s.tail();
  }
  return out;
}

template <class T>
bool bisimilar_to_depth(const BasicStream<T>& a, const BasicStream<T>& b, std::size_t n) {
  return take_prefix(a, n) == take_prefix(b, n);
}

// Collects at most `limit` elements (all of them when the colist is finite
// and shorter).
template <class T>
std::vector<T> colist_prefix(BasicColist<T> l, std::size_t limit) {
  std::vector<T> out;
  while (!l.is_nil() && out.size() < limit) {
    out.push_back(l.head());
    if (out.size() == limit) break;
    l = l.tail();
  }
  return out;
}

Stream sp_run(const SP& sp, Stream input);

// Breadth-first (level-order) label sequence; nil exactly for the leaf,
// finite exactly for finite trees.
Colist bfs_labels(const InfTree& t);

FinTree tree_truncate(const InfTree& t, std::size_t depth);
InfTree tree_from_fin(const FinTree& t);
// Infinite complete binary tree, every node labelled `v`.
InfTree full_tree(Value v);

Stream map_stream(std::function<Value(Value)> f, Stream s);
Stream iterate_stream(std::function<Value(Value)> f, Value x);
Stream stream_from_fn(std::function<Value(std::uint64_t)> f);
Stream repeat_stream(Value v);
Stream naturals();

}  // namespace corec
