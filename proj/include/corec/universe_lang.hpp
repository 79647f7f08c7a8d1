#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include "corec/codata.hpp"
#include "corec/session.hpp"
#include "corec/value.hpp"

namespace corec {

// Type codes: trees, streams, products, and two atom kinds (plain elements,
// and whole host streams used as labels by the labelling algorithm).
struct UCode;
using UCodePtr = std::shared_ptr<const UCode>;

struct UCode {
  enum class K { Tree, Stream, Prod, AtomElem, AtomStream };
  K k = K::AtomElem;
  UCodePtr a, b;
};

UCodePtr uc_tree(UCodePtr a);
UCodePtr uc_stream(UCodePtr a);
UCodePtr uc_prod(UCodePtr a, UCodePtr b);
UCodePtr uc_atom_elem();
UCodePtr uc_atom_stream();
bool code_equal(const UCodePtr& a, const UCodePtr& b);
std::string code_text(const UCodePtr& c);

struct UProg;
struct UWhnf;
using UProgPtr = std::shared_ptr<const UProg>;
using UWhnfPtr = std::shared_ptr<const UWhnf>;

struct UDelayed {
  UProgPtr prog;
};

struct WLeaf {};
struct WNode {
  UDelayed left;
  UWhnfPtr label;
  UDelayed right;
};
struct WConsU {
  UWhnfPtr head;
  UDelayed tail;
};
struct WPairU {
  UWhnfPtr first, second;
};
struct WAtomElem {
  Value v;
};
struct WAtomStream {
  Stream s;
};

struct UWhnf {
  UCodePtr code;
  std::variant<WLeaf, WNode, WConsU, WPairU, WAtomElem, WAtomStream> node;
};

struct PDone {
  UWhnfPtr w;
};
struct PFst {
  UProgPtr p;
};
struct PSnd {
  UProgPtr p;
};
// The labelling node: a tree to relabel plus a program for the stream of
// label streams (one stream per level, threaded circularly).
struct PLab {
  InfTree t;
  UProgPtr labels;
};
struct PRefU {
  std::string name;
};

struct UProg {
  UCodePtr code;
  std::variant<PDone, PFst, PSnd, PLab, PRefU> node;
};

// Smart constructors; all of them check codes and raise CodeMismatch.
UWhnfPtr uw_leaf(UCodePtr elem);
UWhnfPtr uw_node(UDelayed left, UWhnfPtr label, UDelayed right);
UWhnfPtr uw_cons(UWhnfPtr head, UDelayed tail);
UWhnfPtr uw_pair(UWhnfPtr a, UWhnfPtr b);
UWhnfPtr uw_atom_elem(Value v);
UWhnfPtr uw_atom_stream(Stream s);

UProgPtr up_done(UWhnfPtr w);
UProgPtr up_fst(UProgPtr p);
UProgPtr up_snd(UProgPtr p);
UProgPtr up_lab(InfTree t, UProgPtr labels);
UProgPtr up_ref(std::string name, UCodePtr code);

class UDefEnv {
 public:
  void add_def(const std::string& name, UProgPtr body);
  const UProgPtr* find_def(const std::string& name) const;

 private:
  std::map<std::string, UProgPtr> defs_;
};

UWhnfPtr whnf_u(const UProgPtr& p, const UDefEnv& env, EvalSession& sess);
// Non-recursive: builds programs for the subtrees, never evaluates them.
UWhnfPtr lab_whnf(const InfTree& t, const UWhnfPtr& bss);
UWhnfPtr fst_whnf(const UWhnfPtr& w);
UWhnfPtr snd_whnf(const UWhnfPtr& w);

struct UValue;
using UValuePtr = std::shared_ptr<const UValue>;

struct UValue {
  UCodePtr code;
  std::variant<Value, Stream, std::pair<UValuePtr, UValuePtr>, BasicStream<UValuePtr>,
               BasicInfTree<UValuePtr>>
      v;
};

UValuePtr interpret_u(const UProgPtr& p, std::shared_ptr<const UDefEnv> env,
                      std::shared_ptr<EvalSession> sess);

// Views a value at code tree(atom) as a host tree of plain labels.
InfTree uvalue_as_tree(const UValuePtr& v);

// Circular breadth-first labelling: the resulting tree has the shape of `t`
// with labels drawn from `bs` in level order.
InfTree label(const InfTree& t, Stream bs);

// True iff label(t, bs) preserves the shape of the finite tree `t` at every
// depth and its breadth-first labels are exactly the first node_count
// elements of `bs`.
bool check_label_correct(const FinTree& t, Stream bs);

}  // namespace corec
