#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corec/codata.hpp"
#include "corec/parser.hpp"
#include "corec/proof_lang.hpp"
#include "corec/universe_lang.hpp"

using namespace corec;

namespace {

constexpr const char* kUsage =
    R"(usage: corec <command> [args]

commands:
  check  <file>                                check every definition
  eval   <file> <name> [--n N] [--mode naive|memo] [--fuel F]
  bench  <file> <name> [--n N]                 compare naive/memoized additions
  verify <file> eq <name1> <name2> [--depth D]
  verify <file> fusion <h> <f1> <f2> <x> [--depth D]
  verify <file> unique <equation> <cand1> <cand2> [--depth D]
  verify <file> hyp <prooffile> [--depth D]
  label  <file> <tree-literal> <name>          breadth-first relabelling

exit codes: 0 ok, 1 rejected/refuted, 2 usage or parse error, 3 fuel exhausted
COREC_FUEL overrides the default whnf step budget (1000000 per element).
)";

struct Options {
  std::uint64_t n = 10;
  std::uint64_t depth = 100;
  std::uint64_t fuel = EvalSession::kDefaultFuel;
  EvalMode mode = EvalMode::Naive;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrKind::UsageError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  SourceModule module;
  ModuleEnvs envs;
  GuardReport stream_report;
  ChunkReport chunk_report;

  // nullopt when the definition is fine, otherwise the first reason.
  std::optional<std::string> rejection(const std::string& name) const {
    for (const auto& r : envs.rejections)
      if (r.def == name) return r.message;
    for (const auto& v : stream_report.violations)
      if (v.def == name) return v.message();
    for (const auto& d : chunk_report.diags)
      if (d.def == name) return d.message();
    return std::nullopt;
  }

  // The target plus everything it references, transitively.
  std::set<std::string> dependencies(const std::string& name) const {
    std::set<std::string> seen;
    std::vector<std::string> todo{name};
    std::map<std::string, const SourceDef*> by_name;
    for (const auto& d : module.defs) by_name[d.name] = &d;
    while (!todo.empty()) {
      std::string cur = todo.back();
      todo.pop_back();
      if (!seen.insert(cur).second) continue;
      auto it = by_name.find(cur);
      if (it == by_name.end()) continue;
      std::vector<std::string> names;
      collect(it->second->body, names);
      for (auto& n : names) todo.push_back(n);
    }
    return seen;
  }

  static void collect(const SurfaceExprPtr& e, std::vector<std::string>& out);
};

void Loaded::collect(const SurfaceExprPtr& e, std::vector<std::string>& out) {
  struct V {
    std::vector<std::string>& out;
    void walk(const SurfaceExprPtr& e) {
      if (const auto* n = std::get_if<EName>(&e->node)) {
        out.push_back(n->name);
        return;
      }
      if (const auto* n = std::get_if<EConsS>(&e->node)) {
        walk(n->head);
        walk(n->tail);
      } else if (const auto* n = std::get_if<EDelay>(&e->node)) {
        walk(n->arg);
      } else if (const auto* n = std::get_if<EEnd>(&e->node)) {
        walk(n->arg);
      } else if (const auto* n = std::get_if<EZip>(&e->node)) {
        walk(n->left);
        walk(n->right);
      } else if (const auto* n = std::get_if<EMap>(&e->node)) {
        walk(n->arg);
      } else if (const auto* n = std::get_if<ETail>(&e->node)) {
        walk(n->arg);
      } else if (const auto* n = std::get_if<EForget>(&e->node)) {
        walk(n->arg);
      } else if (const auto* n = std::get_if<EEvens>(&e->node)) {
        walk(n->arg);
      } else if (const auto* n = std::get_if<EInterleave>(&e->node)) {
        walk(n->left);
        walk(n->right);
      } else if (const auto* n = std::get_if<EMerge>(&e->node)) {
        walk(n->left);
        walk(n->right);
      }
    }
  } v{out};
  v.walk(e);
}

Loaded load(const std::string& path) {
  Loaded l;
  l.module = parse_module(read_file(path));
  l.envs = elaborate(l.module);
  l.stream_report = check_guarded(*l.envs.stream_env);
  l.chunk_report = check_chunk_typing(*l.envs.chunk_env);
  return l;
}

// Exit 1 when the target or anything it depends on is rejected.
void require_checked(const Loaded& l, const std::string& name) {
  if (!l.envs.lang.count(name)) {
    if (auto r = l.rejection(name)) fail(ErrKind::IndexMismatch, name + ": rejected " + *r);
    fail(ErrKind::UsageError, "unknown definition '" + name + "'");
  }
  for (const std::string& dep : l.dependencies(name))
    if (auto r = l.rejection(dep))
      fail(ErrKind::IndexMismatch, dep + ": rejected " + *r);
}

Stream eval_stream(const Loaded& l, const std::string& name, const Options& opt,
                   std::shared_ptr<EvalSession>& sess_out) {
  auto sess = std::make_shared<EvalSession>(opt.mode, opt.fuel);
  sess_out = sess;
  if (l.envs.lang.at(name) == DefLang::Plain)
    return interpret(sp_ref(name), l.envs.stream_env, sess);
  const ChunkDef* def = l.envs.chunk_env->find_def(name);
  return interpret_chunk(cp_ref(name), def->sig, l.envs.chunk_env, sess);
}

int cmd_check(const Loaded& l) {
  bool any_rejected = false;
  for (const SourceDef& d : l.module.defs) {
    if (auto r = l.rejection(d.name)) {
      std::cout << d.name << ": rejected " << *r << "\n";
      any_rejected = true;
    } else {
      std::cout << d.name << ": ok\n";
    }
  }
  return any_rejected ? 1 : 0;
}

int cmd_eval(const Loaded& l, const std::string& name, const Options& opt) {
  require_checked(l, name);
  std::shared_ptr<EvalSession> sess;
  Stream s = eval_stream(l, name, opt, sess);
  for (std::uint64_t i = 0; i < opt.n; ++i) {
    std::cout << to_string(s.head()) << "\n";
    if (i + 1 < opt.n) s = s.tail();
  }
  std::cerr << "# adds=" << sess->add_count() << " steps=" << sess->whnf_steps() << "\n";
  return 0;
}

int cmd_bench(const Loaded& l, const std::string& name, const Options& opt) {
  require_checked(l, name);
  std::uint64_t counts[2];
  for (EvalMode mode : {EvalMode::Naive, EvalMode::Memoized}) {
    Options o = opt;
    o.mode = mode;
    std::shared_ptr<EvalSession> sess;
    if (opt.n == 0) {
      sess = std::make_shared<EvalSession>(mode, opt.fuel);
    } else {
      Stream s = eval_stream(l, name, o, sess);
      take_prefix(s, opt.n);
    }
    counts[mode == EvalMode::Naive ? 0 : 1] = sess->add_count();
  }
  std::cout << "naive_adds=" << counts[0] << " memo_adds=" << counts[1] << " n=" << opt.n
            << "\n";
  return 0;
}

int report(const ProofOutcome& out) {
  if (out.ok) {
    std::cout << "ok\n";
    return 0;
  }
  std::cout << "refuted at " << out.index << "\n";
  std::cerr << out.message << "\n";
  return 1;
}

// hypothesis proof files: two goal names, then one S-expression
//   (cons X SUB) | (hyp I) | (trans MID L R)
struct SexprParser {
  std::string text;
  std::size_t i = 0;

  void ws() {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  }

  std::string word() {
    ws();
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')')
      ++i;
    if (start == i) fail(ErrKind::ParseError, "proof file: expected a word");
    return text.substr(start, i - start);
  }

  void expect(char c) {
    ws();
    if (i >= text.size() || text[i] != c)
      fail(ErrKind::ParseError, std::string("proof file: expected '") + c + "'");
    ++i;
  }

  HypProofPtr proof() {
    expect('(');
    std::string head = word();
    HypProofPtr result;
    if (head == "cons") {
      std::string lit = word();
      Value x = lit == "true"    ? Value::boolean(true)
                : lit == "false" ? Value::boolean(false)
                                 : Value::integer(std::stoll(lit));
      result = hp_cons(x, proof());
    } else if (head == "hyp") {
      result = hp_hyp(static_cast<std::size_t>(std::stoull(word())));
    } else if (head == "trans") {
      std::string mid = word();
      HypProofPtr left = proof();
      HypProofPtr right = proof();
      result = hp_trans(Desig::named(mid), left, right);
    } else {
      fail(ErrKind::ParseError, "proof file: unknown node '" + head + "'");
    }
    expect(')');
    return result;
  }
};

int cmd_verify(const Loaded& l, const std::vector<std::string>& args, const Options& opt) {
  if (args.empty()) fail(ErrKind::UsageError, "verify needs a subcommand");
  ProofCtx cx(l.envs.stream_env, l.envs.chunk_env);
  const std::string& sub = args[0];

  if (sub == "eq") {
    if (args.size() != 3) fail(ErrKind::UsageError, "verify eq <name1> <name2>");
    for (int k = 1; k <= 2; ++k) require_checked(l, args[k]);
    Desig a = Desig::named(args[1]), b = Desig::named(args[2]);
    return report(proof_check(eq_complete(a, b), a, b, opt.depth, cx));
  }

  if (sub == "fusion") {
    if (args.size() != 5) fail(ErrKind::UsageError, "verify fusion <h> <f1> <f2> <x>");
    auto h = un_op_by_name(args[1]);
    auto f1 = un_op_by_name(args[2]);
    auto f2 = un_op_by_name(args[3]);
    if (!h || !f1 || !f2) fail(ErrKind::UsageError, "unknown operator name");
    Value x = Value::integer(std::stoll(args[4]));
    auto fn = [](UnOp op) { return [op](Value v) { return apply_un(op, v); }; };
    Stream lhs = map_stream(fn(*h), iterate_stream(fn(*f1), x));
    Stream rhs = iterate_stream(fn(*f2), apply_un(*h, x));
    try {
      EqProofPtr proof = build_fusion_proof(*h, *f1, *f2, x);
      return report(proof_check(proof, Desig::host(lhs), Desig::host(rhs), opt.depth, cx));
    } catch (const Error& e) {
      if (e.kind != ErrKind::HypothesisViolated) throw;
      std::cout << "refuted at " << (e.index >= 0 ? e.index : 0) << "\n";
      std::cerr << e.what() << "\n";
      return 1;
    }
  }

  if (sub == "unique") {
    if (args.size() != 4) fail(ErrKind::UsageError, "verify unique <equation> <cand1> <cand2>");
    for (int k = 1; k <= 3; ++k) require_checked(l, args[k]);
    return report(
        verify_unique(args[1], Desig::named(args[2]), Desig::named(args[3]), opt.depth, cx));
  }

  if (sub == "hyp") {
    if (args.size() != 2) fail(ErrKind::UsageError, "verify hyp <prooffile>");
    SexprParser p{read_file(args[1]), 0};
    std::string n1 = p.word(), n2 = p.word();
    require_checked(l, n1);
    require_checked(l, n2);
    HypProofPtr proof = p.proof();
    Desig a = Desig::named(n1), b = Desig::named(n2);
    ProofOutcome chk = hyp_check({}, proof, a, b, cx);
    if (!chk.ok) return report(chk);
    return report(hyp_sound({}, proof, a, b, opt.depth, cx));
  }

  fail(ErrKind::UsageError, "unknown verify subcommand '" + sub + "'");
}

int cmd_label(const Loaded& l, const std::string& tree_text, const std::string& name) {
  require_checked(l, name);
  Options opt;
  std::shared_ptr<EvalSession> sess;
  Stream labels = eval_stream(l, name, opt, sess);
  FinTree input = FinTree::parse(tree_text);
  InfTree relabelled = label(tree_from_fin(input), labels);
  std::cout << tree_truncate(relabelled, input.height()).to_text() << "\n";
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    std::cerr << kUsage;
    return 2;
  }

  Options opt;
  if (const char* env_fuel = std::getenv("COREC_FUEL")) opt.fuel = std::stoull(env_fuel);

  std::vector<std::string> pos;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= args.size()) fail(ErrKind::UsageError, a + " needs a value");
      return args[++i];
    };
    if (a == "--n")
      opt.n = std::stoull(value());
    else if (a == "--depth")
      opt.depth = std::stoull(value());
    else if (a == "--fuel")
      opt.fuel = std::stoull(value());
    else if (a == "--mode") {
      std::string m = value();
      if (m == "naive")
        opt.mode = EvalMode::Naive;
      else if (m == "memo")
        opt.mode = EvalMode::Memoized;
      else
        fail(ErrKind::UsageError, "unknown mode '" + m + "'");
    } else if (!a.empty() && a[0] == '-') {
      fail(ErrKind::UsageError, "unknown flag '" + a + "'");
    } else {
      pos.push_back(a);
    }
  }

  const std::string& cmd = pos.empty() ? "" : pos[0];
  if (cmd == "check" && pos.size() == 2) return cmd_check(load(pos[1]));
  if (cmd == "eval" && pos.size() == 3) return cmd_eval(load(pos[1]), pos[2], opt);
  if (cmd == "bench" && pos.size() == 3) return cmd_bench(load(pos[1]), pos[2], opt);
  if (cmd == "verify" && pos.size() >= 3)
    return cmd_verify(load(pos[1]), {pos.begin() + 2, pos.end()}, opt);
  if (cmd == "label" && pos.size() == 4) return cmd_label(load(pos[1]), pos[2], pos[3]);
  std::cerr << kUsage;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind) {
      case ErrKind::ParseError:
      case ErrKind::UsageError:
      case ErrKind::UnresolvedRef:
        return 2;
      case ErrKind::FuelExhausted:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
