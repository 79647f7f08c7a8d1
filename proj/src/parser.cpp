#include "corec/parser.hpp"

#include <cctype>
#include <set>

namespace corec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Token {
  enum class K { Nat, Name, Keyword, Sym, End };
  K k = K::End;
  std::string text;
  std::int64_t nat = 0;
  int line = 1, col = 1;
};

const std::set<std::string> kKeywords = {"def",  "delay",  "end",   "zipWith",    "map",
                                         "tail", "forget", "evens", "interleave", "merge",
                                         "true", "false",  "Stream"};

struct Lexer {
  const std::string& src;
  std::size_t i = 0;
  int line = 1, col = 1;
  std::vector<Token> out;

  void advance() {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void run() {
    while (i < src.size()) {
      char c = src[i];
      if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
        while (i < src.size() && src[i] != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      int l = line, cl = col;
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
          num += src[i];
          advance();
        }
        out.push_back({Token::K::Nat, num, std::stoll(num), l, cl});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (i < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                src[i] == '\'')) {
          word += src[i];
          advance();
        }
        out.push_back({kKeywords.count(word) ? Token::K::Keyword : Token::K::Name, word, 0, l, cl});
        continue;
      }
      if (c == ':' && i + 1 < src.size() && src[i + 1] == ':') {
        advance();
        advance();
        out.push_back({Token::K::Sym, "::", 0, l, cl});
        continue;
      }
      static const std::string singles = ":=()@[],;";
      if (singles.find(c) != std::string::npos) {
        advance();
        out.push_back({Token::K::Sym, std::string(1, c), 0, l, cl});
        continue;
      }
      fail(ErrKind::ParseError, "unexpected character '" + std::string(1, c) + "' at line " +
                                    std::to_string(l) + ", column " + std::to_string(cl));
    }
    out.push_back({Token::K::End, "", 0, line, col});
  }
};

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;

  const Token& cur() const { return toks[pos]; }
  const Token& prev() const { return toks[pos == 0 ? 0 : pos - 1]; }

  [[noreturn]] void error(const std::string& msg) {
    // At end of input the previous token locates the problem.
    const Token& t = cur().k == Token::K::End && pos > 0 ? prev() : cur();
    fail(ErrKind::ParseError, msg + " at line " + std::to_string(t.line) + ", column " +
                                  std::to_string(t.col));
  }

  bool at_sym(const std::string& s) const { return cur().k == Token::K::Sym && cur().text == s; }
  bool at_kw(const std::string& s) const {
    return cur().k == Token::K::Keyword && cur().text == s;
  }

  Token take() { return toks[pos++]; }

  void expect_sym(const std::string& s) {
    if (!at_sym(s)) error("expected '" + s + "'");
    ++pos;
  }

  std::string expect_name(const std::string& what) {
    if (cur().k != Token::K::Name) error("expected " + what);
    return take().text;
  }

  std::uint64_t expect_nat(const std::string& what) {
    if (cur().k != Token::K::Nat) error("expected " + what);
    return static_cast<std::uint64_t>(take().nat);
  }

  SurfaceExprPtr mk(decltype(SurfaceExpr::node) node, const Token& t) {
    auto e = std::make_shared<SurfaceExpr>();
    e->node = std::move(node);
    e->line = t.line;
    e->col = t.col;
    return e;
  }

  SurfaceExprPtr atom() {
    Token t = cur();
    if (t.k == Token::K::Nat) {
      take();
      return mk(ELit{Value::integer(t.nat)}, t);
    }
    if (at_kw("true") || at_kw("false")) {
      take();
      return mk(ELit{Value::boolean(t.text == "true")}, t);
    }
    if (t.k == Token::K::Name) {
      take();
      return mk(EName{t.text}, t);
    }
    if (at_sym("(")) {
      take();
      SurfaceExprPtr e = expr();
      expect_sym(")");
      return e;
    }
    error("expected an expression");
  }

  std::string op_name() {
    if (cur().k != Token::K::Name && !at_kw("not"))
      error("expected an operator name");
    return take().text;
  }

  SurfaceExprPtr app() {
    Token t = cur();
    if (at_kw("delay")) {
      take();
      return mk(EDelay{app()}, t);
    }
    if (at_kw("end")) {
      take();
      return mk(EEnd{app()}, t);
    }
    if (at_kw("zipWith")) {
      take();
      std::string op = op_name();
      SurfaceExprPtr a = atom(), b = atom();
      return mk(EZip{op, a, b}, t);
    }
    if (at_kw("map")) {
      take();
      std::string op = op_name();
      return mk(EMap{op, atom()}, t);
    }
    if (at_kw("tail")) {
      take();
      return mk(ETail{atom()}, t);
    }
    if (at_kw("forget")) {
      take();
      return mk(EForget{atom()}, t);
    }
    if (at_kw("evens")) {
      take();
      return mk(EEvens{atom()}, t);
    }
    if (at_kw("interleave")) {
      take();
      SurfaceExprPtr a = atom(), b = atom();
      return mk(EInterleave{a, b}, t);
    }
    if (at_kw("merge")) {
      take();
      SurfaceExprPtr a = atom(), b = atom();
      return mk(EMerge{a, b}, t);
    }
    return atom();
  }

  SurfaceExprPtr expr() {
    SurfaceExprPtr left = app();
    if (at_sym("::")) {
      Token t = take();
      SurfaceExprPtr right = expr();  // right-associative
      return mk(EConsS{left, right}, t);
    }
    return left;
  }

  ChunkSignature annotation() {
    expect_sym("@");
    if (cur().k == Token::K::Name) {
      if (cur().text == "bool") {
        take();
        expect_sym("(");
        bool flag;
        if (at_kw("true"))
          flag = true;
        else if (at_kw("false"))
          flag = false;
        else
          error("expected true or false");
        take();
        expect_sym(")");
        return ChunkSignature::boolean(flag);
      }
      if (cur().text == "pattern") {
        take();
        expect_sym("[");
        std::vector<std::uint64_t> pre, per;
        pre.push_back(expect_nat("a chunk size"));
        while (at_sym(",")) {
          take();
          pre.push_back(expect_nat("a chunk size"));
        }
        expect_sym(";");
        per.push_back(expect_nat("a chunk size"));
        while (at_sym(",")) {
          take();
          per.push_back(expect_nat("a chunk size"));
        }
        expect_sym("]");
        return ChunkSignature::pattern(std::move(pre), std::move(per));
      }
      error("expected bool, pattern, or (m,n) after '@'");
    }
    expect_sym("(");
    std::uint64_t m = expect_nat("a chunk size");
    expect_sym(",");
    std::uint64_t n = expect_nat("a first-chunk size");
    expect_sym(")");
    return ChunkSignature::fixed(m, n);
  }

  SourceModule module() {
    SourceModule m;
    while (cur().k != Token::K::End) {
      if (!at_kw("def")) error("expected 'def'");
      Token t = take();
      SourceDef d;
      d.line = t.line;
      d.col = t.col;
      d.name = expect_name("a definition name");
      if (at_sym(":")) {
        take();
        if (!at_kw("Stream")) error("expected 'Stream'");
        take();
        d.elem_type = expect_name("an element type");
        if (at_sym("@")) d.sig = annotation();
      }
      expect_sym("=");
      d.body = expr();
      for (const SourceDef& seen : m.defs)
        if (seen.name == d.name)
          fail(ErrKind::ParseError, "duplicate definition '" + d.name + "' at line " +
                                        std::to_string(t.line));
      m.defs.push_back(std::move(d));
    }
    return m;
  }
};

// precedence levels: 0 cons, 1 prefix application, 2 atom
int level(const SurfaceExpr& e) {
  return std::visit(overloaded{
                        [](const ELit&) { return 2; },
                        [](const EName&) { return 2; },
                        [](const EConsS&) { return 0; },
                        [](const auto&) { return 1; },
                    },
                    e.node);
}

std::string print_expr(const SurfaceExprPtr& e, int min_level) {
  std::string body = std::visit(
      overloaded{
          [&](const ELit& n) { return to_string(n.v); },
          [&](const EName& n) { return n.name; },
          [&](const EConsS& n) {
            return print_expr(n.head, 1) + " :: " + print_expr(n.tail, 0);
          },
          [&](const EDelay& n) { return "delay " + print_expr(n.arg, 1); },
          [&](const EEnd& n) { return "end " + print_expr(n.arg, 1); },
          [&](const EZip& n) {
            return "zipWith " + n.op + " " + print_expr(n.left, 2) + " " +
                   print_expr(n.right, 2);
          },
          [&](const EMap& n) { return "map " + n.op + " " + print_expr(n.arg, 2); },
          [&](const ETail& n) { return "tail " + print_expr(n.arg, 2); },
          [&](const EForget& n) { return "forget " + print_expr(n.arg, 2); },
          [&](const EEvens& n) { return "evens " + print_expr(n.arg, 2); },
          [&](const EInterleave& n) {
            return "interleave " + print_expr(n.left, 2) + " " + print_expr(n.right, 2);
          },
          [&](const EMerge& n) {
            return "merge " + print_expr(n.left, 2) + " " + print_expr(n.right, 2);
          },
      },
      e->node);
  if (level(*e) < min_level) return "(" + body + ")";
  return body;
}

}  // namespace

SourceModule parse_module(const std::string& text) {
  Lexer lex{text, 0, 1, 1, {}};
  lex.run();
  Parser p{std::move(lex.out)};
  return p.module();
}

std::string print_module(const SourceModule& m) {
  std::string out;
  for (const SourceDef& d : m.defs) {
    out += "def " + d.name;
    if (d.elem_type) {
      out += " : Stream " + *d.elem_type;
      if (d.sig) out += " " + d.sig->to_text();
    }
    out += " = " + print_expr(d.body, 0) + "\n";
  }
  return out;
}

// -- elaboration --------------------------------------------------------------

namespace {

bool uses_chunk_constructs(const SurfaceExprPtr& e) {
  return std::visit(
      overloaded{
          [](const ELit&) { return false; },
          [](const EName&) { return false; },
          [&](const EConsS& n) {
            return uses_chunk_constructs(n.head) || uses_chunk_constructs(n.tail);
          },
          [&](const EDelay& n) { return uses_chunk_constructs(n.arg); },
          [&](const EEnd&) { return true; },
          [&](const EZip& n) {
            return uses_chunk_constructs(n.left) || uses_chunk_constructs(n.right);
          },
          [&](const EMap& n) { return uses_chunk_constructs(n.arg); },
          [](const ETail&) { return true; },
          [](const EForget&) { return true; },
          [](const EEvens&) { return true; },
          [](const EInterleave&) { return true; },
          [&](const EMerge& n) {
            return uses_chunk_constructs(n.left) || uses_chunk_constructs(n.right);
          },
      },
      e->node);
}

struct ElabError {
  std::string message;
};

[[noreturn]] void elab_fail(const SurfaceExpr& at, const std::string& msg) {
  throw ElabError{msg + " (line " + std::to_string(at.line) + ", column " +
                  std::to_string(at.col) + ")"};
}

Value literal_of(const SurfaceExprPtr& e) {
  const ELit* lit = std::get_if<ELit>(&e->node);
  if (!lit) elab_fail(*e, "element position needs a literal");
  return lit->v;
}

BinOp bin_of(const SurfaceExpr& at, const std::string& name) {
  auto op = bin_op_by_name(name);
  if (!op) elab_fail(at, "unknown binary operator '" + name + "'");
  return *op;
}

UnOp un_of(const SurfaceExpr& at, const std::string& name) {
  auto op = un_op_by_name(name);
  if (!op) elab_fail(at, "unknown unary operator '" + name + "'");
  return *op;
}

StreamProgPtr elab_stream(const SurfaceExprPtr& e) {
  return std::visit(
      overloaded{
          [&](const ELit&) -> StreamProgPtr {
            elab_fail(*e, "a bare literal is not a stream");
          },
          [&](const EName& n) -> StreamProgPtr { return sp_ref(n.name); },
          [&](const EConsS& n) -> StreamProgPtr {
            Value head = literal_of(n.head);
            const EDelay* d = std::get_if<EDelay>(&n.tail->node);
            if (!d) elab_fail(*n.tail, "the tail of :: must be delayed");
            return sp_cons(head, elab_stream(d->arg));
          },
          [&](const EDelay&) -> StreamProgPtr {
            elab_fail(*e, "delay is only legal as the tail of ::");
          },
          [&](const EZip& n) -> StreamProgPtr {
            return sp_zipwith(bin_of(*e, n.op), elab_stream(n.left), elab_stream(n.right));
          },
          [&](const EMap& n) -> StreamProgPtr {
            return sp_map(un_of(*e, n.op), elab_stream(n.arg));
          },
          [&](const EMerge& n) -> StreamProgPtr {
            return sp_merge(elab_stream(n.left), elab_stream(n.right));
          },
          [&](const auto&) -> StreamProgPtr {
            elab_fail(*e, "chunk construct in a plain stream definition");
          },
      },
      e->node);
}

ChunkProgPtr elab_chunk(const SurfaceExprPtr& e) {
  return std::visit(
      overloaded{
          [&](const ELit&) -> ChunkProgPtr {
            elab_fail(*e, "a bare literal is not a stream");
          },
          [&](const EName& n) -> ChunkProgPtr { return cp_ref(n.name); },
          [&](const EConsS& n) -> ChunkProgPtr {
            Value head = literal_of(n.head);
            if (std::get_if<EDelay>(&n.tail->node))
              elab_fail(*n.tail, "a chunked cons tail is not delayed; close the chunk with 'end delay'");
            return cp_cons(head, elab_chunk(n.tail));
          },
          [&](const EEnd& n) -> ChunkProgPtr {
            const EDelay* d = std::get_if<EDelay>(&n.arg->node);
            if (!d) elab_fail(*n.arg, "end needs a delayed argument");
            return cp_end(elab_chunk(d->arg));
          },
          [&](const EDelay&) -> ChunkProgPtr {
            elab_fail(*e, "delay is only legal directly under end");
          },
          [&](const EZip& n) -> ChunkProgPtr {
            return cp_zip(bin_of(*e, n.op), elab_chunk(n.left), elab_chunk(n.right));
          },
          [&](const EMap& n) -> ChunkProgPtr {
            return cp_map(un_of(*e, n.op), elab_chunk(n.arg));
          },
          [&](const ETail& n) -> ChunkProgPtr { return cp_tail(elab_chunk(n.arg)); },
          [&](const EForget& n) -> ChunkProgPtr { return cp_forget(elab_chunk(n.arg)); },
          [&](const EEvens& n) -> ChunkProgPtr { return cp_evens(elab_chunk(n.arg)); },
          [&](const EInterleave& n) -> ChunkProgPtr {
            return cp_interleave(elab_chunk(n.left), elab_chunk(n.right));
          },
          [&](const EMerge&) -> ChunkProgPtr {
            elab_fail(*e, "merge is not available in chunked definitions");
          },
      },
      e->node);
}

void collect_names(const SurfaceExprPtr& e, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [&](const EName& n) { out.push_back(n.name); },
                 [&](const EConsS& n) {
                   collect_names(n.head, out);
                   collect_names(n.tail, out);
                 },
                 [&](const EDelay& n) { collect_names(n.arg, out); },
                 [&](const EEnd& n) { collect_names(n.arg, out); },
                 [&](const EZip& n) {
                   collect_names(n.left, out);
                   collect_names(n.right, out);
                 },
                 [&](const EMap& n) { collect_names(n.arg, out); },
                 [&](const ETail& n) { collect_names(n.arg, out); },
                 [&](const EForget& n) { collect_names(n.arg, out); },
                 [&](const EEvens& n) { collect_names(n.arg, out); },
                 [&](const EInterleave& n) {
                   collect_names(n.left, out);
                   collect_names(n.right, out);
                 },
                 [&](const EMerge& n) {
                   collect_names(n.left, out);
                   collect_names(n.right, out);
                 },
                 [](const auto&) {},
             },
             e->node);
}

}  // namespace

ModuleEnvs elaborate(const SourceModule& m) {
  ModuleEnvs out;
  out.stream_env = std::make_shared<DefEnv>();
  out.chunk_env = std::make_shared<ChunkDefEnv>();

  for (const SourceDef& d : m.defs) {
    bool chunked = d.sig.has_value() || uses_chunk_constructs(d.body);
    if (chunked && !d.sig) {
      out.rejections.push_back(
          {d.name, "chunked constructs require a chunk signature (@bool, @(m,n) or @pattern)"});
      continue;
    }
    try {
      if (chunked) {
        out.chunk_env->add_def(d.name, *d.sig, elab_chunk(d.body));
        out.lang[d.name] = DefLang::Chunked;
      } else {
        out.stream_env->add_def(d.name, elab_stream(d.body));
        out.lang[d.name] = DefLang::Plain;
      }
    } catch (const ElabError& e) {
      out.rejections.push_back({d.name, e.message});
    }
  }

  // References must stay within one language.
  for (const SourceDef& d : m.defs) {
    auto it = out.lang.find(d.name);
    if (it == out.lang.end()) continue;
    std::vector<std::string> names;
    collect_names(d.body, names);
    for (const std::string& n : names) {
      auto other = out.lang.find(n);
      if (other != out.lang.end() && other->second != it->second) {
        out.rejections.push_back(
            {d.name, "reference '" + n + "' crosses into the other definition language"});
        if (it->second == DefLang::Plain) {
          // drop it from the checked environment
          auto env = std::make_shared<DefEnv>();
          for (const auto& [k, v] : out.stream_env->defs())
            if (k != d.name) env->add_def(k, v);
          out.stream_env = env;
        } else {
          auto env = std::make_shared<ChunkDefEnv>();
          for (const auto& [k, v] : out.chunk_env->defs())
            if (k != d.name) env->add_def(k, v.sig, v.body);
          out.chunk_env = env;
        }
        out.lang.erase(it);
        break;
      }
    }
  }

  return out;
}

}  // namespace corec
