#include "testscope/extract/java_parser.hpp"

#include <map>
#include <set>

namespace testscope::java {

namespace {

constexpr std::string_view kPrimitives[] = {"boolean", "byte",  "char", "short", "int",
                                            "long",    "float", "double", "void"};

bool is_primitive(std::string_view w) {
  for (auto p : kPrimitives) {
    if (p == w) return true;
  }
  return false;
}

// Identifier usable as a name: not a reserved word.
bool name_token(const Token& t) { return t.ident() && !is_keyword(t.text); }

std::string strip_type_args(const std::string& written) {
  std::string out;
  int depth = 0;
  for (char c : written) {
    if (c == '<') {
      ++depth;
    } else if (c == '>') {
      --depth;
    } else if (depth == 0) {
      out += c;
    }
  }
  return out;
}

std::string last_segment(const std::string& qn) {
  auto dot = qn.rfind('.');
  return dot == std::string::npos ? qn : qn.substr(dot + 1);
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, ParsedFile& out) : t_(tokens), out_(out) {}

  void compilation_unit() {
    skip_annotations();
    if (at("package")) {
      ++pos_;
      out_.packageName = qualified_name();
      expect(";");
    }
    while (at("import")) {
      ++pos_;
      bool isStatic = accept("static");
      std::string name = qualified_name();
      bool wildcard = false;
      if (at(".") && t_[pos_ + 1].is("*")) {
        pos_ += 2;
        wildcard = true;
      }
      expect(";");
      if (isStatic) {
        (wildcard ? out_.staticWildcards : out_.staticImports).push_back(name);
      } else {
        (wildcard ? out_.wildcardImports : out_.imports).push_back(name);
      }
    }
    while (!end()) {
      if (accept(";")) continue;
      Modifiers mods = modifiers();
      if (!type_start()) fail("expected a type declaration");
      type_declaration(-1, mods, std::string());
    }
  }

 private:
  struct Modifiers {
    EntityFlags flags;
    std::vector<std::string> annotations;
    bool isDefault = false;
  };

  struct Locals {
    std::map<std::string, std::optional<std::string>> vars;
  };

  struct MethodContext {
    int method = -1;
    int owner = -1;
    Locals locals;
    int anonymous = 0;
  };

  const std::vector<Token>& t_;
  ParsedFile& out_;
  std::size_t pos_ = 0;

  // ---- token helpers ----

  bool end() const { return t_[pos_].kind == TokenKind::End; }
  const Token& tok(std::size_t at) const { return t_[std::min(at, t_.size() - 1)]; }
  bool at(std::string_view p) const { return t_[pos_].is(p); }
  bool accept(std::string_view p) {
    if (!at(p)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(t_[pos_].line, msg + (end() ? " at end of file" : " near '" + t_[pos_].text + "'"));
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  std::string identifier() {
    if (!name_token(t_[pos_])) fail("expected identifier");
    return t_[pos_++].text;
  }
  std::string qualified_name() {
    std::string name = identifier();
    while (at(".") && name_token(tok(pos_ + 1))) {
      name += "." + t_[pos_ + 1].text;
      pos_ += 2;
    }
    return name;
  }

  // Index just past the bracket matching the opener at `from`.
  std::size_t match_close(std::size_t from) const {
    int depth = 0;
    for (std::size_t i = from; i < t_.size(); ++i) {
      const Token& k = t_[i];
      if (k.kind == TokenKind::End) break;
      if (k.kind != TokenKind::Punct) continue;
      if (k.text == "(" || k.text == "{" || k.text == "[") ++depth;
      if (k.text == ")" || k.text == "}" || k.text == "]") {
        if (--depth == 0) return i + 1;
      }
    }
    throw ParseError(t_[from].line, "unbalanced '" + t_[from].text + "'");
  }

  void skip_annotation() {
    // at '@'
    ++pos_;
    qualified_name();
    if (at("(")) pos_ = match_close(pos_);
  }

  void skip_annotations() {
    while (at("@") && !tok(pos_ + 1).is("interface")) skip_annotation();
  }

  Modifiers modifiers() {
    Modifiers m;
    for (;;) {
      if (at("@") && !tok(pos_ + 1).is("interface")) {
        std::size_t start = pos_ + 1;
        skip_annotation();
        std::string name;
        for (std::size_t i = start; i < pos_ && !t_[i].is("("); ++i) name += t_[i].text;
        m.annotations.push_back(last_segment(name));
        continue;
      }
      const Token& k = t_[pos_];
      if (!k.ident()) break;
      const std::string& w = k.text;
      if (w == "public" || w == "protected" || w == "final" || w == "transient" ||
          w == "volatile" || w == "synchronized" || w == "native" || w == "strictfp" ||
          w == "sealed") {
        ++pos_;
      } else if (w == "non" && tok(pos_ + 1).is("-") && tok(pos_ + 2).is("sealed")) {
        pos_ += 3;
      } else if (w == "private") {
        m.flags.set(EntityFlag::Private);
        ++pos_;
      } else if (w == "static") {
        m.flags.set(EntityFlag::Static);
        ++pos_;
      } else if (w == "abstract") {
        m.flags.set(EntityFlag::Abstract);
        ++pos_;
      } else if (w == "default" && !tok(pos_ + 1).is(":")) {
        m.isDefault = true;
        ++pos_;
      } else {
        break;
      }
    }
    return m;
  }

  bool record_start(std::size_t at) const {
    return tok(at).is("record") && name_token(tok(at + 1)) &&
           (tok(at + 2).is("(") || tok(at + 2).is("<"));
  }

  bool type_start() const {
    return at("class") || at("interface") || at("enum") ||
           (at("@") && tok(pos_ + 1).is("interface")) || record_start(pos_);
  }

  // ---- types ----

  // Skips `<...>` starting at `p` (which must be '<'). Returns false if the
  // tokens cannot form type arguments.
  bool skip_type_args(std::size_t& p, std::string* text) const {
    int depth = 0;
    std::size_t i = p;
    std::string buf;
    for (;; ++i) {
      const Token& k = tok(i);
      if (k.kind == TokenKind::End) return false;
      if (k.is("<")) {
        ++depth;
      } else if (k.is(">")) {
        if (--depth == 0) {
          buf += '>';
          break;
        }
      } else if (k.ident()) {
        if (is_keyword(k.text) && !is_primitive(k.text) && k.text != "extends" &&
            k.text != "super") {
          return false;
        }
        if (k.text == "extends" || k.text == "super") buf += ' ' + k.text + ' ';
        else buf += k.text;
        continue;
      } else if (!(k.is(".") || k.is(",") || k.is("?") || k.is("&") || k.is("[") ||
                   k.is("]") || k.is("@"))) {
        return false;
      }
      buf += k.text;
    }
    p = i + 1;
    if (text) *text += buf;
    return true;
  }

  // Non-throwing type recognizer. Advances `p` and fills `text` on success.
  bool try_type(std::size_t& p, std::string& text) const {
    std::size_t i = p;
    std::string buf;
    while (tok(i).is("@") && name_token(tok(i + 1))) {
      i += 2;
      while (tok(i).is(".") && name_token(tok(i + 1))) i += 2;
      if (tok(i).is("(")) {
        try {
          i = match_close(i);
        } catch (const ParseError&) {
          return false;
        }
      }
    }
    const Token& first = tok(i);
    if (!first.ident()) return false;
    if (is_primitive(first.text)) {
      buf = first.text;
      ++i;
    } else {
      if (is_keyword(first.text)) return false;
      buf = first.text;
      ++i;
      for (;;) {
        if (tok(i).is("<")) {
          if (!skip_type_args(i, &buf)) return false;
        }
        if (tok(i).is(".") && name_token(tok(i + 1))) {
          buf += "." + tok(i + 1).text;
          i += 2;
          continue;
        }
        break;
      }
    }
    while (tok(i).is("[") && tok(i + 1).is("]")) {
      buf += "[]";
      i += 2;
    }
    p = i;
    text = std::move(buf);
    return true;
  }

  std::string type() {
    std::string text;
    if (!try_type(pos_, text)) fail("expected type");
    return text;
  }

  // ---- declarations ----

  int add_draft(EntityKind kind, std::string name, int parent, int line, EntityFlags flags,
                std::vector<std::string> annotations, std::string declaredType = {}) {
    DraftEntity d;
    d.kind = kind;
    d.simpleName = std::move(name);
    d.parent = parent;
    d.firstLine = line;
    d.lastLine = line;
    d.flags = flags;
    d.annotations = std::move(annotations);
    d.declaredType = std::move(declaredType);
    out_.entities.push_back(std::move(d));
    return static_cast<int>(out_.entities.size()) - 1;
  }

  std::string unique_member_name(int owner, const std::string& base) {
    auto& used = memberNames_[owner];
    if (used.insert(base).second) return base;
    for (int k = 2;; ++k) {
      std::string candidate = base + "#" + std::to_string(k);
      if (used.insert(candidate).second) return candidate;
    }
  }

  std::map<int, std::set<std::string>> memberNames_;

  void inheritance_list(int owner) {
    do {
      skip_annotations();
      int line = t_[pos_].line;
      std::string written = type();
      out_.inherits.push_back(InheritDraft{owner, strip_type_args(written), line});
    } while (accept(","));
  }

  // Parses a class, interface, enum, record or annotation type declaration.
  // `nameOverride` gives local classes a method-qualified simple name.
  int type_declaration(int parent, const Modifiers& mods, const std::string& nameOverride) {
    int line = t_[pos_].line;
    EntityFlags flags = mods.flags;
    bool isEnum = false;
    bool isRecord = false;
    bool isInterface = false;
    if (accept("class")) {
    } else if (accept("interface")) {
      isInterface = true;
    } else if (accept("enum")) {
      isEnum = true;
    } else if (at("@")) {
      pos_ += 2;
      isInterface = true;
    } else if (record_start(pos_)) {
      ++pos_;
      isRecord = true;
    } else {
      fail("expected type declaration");
    }
    if (isInterface) flags.set(EntityFlag::Interface);
    std::string name = identifier();
    std::string simple = nameOverride.empty() ? name : nameOverride;
    int self = add_draft(EntityKind::Class, simple, parent, line, flags, mods.annotations);
    if (at("<")) {
      if (!skip_type_args(pos_, nullptr)) fail("malformed type parameters");
    }
    if (isRecord) {
      expect("(");
      while (!at(")")) {
        Modifiers pm = modifiers();
        std::string ptype = type();
        accept("...");
        int pline = t_[pos_].line;
        std::string pname = identifier();
        add_draft(EntityKind::Attribute, pname, self, pline,
                  EntityFlags(EntityFlag::Private), pm.annotations, ptype);
        memberNames_[self].insert(pname);
        if (!accept(",")) break;
      }
      expect(")");
    }
    if (accept("extends")) inheritance_list(self);
    if (accept("implements")) inheritance_list(self);
    if (accept("permits")) {
      do {
        type();
      } while (accept(","));
    }
    class_body(self, name, isEnum, isInterface);
    return self;
  }

  void class_body(int self, const std::string& className, bool isEnum, bool isInterface) {
    expect("{");
    if (isEnum) enum_constants(self);
    while (!at("}")) {
      if (end()) fail("unterminated class body");
      if (accept(";")) continue;
      member(self, className, isInterface);
    }
    out_.entities[static_cast<std::size_t>(self)].lastLine = t_[pos_].line;
    ++pos_;
  }

  void enum_constants(int self) {
    for (;;) {
      skip_annotations();
      if (at(";")) {
        ++pos_;
        return;
      }
      if (at("}")) return;
      int line = t_[pos_].line;
      std::string name = identifier();
      add_draft(EntityKind::Attribute, name, self, line, EntityFlags(EntityFlag::Static), {},
                out_.entities[static_cast<std::size_t>(self)].simpleName);
      memberNames_[self].insert(name);
      if (at("(")) pos_ = match_close(pos_);
      if (at("{")) pos_ = match_close(pos_);
      if (accept(",")) continue;
      if (accept(";")) return;
      if (at("}")) return;
      fail("malformed enum constant");
    }
  }

  void member(int self, const std::string& className, bool isInterface) {
    Modifiers mods = modifiers();
    if (at("{")) {
      // Initializer block; calls in it are not attributed to any method.
      pos_ = match_close(pos_);
      return;
    }
    if (type_start()) {
      if (isInterface) mods.flags.set(EntityFlag::Static);
      type_declaration(self, mods, std::string());
      return;
    }
    if (at("<")) {
      if (!skip_type_args(pos_, nullptr)) fail("malformed type parameters");
    }
    int line = t_[pos_].line;
    if (t_[pos_].ident() && t_[pos_].text == className && tok(pos_ + 1).is("(")) {
      ++pos_;
      EntityFlags flags = mods.flags;
      flags.set(EntityFlag::Constructor);
      method_rest(self, className, line, flags, mods.annotations, std::string(), false);
      return;
    }
    // Compact record constructor.
    if (t_[pos_].ident() && t_[pos_].text == className && tok(pos_ + 1).is("{")) {
      ++pos_;
      pos_ = match_close(pos_);
      return;
    }
    std::string ret = type();
    int nameLine = t_[pos_].line;
    std::string name = identifier();
    if (at("(")) {
      EntityFlags flags = mods.flags;
      method_rest(self, name, nameLine, flags, mods.annotations, ret,
                  isInterface && !mods.isDefault && !mods.flags.has(EntityFlag::Static));
      return;
    }
    EntityFlags flags = mods.flags;
    if (isInterface) flags.set(EntityFlag::Static);
    field_declarators(self, ret, name, nameLine, flags, mods.annotations);
  }

  void field_declarators(int self, const std::string& ftype, std::string name, int line,
                         EntityFlags flags, const std::vector<std::string>& annotations) {
    for (;;) {
      std::string declType = ftype;
      while (at("[") && tok(pos_ + 1).is("]")) {
        declType += "[]";
        pos_ += 2;
      }
      if (memberNames_[self].insert(name).second) {
        add_draft(EntityKind::Attribute, name, self, line, flags, annotations, declType);
      }
      if (accept("=")) skip_initializer();
      if (accept(";")) return;
      if (!accept(",")) fail("expected ';' after field");
      line = t_[pos_].line;
      name = identifier();
    }
  }

  // Skips a field initializer up to the ',' that starts the next declarator or
  // the terminating ';'. Commas inside generic arguments are told apart by
  // checking that what follows really looks like a declarator.
  void skip_initializer() {
    for (;;) {
      const Token& k = t_[pos_];
      if (k.kind == TokenKind::End) fail("unterminated field initializer");
      if (k.is("(") || k.is("{") || k.is("[")) {
        pos_ = match_close(pos_);
        continue;
      }
      if (k.is(";")) return;
      if (k.is(",") && name_token(tok(pos_ + 1)) &&
          (tok(pos_ + 2).is("=") || tok(pos_ + 2).is(",") || tok(pos_ + 2).is(";") ||
           tok(pos_ + 2).is("["))) {
        return;
      }
      ++pos_;
    }
  }

  void method_rest(int self, const std::string& name, int line, EntityFlags flags,
                   const std::vector<std::string>& annotations, const std::string& ret,
                   bool implicitAbstract) {
    expect("(");
    MethodContext ctx;
    int arity = 0;
    while (!at(")")) {
      modifiers();
      std::string ptype = type();
      if (accept("...")) ptype += "[]";
      if (at("this")) {
        // Receiver parameter: not counted.
        ++pos_;
        if (!accept(",")) break;
        continue;
      }
      std::string pname = identifier();
      while (at("[") && tok(pos_ + 1).is("]")) {
        ptype += "[]";
        pos_ += 2;
      }
      ctx.locals.vars[pname] = ptype;
      ++arity;
      if (!accept(",")) break;
    }
    expect(")");
    while (at("[") && tok(pos_ + 1).is("]")) pos_ += 2;
    if (accept("throws")) {
      do {
        type();
      } while (accept(","));
    }
    std::string simple = unique_member_name(self, name + "/" + std::to_string(arity));
    int m = add_draft(EntityKind::Method, simple, self, line, flags, annotations, ret);
    if (accept("default")) {
      while (!at(";") && !end()) {
        if (at("(") || at("{") || at("[")) pos_ = match_close(pos_);
        else ++pos_;
      }
    }
    if (accept(";")) {
      if (implicitAbstract) out_.entities[static_cast<std::size_t>(m)].flags.set(EntityFlag::Abstract);
      return;
    }
    if (!at("{")) fail("expected method body");
    ctx.method = m;
    ctx.owner = self;
    std::size_t close = match_close(pos_);
    ++pos_;
    scan(ctx, close - 1);
    pos_ = close;
    out_.entities[static_cast<std::size_t>(m)].lastLine = t_[close - 1].line;
  }

  // ---- method bodies ----

  std::shared_ptr<Receiver> make(Receiver::Kind kind) {
    auto r = std::make_shared<Receiver>();
    r->kind = kind;
    return r;
  }

  bool statement_start(std::size_t at) const {
    if (at == 0) return true;
    const Token& prev = t_[at - 1];
    return prev.is("{") || prev.is("}") || prev.is(";") || prev.is("(") || prev.is(":") ||
           prev.is("final") || prev.is(")");
  }

  // Recognizes `Type name` followed by a declarator terminator.
  bool try_local_declaration(MethodContext& ctx) {
    std::size_t p = pos_;
    std::string ltype;
    while (tok(p).is("final") || (tok(p).is("@") && name_token(tok(p + 1)))) {
      if (tok(p).is("final")) ++p;
      else p += 2;
    }
    if (!try_type(p, ltype)) return false;
    if (!name_token(tok(p))) return false;
    const Token& after = tok(p + 1);
    if (!(after.is("=") || after.is(";") || after.is(",") || after.is(":") || after.is(")") ||
          after.is("["))) {
      return false;
    }
    if (ltype == "var") {
      ctx.locals.vars[tok(p).text] = std::nullopt;
    } else {
      ctx.locals.vars[tok(p).text] = ltype;
    }
    pos_ = p + 1;
    return true;
  }

  // Counts top-level arguments between '(' at `open` and its match.
  int arity_of(std::size_t open, std::size_t close) const {
    if (close == open + 2) return 0;
    int commas = 0;
    int depth = 0;
    for (std::size_t i = open + 1; i + 1 < close; ++i) {
      const Token& k = t_[i];
      if (k.is("(") || k.is("{") || k.is("[")) {
        ++depth;
      } else if (k.is(")") || k.is("}") || k.is("]")) {
        --depth;
      } else if (k.is("new") || (k.is(".") && tok(i + 1).is("<"))) {
        // Generic arguments in creation expressions or explicit type
        // arguments carry commas of their own.
        std::size_t p = i + 1;
        std::string ignored;
        if (k.is(".")) {
          if (skip_type_args(p, nullptr)) i = p - 1;
        } else if (try_type(p, ignored)) {
          i = p - 1;
        }
      } else if (k.is("(") == false && k.is("<") && i > open && name_token(t_[i - 1])) {
        // Possible generic type in a cast or method reference: A<B, C>::new
        std::size_t p = i;
        if (skip_type_args(p, nullptr) && (tok(p).is(")") || tok(p).is("::") || tok(p).is("."))) {
          i = p - 1;
        }
      } else if (k.is(",") && depth == 0) {
        ++commas;
      }
    }
    return commas + 1;
  }

  int record_call(MethodContext& ctx, std::string name, bool ctor, ReceiverPtr receiver,
                  int line, std::size_t open) {
    std::size_t close = match_close(open);
    CallDraft c;
    c.caller = ctx.method;
    c.name = std::move(name);
    c.constructor = ctor;
    c.receiver = std::move(receiver);
    c.line = line;
    c.arity = arity_of(open, close);
    out_.calls.push_back(std::move(c));
    int index = static_cast<int>(out_.calls.size()) - 1;
    scan_range(ctx, open + 1, close - 1);
    pos_ = close;
    return index;
  }

  void scan_range(MethodContext& ctx, std::size_t from, std::size_t to) {
    std::size_t saved = pos_;
    pos_ = from;
    scan(ctx, to);
    pos_ = saved;
  }

  void record_access(MethodContext& ctx, ReceiverPtr target, int line) {
    out_.accesses.push_back(AccessDraft{ctx.method, std::move(target), line});
  }

  ReceiverPtr call_receiver(int index) {
    auto r = make(Receiver::Kind::Call);
    r->call = index;
    return r;
  }

  // Parses member selections, calls and indexing following a receiver.
  void selectors(MethodContext& ctx, ReceiverPtr rec) {
    for (;;) {
      if (at(".")) {
        std::size_t p = pos_ + 1;
        if (tok(p).is("<")) {
          if (!skip_type_args(p, nullptr)) return;
        }
        const Token& name = tok(p);
        if (name.is("new")) {
          pos_ = p;
          rec = creation(ctx);
          continue;
        }
        if (name.is("class") || name.is("this")) {
          pos_ = p + 1;
          rec = make(Receiver::Kind::Unknown);
          continue;
        }
        if (!name_token(name)) return;
        if (tok(p + 1).is("(")) {
          int idx = record_call(ctx, name.text, false, rec, name.line, p + 1);
          rec = call_receiver(idx);
          continue;
        }
        auto f = make(Receiver::Kind::Field);
        f->base = rec;
        f->field = name.text;
        rec = f;
        record_access(ctx, rec, name.line);
        pos_ = p + 1;
        continue;
      }
      if (at("[")) {
        std::size_t close = match_close(pos_);
        scan_range(ctx, pos_ + 1, close - 1);
        pos_ = close;
        rec = make(Receiver::Kind::Unknown);
        continue;
      }
      return;
    }
  }

  // At 'new'. Handles plain creation, arrays and anonymous classes.
  ReceiverPtr creation(MethodContext& ctx) {
    int line = t_[pos_].line;
    ++pos_;
    std::string written;
    if (at("<")) skip_type_args(pos_, nullptr);
    // Parse the created type without array dims so `new int[3]` works.
    std::size_t p = pos_;
    while (tok(p).is("@") && name_token(tok(p + 1))) {
      p += 2;
      if (tok(p).is("(")) p = match_close(p);
    }
    pos_ = p;
    if (!t_[pos_].ident()) fail("expected type after 'new'");
    written = t_[pos_++].text;
    for (;;) {
      if (at("<")) {
        std::string args;
        if (!skip_type_args(pos_, &args)) fail("malformed type arguments");
      }
      if (at(".") && name_token(tok(pos_ + 1))) {
        written += "." + t_[pos_ + 1].text;
        pos_ += 2;
        continue;
      }
      break;
    }
    if (at("[")) {
      while (at("[")) {
        std::size_t close = match_close(pos_);
        scan_range(ctx, pos_ + 1, close - 1);
        pos_ = close;
      }
      if (at("{")) {
        std::size_t close = match_close(pos_);
        scan_range(ctx, pos_ + 1, close - 1);
        pos_ = close;
      }
      return make(Receiver::Kind::Unknown);
    }
    if (!at("(")) fail("expected '(' after created type");
    auto rec = make(Receiver::Kind::New);
    rec->typeName = written;
    std::size_t open = pos_;
    std::size_t close = match_close(open);
    if (tok(close).is("{")) {
      // Anonymous class: its methods own the calls in its body.
      scan_range(ctx, open + 1, close - 1);
      pos_ = close;
      const auto& caller = out_.entities[static_cast<std::size_t>(ctx.method)];
      std::string anonName = caller.simpleName + "$anon" + std::to_string(++ctx.anonymous);
      int anon = add_draft(EntityKind::Class, anonName, ctx.owner, line, EntityFlags(), {});
      out_.inherits.push_back(InheritDraft{anon, strip_type_args(written), line});
      class_body(anon, std::string(), false, false);
      return rec;
    }
    std::string ctorName = last_segment(written);
    record_call(ctx, ctorName, true, rec, line, open);
    return rec;
  }

  void local_type(MethodContext& ctx, const Modifiers& mods) {
    std::size_t p = pos_;
    p += t_[p].is("@") ? 2 : 1;
    std::string name = tok(p).text;
    const auto& caller = out_.entities[static_cast<std::size_t>(ctx.method)];
    type_declaration(ctx.owner, mods, caller.simpleName + "$" + name);
  }

  void scan(MethodContext& ctx, std::size_t limit) {
    while (pos_ < limit) {
      const Token& k = t_[pos_];
      if (k.kind == TokenKind::End) fail("unexpected end of method body");

      if (statement_start(pos_) &&
          (k.is("class") || k.is("interface") || k.is("enum") || record_start(pos_) ||
           ((k.is("abstract") || k.is("final") || k.is("static")) && (tok(pos_ + 1).is("class")) ))) {
        Modifiers mods = modifiers();
        if (type_start()) {
          local_type(ctx, mods);
          continue;
        }
      }
      if (k.is("new")) {
        ReceiverPtr rec = creation(ctx);
        selectors(ctx, rec);
        continue;
      }
      if (k.is("this") || k.is("super")) {
        bool isThis = k.is("this");
        if (tok(pos_ + 1).is("(")) {
          auto rec = make(isThis ? Receiver::Kind::This : Receiver::Kind::Super);
          record_call(ctx, isThis ? "this" : "super", true, rec, k.line, pos_ + 1);
          continue;
        }
        ++pos_;
        selectors(ctx, make(isThis ? Receiver::Kind::This : Receiver::Kind::Super));
        continue;
      }
      if (k.is("@")) {
        skip_annotation();
        continue;
      }
      if (name_token(k) || is_primitive(k.text)) {
        if (statement_start(pos_) && try_local_declaration(ctx)) continue;
        if (is_primitive(k.text)) {
          ++pos_;
          continue;
        }
        if (tok(pos_ + 1).is("->")) {
          ctx.locals.vars[k.text] = std::nullopt;
          pos_ += 2;
          continue;
        }
        if (tok(pos_ + 1).is("(")) {
          int idx = record_call(ctx, k.text, false, make(Receiver::Kind::Implicit), k.line,
                                pos_ + 1);
          selectors(ctx, call_receiver(idx));
          continue;
        }
        if (tok(pos_ - 1).is("::")) {
          ++pos_;
          continue;
        }
        auto rec = make(Receiver::Kind::Name);
        rec->names.push_back(k.text);
        auto local = ctx.locals.vars.find(k.text);
        if (local != ctx.locals.vars.end()) {
          if (local->second) rec->localType = local->second;
          else rec->untypedLocal = true;
        }
        int line = k.line;
        ++pos_;
        while (at(".") && name_token(tok(pos_ + 1)) && !tok(pos_ + 2).is("(")) {
          rec->names.push_back(t_[pos_ + 1].text);
          pos_ += 2;
        }
        record_access(ctx, rec, line);
        selectors(ctx, rec);
        continue;
      }
      if (k.is(")") && tok(pos_ + 1).is("->")) {
        // Untyped lambda parameters: (a, b) -> ...
        std::size_t i = pos_;
        while (i > 0 && !t_[i].is("(")) {
          if (name_token(t_[i]) && (t_[i + 1].is(",") || t_[i + 1].is(")")) &&
              !(name_token(t_[i - 1]) || t_[i - 1].is(">") || t_[i - 1].is("]"))) {
            ctx.locals.vars[t_[i].text] = std::nullopt;
          }
          --i;
        }
        pos_ += 2;
        continue;
      }
      if ((k.is(")") || k.is("]") || k.kind == TokenKind::String) && tok(pos_ + 1).is(".")) {
        ++pos_;
        selectors(ctx, make(Receiver::Kind::Unknown));
        continue;
      }
      ++pos_;
    }
  }
};

}  // namespace

std::string Receiver::describe() const {
  switch (kind) {
    case Kind::Implicit:
      return "";
    case Kind::This:
      return "this";
    case Kind::Super:
      return "super";
    case Kind::Name: {
      std::string s;
      for (const auto& n : names) s += (s.empty() ? "" : ".") + n;
      return s;
    }
    case Kind::Call:
      return "(call)";
    case Kind::Field:
      return (base ? base->describe() : std::string("?")) + "." + field;
    case Kind::New:
      return "new " + typeName;
    case Kind::Unknown:
      break;
  }
  return "?";
}

ParsedFile parse_java(std::string_view source, std::string path) {
  LexedSource lexed = lex(source);
  ParsedFile out;
  out.path = std::move(path);
  out.headerComments = std::move(lexed.headerComments);
  Parser parser(lexed.tokens, out);
  parser.compilation_unit();
  return out;
}

}  // namespace testscope::java
