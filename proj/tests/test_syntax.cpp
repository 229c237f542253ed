#include <gtest/gtest.h>

#include "support.hpp"

using namespace stt;

namespace {

bool never_global(const std::string&) { return false; }

TermPtr resolved(std::string_view text, std::vector<std::string> locals = {}) {
  return resolve_term(parse_expr(text), locals, never_global);
}

std::string roundtrip(std::string_view text, std::vector<std::string> locals = {}) {
  return print_term(resolved(text, locals), locals);
}

ErrorCode syntax_code(std::string_view module) {
  try {
    parse_module(module);
  } catch (const SttError& e) {
    return e.diag.code;
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST(Parser, BindersAndApplication) {
  TermPtr t = resolved("\\x y. x y");
  ASSERT_EQ(t->tag, Tag::Lam);
  TermPtr inner = t->kids[0]->kids[0];
  ASSERT_EQ(inner->tag, Tag::App);
  EXPECT_EQ(inner->kids[0]->index, 1);
  EXPECT_EQ(inner->kids[1]->index, 0);
}

TEST(Parser, ModalPiAndTypes) {
  TermPtr t = resolved("(A :{flat} U 0) -> <flat| A> -> A");
  ASSERT_EQ(t->tag, Tag::Pi);
  EXPECT_EQ(t->mu, Modality::flat());
  EXPECT_EQ(t->kids[0]->tag, Tag::U);
  TermPtr rest = t->kids[1];
  ASSERT_EQ(rest->tag, Tag::Pi);
  EXPECT_EQ(rest->kids[0]->tag, Tag::Mod);
  EXPECT_EQ(rest->kids[0]->mu, Modality::flat());
}

TEST(Parser, LetModWithFraming) {
  TermPtr t = resolved("let mod{sharp} z = y @{flat} in mod{flat} z", {"y"});
  ASSERT_EQ(t->tag, Tag::LetMod);
  EXPECT_EQ(t->mu, Modality::sharp());
  EXPECT_EQ(t->nu, Modality::flat());
}

TEST(Parser, CellAnnotationOnVariables) {
  TermPtr t = resolved("a ^ {tau . tw * eps}", {"a"});
  ASSERT_EQ(t->tag, Tag::Var);
  ASSERT_TRUE(t->cell_expr.has_value());
  EXPECT_TRUE(eq_cell(**t->cell_expr, *parse_cell("tau . tw * eps")));
}

TEST(Parser, SigmaPairsAndId) {
  TermPtr t = resolved("(p : I * I) * (fst p = snd p)", {"I"});
  ASSERT_EQ(t->tag, Tag::Sigma);
  EXPECT_EQ(t->kids[1]->tag, Tag::Id);
}

TEST(Parser, ModuleDeclarations) {
  auto decls = parse_module(
      "import other.stt\n"
      "postulate A : U 0\n"
      "-- conjecture\n"
      "postulate claim : A\n"
      "def idA : A -> A := \\x. x\n");
  ASSERT_EQ(decls.size(), 4u);
  EXPECT_EQ(decls[0].kind, Decl::Kind::Import);
  EXPECT_EQ(decls[0].path, "other.stt");
  EXPECT_EQ(decls[1].kind, Decl::Kind::Postulate);
  EXPECT_FALSE(decls[1].conjecture);
  EXPECT_TRUE(decls[2].conjecture);
  EXPECT_EQ(decls[3].kind, Decl::Kind::Def);
  EXPECT_EQ(decls[3].name, "idA");
}

TEST(Parser, SyntaxErrorsCarrySpans) {
  EXPECT_EQ(syntax_code("def x : U 0 U 0"), ErrorCode::Syntax);
  EXPECT_EQ(syntax_code("def f : U 0 -> U 0 := \\x x"), ErrorCode::Syntax);
  EXPECT_EQ(syntax_code("postulate p : <flat U 0"), ErrorCode::Syntax);
  EXPECT_EQ(syntax_code("def c : U 0 := a ^ {bogus}"), ErrorCode::Syntax);
  try {
    parse_module("postulate A : U 0\ndef x : A :=");
    FAIL();
  } catch (const SttError& e) {
    EXPECT_EQ(e.diag.span.line, 2);
  }
}

TEST(Resolver, UnboundAndGlobals) {
  std::vector<std::string> locals;
  try {
    resolve_term(parse_expr("\\x. y"), locals, never_global);
    FAIL();
  } catch (const SttError& e) {
    EXPECT_EQ(e.diag.code, ErrorCode::Unbound);
  }
  auto is_g = [](const std::string& n) { return n == "g"; };
  TermPtr t = resolve_term(parse_expr("\\x. g x"), locals, is_g);
  EXPECT_EQ(t->kids[0]->kids[0]->tag, Tag::Global);
}

TEST(Resolver, ShadowingPicksInnermost) {
  TermPtr t = resolved("\\x x. x");
  EXPECT_EQ(t->kids[0]->kids[0]->index, 0);
}

TEST(Printer, RoundTripExpressions) {
  for (const char* s : {"\\x. x", "(A :{flat} U 0) -> <flat| A> -> A", "\\A x. let mod{flat} y = x in y ^ {eps}",
                        "fst (refl, tt)", "natrec (\\_. Nat) zero (\\_ r. suc r) (suc zero)",
                        "J (\\y _. Bool) true refl", "((\\x. x) : Nat -> Nat) zero = zero"}) {
    std::string once = roundtrip(s);
    EXPECT_EQ(roundtrip(once), once) << s;
    EXPECT_TRUE(alpha_eq(stt::testing::settle_cells(resolved(once)), stt::testing::settle_cells(resolved(s))))
        << s << " printed as " << once;
  }
}

TEST(Printer, FreshNamesAvoidCapture) {
  // A binder named like a free local must not capture it when printed.
  std::vector<std::string> locals = {"x"};
  TermPtr t = mk_lam("x", mk_app(mk_var(1), mk_var(0), Modality::id()));
  std::string s = print_term(t, locals);
  TermPtr back = resolved(s, locals);
  EXPECT_TRUE(alpha_eq(back, t, true)) << s;
}

TEST(Printer, CorpusDeclarationsRoundTrip) {
  // print -> parse -> resolve is the identity up to binder names on every
  // accepted declaration of the prelude and corpus.
  std::vector<std::string> files;
  for (const auto& f : stt_files(stt::testing::prelude_path())) files.push_back(f);
  for (const auto& f : stt::testing::corpus_files()) files.push_back(f);
  int count = 0;
  for (const auto& file : files) {
    auto decls = parse_module(stt::testing::read_file(file));
    auto any_global = [](const std::string&) { return true; };
    for (auto& d : decls) {
      if (d.kind == Decl::Kind::Import) continue;
      resolve_decl(d, any_global);
      std::string text = print_decl(d);
      auto again = parse_module(text);
      ASSERT_EQ(again.size(), 1u) << text;
      resolve_decl(again[0], any_global);
      EXPECT_EQ(again[0].name, d.name);
      EXPECT_TRUE(alpha_eq(stt::testing::settle_cells(again[0].type), stt::testing::settle_cells(d.type)))
          << file << ": " << text;
      if (d.body)
        EXPECT_TRUE(alpha_eq(stt::testing::settle_cells(again[0].body), stt::testing::settle_cells(d.body)))
            << file << ": " << text;
      ++count;
    }
  }
  EXPECT_GT(count, 250);
}
