#include "synthetic_corpus.hpp"

#include <fmt/format.h>

namespace testscope::bench {

std::vector<SourceFile> synthetic_sources(std::size_t classes, std::size_t packages, std::size_t methods) {
  std::vector<SourceFile> out;
  for (std::size_t c = 0; c < classes; ++c) {
    std::string pkg = fmt::format("p{}", c % packages);
    std::string name = fmt::format("C{}", c);
    std::string prod = fmt::format("package {};\n\npublic class {} {{\n  private int state;\n  public {}() {{}}\n", pkg, name, name);
    for (std::size_t m = 0; m < methods; ++m) {
      prod += fmt::format("  public int m{}(int x) {{\n    state = state + x;\n    return helper{}(state);\n  }}\n", m, m);
      prod += fmt::format("  private int helper{}(int v) {{ return v * {}; }}\n", m, m + 1);
    }
    prod += "}\n";
    out.push_back(SourceFile{fmt::format("{}/{}.java", pkg, name), prod, false});

    std::string test = fmt::format(
        "package {}.test;\n\nimport {}.{};\nimport junit.framework.TestCase;\n\npublic class {}Test extends TestCase {{\n"
        "  private {} subject;\n  protected void setUp() {{ subject = new {}(); }}\n",
        pkg, pkg, name, name, name, name);
    for (std::size_t m = 0; m < methods; ++m) {
      test += fmt::format("  public void testM{}() {{\n    assertEquals({}, subject.m{}(1));\n  }}\n", m, m + 1, m);
    }
    test += "}\n";
    out.push_back(SourceFile{fmt::format("{}/test/{}Test.java", pkg, name), test, true});
  }
  return out;
}

}  // namespace testscope::bench
