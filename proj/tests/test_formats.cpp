#include <doctest.h>

#include <sstream>

#include "rigidgen/formats.hpp"
#include "rigidgen/perm.hpp"

using namespace rigidgen;
using namespace rigidgen::formats;

TEST_CASE("OA files round-trip")
{
  OAFile file{{3, 4, 2}, {oa::OAElement{{1, 2, 3, 1}}, oa::OAElement{{3, 3, 3, 3}}}};
  std::stringstream buffer;
  write_oa(buffer, file);
  CHECK(buffer.str() == "# oa q=3 n=4 t=2 N=2\n1 2 3 1\n3 3 3 3\n");
  const auto back = read_oa(buffer);
  CHECK(back.params.q == 3);
  CHECK(back.params.n == 4);
  CHECK(back.params.t == 2);
  CHECK(back.rows == file.rows);
}

TEST_CASE("design files round-trip and record lambda")
{
  DesignFile file{{7, 3, 2},
                  {design::Block{{1, 2, 3}}, design::Block{{1, 4, 5}}, design::Block{{1, 6, 7}}, design::Block{{2, 4, 6}},
                   design::Block{{2, 5, 7}}, design::Block{{3, 4, 7}}, design::Block{{3, 5, 6}}},
                  0};
  std::stringstream buffer;
  write_design(buffer, file);
  CHECK(buffer.str().starts_with("# design v=7 k=3 t=2 N=7 lambda=1\n"));
  const auto back = read_design(buffer);
  CHECK(back.blocks == file.blocks);
  CHECK(back.lambda == 1);
}

TEST_CASE("perm files round-trip")
{
  PermFile file{5, 2, perm::affine_fixture(5)};
  std::stringstream buffer;
  write_perm(buffer, file);
  const auto back = read_perm(buffer);
  CHECK(back.n == 5);
  CHECK(back.t == 2);
  CHECK(back.perms == file.perms);
}

TEST_CASE("blank lines and comments between rows are ignored")
{
  std::istringstream in("\n# oa q=2 n=2 t=1 N=2\n\n1 1\n# note\n2 2\n");
  CHECK(read_oa(in).rows.size() == 2);
}

namespace {

void expect_error(const std::string& text, std::size_t line, std::size_t column, const std::string& fragment,
                  int family = 0)
{
  std::istringstream in(text);
  try {
    if (family == 0) read_oa(in);
    else if (family == 1) read_design(in);
    else read_perm(in);
    FAIL("expected a parse error for: " << text);
  } catch (const ParseError& error) {
    CHECK(error.line() == line);
    CHECK(error.column() == column);
    CHECK(std::string(error.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("parse errors name the line and column")
{
  expect_error("# oa q=2 n=2 t=1 N=2\n1 1\n1 3\n", 3, 3, "outside 1..2");
  expect_error("# oa q=2 n=2 t=1 N=2\n1 1 1\n", 2, 5, "expected 2 entries");
  expect_error("# oa q=2 n=2 t=1 N=3\n1 1\n2 2\n", 3, 0, "N=3");
  expect_error("# oa q=2 n=2 t=1 N=1\n1 x\n", 2, 3, "expected an integer");
  expect_error("# oa q=2 n=2 N=1\n1 1\n", 1, 0, "missing 't='");
  expect_error("1 1\n", 1, 1, "expected header");
  expect_error("# oa q=2 n=2 t=3 N=0\n", 1, 0, "");
  expect_error("# design v=7 k=3 t=2 N=1 lambda=1\n1 3 2\n", 2, 5, "strictly increasing", 1);
  expect_error("# perm n=3 t=1 N=1\n1 2 2\n", 2, 5, "repeated image", 2);
  expect_error("# perm n=3 t=1 N=1 x=2\n1 2 3\n", 1, 20, "unknown header field", 2);
}
