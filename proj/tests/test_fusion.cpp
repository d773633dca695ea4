#include <doctest.h>

#include <cmath>
#include <fstream>

#include "tubecat/fusion.hpp"

using namespace tubecat;

namespace {
const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("builtin categories validate") {
  for (const char* name : {"trivial", "vec_z2", "vec_z3", "vec_z4", "fibonacci", "ising"}) {
    CAPTURE(name);
    FusionCategoryData cat = builtin(name);
    ValidationReport rep = validate(cat, 1e-9);
    CHECK(rep.passed());
    for (const auto& item : rep.items) {
      CAPTURE(item.name);
      CHECK(item.residual <= 1e-9);
    }
  }
}

TEST_CASE("trivial category residuals are exactly zero") {
  FusionCategoryData cat = builtin("trivial");
  ValidationReport rep = validate(cat, 1e-12);
  CHECK(rep.max_residual() == 0.0);
}

TEST_CASE("quantum dimensions") {
  CHECK(quantum_dimension(builtin("trivial"), 0) == doctest::Approx(1.0));
  FusionCategoryData fib = builtin("fibonacci");
  CHECK(quantum_dimension(fib, 1) == doctest::Approx(phi).epsilon(1e-12));
  CHECK(fib.total_dim * fib.total_dim == doctest::Approx(1.0 + phi * phi).epsilon(1e-12));
  FusionCategoryData ising = builtin("ising");
  CHECK(quantum_dimension(ising, ising.label_index("sigma")) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  FusionCategoryData z2 = builtin("vec_z2");
  CHECK(z2.total_dim == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(quantum_dimension(fib, 7), UnknownLabel);
}

TEST_CASE("unknown builtin") {
  CHECK_THROWS_AS(builtin("rep_s3"), UnknownBuiltin);
}

TEST_CASE("perturbed fibonacci fails pentagon") {
  FusionCategoryData cat = builtin("fibonacci");
  cat.fsymbols[fkey(1, 1, 1, 1, 1, 1)] = +1.0 / phi;  // sign flip
  ValidationReport rep = validate(cat, 1e-9);
  CHECK_FALSE(rep.passed());
  double pent = 0;
  for (const auto& it : rep.items)
    if (it.name == "pentagon") pent = it.residual;
  CHECK(pent > 0.1);
}

TEST_CASE("serialize round-trips bit for bit") {
  for (const char* name : {"vec_z3", "fibonacci", "ising"}) {
    FusionCategoryData cat = builtin(name);
    std::string s1 = serialize(cat);
    FusionCategoryData cat2 = parse_category(s1);
    CHECK(serialize(cat2) == s1);
    CHECK(content_hash(cat2) == content_hash(cat));
  }
}

TEST_CASE("multiplicity rejected") {
  // N[tau][tau][tau] = 2 cannot be expressed: duplicate triple is the file-level analogue.
  std::string txt = R"({
    "labels": ["1","tau"], "unit": "1",
    "dual": {"1":"1","tau":"tau"},
    "fusion": [["1","1","1"],["1","tau","tau"],["tau","1","tau"],["tau","tau","1"],
               ["tau","tau","tau"],["tau","tau","tau"]]
  })";
  CHECK_THROWS_AS(parse_category(txt), ValidationError);
}

TEST_CASE("hand-authored vec_z2 file loads") {
  std::string txt = R"({
    "labels": ["0","1"], "unit": "0",
    "dual": {"0":"0","1":"1"},
    "fusion": [["0","0","0"],["0","1","1"],["1","0","1"],["1","1","0"]]
  })";
  FusionCategoryData cat = parse_category(txt);
  CHECK(cat.n() == 2);
  CHECK(cat.total_dim == doctest::Approx(std::sqrt(2.0)));
  // All omitted F-symbols default to 1 for this pointed category.
  CHECK(cat.fsym(1, 1, 1, 1, 0, 0) == cplx(1.0, 0.0));
}

TEST_CASE("dual involution and qdim symmetry") {
  for (const char* name : {"vec_z3", "fibonacci", "ising"}) {
    FusionCategoryData cat = builtin(name);
    for (Label a = 0; a < cat.n(); ++a) {
      CHECK(cat.dual[cat.dual[a]] == a);
      CHECK(std::abs(cat.qdim[a] - cat.qdim[cat.dual[a]]) < 1e-12);
    }
  }
}
