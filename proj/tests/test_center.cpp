#include <doctest.h>

#include <cmath>
#include <set>

#include "tubecat/center.hpp"

using namespace tubecat;
using namespace tubecat::center;

namespace {

const double phi = (1.0 + std::sqrt(5.0)) / 2.0;

ContextPtr ctx_of(const char* name) { return make_context(builtin(name)); }

std::multiset<long> dim_multiset(const CenterData& cd) {
  std::multiset<long> out;
  for (const auto& X : cd.simples) out.insert(std::lround(X.qdim * 1e6));
  return out;
}

std::multiset<long> twist_multiset(const CenterData& cd) {
  std::multiset<long> out;
  for (const auto& X : cd.simples) {
    double a = std::arg(X.twist);
    if (a < -1e-9) a += 2 * M_PI;
    out.insert(std::lround(a * 1e6));
  }
  return out;
}

std::multiset<std::multiset<Label>> underlying_tables(const CenterData& cd) {
  std::multiset<std::multiset<Label>> out;
  for (const auto& X : cd.simples) out.insert({X.comps.begin(), X.comps.end()});
  return out;
}

}  // namespace

TEST_CASE("trivial category center") {
  auto cd = compute_center(ctx_of("trivial"));
  REQUIRE(cd.simples.size() == 1);
  CHECK(cd.simples[0].qdim == doctest::Approx(1.0));
  CHECK(std::abs(cd.simples[0].twist - cplx(1)) < 1e-9);
  CHECK(cd.vacuum() == 0);
}

TEST_CASE("vec_z2 center: toric code") {
  auto ctx = ctx_of("vec_z2");
  auto cd = compute_center(ctx);
  REQUIRE(cd.simples.size() == 4);
  for (const auto& X : cd.simples) {
    CHECK(X.qdim == doctest::Approx(1.0));
    CHECK(half_braiding_residual(*ctx, X) < 1e-8);
    CHECK(std::abs(twist_from_sigma(*ctx, X) - X.twist) < 1e-8);
  }
  std::multiset<int> twists;
  for (const auto& X : cd.simples) twists.insert(static_cast<int>(std::lround(X.twist.real())));
  CHECK(twists == std::multiset<int>{-1, 1, 1, 1});
  CHECK(cd.total_dim_sq == doctest::Approx(4.0).epsilon(1e-8));
  // The charge: underlying {1} with sigma_g = -1.
  int charges = 0;
  for (const auto& X : cd.simples) {
    if (X.comps != std::vector<Label>{0}) continue;
    const Eigen::MatrixXcd* b = X.sigma[1][0][0].block(1);
    if (b && b->size() && std::abs((*b)(0, 0) + 1.0) < 1e-8) ++charges;
  }
  CHECK(charges == 1);
}

TEST_CASE("fibonacci center: doubled Fibonacci") {
  auto ctx = ctx_of("fibonacci");
  auto cd = compute_center(ctx);
  REQUIRE(cd.simples.size() == 4);
  std::multiset<long> dims = dim_multiset(cd);
  std::multiset<long> want{std::lround(1e6), std::lround(phi * 1e6), std::lround(phi * 1e6),
                           std::lround(phi * phi * 1e6)};
  CHECK(dims == want);
  for (const auto& X : cd.simples) {
    CHECK(half_braiding_residual(*ctx, X) < 1e-8);
    CHECK(std::abs(twist_from_sigma(*ctx, X) - X.twist) < 1e-8);
  }
  const double d4 = std::pow(ctx->cat.total_dim, 4);
  CHECK(cd.total_dim_sq == doctest::Approx(d4).epsilon(1e-8));
  // Ribbon relation: the dual of a simple carries the same twist, and all
  // simples of the doubled Fibonacci theory are self-dual.
  for (std::size_t i = 0; i < cd.simples.size(); ++i) {
    int j = cd.conj[i];
    CHECK(cd.simples[j].qdim == doctest::Approx(cd.simples[i].qdim).epsilon(1e-8));
    CHECK(std::abs(cd.simples[j].twist - cd.simples[i].twist) < 1e-8);
    CHECK(cd.conj[j] == static_cast<int>(i));
    CHECK(j == static_cast<int>(i));
  }
}

TEST_CASE("ising center") {
  auto ctx = ctx_of("ising");
  auto cd = compute_center(ctx);
  REQUIRE(cd.simples.size() == 9);
  long sum_k2 = 0;
  for (const auto& X : cd.simples) sum_k2 += long(X.k()) * X.k();
  CHECK(sum_k2 == 12);
  CHECK(cd.total_dim_sq == doctest::Approx(16.0).epsilon(1e-8));
  for (const auto& X : cd.simples) CHECK(half_braiding_residual(*ctx, X) < 1e-7);
}

TEST_CASE("oracle agrees with the tube-algebra classification") {
  for (const char* name : {"trivial", "vec_z2", "vec_z3", "fibonacci"}) {
    CAPTURE(name);
    auto ctx = ctx_of(name);
    auto cd = compute_center(ctx);
    auto oc = oracle_center(ctx);
    CHECK(cd.simples.size() == oc.simples.size());
    CHECK(dim_multiset(cd) == dim_multiset(oc));
    CHECK(twist_multiset(cd) == twist_multiset(oc));
    CHECK(underlying_tables(cd) == underlying_tables(oc));
    std::vector<bool> used(oc.simples.size(), false);
    for (const auto& X : cd.simples) {
      bool matched = false;
      for (std::size_t j = 0; j < oc.simples.size(); ++j) {
        if (used[j]) continue;
        if (equivalent_simples(*ctx, X, oc.simples[j])) {
          used[j] = true;
          matched = true;
          break;
        }
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("oracle classifies ising") {
  auto ctx = ctx_of("ising");
  auto oc = oracle_center(ctx);
  CHECK(oc.simples.size() == 9);
  CHECK(oc.total_dim_sq == doctest::Approx(16.0).epsilon(1e-6));
}

TEST_CASE("center hom dimensions") {
  {
    auto ctx = ctx_of("vec_z2");
    auto cd = compute_center(ctx);
    int vac = cd.vacuum();
    CHECK(center_hom_dimension(*ctx, {}, {&cd.simples[vac]}) == 1);
    const CenterSimple* f = nullptr;
    for (const auto& X : cd.simples)
      if (X.comps == std::vector<Label>{1} && std::abs(X.twist + 1.0) < 1e-8) f = &X;
    REQUIRE(f != nullptr);
    CHECK(center_hom_dimension(*ctx, {}, {f, f}) == 1);
    CHECK(center_hom_dimension(*ctx, {}, {f}) == 0);
  }
  {
    auto ctx = ctx_of("fibonacci");
    auto cd = compute_center(ctx);
    const CenterSimple* big = nullptr;
    for (const auto& X : cd.simples)
      if (X.k() == 2) big = &X;
    REQUIRE(big != nullptr);
    CHECK(center_hom_dimension(*ctx, {}, {big, big}) == 1);
    CHECK(center_hom_dimension(*ctx, {}, {big}) == 0);
    int vac = cd.vacuum();
    CHECK(center_hom_dimension(*ctx, {&cd.simples[vac]}, {&cd.simples[vac]}) == 1);
  }
}

TEST_CASE("dual simples carry valid half-braidings") {
  for (const char* name : {"vec_z2", "fibonacci"}) {
    CAPTURE(name);
    auto ctx = ctx_of(name);
    auto cd = compute_center(ctx);
    for (const auto& X : cd.simples) {
      CenterSimple D = dual_simple(*ctx, X);
      CHECK(half_braiding_residual(*ctx, D) < 1e-7);
      CHECK(center_hom_dimension(*ctx, {}, {&X, &D}) == 1);
    }
  }
}

TEST_CASE("formal matrix units reproduce the numeric decomposition") {
  for (const char* name : {"vec_z2", "fibonacci"}) {
    CAPTURE(name);
    auto ctx = ctx_of(name);
    auto cd = compute_center(ctx);
    tube::TubeAlgebra alg(ctx, tube::DecoratedCircle::all_plus(1));
    auto numeric = alg.minimal_central_projections();

    tube::TubeElement total = alg.zero_element();
    for (const auto& X : cd.simples) {
      auto fe = central_projector_diagrams(*ctx, X, alg.circle());
      tube::TubeElement p = to_algebra_element(alg, fe);
      CHECK((alg.multiply(p, p).coeff - p.coeff).norm() < 1e-8);
      CHECK((alg.star(p).coeff - p.coeff).norm() < 1e-8);
      total = alg.add(total, p);
      bool hit = false;
      for (const auto& q : numeric)
        if ((q.coeff - p.coeff).norm() < 1e-6) hit = true;
      CHECK(hit);
    }
    CHECK((total.coeff - alg.identity().coeff).norm() < 1e-8);
  }
}

TEST_CASE("formal central projectors on a two-point circle") {
  auto ctx = ctx_of("fibonacci");
  auto cd = compute_center(ctx);
  tube::DecoratedCircle circle{{+1, -1}};
  tube::TubeAlgebra alg(ctx, circle);
  tube::TubeElement total = alg.zero_element();
  std::vector<tube::TubeElement> ps;
  for (const auto& X : cd.simples) {
    auto fe = central_projector_diagrams(*ctx, X, circle);
    tube::TubeElement p = to_algebra_element(alg, fe);
    CHECK((alg.multiply(p, p).coeff - p.coeff).norm() < 1e-8);
    CHECK((alg.star(p).coeff - p.coeff).norm() < 1e-8);
    for (const auto& q : ps) CHECK(alg.multiply(p, q).coeff.norm() < 1e-8);
    ps.push_back(p);
    total = alg.add(total, p);
  }
  CHECK((total.coeff - alg.identity().coeff).norm() < 1e-8);
}

TEST_CASE("matrix unit diagram products") {
  auto ctx = ctx_of("vec_z2");
  auto cd = compute_center(ctx);
  tube::DecoratedCircle circle{{+1, -1}};
  tube::TubeAlgebra alg(ctx, circle);
  for (const auto& X : cd.simples) {
    ModuleSpace ms = module_space(*ctx, X, circle);
    if (ms.dim() < 2) continue;
    Eigen::VectorXcd w0 = Eigen::VectorXcd::Unit(ms.dim(), 0);
    Eigen::VectorXcd w1 = Eigen::VectorXcd::Unit(ms.dim(), 1);
    auto E01 = to_algebra_element(alg, matrix_unit_diagrams(*ctx, X, circle, w0, w1));
    auto E10 = to_algebra_element(alg, matrix_unit_diagrams(*ctx, X, circle, w1, w0));
    auto E00 = to_algebra_element(alg, matrix_unit_diagrams(*ctx, X, circle, w0, w0));
    auto E11 = to_algebra_element(alg, matrix_unit_diagrams(*ctx, X, circle, w1, w1));
    CHECK((alg.multiply(E01, E10).coeff - E00.coeff).norm() < 1e-8);
    CHECK((alg.multiply(E10, E01).coeff - E11.coeff).norm() < 1e-8);
    CHECK(alg.multiply(E01, E01).coeff.norm() < 1e-8);
    CHECK((alg.star(E01).coeff - E10.coeff).norm() < 1e-8);
  }
}

TEST_CASE("distinguished vacuum vector on the puncture circle") {
  auto ctx = ctx_of("fibonacci");
  auto cd = compute_center(ctx);
  tube::DecoratedCircle circle{{+1, -1}};
  const CenterSimple& vac = cd.simples[cd.vacuum()];
  ModuleSpace ms = module_space(*ctx, vac, circle);
  Eigen::VectorXcd w = distinguished_w(*ctx, vac, circle, ms);
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-10));
  tube::TubeAlgebra alg(ctx, circle);
  auto p1 = to_algebra_element(alg, matrix_unit_diagrams(*ctx, vac, circle, w, w));
  CHECK((alg.multiply(p1, p1).coeff - p1.coeff).norm() < 1e-9);
  CHECK((alg.star(p1).coeff - p1.coeff).norm() < 1e-9);
  auto P1 = to_algebra_element(alg, central_projector_diagrams(*ctx, vac, circle));
  CHECK((alg.multiply(P1, p1).coeff - p1.coeff).norm() < 1e-8);
}
