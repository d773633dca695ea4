#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "tubecat/tube.hpp"

using namespace tubecat;
using namespace tubecat::tube;

namespace {

ContextPtr ctx_of(const char* name) { return make_context(builtin(name)); }

double diff_norm(const TubeAlgebra&, const TubeElement& a, const TubeElement& b) {
  return (a.coeff - b.coeff).norm();
}

std::multiset<int> block_sizes(const TubeAlgebra& alg, unsigned seed = 0) {
  std::multiset<int> out;
  for (const auto& b : alg.decomposition(seed).blocks) out.insert(b.size);
  return out;
}

}  // namespace

TEST_CASE("tube algebra dimensions on the one-point circle") {
  std::map<std::string, int> want = {
      {"trivial", 1}, {"vec_z2", 4}, {"fibonacci", 7}, {"ising", 12}};
  for (const auto& [name, d] : want) {
    CAPTURE(name);
    TubeAlgebra alg(ctx_of(name.c_str()), DecoratedCircle::all_plus(1));
    CHECK(alg.dim() == d);
  }
}

TEST_CASE("identity is a two-sided unit and multiplication is associative") {
  std::mt19937 rng(1);
  for (const char* name : {"vec_z2", "fibonacci", "ising"}) {
    CAPTURE(name);
    TubeAlgebra alg(ctx_of(name), DecoratedCircle::all_plus(1));
    TubeElement one = alg.identity();
    TubeElement t = alg.random_element(rng);
    CHECK(diff_norm(alg, alg.multiply(one, t), t) < 1e-10);
    CHECK(diff_norm(alg, alg.multiply(t, one), t) < 1e-10);
    TubeElement a = alg.random_element(rng), b = alg.random_element(rng),
                c = alg.random_element(rng);
    TubeElement lhs = alg.multiply(alg.multiply(a, b), c);
    TubeElement rhs = alg.multiply(a, alg.multiply(b, c));
    CHECK(diff_norm(alg, lhs, rhs) < 1e-8 * std::max(1.0, lhs.coeff.norm()));
  }
}

TEST_CASE("star is an antilinear antihomomorphism and an involution") {
  std::mt19937 rng(2);
  for (const char* name : {"vec_z2", "fibonacci", "ising"}) {
    CAPTURE(name);
    TubeAlgebra alg(ctx_of(name), DecoratedCircle::all_plus(1));
    TubeElement a = alg.random_element(rng), b = alg.random_element(rng);
    CHECK(diff_norm(alg, alg.star(alg.star(a)), a) < 1e-9 * std::max(1.0, a.coeff.norm()));
    TubeElement lhs = alg.star(alg.multiply(a, b));
    TubeElement rhs = alg.multiply(alg.star(b), alg.star(a));
    CHECK(diff_norm(alg, lhs, rhs) < 1e-8 * std::max(1.0, lhs.coeff.norm()));
    Eigen::MatrixXcd ra = alg.rep(a);
    Eigen::MatrixXcd ras = alg.rep(alg.star(a));
    CHECK((ras - ra.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
    TubeElement p = alg.multiply(alg.star(a), a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(alg.rep(p));
    CHECK(es.eigenvalues().minCoeff() > -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
  }
}

TEST_CASE("block structure of the one-point tube algebras") {
  TubeAlgebra triv(ctx_of("trivial"), DecoratedCircle::all_plus(1));
  CHECK(block_sizes(triv) == std::multiset<int>{1});

  TubeAlgebra z2(ctx_of("vec_z2"), DecoratedCircle::all_plus(1));
  CHECK(block_sizes(z2) == std::multiset<int>{1, 1, 1, 1});

  TubeAlgebra fib(ctx_of("fibonacci"), DecoratedCircle::all_plus(1));
  CHECK(block_sizes(fib) == std::multiset<int>{1, 1, 1, 2});

  TubeAlgebra ising(ctx_of("ising"), DecoratedCircle::all_plus(1));
  CHECK(block_sizes(ising) == std::multiset<int>{1, 1, 1, 1, 1, 1, 1, 1, 2});
}

TEST_CASE("central projections resolve the identity") {
  for (const char* name : {"vec_z2", "fibonacci", "ising"}) {
    CAPTURE(name);
    TubeAlgebra alg(ctx_of(name), DecoratedCircle::all_plus(1));
    auto projs = alg.minimal_central_projections();
    TubeElement sum = alg.zero_element();
    std::mt19937 rng(5);
    TubeElement t = alg.random_element(rng);
    for (std::size_t i = 0; i < projs.size(); ++i) {
      sum = alg.add(sum, projs[i]);
      CHECK(diff_norm(alg, alg.star(projs[i]), projs[i]) < 1e-9);
      CHECK(diff_norm(alg, alg.multiply(projs[i], t), alg.multiply(t, projs[i])) <
            1e-8 * std::max(1.0, t.coeff.norm()));
      for (std::size_t j = 0; j < projs.size(); ++j) {
        TubeElement pij = alg.multiply(projs[i], projs[j]);
        if (i == j)
          CHECK(diff_norm(alg, pij, projs[i]) < 1e-8);
        else
          CHECK(pij.coeff.norm() < 1e-8);
      }
    }
    CHECK(diff_norm(alg, sum, alg.identity()) < 1e-8);
  }
}

TEST_CASE("matrix unit relations") {
  for (const char* name : {"vec_z2", "fibonacci", "ising"}) {
    CAPTURE(name);
    TubeAlgebra alg(ctx_of(name), DecoratedCircle::all_plus(1));
    const auto& dec = alg.decomposition();
    TubeElement total = alg.zero_element();
    for (std::size_t X = 0; X < dec.blocks.size(); ++X) {
      const auto& bd = dec.blocks[X];
      const int k = bd.size;
      for (int r = 0; r < k; ++r) total = alg.add(total, alg.element(bd.units[r][r]));
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
          for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q) {
              TubeElement prod =
                  alg.multiply(alg.element(bd.units[r][s]), alg.element(bd.units[p][q]));
              if (s == p)
                CHECK((prod.coeff - bd.units[r][q]).norm() < 1e-8);
              else
                CHECK(prod.coeff.norm() < 1e-8);
            }
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
          CHECK((alg.star(alg.element(bd.units[r][s])).coeff - bd.units[s][r]).norm() < 1e-8);
    }
    CHECK(diff_norm(alg, total, alg.identity()) < 1e-9);
  }
}

TEST_CASE("twists of the one-point tube algebras") {
  TubeAlgebra triv(ctx_of("trivial"), DecoratedCircle::all_plus(1));
  CHECK(std::abs(triv.twist_of(0) - cplx(1, 0)) < 1e-9);

  TubeAlgebra z2(ctx_of("vec_z2"), DecoratedCircle::all_plus(1));
  std::multiset<int> z2_twists;
  for (int b = 0; b < 4; ++b)
    z2_twists.insert(static_cast<int>(std::lround(z2.twist_of(b).real())));
  CHECK(z2_twists == std::multiset<int>{-1, 1, 1, 1});

  TubeAlgebra fib(ctx_of("fibonacci"), DecoratedCircle::all_plus(1));
  std::multiset<long> fib_args;
  for (int b = 0; b < 4; ++b) {
    double a = std::arg(fib.twist_of(b));
    if (a < -1e-9) a += 2 * M_PI;
    fib_args.insert(std::lround(a * 1e6));
  }
  std::multiset<long> want{0, 0, std::lround(4 * M_PI / 5 * 1e6), std::lround(6 * M_PI / 5 * 1e6)};
  CHECK(fib_args == want);
}

TEST_CASE("irrep modules are unitary and irreducible") {
  for (const char* name : {"vec_z2", "fibonacci"}) {
    CAPTURE(name);
    TubeAlgebra alg(ctx_of(name), DecoratedCircle::all_plus(1));
    const auto& dec = alg.decomposition();
    std::mt19937 rng(7);
    for (std::size_t X = 0; X < dec.blocks.size(); ++X) {
      auto mats = alg.irrep_module(static_cast<int>(X));
      const int k = dec.blocks[X].size;
      for (int trial = 0; trial < 20; ++trial) {
        TubeElement t = alg.random_element(rng);
        TubeElement ts = alg.star(t);
        Eigen::MatrixXcd mt = Eigen::MatrixXcd::Zero(k, k);
        Eigen::MatrixXcd ms = Eigen::MatrixXcd::Zero(k, k);
        for (int i = 0; i < alg.dim(); ++i) {
          mt += t.coeff[i] * mats[i];
          ms += ts.coeff[i] * mats[i];
        }
        CHECK((ms - mt.adjoint()).cwiseAbs().maxCoeff() < 1e-7 * std::max(1.0, t.coeff.norm()));
      }
      Eigen::MatrixXcd span(k * k, alg.dim());
      for (int i = 0; i < alg.dim(); ++i)
        span.col(i) = Eigen::Map<Eigen::VectorXcd>(mats[i].data(), k * k);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(span);
      int rank = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-8 * svd.singularValues()[0]) ++rank;
      CHECK(rank == k * k);
    }
  }
}

TEST_CASE("sum of squared block sizes equals the dimension, n = 0,1,2") {
  for (const char* name : {"trivial", "vec_z2", "fibonacci"}) {
    CAPTURE(name);
    for (int n : {0, 1, 2}) {
      CAPTURE(n);
      TubeAlgebra alg(ctx_of(name), DecoratedCircle::all_plus(n));
      long sum = 0;
      for (int s : block_sizes(alg)) sum += long(s) * s;
      CHECK(sum == alg.dim());
    }
  }
  for (int n : {0, 1}) {
    TubeAlgebra alg(ctx_of("ising"), DecoratedCircle::all_plus(n));
    long sum = 0;
    for (int s : block_sizes(alg)) sum += long(s) * s;
    CHECK(sum == alg.dim());
  }
}

TEST_CASE("decomposition is seed independent in its exported data") {
  TubeAlgebra alg(ctx_of("fibonacci"), DecoratedCircle::all_plus(1));
  auto s0 = block_sizes(alg, 0);
  for (unsigned seed : {1u, 2u}) {
    CHECK(block_sizes(alg, seed) == s0);
    for (int b = 0; b < 4; ++b)
      CHECK(std::abs(alg.twist_of(b, seed) - alg.twist_of(b, 0)) < 1e-7);
  }
}

TEST_CASE("dimension invariant under re-enumeration of marked points") {
  auto ctx = ctx_of("fibonacci");
  TubeAlgebra a(ctx, DecoratedCircle{{+1, -1}});
  TubeAlgebra b(ctx, DecoratedCircle{{-1, +1}});
  CHECK(a.dim() == b.dim());
  CHECK(block_sizes(a) == block_sizes(b));
}

TEST_CASE("interval algebra embeds as a unital *-homomorphism") {
  std::mt19937 rng(11);
  for (const char* name : {"vec_z2", "fibonacci"}) {
    CAPTURE(name);
    auto ctx = ctx_of(name);
    DecoratedCircle circle{{+1, -1, +1}};
    DecoratedInterval ival{{+1, -1}};
    TubeAlgebra full(ctx, circle);
    IntervalAlgebra sub(ctx, ival);

    Eigen::VectorXcd one = sub.identity();
    TubeElement eone = embed_cylinder_element(sub, one, full, 0);
    CHECK(diff_norm(full, eone, full.identity()) < 1e-10);

    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXcd a = sub.random_element(rng), b = sub.random_element(rng);
      TubeElement ea = embed_cylinder_element(sub, a, full, 0);
      TubeElement eb = embed_cylinder_element(sub, b, full, 0);
      TubeElement eab = embed_cylinder_element(sub, sub.multiply(a, b), full, 0);
      CHECK(diff_norm(full, full.multiply(ea, eb), eab) < 1e-8 * std::max(1.0, eab.coeff.norm()));
      TubeElement es = embed_cylinder_element(sub, sub.star(a), full, 0);
      CHECK(diff_norm(full, full.star(ea), es) < 1e-8 * std::max(1.0, es.coeff.norm()));
    }
  }
}
