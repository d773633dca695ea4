#include <doctest.h>

#include <cmath>
#include <random>

#include "tubecat/diagram.hpp"
#include "tubecat/engine.hpp"

using namespace tubecat;
using namespace tubecat::diag;

namespace {

double unitary_residual(const Eigen::MatrixXcd& m) {
  if (!m.size()) return 0;
  return (m.adjoint() * m - Eigen::MatrixXcd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

std::vector<FusionCategoryData> test_cats() {
  std::vector<FusionCategoryData> cats;
  for (const char* n : {"vec_z2", "vec_z3", "fibonacci", "ising"}) cats.push_back(builtin(n));
  return cats;
}

}  // namespace

TEST_CASE("tree dimensions match fusion-matrix counting") {
  FusionCategoryData fib = builtin("fibonacci");
  Engine eng(fib);
  // dim C(tau tau -> 1) = 1
  CHECK(eng.tree_dim({1, 1}, 0) == 1);
  // tau^3 -> tau has 2 fusion paths
  CHECK(eng.tree_dim({1, 1, 1}, 1) == 2);
  ObjectWord tt{{{1, +1}, {1, +1}}};
  ObjectWord unit{{}};
  CHECK(hom_dimension(fib, tt, unit) == 1);
  FusionCategoryData z2 = builtin("vec_z2");
  ObjectWord oo{{{1, +1}, {1, +1}}};
  CHECK(hom_dimension(z2, oo, unit) == 1);
  CHECK(hom_dimension(z2, unit, unit) == 1);
}

TEST_CASE("split tensors are unitary") {
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    std::vector<Word> words = {{1}, {1, 1}, {1, 1, 1}, {0, 1, 1, 1}};
    if (cat.n() > 2) words.push_back({1, 2, 1, 2});
    for (const Word& w : words) {
      for (int k = 0; k <= (int)w.size(); ++k)
        for (Label c : eng.word_channels(w)) {
          const auto& s = eng.split(w, k, c);
          CAPTURE(k);
          CAPTURE(c);
          CHECK(s.rows() == s.cols());
          CHECK(unitary_residual(s) < 1e-12);
        }
      for (int k = 0; k + 1 <= (int)w.size(); ++k)
        for (Label c : eng.word_channels(w)) {
          const auto& g = eng.grouped(w, k, 1, c);
          CHECK(unitary_residual(g.to_grouped) < 1e-12);
        }
    }
  }
}

TEST_CASE("loop values and snake identities") {
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    for (Label a = 0; a < cat.n(); ++a) {
      CHECK(loop_value(eng, a) == doctest::Approx(cat.qdim[a]).epsilon(1e-12));
      // (ev_r x id) (id x coev_l): the right zig-zag
      Morphism m = eng.identity({a});
      m = eng.apply_local(m, eng.coev_l(a), 1);
      m = eng.apply_local(m, eng.ev_r(a), 0);
      Morphism id = eng.identity({a});
      Morphism diff = eng.add(m, eng.scale(id, -1.0));
      CHECK(diff.norm_max() < 1e-10);
      // (ev x id) (id x coev): the left zig-zag
      Morphism m2 = eng.identity({a});
      m2 = eng.apply_local(m2, eng.coev(a), 0);
      m2 = eng.apply_local(m2, eng.ev(a), 1);
      Morphism diff2 = eng.add(m2, eng.scale(id, -1.0));
      CHECK(diff2.norm_max() < 1e-10);
    }
  }
}

TEST_CASE("bends invert each other") {
  std::mt19937 rng(7);
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    Word u = {1, 0, 1};
    Word v = {1, 1};
    Morphism f = eng.random_morphism(u, v, rng);
    {
      Morphism g = eng.bend_first_src_to_dst(f);
      Morphism h = eng.bend_first_dst_to_src(g);
      CHECK(eng.add(h, eng.scale(f, -1.0)).norm_max() < 1e-10);
    }
    {
      Morphism g = eng.bend_last_src_to_dst(f);
      Morphism h = eng.bend_last_dst_to_src(g);
      CHECK(eng.add(h, eng.scale(f, -1.0)).norm_max() < 1e-10);
    }
  }
}

TEST_CASE("apply_local composes like tensor algebra") {
  std::mt19937 rng(11);
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    Word w = {1, 1, 1};
    // Two disjoint local actions commute.
    Morphism f = eng.random_morphism({1}, {1}, rng);
    Morphism g = eng.random_morphism({1}, {1}, rng);
    Morphism base = eng.identity(w);
    Morphism a1 = eng.apply_local(eng.apply_local(base, f, 0), g, 2);
    Morphism a2 = eng.apply_local(eng.apply_local(base, g, 2), f, 0);
    CHECK(eng.add(a1, eng.scale(a2, -1.0)).norm_max() < 1e-10);
    // Sequential actions on the same slot compose.
    Morphism b1 = eng.apply_local(eng.apply_local(base, f, 1), g, 1);
    Morphism gf = eng.compose(g, f);
    Morphism b2 = eng.apply_local(base, gf, 1);
    CHECK(eng.add(b1, eng.scale(b2, -1.0)).norm_max() < 1e-10);
  }
}

TEST_CASE("tensor and trace are multiplicative") {
  std::mt19937 rng(3);
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    Morphism f = eng.random_morphism({1}, {1}, rng);
    Morphism g = eng.random_morphism({1, 1}, {1, 1}, rng);
    cplx t = eng.trace(eng.tensor(f, g));
    cplx want = eng.trace(f) * eng.trace(g);
    CHECK(std::abs(t - want) < 1e-8 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("f_move matches spec example values") {
  FusionCategoryData fib = builtin("fibonacci");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  Eigen::MatrixXcd m = f_move(fib, 1, 1, 1, 1);
  REQUIRE(m.rows() == 2);
  CHECK(std::abs(m(0, 0) - cplx(1 / phi)) < 1e-12);
  CHECK(std::abs(m(0, 1) - cplx(1 / std::sqrt(phi))) < 1e-12);
  CHECK(std::abs(m(1, 1) + cplx(1 / phi)) < 1e-12);
  CHECK(unitary_residual(m) < 1e-10);

  FusionCategoryData z2 = builtin("vec_z2");
  Eigen::MatrixXcd h = f_move(z2, 1, 1, 1, 1);
  REQUIRE(h.rows() == 1);
  CHECK(std::abs(h(0, 0) - cplx(1)) < 1e-14);

  FusionCategoryData ising = builtin("ising");
  Label s = ising.label_index("sigma");
  Eigen::MatrixXcd hs = f_move(ising, s, s, s, s);
  REQUIRE(hs.rows() == 2);
  CHECK(unitary_residual(hs) < 1e-12);
  CHECK(std::abs(hs(0, 0) - cplx(1 / std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("coloured vertex pair completeness") {
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    for (Word w : {Word{1, 1}, Word{1, 0, 1}}) {
      auto channels = coloured_vertex_pair(cat, w);
      Morphism sum = eng.zero(w, w);
      for (auto [a, weight] : channels)
        sum += eng.scale(vertex_pair_morphism(eng, w, a), weight);
      Morphism diff = eng.add(sum, eng.scale(eng.identity(w), -1.0));
      CHECK(diff.norm_max() < 1e-10);
    }
  }
}

TEST_CASE("dotted line closes to 1") {
  for (const auto& cat : test_cats()) {
    Engine eng(cat);
    double total = 0;
    for (auto [a, coeff] : dotted_line_expansion(cat)) total += coeff * loop_value(eng, a);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}
