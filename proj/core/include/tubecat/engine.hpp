#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tubecat/fusion.hpp"

namespace tubecat::diag {

// A word of simple labels, read left to right. The empty word is the unit.
using Word = std::vector<Label>;

Word dual_word(const FusionCategoryData& cat, const Word& w);
std::string word_name(const FusionCategoryData& cat, const Word& w);

// Left-comb fusion trees for a word with total channel c. A tree is stored as
// the sequence of intermediates (m_1 = w_0, ..., m_k = c).
struct TreeSpace {
  Word word;
  Label channel = 0;
  std::vector<std::vector<Label>> paths;
  int dim() const { return static_cast<int>(paths.size()); }
  int index_of(const std::vector<Label>& path) const;
};

// Morphism between tensor products of simples, stored block-diagonally over
// the total channel: block(c) has shape dim T(dst,c) x dim T(src,c) in the
// orthonormal left-comb tree bases.
struct Morphism {
  Word src, dst;
  std::map<Label, Eigen::MatrixXcd> blocks;

  const Eigen::MatrixXcd* block(Label c) const {
    auto it = blocks.find(c);
    return it == blocks.end() ? nullptr : &it->second;
  }
  Morphism& operator*=(cplx s);
  Morphism& operator+=(const Morphism& o);
  double norm_max() const;
  bool is_zero(double tol = 0.0) const;
};

// Pair basis for split tensors: enumerates (alpha, t1, mu, t2) with
// N(alpha,mu->c) = 1, for the decomposition of T(w1.w2, c).
struct PairBasis {
  struct Item {
    Label alpha, mu;
    int t1, t2;
  };
  std::vector<Item> items;
  int index_of(Label alpha, int t1, Label mu, int t2) const;

 private:
  std::unordered_map<std::uint64_t, int> lookup_;
  friend struct EngineImpl;
  friend class Engine;
};

// Grouped basis for a 3-way decomposition prefix|segment|suffix of a word:
// items (alpha,tp | mu,tu | beta,ts | rho) with N(mu,beta->rho), N(alpha,rho->c).
struct GroupedBasis {
  struct Item {
    Label alpha, mu, beta, rho;
    int tp, tu, ts;
  };
  std::vector<Item> items;
  Eigen::MatrixXcd to_grouped;  // |items| x dim T(w,c); unitary
  std::unordered_map<std::uint64_t, int> lookup;
  int index_of(const Item& it) const;
};

// Per-category diagram engine with memoized recoupling data. The category is
// immutable; caches are guarded so an Engine may be shared across threads.
class Engine {
 public:
  explicit Engine(const FusionCategoryData& cat);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const FusionCategoryData& cat() const { return *cat_; }

  const TreeSpace& trees(const Word& w, Label c) const;
  int tree_dim(const Word& w, Label c) const;
  std::vector<Label> word_channels(const Word& w) const;
  // Total dimension of Hom(src -> dst).
  long hom_dim(const Word& src, const Word& dst) const;

  const PairBasis& pair_basis(const Word& w1, const Word& w2, Label c) const;
  // Split of T(w,c) at position k: unitary matrix pairs x dim T(w,c).
  const Eigen::MatrixXcd& split(const Word& w, int k, Label c) const;
  const GroupedBasis& grouped(const Word& w, int k, int l, Label c) const;

  Morphism identity(const Word& w) const;
  Morphism zero(const Word& src, const Word& dst) const;
  // Isometric fusion vertex (a,b) -> (c); dagger gives the splitting vertex.
  Morphism vertex(Label a, Label b, Label c) const;
  // Normalized cups and caps: value sqrt(d_a) on the unit channel.
  Morphism coev(Label a) const;    // ()      -> (a, a*)
  Morphism coev_l(Label a) const;  // ()      -> (a*, a)
  Morphism ev(Label a) const;      // (a*, a) -> ()
  Morphism ev_r(Label a) const;    // (a, a*) -> ()

  Morphism compose(const Morphism& g, const Morphism& f) const;  // g after f
  Morphism dagger(const Morphism& f) const;
  Morphism add(const Morphism& f, const Morphism& g) const;
  Morphism scale(const Morphism& f, cplx s) const;
  cplx trace(const Morphism& f) const;                     // quantum trace
  cplx inner(const Morphism& f, const Morphism& g) const;  // tr(f† g)
  double norm(const Morphism& f) const { return std::sqrt(std::abs(inner(f, f).real())); }

  // (id ⊗ f ⊗ id) ∘ F where f acts on slots [k, k+|f.src|) of F.dst.
  Morphism apply_local(const Morphism& F, const Morphism& f, int k) const;
  // F ∘ (id ⊗ f ⊗ id) where f's dst occupies slots [k, ...) of F.src.
  Morphism apply_local_src(const Morphism& F, const Morphism& f, int k) const;

  // Tensor product via apply_local; f ⊗ g.
  Morphism tensor(const Morphism& f, const Morphism& g) const;

  // Leg rotations (bends). Names describe where a boundary leg moves.
  Morphism bend_first_src_to_dst(const Morphism& f) const;  // (a)u -> v  =>  u -> (a*)v
  Morphism bend_last_src_to_dst(const Morphism& f) const;   // u(a) -> v  =>  u -> v(a*)
  Morphism bend_first_dst_to_src(const Morphism& f) const;  // u -> (a)v  =>  (a*)u -> v
  Morphism bend_last_dst_to_src(const Morphism& f) const;   // u -> v(a)  =>  u(a*) -> v

  Morphism random_morphism(const Word& src, const Word& dst, std::mt19937& rng) const;

  // Flattened coordinates of Hom(src->dst): ordered (channel, t_dst, t_src).
  // Used when morphism spaces are treated as plain vectors.
  struct HomBasis {
    struct Item {
      Label c;
      int tdst, tsrc;
    };
    std::vector<Item> items;
  };
  HomBasis hom_basis(const Word& src, const Word& dst) const;
  Eigen::VectorXcd flatten(const Morphism& f) const;
  Morphism unflatten(const Word& src, const Word& dst, const Eigen::VectorXcd& v) const;

 private:
  const FusionCategoryData* cat_;
  struct Caches;
  std::unique_ptr<Caches> caches_;
};

}  // namespace tubecat::diag
