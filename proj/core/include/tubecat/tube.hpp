#pragma once

#include <optional>
#include <random>
#include <vector>

#include "tubecat/context.hpp"

namespace tubecat::tube {

using diag::Morphism;
using diag::Word;

// Signed marked points in enumeration order; the fiducial point sits between
// the last and the first entry.
struct DecoratedCircle {
  std::vector<int> signs;
  int n() const { return static_cast<int>(signs.size()); }
  static DecoratedCircle all_plus(int n) { return DecoratedCircle{std::vector<int>(n, +1)}; }
};

struct DecoratedInterval {
  std::vector<int> signs;
  int n() const { return static_cast<int>(signs.size()); }
};

using Labelling = std::vector<Label>;  // one label per marked point

// The object word of a labelling: dual labels at negative points.
Word signed_word(const FusionCategoryData& cat, const std::vector<int>& signs, const Labelling& l);

// Basis vector of Tube_S: wrapping strand x with a morphism basis entry of
// C(x (x)W_in -> W_out (x)), indexed by total channel and a tree pair.
struct TubeBasisElem {
  Label x;
  Labelling in, out;
  Label c;
  int tin, tout;
};

class TubeAlgebra;

struct TubeElement {
  const TubeAlgebra* alg = nullptr;
  Eigen::VectorXcd coeff;
};

struct BlockData {
  // Module basis (a-bar, i) of C(X -> chi^S), in deterministic order.
  std::vector<std::pair<Labelling, int>> module_basis;
  Eigen::VectorXcd central_projector;
  // units[r][s] = E_{module_basis[r]; module_basis[s]}
  std::vector<std::vector<Eigen::VectorXcd>> units;
  int size = 0;
  cplx twist = 1.0;  // populated for one-point circles only
};

struct Decomposition {
  std::vector<BlockData> blocks;
  unsigned seed = 0;
};

// The tube algebra over a decorated circle, with structure constants built
// from the diagram engine. Immutable after construction; the block
// decomposition is computed on demand and cached.
class TubeAlgebra {
 public:
  TubeAlgebra(ContextPtr ctx, DecoratedCircle circle);

  const FusionCategoryData& cat() const { return ctx_->cat; }
  const diag::Engine& eng() const { return ctx_->eng; }
  const ContextPtr& context() const { return ctx_; }
  const DecoratedCircle& circle() const { return circle_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<TubeBasisElem>& basis() const { return basis_; }

  TubeElement element(Eigen::VectorXcd v) const;
  TubeElement zero_element() const;
  TubeElement identity() const;
  TubeElement random_element(std::mt19937& rng) const;

  // Decomposes a single-strand morphism f : (x) W(in) -> W(out) (x).
  TubeElement from_morphism(Label x, const Labelling& in, const Labelling& out,
                            const Morphism& f) const;
  // Collects the (x,in,out) component of an element as a Morphism.
  Morphism morphism_of(const TubeElement& t, Label x, const Labelling& in,
                       const Labelling& out) const;

  TubeElement multiply(const TubeElement& a, const TubeElement& b) const;
  TubeElement star(const TubeElement& a) const;
  TubeElement add(const TubeElement& a, const TubeElement& b) const;
  TubeElement scale(const TubeElement& a, cplx s) const;
  cplx tau(const TubeElement& a) const;  // trace of left multiplication
  double norm(const TubeElement& a) const;

  // Projector element selecting boundary labelling a on both ends.
  TubeElement boundary_projector(const Labelling& a) const;
  // Full-rotation (Dehn twist) element; one-point circles only.
  TubeElement rotation_element() const;

  // Faithful *-representation by left multiplication in an orthonormal frame.
  Eigen::MatrixXcd rep(const TubeElement& t) const;

  const Decomposition& decomposition(unsigned seed = 0) const;
  std::vector<TubeElement> minimal_central_projections(unsigned seed = 0) const;

  // Irrep matrices of the block action on C(X -> chi^S): one matrix per basis
  // element of the algebra, in the block's module basis.
  std::vector<Eigen::MatrixXcd> irrep_module(int block, unsigned seed = 0) const;
  cplx twist_of(int block, unsigned seed = 0) const;

  int basis_index(Label x, const Labelling& in, const Labelling& out, Label c, int tin,
                  int tout) const;

  // The morphism of a single basis vector.
  Morphism unit_morphism(int i) const;

  // All labellings of the circle's marked points, lexicographic.
  std::vector<Labelling> labellings() const;

 private:
  void build_basis();
  const Eigen::VectorXcd& basis_product(int i, int j) const;
  Eigen::VectorXcd star_basis(int i) const;
  void ensure_numerics() const;

  ContextPtr ctx_;
  DecoratedCircle circle_;
  std::vector<TubeBasisElem> basis_;
  std::unordered_map<std::string, int> index_;

  struct Numerics;
  std::shared_ptr<Numerics> num_;  // lazily built, guarded
};

// Interval (cylinder-over-interval) algebra A(I) = C(chi^I -> chi^I).
class IntervalAlgebra {
 public:
  IntervalAlgebra(ContextPtr ctx, DecoratedInterval ival);
  const DecoratedInterval& interval() const { return ival_; }
  int dim() const { return static_cast<int>(basis_.size()); }

  struct Elem {
    Labelling in, out;
    Label c;
    int tin, tout;
  };
  const std::vector<Elem>& basis() const { return basis_; }

  Eigen::VectorXcd from_morphism(const Labelling& in, const Labelling& out,
                                 const Morphism& f) const;
  Morphism morphism_of(const Eigen::VectorXcd& v, const Labelling& in, const Labelling& out) const;
  Eigen::VectorXcd multiply(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const;
  Eigen::VectorXcd star(const Eigen::VectorXcd& a) const;
  Eigen::VectorXcd identity() const;
  Eigen::VectorXcd random_element(std::mt19937& rng) const;

  const ContextPtr& context() const { return ctx_; }

 private:
  ContextPtr ctx_;
  DecoratedInterval ival_;
  std::vector<Elem> basis_;
  std::unordered_map<std::string, int> index_;
};

// Embedding A(N') -> Tube_S for an interval occupying contiguous marked-point
// positions [pos, pos + |N'|) of the circle.
TubeElement embed_cylinder_element(const IntervalAlgebra& sub, const Eigen::VectorXcd& elem,
                                   const TubeAlgebra& full, int pos);

}  // namespace tubecat::tube
