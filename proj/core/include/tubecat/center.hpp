#pragma once

#include <string>
#include <vector>

#include "tubecat/context.hpp"
#include "tubecat/tube.hpp"

namespace tubecat::center {

using diag::Morphism;
using diag::Word;
using tube::DecoratedCircle;
using tube::Labelling;

// A simple object of the Drinfeld center: an underlying direct sum of simples
// of C together with a half-braiding. sigma[z][j][i] : u_i (x) z -> z (x) u_j.
struct CenterSimple {
  std::string name;
  std::vector<Label> comps;
  double qdim = 1.0;
  cplx twist = 1.0;
  std::vector<std::vector<std::vector<Morphism>>> sigma;

  int k() const { return static_cast<int>(comps.size()); }
};

struct CenterData {
  ContextPtr ctx;
  std::vector<CenterSimple> simples;
  double total_dim_sq = 0.0;
  std::vector<int> conj;  // index of the conjugate simple

  int vacuum() const;  // index of the unit simple
};

// Classified center assembled from the tube-algebra block decomposition of
// the one-point circle: one simple per block, with half-braidings extracted
// from the block irreps.
CenterData compute_center(ContextPtr ctx, unsigned seed = 0);

// Independent brute-force classification: enumerate candidate underlying
// objects up to total multiplicity mult_bound and solve the hexagon and
// unitarity equations for sigma directly (Gauss-Newton from random starts).
// Completeness is certified by sum d_X^2 = D^4.
CenterData oracle_center(ContextPtr ctx, int mult_bound = 4, unsigned seed = 0);

// Residual of the center membership equations for a candidate simple.
double half_braiding_residual(const Context& ctx, const CenterSimple& X);

// Twist from the curl diagram (1/d_X) qtr(c_{X,X}); independent of tube data.
cplx twist_from_sigma(const Context& ctx, const CenterSimple& X);

// The dual object X* with its induced half-braiding.
CenterSimple dual_simple(const Context& ctx, const CenterSimple& X);

// dim Z(C)(src -> dst); src/dst are lists of center simples (tensor words).
long center_hom_dimension(const Context& ctx, const std::vector<const CenterSimple*>& src,
                          const std::vector<const CenterSimple*>& dst);

// Orthonormal basis of Z(C)(src -> dst) inside Hom_C(u(src) -> u(dst)),
// cut out by the crossing-naturality constraints; flattened over component
// tuples with the layout below.
struct WordHomSpace {
  std::vector<const CenterSimple*> src, dst;
  // Component tuples and per-tuple tree layout for flattening morphisms
  // u(src) -> u(dst).
  struct TupleItem {
    std::vector<int> comps_src, comps_dst;
    Word wsrc, wdst;
    long offset;
    long size;
  };
  std::vector<TupleItem> tuples;
  long flat_dim = 0;
  std::vector<Eigen::VectorXcd> onb;  // center morphisms, orthonormal
};

WordHomSpace word_hom_space(const Context& ctx, std::vector<const CenterSimple*> src,
                            std::vector<const CenterSimple*> dst);

// Morphism blocks of a flattened vector, aligned with hs.tuples.
std::vector<Morphism> unflatten_word_hom(const Context& ctx, const WordHomSpace& hs,
                                         const Eigen::VectorXcd& v);

// Equivalence of candidate center simples (unitary intertwiner exists).
bool equivalent_simples(const Context& ctx, const CenterSimple& a, const CenterSimple& b);

// ---- Module bases C(X -> chi^S) and direct tube-element constructions ----

// Basis item of C(X -> W(labelling)) for a decorated circle.
struct ModuleSpace {
  const CenterSimple* X;
  DecoratedCircle circle;
  struct Item {
    Labelling labelling;
    int comp;
    int tree;
  };
  std::vector<Item> items;  // ordered by (labelling, comp, tree)
  long dim() const { return static_cast<long>(items.size()); }
};

ModuleSpace module_space(const Context& ctx, const CenterSimple& X, const DecoratedCircle& circle);

// A formal tube element presented by diagrams, independent of any assembled
// TubeAlgebra (scales to large circles).
struct TubeDiagram {
  Label x;
  Labelling in, out;
  Morphism f;  // (x) W(in) -> W(out) (x)
};
using FormalTubeElement = std::vector<TubeDiagram>;

// Matrix unit E^X_{w_j; w_i} = d_X [w_j, dotted loop, w_i^dagger] for unit
// vectors w_i, w_j in the module space (coordinates over module items).
FormalTubeElement matrix_unit_diagrams(const Context& ctx, const CenterSimple& X,
                                       const DecoratedCircle& circle, const Eigen::VectorXcd& wj,
                                       const Eigen::VectorXcd& wi);

// Central projector P^X = sum_i E^X_{ii} over an orthonormal module basis.
FormalTubeElement central_projector_diagrams(const Context& ctx, const CenterSimple& X,
                                             const DecoratedCircle& circle);

// The distinguished vacuum vector on a two-point (+,-) puncture circle:
// w = (1/D) sum_a d_a^{1/2} (arc); general circles get the first basis vector.
Eigen::VectorXcd distinguished_w(const Context& ctx, const CenterSimple& X,
                                 const DecoratedCircle& circle, const ModuleSpace& ms);

// Convert a formal element to coefficients in an assembled tube algebra.
tube::TubeElement to_algebra_element(const tube::TubeAlgebra& alg, const FormalTubeElement& fe);

}  // namespace tubecat::center
