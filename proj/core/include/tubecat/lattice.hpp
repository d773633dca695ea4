#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "tubecat/center.hpp"
#include "tubecat/context.hpp"
#include "tubecat/tube.hpp"

namespace tubecat::lat {

using center::CenterSimple;
using center::FormalTubeElement;
using diag::Morphism;
using diag::Word;
using tube::DecoratedCircle;
using tube::Labelling;

using SparseOp = Eigen::SparseMatrix<cplx>;

// ---- square-lattice geometry ----

struct Coord {
  int x = 0, y = 0;
  bool operator==(const Coord&) const = default;
  bool operator<(const Coord& o) const { return y != o.y ? y < o.y : x < o.x; }
};

// Canonical (unoriented) edge: East or North from its base vertex.
struct EdgeId {
  Coord base;
  bool east = true;  // east from base, else north
  bool operator==(const EdgeId&) const = default;
  bool operator<(const EdgeId& o) const {
    if (!(base == o.base)) return base < o.base;
    return east < o.east;
  }
};

using FaceId = Coord;  // lower-left corner

// Leg directions around a vertex, in counterclockwise order.
enum Dir : int { E = 0, N = 1, W = 2, S = 3 };
Dir opposite(Dir d);

// A finite subcomplex of the square lattice, optionally with periodic
// topology. Immutable after construction.
class Region {
 public:
  static Region from_cells(std::vector<Coord> vertices, std::vector<EdgeId> edges,
                           std::vector<FaceId> faces);
  static Region disk(int w, int h);  // w x h faces anchored at the origin
  static Region torus(int lx, int ly);
  // Remove an edge together with its two neighbouring faces (a puncture).
  Region punctured(const EdgeId& e) const;
  // Remove a single face (keeps its boundary edges).
  Region without_face(const FaceId& f) const;
  // Region described by a list of faces (plus all their edges and vertices).
  static Region from_faces(const std::vector<FaceId>& faces);

  bool is_torus() const { return lx_ > 0; }
  int lx() const { return lx_; }
  int ly() const { return ly_; }

  const std::vector<Coord>& vertices() const { return vertices_; }
  const std::vector<EdgeId>& edges() const { return edges_; }
  const std::vector<FaceId>& faces() const { return faces_; }

  bool has_vertex(Coord v) const;
  bool has_edge(const EdgeId& e) const;
  bool has_face(const FaceId& f) const;
  int vertex_index(Coord v) const;
  int edge_index(const EdgeId& e) const;

  Coord wrap(Coord v) const;
  // Neighbour of v in direction d and the connecting canonical edge.
  std::pair<Coord, EdgeId> step(Coord v, Dir d) const;

  bool connected() const;

 private:
  void validate() const;
  std::vector<Coord> vertices_;
  std::vector<EdgeId> edges_;
  std::vector<FaceId> faces_;
  std::map<Coord, int> vindex_;
  std::map<EdgeId, int> eindex_;
  std::map<FaceId, int> findex_;
  int lx_ = 0, ly_ = 0;
};

Region parse_region_json(const std::string& text);

// ---- boundary components of the fattened surface ----

struct MarkedPoint {
  Coord vertex;
  Dir dir;    // leg direction at the vertex
  int sign;   // +1 if the canonical (E/N) orientation points out of the surface
};

// One walk step around a boundary component: a collar vertex passage.
struct RingStep {
  Coord vertex;
  Dir from;                       // direction of the corridor we arrived along
  Dir to;                         // direction of the corridor we leave along
  std::vector<int> marked;        // marked-point indices passed at this vertex
};

struct BoundaryComponent {
  bool outer = false;
  std::vector<MarkedPoint> points;  // enumeration order, starting at the fiducial
  std::vector<RingStep> ring;       // collar walk, aligned with the enumeration
  DecoratedCircle circle_type() const;
};

// All boundary components of Sigma_C; faces of C are filled. For each face of
// the ambient lattice missing from C there is a component (with no marked
// points when all four edges are present).
std::vector<BoundaryComponent> boundary_components(const Region& region);

// The boundary component around a missing face f (all four edges present).
BoundaryComponent face_component(const Region& region, const FaceId& f);
// The puncture component of region.punctured(e), computed on the punctured region.
BoundaryComponent puncture_component(const Region& punctured_region, const EdgeId& e);
// The outer boundary component of a finite planar region.
BoundaryComponent outer_component(const Region& region);

// ---- string-net configuration bases ----

// A configuration assigns labels to legs (consistently across internal edges
// when string_net_only) and a fusion channel to each vertex.
struct LegRef {
  Coord vertex;
  Dir dir;
  bool operator<(const LegRef& o) const {
    if (!(vertex == o.vertex)) return vertex < o.vertex;
    return dir < o.dir;
  }
  bool operator==(const LegRef&) const = default;
};

class StringNetBasis {
 public:
  // sector: fixed labels for a set of legs (typically the outer boundary).
  StringNetBasis(ContextPtr ctx, const Region& region,
                 const std::map<LegRef, Label>& sector, bool string_net_only = true);

  const Region& region() const { return *region_; }
  const ContextPtr& context() const { return ctx_; }
  long dim() const { return static_cast<long>(configs_.size()); }
  bool string_net_only() const { return string_net_only_; }

  // Free legs (enumerated in configs), internal edges, vertices.
  const std::vector<LegRef>& free_legs() const { return free_legs_; }
  const std::map<LegRef, Label>& sector() const { return sector_; }

  struct Config {
    std::vector<Label> leg;      // label per free leg (aligned with free_legs)
    std::vector<Label> channel;  // fusion channel per vertex
  };
  const Config& config(long i) const { return configs_[i]; }
  long config_index(const Config& c) const;

  Label leg_label(long i, const LegRef& leg) const;  // free or sector
  // Norm of the raw (unnormalized) configuration vector in the skein inner
  // product; basis vectors used externally are the normalized ones.
  double raw_norm(long i) const { return norms_[i]; }

  // The four leg labels of a vertex in a config, in (E,N,W,S) order.
  std::array<Label, 4> vertex_legs(long i, Coord v) const;

 private:
  ContextPtr ctx_;
  const Region* region_;
  std::map<LegRef, Label> sector_;
  bool string_net_only_;
  std::vector<LegRef> free_legs_;
  std::map<LegRef, int> leg_pos_;          // position in Config::leg (internal edges share)
  std::vector<Config> configs_;
  std::unordered_map<std::string, long> index_;
  std::vector<double> norms_;

  friend class LatticeOps;
};

using BasisPtr = std::shared_ptr<const StringNetBasis>;

struct LatticeState {
  BasisPtr basis;
  Eigen::VectorXcd coeff;  // in the normalized configuration basis
};

cplx skein_inner_product(const LatticeState& u, const LatticeState& v);

long vertex_space_dim(const FusionCategoryData& cat);

// ---- operators ----

class LatticeOps {
 public:
  explicit LatticeOps(BasisPtr basis);

  const StringNetBasis& basis() const { return *basis_; }

  // Diagonal string-net projector at an edge (identity on constrained bases).
  SparseOp edge_projector(const EdgeId& e) const;
  // Product of all A_e.
  SparseOp string_net_projector() const;

  // Tube action of a formal element on a boundary component's collar.
  SparseOp tube_action(const BoundaryComponent& comp, const FormalTubeElement& t) const;
  // Interval action on a contiguous arc [first, first+count) of the component's
  // marked points.
  SparseOp interval_action(const BoundaryComponent& comp, int first, int count,
                           const tube::IntervalAlgebra& sub, const Eigen::VectorXcd& elem) const;

  // B_f = frt_f(dotted loop).
  SparseOp plaquette_projector(const FaceId& f) const;
  // Product of all B_f, restricted to the string-net subspace.
  SparseOp skein_subspace_projector() const;
  long skein_rank(double tol = 1e-9) const;

  // x-loop insertion around a face (building block of B_f).
  SparseOp face_loop(const FaceId& f, Label x) const;

 private:
  struct CollarPlan;
  const CollarPlan& collar_plan(const BoundaryComponent& comp) const;

  BasisPtr basis_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// Eigenpairs of the Levin-Wen Hamiltonian H = -sum_f B_f on a basis.
struct GroundSpace {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors; // columns
  long degeneracy = 0;           // eigenvalue -|F| multiplicity
};

enum class EdMethod { Dense, Sparse };

GroundSpace ground_space(const LatticeOps& ops, EdMethod method, int k,
                         long budget_nonzeros = 2000000);

}  // namespace tubecat::lat
