#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "tubecat/errors.hpp"

namespace tubecat {

using cplx = std::complex<double>;
using Label = int;

// Packs six label indices (each < 256) into one key for the F-symbol table.
inline std::uint64_t fkey(int a, int b, int c, int d, int e, int f) {
  return (std::uint64_t(a) << 40) | (std::uint64_t(b) << 32) |
         (std::uint64_t(c) << 24) | (std::uint64_t(d) << 16) |
         (std::uint64_t(e) << 8) | std::uint64_t(f);
}

// A unitary fusion category presented by fusion rules and F-symbols.
// Multiplicity-free: every N[a][b][c] is 0 or 1. Label 0 is the tensor unit.
// Immutable after construction; safe to share across threads.
struct FusionCategoryData {
  std::vector<std::string> labels;
  std::vector<Label> dual;
  std::vector<std::uint8_t> fusion;  // n^3 table, index (a*n+b)*n+c
  std::unordered_map<std::uint64_t, cplx> fsymbols;
  std::vector<double> qdim;
  double total_dim = 1.0;

  int n() const { return static_cast<int>(labels.size()); }

  bool valid_label(Label a) const { return a >= 0 && a < n(); }

  void check_label(Label a) const {
    if (!valid_label(a)) throw UnknownLabel("label index out of range: " + std::to_string(a));
  }

  bool admissible(Label a, Label b, Label c) const {
    return fusion[(std::size_t(a) * n() + b) * n() + c] != 0;
  }

  // Channels c with N[a][b][c] = 1, ascending.
  std::vector<Label> channels(Label a, Label b) const {
    std::vector<Label> out;
    for (Label c = 0; c < n(); ++c)
      if (admissible(a, b, c)) out.push_back(c);
    return out;
  }

  cplx fsym(Label a, Label b, Label c, Label d, Label e, Label f) const;

  // [F^{abc}_d] on the admissible index grids (e rows, f cols).
  Eigen::MatrixXcd fmatrix(Label a, Label b, Label c, Label d) const;

  std::vector<Label> fgrid_e(Label a, Label b, Label c, Label d) const;
  std::vector<Label> fgrid_f(Label a, Label b, Label c, Label d) const;

  Label label_index(const std::string& name) const;

  // True if every fusion product a@b is a single simple (pointed category).
  bool pointed() const;
};

struct ValidationItem {
  std::string name;
  double residual;
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  double tolerance;

  double max_residual() const;
  bool passed() const { return max_residual() <= tolerance; }
  const ValidationItem& worst() const;
};

// Recomputes quantum dimensions from the fusion table (Perron-Frobenius) and
// fills qdim/total_dim. Called by load_category and builtin.
void recompute_dimensions(FusionCategoryData& cat);

// Structural checks that must hold before numerics make sense (duals are an
// involution, unit fuses trivially, multiplicity-free). Throws ValidationError.
void check_structure(const FusionCategoryData& cat);

// Full numerical report: pentagon, F-unitarity, unit normalization, pivotal
// normalization d_a [F^{a a* a}_a]_{11} = 1, dimension consistency.
ValidationReport validate(const FusionCategoryData& cat, double tol);

double quantum_dimension(const FusionCategoryData& cat, Label a);

// name in {trivial, vec_zN, fibonacci, ising}; instances are validated.
FusionCategoryData builtin(const std::string& name);

FusionCategoryData load_category(const std::string& path, double tol = 1e-9);
FusionCategoryData parse_category(const std::string& json_text, double tol = 1e-9);

// Canonical JSON form; load(serialize(cat)) reparses bit-for-bit.
std::string serialize(const FusionCategoryData& cat);

// Resolves a CLI argument: builtin name or a path to a category file.
FusionCategoryData resolve_category(const std::string& name_or_path, double tol = 1e-9);

// FNV-1a hash of the canonical serialization, for report provenance.
std::string content_hash(const FusionCategoryData& cat);

}  // namespace tubecat
