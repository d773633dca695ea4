#include "tubecat/center.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace tubecat::center {

using diag::Engine;
using tube::TubeAlgebra;
using tube::TubeElement;

namespace {

// Flat layout of the unknowns of sigma_z for a fixed component list.
struct SigmaLayout {
  struct Blk {
    int i, j;  // from comp i to comp j
    Word src, dst;
    long offset = 0, size = 0;
  };
  std::vector<Blk> blks;
  long total = 0;
};

SigmaLayout sigma_layout(const Context& ctx, const std::vector<Label>& comps, Label z) {
  SigmaLayout lay;
  for (int i = 0; i < static_cast<int>(comps.size()); ++i)
    for (int j = 0; j < static_cast<int>(comps.size()); ++j) {
      SigmaLayout::Blk b;
      b.i = i;
      b.j = j;
      b.src = {comps[i], z};
      b.dst = {z, comps[j]};
      b.size = ctx.eng.hom_dim(b.src, b.dst);
      b.offset = lay.total;
      lay.total += b.size;
      if (b.size) lay.blks.push_back(b);
    }
  return lay;
}

std::vector<std::vector<Morphism>> unflatten_sigma(const Context& ctx,
                                                   const std::vector<Label>& comps, Label z,
                                                   const SigmaLayout& lay,
                                                   const Eigen::VectorXcd& v) {
  const int k = static_cast<int>(comps.size());
  std::vector<std::vector<Morphism>> out(k, std::vector<Morphism>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out[j][i] = ctx.eng.zero({comps[i], z}, {z, comps[j]});
  for (const auto& b : lay.blks)
    out[b.j][b.i] = ctx.eng.unflatten(b.src, b.dst, v.segment(b.offset, b.size));
  return out;
}

Eigen::VectorXcd flatten_sigma(const Context& ctx, const std::vector<Label>& comps, Label z,
                               const SigmaLayout& lay,
                               const std::vector<std::vector<Morphism>>& sig) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(lay.total);
  for (const auto& b : lay.blks) v.segment(b.offset, b.size) = ctx.eng.flatten(sig[b.j][b.i]);
  return v;
}

// Identity half-braiding blocks at z (used for the unit label and the vacuum).
std::vector<std::vector<Morphism>> identity_sigma(const Context& ctx,
                                                  const std::vector<Label>& comps, Label z) {
  const Engine& eng = ctx.eng;
  const int k = static_cast<int>(comps.size());
  std::vector<std::vector<Morphism>> out(k, std::vector<Morphism>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      out[j][i] = eng.zero({comps[i], z}, {z, comps[j]});
      if (i == j) {
        for (Label c : eng.word_channels({comps[i], z})) {
          int d = eng.tree_dim({comps[i], z}, c);
          if (d == eng.tree_dim({z, comps[i]}, c))
            out[j][i].blocks[c] = Eigen::MatrixXcd::Identity(d, d);
        }
      }
    }
  return out;
}

// sigma^{-1} blocks via unitarity: (sigma_z)^dagger.
std::vector<std::vector<Morphism>> sigma_inverse(const Context& ctx, const CenterSimple& X,
                                                 Label z) {
  const int k = X.k();
  std::vector<std::vector<Morphism>> out(k, std::vector<Morphism>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out[i][j] = ctx.eng.dagger(X.sigma[z][j][i]);
  return out;
}

double hexagon_residual(const Context& ctx, const std::vector<Label>& comps,
                        const std::vector<std::vector<std::vector<Morphism>>>& sigma) {
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  const int k = static_cast<int>(comps.size());
  double worst = 0;
  for (Label x = 1; x < cat.n(); ++x)
    for (Label y = 1; y < cat.n(); ++y)
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          // LHS: (id_x sigma_y)(sigma_x id_y) block (j <- i)
          Morphism lhs = eng.zero({comps[i], x, y}, {x, y, comps[j]});
          for (int mid = 0; mid < k; ++mid) {
            Morphism m = eng.identity({comps[i], x, y});
            m = eng.apply_local(m, sigma[x][mid][i], 0);
            m = eng.apply_local(m, sigma[y][j][mid], 1);
            lhs += m;
          }
          Morphism rhs = eng.zero({comps[i], x, y}, {x, y, comps[j]});
          for (Label c : cat.channels(x, y)) {
            Morphism m = eng.identity({comps[i], x, y});
            m = eng.apply_local(m, eng.vertex(x, y, c), 1);
            m = eng.apply_local(m, sigma[c][j][i], 0);
            m = eng.apply_local(m, eng.dagger(eng.vertex(x, y, c)), 0);
            rhs += m;
          }
          lhs += rhs *= -1.0;
          worst = std::max(worst, lhs.norm_max());
        }
  return worst;
}

double unit_residual(const Context& ctx, const std::vector<Label>& comps,
                     const std::vector<std::vector<std::vector<Morphism>>>& sigma) {
  auto id0 = identity_sigma(ctx, comps, 0);
  double worst = 0;
  for (std::size_t j = 0; j < id0.size(); ++j)
    for (std::size_t i = 0; i < id0.size(); ++i) {
      Morphism d = sigma[0][j][i];
      d += ctx.eng.scale(id0[j][i], -1.0);
      worst = std::max(worst, d.norm_max());
    }
  return worst;
}

double unitarity_residual(const Context& ctx, const std::vector<Label>& comps,
                          const std::vector<std::vector<std::vector<Morphism>>>& sigma) {
  const Engine& eng = ctx.eng;
  const int k = static_cast<int>(comps.size());
  double worst = 0;
  for (Label z = 0; z < ctx.cat.n(); ++z)
    for (int i1 = 0; i1 < k; ++i1)
      for (int i2 = 0; i2 < k; ++i2) {
        Morphism acc = eng.zero({comps[i1], z}, {comps[i2], z});
        for (int j = 0; j < k; ++j)
          acc += eng.compose(eng.dagger(sigma[z][j][i2]), sigma[z][j][i1]);
        if (i1 == i2) acc += eng.scale(eng.identity({comps[i1], z}), -1.0);
        worst = std::max(worst, acc.norm_max());
      }
  return worst;
}

}  // namespace

int CenterData::vacuum() const {
  for (std::size_t i = 0; i < simples.size(); ++i) {
    const auto& X = simples[i];
    if (X.comps != std::vector<Label>{0}) continue;
    double dev = 0;
    for (Label z = 0; z < ctx->cat.n(); ++z) {
      Morphism d = X.sigma[z][0][0];
      auto idb = identity_sigma(*ctx, X.comps, z);
      d += ctx->eng.scale(idb[0][0], -1.0);
      dev = std::max(dev, d.norm_max());
    }
    if (dev < 1e-6) return static_cast<int>(i);
  }
  throw NumericalDegeneracy("vacuum simple not found");
}

double half_braiding_residual(const Context& ctx, const CenterSimple& X) {
  return std::max({hexagon_residual(ctx, X.comps, X.sigma), unit_residual(ctx, X.comps, X.sigma),
                   unitarity_residual(ctx, X.comps, X.sigma)});
}

cplx twist_from_sigma(const Context& ctx, const CenterSimple& X) {
  cplx tr = 0;
  for (int i = 0; i < X.k(); ++i) tr += ctx.eng.trace(X.sigma[X.comps[i]][i][i]);
  return tr / X.qdim;
}

namespace {

// Action matrix of a tube basis morphism f : (z, a) -> (b, z) on the module
// C(X -> chi) of the one-point circle, given candidate sigma blocks at z.
Eigen::MatrixXcd module_action(const Context& ctx, const std::vector<Label>& comps,
                               const std::vector<std::vector<Morphism>>& sigz, Label z,
                               const Morphism& f) {
  const Engine& eng = ctx.eng;
  const int k = static_cast<int>(comps.size());
  const Label a = f.src[1];
  const Label b = f.dst[0];
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(k, k);
  for (int q = 0; q < k; ++q) {
    if (comps[q] != b) continue;
    for (int r = 0; r < k; ++r) {
      if (comps[r] != a) continue;
      Morphism m = eng.identity({comps[q]});
      m = eng.apply_local(m, eng.coev(z), 1);      // (u_q, z, z*)
      m = eng.apply_local(m, sigz[r][q], 0);       // (z, u_r, z*)
      m = eng.apply_local(m, f, 0);                // (b, z, z*)
      m = eng.apply_local(m, eng.ev_r(z), 1);      // (b)
      const Eigen::MatrixXcd* blk = m.block(b);
      // The trace-orthonormal module basis differs from the bare-diagram
      // normalization by sqrt(d) per component.
      if (blk && blk->size())
        A(q, r) = (*blk)(0, 0) * std::sqrt(ctx.cat.qdim[comps[q]] / ctx.cat.qdim[comps[r]]);
    }
  }
  return A;
}

// Extract sigma for one tube block by solving the linear system
// module_action(sigma) = numeric irrep.
std::vector<std::vector<std::vector<Morphism>>> extract_sigma(
    const Context& ctx, const TubeAlgebra& alg, const std::vector<Eigen::MatrixXcd>& irrep,
    const std::vector<Label>& comps) {
  const auto& cat = ctx.cat;
  const int k = static_cast<int>(comps.size());
  std::vector<std::vector<std::vector<Morphism>>> sigma(cat.n());
  for (Label z = 0; z < cat.n(); ++z) {
    SigmaLayout lay = sigma_layout(ctx, comps, z);
    // Rows: (basis element with x == z, q, r); columns: sigma coordinates.
    std::vector<int> elems;
    for (int i = 0; i < alg.dim(); ++i)
      if (alg.basis()[i].x == z) elems.push_back(i);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<long>(elems.size()) * k * k, lay.total);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(A.rows());
    for (std::size_t e = 0; e < elems.size(); ++e) {
      Morphism f = alg.unit_morphism(elems[e]);
      for (long u = 0; u < lay.total; ++u) {
        auto sig = unflatten_sigma(ctx, comps, z, lay, Eigen::VectorXcd::Unit(lay.total, u));
        Eigen::MatrixXcd act = module_action(ctx, comps, sig, z, f);
        for (int q = 0; q < k; ++q)
          for (int r = 0; r < k; ++r) A(e * k * k + q * k + r, u) = act(q, r);
      }
      const Eigen::MatrixXcd& want = irrep[elems[e]];
      for (int q = 0; q < k; ++q)
        for (int r = 0; r < k; ++r) rhs[e * k * k + q * k + r] = want(q, r);
    }
    Eigen::VectorXcd sol = A.colPivHouseholderQr().solve(rhs);
    double resid = (A * sol - rhs).norm();
    if (resid > 1e-7 * std::max(1.0, rhs.norm()))
      throw NumericalDegeneracy("half-braiding extraction inconsistent");
    sigma[z] = unflatten_sigma(ctx, comps, z, lay, sol);
  }
  return sigma;
}

}  // namespace

CenterData compute_center(ContextPtr ctx, unsigned seed) {
  const auto& cat = ctx->cat;
  TubeAlgebra alg(ctx, DecoratedCircle::all_plus(1));
  const auto& dec = alg.decomposition(seed);

  CenterData out;
  out.ctx = ctx;
  for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
    const auto& bd = dec.blocks[b];
    CenterSimple X;
    X.name = "Z" + std::to_string(b);
    for (const auto& [labelling, i] : bd.module_basis) X.comps.push_back(labelling[0]);
    X.qdim = 0;
    for (Label a : X.comps) X.qdim += cat.qdim[a];
    X.twist = bd.twist;
    X.sigma = extract_sigma(*ctx, alg, alg.irrep_module(static_cast<int>(b), seed), X.comps);
    out.simples.push_back(std::move(X));
  }
  out.total_dim_sq = 0;
  for (const auto& X : out.simples) out.total_dim_sq += X.qdim * X.qdim;

  out.conj.assign(out.simples.size(), -1);
  for (std::size_t i = 0; i < out.simples.size(); ++i) {
    CenterSimple dual = dual_simple(*ctx, out.simples[i]);
    for (std::size_t j = 0; j < out.simples.size(); ++j)
      if (equivalent_simples(*ctx, dual, out.simples[j])) {
        out.conj[i] = static_cast<int>(j);
        break;
      }
    if (out.conj[i] < 0) throw NumericalDegeneracy("conjugate simple not found");
  }
  return out;
}

CenterSimple dual_simple(const Context& ctx, const CenterSimple& X) {
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  CenterSimple D;
  D.name = X.name + "*";
  for (Label a : X.comps) D.comps.push_back(cat.dual[a]);
  D.qdim = X.qdim;
  D.twist = std::conj(X.twist);
  const int k = X.k();
  D.sigma.assign(cat.n(), {});
  for (Label z = 0; z < cat.n(); ++z) {
    auto sinv = sigma_inverse(ctx, X, z);
    D.sigma[z].assign(k, std::vector<Morphism>(k));
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) {
        // (ev_{u_r} x id) (id x sigma^{-1}[r,s] x id) (id x coev(u_s))
        Morphism m = eng.identity({cat.dual[X.comps[r]], z});
        m = eng.apply_local(m, eng.coev(X.comps[s]), 2);  // (u_r*, z, u_s, u_s*)
        m = eng.apply_local(m, sinv[r][s], 1);            // (u_r*, u_r, z, u_s*)
        m = eng.apply_local(m, eng.ev(X.comps[r]), 0);    // (z, u_s*)
        D.sigma[z][s][r] = m;
      }
  }
  return D;
}

bool equivalent_simples(const Context& ctx, const CenterSimple& a, const CenterSimple& b) {
  if (a.k() != b.k()) return false;
  std::multiset<Label> ma(a.comps.begin(), a.comps.end()), mb(b.comps.begin(), b.comps.end());
  if (ma != mb) return false;
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  const int k = a.k();
  // Unknown U: blocks U[s][r] : u^a_r -> u^b_s, scalars on matching labels.
  std::vector<std::pair<int, int>> slots;
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      if (a.comps[r] == b.comps[s]) slots.push_back({r, s});
  const long U = static_cast<long>(slots.size());
  if (U == 0) return false;
  std::vector<Eigen::MatrixXcd> constr;
  long total_rows = 0;
  for (Label z = 1; z < cat.n(); ++z)
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) {
        long dim = eng.hom_dim({a.comps[r], z}, {z, b.comps[s]});
        if (!dim) continue;
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, U);
        for (long u = 0; u < U; ++u) {
          auto [ur, us] = slots[u];
          Morphism lhs = eng.zero({a.comps[r], z}, {z, b.comps[s]});
          if (ur == r) lhs += b.sigma[z][s][us];
          if (us == s) lhs += eng.scale(a.sigma[z][ur][r], -1.0);
          M.col(u) = eng.flatten(lhs);
        }
        constr.push_back(M);
        total_rows += dim;
      }
  if (total_rows == 0) return true;
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(total_rows, U);
  long at = 0;
  for (const auto& M : constr) {
    big.block(at, 0, M.rows(), U) = M;
    at += M.rows();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(big);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  long rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-7 * std::max(1.0, smax)) ++rank;
  return U - rank > 0;
}

// ---------------- oracle ----------------

namespace {

struct OracleProblem {
  const Context* ctx;
  std::vector<Label> comps;
  std::vector<SigmaLayout> lay;  // per z >= 1
  long nparams = 0;              // complex parameters
};

OracleProblem make_problem(const Context& ctx, const std::vector<Label>& comps) {
  OracleProblem p;
  p.ctx = &ctx;
  p.comps = comps;
  p.lay.resize(ctx.cat.n());
  for (Label z = 1; z < ctx.cat.n(); ++z) {
    p.lay[z] = sigma_layout(ctx, comps, z);
    p.nparams += p.lay[z].total;
  }
  return p;
}

std::vector<std::vector<std::vector<Morphism>>> params_to_sigma(const OracleProblem& p,
                                                                const Eigen::VectorXcd& v) {
  const Context& ctx = *p.ctx;
  std::vector<std::vector<std::vector<Morphism>>> sigma(ctx.cat.n());
  sigma[0] = identity_sigma(ctx, p.comps, 0);
  long at = 0;
  for (Label z = 1; z < ctx.cat.n(); ++z) {
    sigma[z] = unflatten_sigma(ctx, p.comps, z, p.lay[z], v.segment(at, p.lay[z].total));
    at += p.lay[z].total;
  }
  return sigma;
}

Eigen::VectorXcd oracle_residual(const OracleProblem& p, const Eigen::VectorXcd& v) {
  const Context& ctx = *p.ctx;
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  auto sigma = params_to_sigma(p, v);
  const int k = static_cast<int>(p.comps.size());
  std::vector<cplx> out;

  for (Label x = 1; x < cat.n(); ++x)
    for (Label y = 1; y < cat.n(); ++y)
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          Morphism lhs = eng.zero({p.comps[i], x, y}, {x, y, p.comps[j]});
          for (int mid = 0; mid < k; ++mid) {
            Morphism m = eng.identity({p.comps[i], x, y});
            m = eng.apply_local(m, sigma[x][mid][i], 0);
            m = eng.apply_local(m, sigma[y][j][mid], 1);
            lhs += m;
          }
          for (Label c : cat.channels(x, y)) {
            Morphism m = eng.identity({p.comps[i], x, y});
            m = eng.apply_local(m, eng.vertex(x, y, c), 1);
            m = eng.apply_local(m, sigma[c][j][i], 0);
            m = eng.apply_local(m, eng.dagger(eng.vertex(x, y, c)), 0);
            lhs += eng.scale(m, -1.0);
          }
          Eigen::VectorXcd flat = eng.flatten(lhs);
          for (long t = 0; t < flat.size(); ++t) out.push_back(flat[t]);
        }

  // Unitarity residuals.
  for (Label z = 1; z < cat.n(); ++z)
    for (int i1 = 0; i1 < k; ++i1)
      for (int i2 = 0; i2 < k; ++i2) {
        Morphism acc = eng.zero({p.comps[i1], z}, {p.comps[i2], z});
        for (int j = 0; j < k; ++j)
          acc += eng.compose(eng.dagger(sigma[z][j][i2]), sigma[z][j][i1]);
        if (i1 == i2) acc += eng.scale(eng.identity({p.comps[i1], z}), -1.0);
        Eigen::VectorXcd flat = eng.flatten(acc);
        for (long t = 0; t < flat.size(); ++t) out.push_back(flat[t]);
      }

  if (out.empty()) return Eigen::VectorXcd();
  return Eigen::Map<Eigen::VectorXcd>(out.data(), out.size());
}

// Gauss-Newton with Levenberg damping over the real/imag parametrization.
bool oracle_solve(const OracleProblem& p, std::mt19937& rng, Eigen::VectorXcd& sol) {
  const long n = p.nparams;
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (long i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng)) * 0.7;
  if (n == 0) {
    sol = v;
    return oracle_residual(p, v).norm() < 1e-10;
  }

  double lambda = 1e-3;
  Eigen::VectorXcd F = oracle_residual(p, v);
  double fn = F.norm();
  for (int iter = 0; iter < 120; ++iter) {
    if (fn < 1e-12) break;
    // Numerical Jacobian over 2n real parameters.
    const double h = 1e-7;
    Eigen::MatrixXd J(2 * F.size(), 2 * n);
    for (long col = 0; col < n; ++col) {
      for (int part = 0; part < 2; ++part) {
        Eigen::VectorXcd v2 = v;
        v2[col] += part == 0 ? cplx(h, 0) : cplx(0, h);
        Eigen::VectorXcd F2 = oracle_residual(p, v2);
        Eigen::VectorXcd diff = (F2 - F) / h;
        for (long r = 0; r < F.size(); ++r) {
          J(2 * r, 2 * col + part) = diff[r].real();
          J(2 * r + 1, 2 * col + part) = diff[r].imag();
        }
      }
    }
    Eigen::VectorXd Fr(2 * F.size());
    for (long r = 0; r < F.size(); ++r) {
      Fr[2 * r] = F[r].real();
      Fr[2 * r + 1] = F[r].imag();
    }
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd Jtf = J.transpose() * Fr;
    bool improved = false;
    for (int tries = 0; tries < 8; ++tries) {
      Eigen::MatrixXd M = JtJ + lambda * Eigen::MatrixXd::Identity(2 * n, 2 * n);
      Eigen::VectorXd step = M.ldlt().solve(Jtf);
      Eigen::VectorXcd v2 = v;
      for (long i = 0; i < n; ++i) v2[i] -= cplx(step[2 * i], step[2 * i + 1]);
      Eigen::VectorXcd F2 = oracle_residual(p, v2);
      if (F2.norm() < fn) {
        v = v2;
        F = F2;
        fn = F2.norm();
        lambda = std::max(1e-12, lambda * 0.3);
        improved = true;
        break;
      }
      lambda *= 10;
    }
    if (!improved && fn > 1e-12) return false;
  }
  if (fn < 1e-10) {
    sol = v;
    return true;
  }
  return false;
}

bool is_simple(const Context& ctx, const CenterSimple& X) {
  // End_Z(X) = scalars: intertwiner space from X to itself has dimension 1.
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  const int k = X.k();
  std::vector<std::pair<int, int>> slots;
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      if (X.comps[r] == X.comps[s]) slots.push_back({r, s});
  const long U = static_cast<long>(slots.size());
  std::vector<Eigen::MatrixXcd> constr;
  long total_rows = 0;
  for (Label z = 1; z < cat.n(); ++z)
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) {
        long dim = eng.hom_dim({X.comps[r], z}, {z, X.comps[s]});
        if (!dim) continue;
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, U);
        for (long u = 0; u < U; ++u) {
          auto [ur, us] = slots[u];
          Morphism lhs = eng.zero({X.comps[r], z}, {z, X.comps[s]});
          if (ur == r) lhs += X.sigma[z][s][us];
          if (us == s) lhs += eng.scale(X.sigma[z][ur][r], -1.0);
          M.col(u) = eng.flatten(lhs);
        }
        constr.push_back(M);
        total_rows += dim;
      }
  if (total_rows == 0) return U == 1;
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(total_rows, U);
  long at = 0;
  for (const auto& M : constr) {
    big.block(at, 0, M.rows(), U) = M;
    at += M.rows();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(big);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  long rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-7 * std::max(1.0, smax)) ++rank;
  return U - rank == 1;
}

}  // namespace

CenterData oracle_center(ContextPtr ctx, int mult_bound, unsigned seed) {
  const auto& cat = ctx->cat;
  const double D4 = std::pow(cat.total_dim, 4);
  std::mt19937 rng(seed ^ 0x9e3779b9u);

  // Candidate multiplicity vectors ordered by total quantum dimension.
  std::vector<std::vector<Label>> candidates;
  std::vector<int> mvec(cat.n(), 0);
  std::function<void(int, int)> enumerate = [&](int label, int used) {
    if (label == cat.n()) {
      if (used == 0) return;
      std::vector<Label> comps;
      for (Label a = 0; a < cat.n(); ++a)
        for (int i = 0; i < mvec[a]; ++i) comps.push_back(a);
      candidates.push_back(comps);
      return;
    }
    for (int m = 0; m + used <= mult_bound; ++m) {
      mvec[label] = m;
      enumerate(label + 1, used + m);
    }
    mvec[label] = 0;
  };
  enumerate(0, 0);
  std::sort(candidates.begin(), candidates.end(),
            [&](const std::vector<Label>& a, const std::vector<Label>& b) {
              double da = 0, db = 0;
              for (Label l : a) da += cat.qdim[l];
              for (Label l : b) db += cat.qdim[l];
              if (std::abs(da - db) > 1e-12) return da < db;
              return a < b;
            });

  CenterData out;
  out.ctx = ctx;
  double found_sq = 0;
  for (const auto& comps : candidates) {
    if (std::abs(found_sq - D4) < 1e-6) break;
    OracleProblem prob = make_problem(*ctx, comps);
    const int starts = 24 + 8 * static_cast<int>(prob.nparams);
    for (int s = 0; s < starts; ++s) {
      if (std::abs(found_sq - D4) < 1e-6) break;
      Eigen::VectorXcd sol;
      if (!oracle_solve(prob, rng, sol)) continue;
      CenterSimple X;
      X.comps = comps;
      X.sigma = params_to_sigma(prob, sol);
      X.qdim = 0;
      for (Label a : comps) X.qdim += cat.qdim[a];
      if (!is_simple(*ctx, X)) continue;
      bool dup = false;
      for (const auto& Y : out.simples)
        if (equivalent_simples(*ctx, X, Y)) {
          dup = true;
          break;
        }
      if (dup) continue;
      X.twist = twist_from_sigma(*ctx, X);
      X.name = "W" + std::to_string(out.simples.size());
      found_sq += X.qdim * X.qdim;
      out.simples.push_back(std::move(X));
    }
  }
  if (std::abs(found_sq - D4) > 1e-6)
    throw SearchBoundExceeded("oracle did not exhaust the center within the multiplicity bound");

  out.total_dim_sq = found_sq;
  out.conj.assign(out.simples.size(), -1);
  for (std::size_t i = 0; i < out.simples.size(); ++i) {
    CenterSimple dual = dual_simple(*ctx, out.simples[i]);
    for (std::size_t j = 0; j < out.simples.size(); ++j)
      if (equivalent_simples(*ctx, dual, out.simples[j])) {
        out.conj[i] = static_cast<int>(j);
        break;
      }
  }
  return out;
}

// ---------------- center hom spaces ----------------

namespace {

std::vector<std::vector<int>> component_tuples(const std::vector<const CenterSimple*>& W) {
  std::vector<std::vector<int>> out{{}};
  for (const CenterSimple* X : W) {
    std::vector<std::vector<int>> next;
    for (const auto& t : out)
      for (int c = 0; c < X->k(); ++c) {
        auto t2 = t;
        t2.push_back(c);
        next.push_back(std::move(t2));
      }
    out = std::move(next);
  }
  return out;
}

Word tuple_word(const std::vector<const CenterSimple*>& W, const std::vector<int>& tuple) {
  Word w;
  for (std::size_t i = 0; i < W.size(); ++i) w.push_back(W[i]->comps[tuple[i]]);
  return w;
}

// Cross a z strand from the right end of the word to the left end:
// returns (tuple', Morphism w(tuple)(z) -> (z) w(tuple')).
std::vector<std::pair<std::vector<int>, Morphism>> cross_chain(
    const Context& ctx, const std::vector<const CenterSimple*>& W, const std::vector<int>& tuple,
    Label z) {
  const Engine& eng = ctx.eng;
  Word base = tuple_word(W, tuple);
  base.push_back(z);
  std::vector<std::pair<std::vector<int>, Morphism>> cur{{tuple, eng.identity(base)}};
  for (int f = static_cast<int>(W.size()) - 1; f >= 0; --f) {
    std::vector<std::pair<std::vector<int>, Morphism>> next;
    for (const auto& [t, m] : cur) {
      for (int j = 0; j < W[f]->k(); ++j) {
        const Morphism& blk = W[f]->sigma[z][j][t[f]];
        if (blk.is_zero()) continue;
        Morphism m2 = eng.apply_local(m, blk, f);
        if (m2.is_zero(1e-300)) continue;
        auto t2 = t;
        t2[f] = j;
        next.push_back({std::move(t2), std::move(m2)});
      }
    }
    // Merge branches with identical tuples.
    std::vector<std::pair<std::vector<int>, Morphism>> merged;
    for (auto& [t, m] : next) {
      bool hit = false;
      for (auto& [t0, m0] : merged)
        if (t0 == t) {
          m0 += m;
          hit = true;
          break;
        }
      if (!hit) merged.push_back({std::move(t), std::move(m)});
    }
    cur = std::move(merged);
  }
  return cur;
}

}  // namespace

WordHomSpace word_hom_space(const Context& ctx, std::vector<const CenterSimple*> src,
                            std::vector<const CenterSimple*> dst) {
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  WordHomSpace hs;
  hs.src = src;
  hs.dst = dst;
  auto tsrc = component_tuples(src);
  auto tdst = component_tuples(dst);
  for (const auto& ts : tsrc)
    for (const auto& td : tdst) {
      WordHomSpace::TupleItem it;
      it.comps_src = ts;
      it.comps_dst = td;
      it.wsrc = tuple_word(src, ts);
      it.wdst = tuple_word(dst, td);
      it.offset = hs.flat_dim;
      it.size = eng.hom_dim(it.wsrc, it.wdst);
      hs.flat_dim += it.size;
      if (it.size) hs.tuples.push_back(it);
    }
  if (hs.flat_dim == 0) return hs;

  // Constraint per z: sigma^dst_z (g x id_z) - (id_z x g) sigma^src_z = 0.
  std::vector<Eigen::MatrixXcd> constr;
  long rows = 0;
  for (Label z = 1; z < cat.n(); ++z) {
    std::map<std::vector<int>, std::vector<std::pair<std::vector<int>, Morphism>>> src_chain,
        dst_chain;
    for (const auto& ts : tsrc) src_chain[ts] = cross_chain(ctx, src, ts, z);
    for (const auto& td : tdst) dst_chain[td] = cross_chain(ctx, dst, td, z);

    struct OutSlot {
      std::vector<int> ts, td;
      long offset, size;
    };
    std::vector<OutSlot> oslots;
    long orows = 0;
    for (const auto& ts : tsrc)
      for (const auto& td : tdst) {
        Word ws = tuple_word(src, ts);
        ws.push_back(z);
        Word wd = tuple_word(dst, td);
        wd.insert(wd.begin(), z);
        long size = eng.hom_dim(ws, wd);
        if (size) oslots.push_back({ts, td, orows, size});
        orows += size;
      }
    auto find_slot = [&](const std::vector<int>& ts, const std::vector<int>& td) -> const OutSlot* {
      for (const auto& os : oslots)
        if (os.ts == ts && os.td == td) return &os;
      return nullptr;
    };

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(orows, hs.flat_dim);
    for (const auto& it : hs.tuples) {
      for (long u = 0; u < it.size; ++u) {
        Morphism g = eng.unflatten(it.wsrc, it.wdst, Eigen::VectorXcd::Unit(it.size, u));
        // LHS: dst-chain after (g x id_z).
        Word wsz = it.wsrc;
        wsz.push_back(z);
        Morphism gz = eng.apply_local(eng.identity(wsz), g, 0);
        for (const auto& [td2, chain] : dst_chain[it.comps_dst]) {
          Morphism lhs = eng.compose(chain, gz);
          if (const OutSlot* os = find_slot(it.comps_src, td2))
            M.block(os->offset, it.offset + u, os->size, 1) += eng.flatten(lhs);
        }
        // RHS: (id_z x g) after src-chains that land on this tuple.
        for (const auto& ts : tsrc) {
          for (const auto& [ts2, chain] : src_chain[ts]) {
            if (ts2 != it.comps_src) continue;
            Morphism rhs = eng.apply_local(chain, g, 1);
            if (const OutSlot* os = find_slot(ts, it.comps_dst))
              M.block(os->offset, it.offset + u, os->size, 1) -= eng.flatten(rhs);
          }
        }
      }
    }
    constr.push_back(M);
    rows += orows;
  }

  std::vector<Eigen::VectorXcd> null;
  if (rows == 0) {
    for (long i = 0; i < hs.flat_dim; ++i) null.push_back(Eigen::VectorXcd::Unit(hs.flat_dim, i));
  } else {
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(rows, hs.flat_dim);
    long at = 0;
    for (const auto& M : constr) {
      big.block(at, 0, M.rows(), hs.flat_dim) = M;
      at += M.rows();
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(big, Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    for (int i = 0; i < svd.matrixV().cols(); ++i)
      if (i >= svd.singularValues().size() ||
          svd.singularValues()[i] <= 1e-8 * std::max(1.0, smax))
        null.push_back(svd.matrixV().col(i));
  }

  // Orthonormalize w.r.t. the trace inner product (d_c weights per channel).
  Eigen::VectorXd w = Eigen::VectorXd::Ones(hs.flat_dim);
  for (const auto& it : hs.tuples) {
    auto hb = eng.hom_basis(it.wsrc, it.wdst);
    for (long u = 0; u < it.size; ++u) w[it.offset + u] = cat.qdim[hb.items[u].c];
  }
  for (auto& v : null) {
    Eigen::VectorXcd u = v;
    for (const auto& prev : hs.onb) {
      cplx ip = 0;
      for (long t = 0; t < u.size(); ++t) ip += std::conj(prev[t]) * w[t] * u[t];
      u -= ip * prev;
    }
    double nn = 0;
    for (long t = 0; t < u.size(); ++t) nn += w[t] * std::norm(u[t]);
    if (nn > 1e-12) hs.onb.push_back(u / std::sqrt(nn));
  }
  return hs;
}

std::vector<Morphism> unflatten_word_hom(const Context& ctx, const WordHomSpace& hs,
                                         const Eigen::VectorXcd& v) {
  std::vector<Morphism> out;
  for (const auto& it : hs.tuples)
    out.push_back(ctx.eng.unflatten(it.wsrc, it.wdst, v.segment(it.offset, it.size)));
  return out;
}

long center_hom_dimension(const Context& ctx, const std::vector<const CenterSimple*>& src,
                          const std::vector<const CenterSimple*>& dst) {
  return static_cast<long>(word_hom_space(ctx, src, dst).onb.size());
}

// ---------------- module spaces and diagram elements ----------------

ModuleSpace module_space(const Context& ctx, const CenterSimple& X,
                         const DecoratedCircle& circle) {
  const Engine& eng = ctx.eng;
  ModuleSpace ms;
  ms.X = &X;
  ms.circle = circle;
  // Enumerate labellings lexicographically.
  const int np = circle.n();
  Labelling cur(np, 0);
  std::vector<Labelling> all;
  if (np == 0)
    all.push_back({});
  else
    while (true) {
      all.push_back(cur);
      int i = np - 1;
      while (i >= 0 && cur[i] == ctx.cat.n() - 1) cur[i--] = 0;
      if (i < 0) break;
      ++cur[i];
    }
  for (const auto& l : all) {
    Word w = tube::signed_word(ctx.cat, circle.signs, l);
    for (int comp = 0; comp < X.k(); ++comp) {
      int d = eng.tree_dim(w, X.comps[comp]);
      for (int t = 0; t < d; ++t) ms.items.push_back({l, comp, t});
    }
  }
  return ms;
}

FormalTubeElement matrix_unit_diagrams(const Context& ctx, const CenterSimple& X,
                                       const DecoratedCircle& circle, const Eigen::VectorXcd& wj,
                                       const Eigen::VectorXcd& wi) {
  const Engine& eng = ctx.eng;
  const auto& cat = ctx.cat;
  ModuleSpace ms = module_space(ctx, X, circle);
  if (wi.size() != ms.dim() || wj.size() != ms.dim())
    throw ShapeMismatch("module vector length mismatch");

  // Collect per-labelling component morphisms of wi and wj.
  struct CompVec {
    Labelling l;
    std::vector<Morphism> per_comp;  // (u_r) -> W(l)
  };
  auto collect = [&](const Eigen::VectorXcd& w) {
    std::map<Labelling, CompVec> out;
    for (long t = 0; t < ms.dim(); ++t) {
      if (w[t] == cplx(0)) continue;
      const auto& item = ms.items[t];
      Word W = tube::signed_word(cat, circle.signs, item.labelling);
      auto& cv = out[item.labelling];
      if (cv.per_comp.empty()) {
        cv.l = item.labelling;
        for (int r = 0; r < X.k(); ++r) cv.per_comp.push_back(eng.zero({X.comps[r]}, W));
      }
      Label ch = X.comps[item.comp];
      auto& blk = cv.per_comp[item.comp].blocks[ch];
      if (!blk.size()) blk = Eigen::MatrixXcd::Zero(eng.tree_dim(W, ch), 1);
      // Module coordinates are trace-orthonormal: each item stands for the
      // tree unit vector scaled by 1/sqrt(d of the component).
      blk(item.tree, 0) += w[t] / std::sqrt(cat.qdim[ch]);
    }
    return out;
  };
  auto wi_parts = collect(wi);
  auto wj_parts = collect(wj);

  const double D2 = cat.total_dim * cat.total_dim;
  FormalTubeElement out;
  for (Label z = 0; z < cat.n(); ++z) {
    auto sinv = sigma_inverse(ctx, X, z);
    for (const auto& [la, cvi] : wi_parts)
      for (const auto& [lb, cvj] : wj_parts) {
        Word WA = tube::signed_word(cat, circle.signs, la);
        Word WB = tube::signed_word(cat, circle.signs, lb);
        Word src = WA;
        src.insert(src.begin(), z);
        Word dst = WB;
        dst.push_back(z);
        Morphism f = eng.zero(src, dst);
        bool any = false;
        for (int r = 0; r < X.k(); ++r) {
          if (cvi.per_comp[r].is_zero()) continue;
          for (int s = 0; s < X.k(); ++s) {
            if (cvj.per_comp[s].is_zero()) continue;
            if (sinv[s][r].is_zero()) continue;
            Morphism m = eng.identity(src);
            m = eng.apply_local(m, eng.dagger(cvi.per_comp[r]), 1);  // (z, u_r)
            m = eng.apply_local(m, sinv[s][r], 0);                   // (u_s, z)
            m = eng.apply_local(m, cvj.per_comp[s], 0);              // W(lb)(z)
            f += m;
            any = true;
          }
        }
        if (any) {
          f *= cplx(X.qdim * cat.qdim[z] / D2);
          out.push_back({z, la, lb, std::move(f)});
        }
      }
  }
  return out;
}

FormalTubeElement central_projector_diagrams(const Context& ctx, const CenterSimple& X,
                                             const DecoratedCircle& circle) {
  ModuleSpace ms = module_space(ctx, X, circle);
  FormalTubeElement out;
  for (long i = 0; i < ms.dim(); ++i) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Unit(ms.dim(), i);
    FormalTubeElement part = matrix_unit_diagrams(ctx, X, circle, e, e);
    for (auto& d : part) out.push_back(std::move(d));
  }
  return out;
}

Eigen::VectorXcd distinguished_w(const Context& ctx, const CenterSimple& X,
                                 const DecoratedCircle& circle, const ModuleSpace& ms) {
  const auto& cat = ctx.cat;
  const bool puncture_like =
      circle.n() == 2 && circle.signs[0] * circle.signs[1] < 0 && X.comps == std::vector<Label>{0};
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(ms.dim());
  if (puncture_like) {
    for (long t = 0; t < ms.dim(); ++t) {
      const auto& item = ms.items[t];
      if (item.labelling[0] == item.labelling[1] && item.comp == 0)
        w[t] = cat.qdim[item.labelling[0]] / cat.total_dim;
    }
    return w;
  }
  if (ms.dim() == 0) throw ShapeMismatch("empty module space");
  w[0] = 1.0;
  return w;
}

tube::TubeElement to_algebra_element(const tube::TubeAlgebra& alg, const FormalTubeElement& fe) {
  tube::TubeElement out = alg.zero_element();
  for (const auto& d : fe) out = alg.add(out, alg.from_morphism(d.x, d.in, d.out, d.f));
  return out;
}

}  // namespace tubecat::center
