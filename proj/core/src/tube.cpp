#include "tubecat/tube.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace tubecat::tube {

using diag::Engine;

namespace {

std::string pack_labelling(const Labelling& l) {
  std::string s;
  for (Label a : l) s.push_back(static_cast<char>(a + 1));
  return s;
}

std::string elem_key(Label x, const Labelling& in, const Labelling& out, Label c, int tin,
                     int tout) {
  std::string s;
  s.push_back(static_cast<char>(x + 1));
  s += pack_labelling(in);
  s.push_back('|');
  s += pack_labelling(out);
  s.push_back('|');
  s.push_back(static_cast<char>(c + 1));
  s += std::to_string(tin) + "," + std::to_string(tout);
  return s;
}

std::vector<Labelling> all_labellings(int n_labels, int n_points) {
  if (n_points == 0) return {Labelling{}};
  std::vector<Labelling> out;
  Labelling cur(n_points, 0);
  while (true) {
    out.push_back(cur);
    int i = n_points - 1;
    while (i >= 0 && cur[i] == n_labels - 1) cur[i--] = 0;
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

// Distinct eigenvalue clusters of a Hermitian spectrum.
struct Clusters {
  std::vector<double> values;
  double min_gap = 1e9;
};

Clusters cluster_eigen(const Eigen::VectorXd& ev, double tol) {
  Clusters c;
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end());
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    double sum = 0;
    while (j < v.size() && v[j] - v[i] < tol) sum += v[j++];
    c.values.push_back(sum / double(j - i));
    i = j;
  }
  for (std::size_t k = 1; k < c.values.size(); ++k)
    c.min_gap = std::min(c.min_gap, c.values[k] - c.values[k - 1]);
  return c;
}

}  // namespace

Word signed_word(const FusionCategoryData& cat, const std::vector<int>& signs, const Labelling& l) {
  Word w(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) w[i] = signs[i] >= 0 ? l[i] : cat.dual[l[i]];
  return w;
}

struct TubeAlgebra::Numerics {
  std::recursive_mutex mu;
  std::unordered_map<long long, Eigen::VectorXcd> products;
  std::vector<Eigen::VectorXcd> starv;
  bool frame_built = false;
  std::vector<Eigen::MatrixXcd> L;
  Eigen::VectorXcd trL;
  Eigen::MatrixXcd A, Ainv;
  std::map<unsigned, Decomposition> decomp;
};

TubeAlgebra::TubeAlgebra(ContextPtr ctx, DecoratedCircle circle)
    : ctx_(std::move(ctx)), circle_(std::move(circle)), num_(new Numerics) {
  build_basis();
}

std::vector<Labelling> TubeAlgebra::labellings() const {
  return all_labellings(cat().n(), circle_.n());
}

void TubeAlgebra::build_basis() {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  auto ls = labellings();
  for (Label x = 0; x < cat.n(); ++x)
    for (const auto& in : ls)
      for (const auto& out : ls) {
        Word src = signed_word(cat, circle_.signs, in);
        src.insert(src.begin(), x);
        Word dst = signed_word(cat, circle_.signs, out);
        dst.push_back(x);
        for (Label c = 0; c < cat.n(); ++c) {
          int din = eng.tree_dim(src, c), dout = eng.tree_dim(dst, c);
          for (int tin = 0; tin < din; ++tin)
            for (int tout = 0; tout < dout; ++tout) {
              index_[elem_key(x, in, out, c, tin, tout)] = static_cast<int>(basis_.size());
              basis_.push_back({x, in, out, c, tin, tout});
            }
        }
      }
}

int TubeAlgebra::basis_index(Label x, const Labelling& in, const Labelling& out, Label c, int tin,
                             int tout) const {
  auto it = index_.find(elem_key(x, in, out, c, tin, tout));
  return it == index_.end() ? -1 : it->second;
}

TubeElement TubeAlgebra::element(Eigen::VectorXcd v) const {
  if (v.size() != dim()) throw ShapeMismatch("tube element length mismatch");
  return TubeElement{this, std::move(v)};
}

TubeElement TubeAlgebra::zero_element() const {
  return TubeElement{this, Eigen::VectorXcd::Zero(dim())};
}

TubeElement TubeAlgebra::random_element(std::mt19937& rng) const {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = cplx(g(rng), g(rng));
  return TubeElement{this, std::move(v)};
}

TubeElement TubeAlgebra::from_morphism(Label x, const Labelling& in, const Labelling& out,
                                       const Morphism& f) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
  for (const auto& [c, m] : f.blocks)
    for (int tout = 0; tout < m.rows(); ++tout)
      for (int tin = 0; tin < m.cols(); ++tin) {
        if (m(tout, tin) == cplx(0)) continue;
        int idx = basis_index(x, in, out, c, tin, tout);
        if (idx < 0) throw ShapeMismatch("from_morphism: entry not in tube basis");
        v[idx] += m(tout, tin);
      }
  return TubeElement{this, std::move(v)};
}

Morphism TubeAlgebra::morphism_of(const TubeElement& t, Label x, const Labelling& in,
                                  const Labelling& out) const {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  Word src = signed_word(cat, circle_.signs, in);
  src.insert(src.begin(), x);
  Word dst = signed_word(cat, circle_.signs, out);
  dst.push_back(x);
  Morphism f = eng.zero(src, dst);
  for (Label c = 0; c < cat.n(); ++c) {
    int din = eng.tree_dim(src, c), dout = eng.tree_dim(dst, c);
    if (!din || !dout) continue;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dout, din);
    bool any = false;
    for (int tin = 0; tin < din; ++tin)
      for (int tout = 0; tout < dout; ++tout) {
        int idx = basis_index(x, in, out, c, tin, tout);
        if (idx >= 0 && t.coeff[idx] != cplx(0)) {
          m(tout, tin) = t.coeff[idx];
          any = true;
        }
      }
    if (any) f.blocks[c] = std::move(m);
  }
  return f;
}

Morphism TubeAlgebra::unit_morphism(int i) const {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  const TubeBasisElem& e = basis_[i];
  Word src = signed_word(cat, circle_.signs, e.in);
  src.insert(src.begin(), e.x);
  Word dst = signed_word(cat, circle_.signs, e.out);
  dst.push_back(e.x);
  Morphism f = eng.zero(src, dst);
  f.blocks[e.c] = Eigen::MatrixXcd::Zero(eng.tree_dim(dst, e.c), eng.tree_dim(src, e.c));
  f.blocks[e.c](e.tout, e.tin) = 1.0;
  return f;
}

const Eigen::VectorXcd& TubeAlgebra::basis_product(int i, int j) const {
  std::lock_guard<std::recursive_mutex> lk(num_->mu);
  long long key = static_cast<long long>(i) * dim() + j;
  auto it = num_->products.find(key);
  if (it != num_->products.end()) return it->second;

  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  const TubeBasisElem& a = basis_[i];  // glued on top
  const TubeBasisElem& b = basis_[j];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  if (a.in == b.out) {
    Morphism f = unit_morphism(i);
    Morphism g = unit_morphism(j);
    const int nb = static_cast<int>(f.dst.size()) - 1;  // |W_out of a|
    for (Label z : cat.channels(a.x, b.x)) {
      Word zsrc = signed_word(cat, circle_.signs, b.in);
      zsrc.insert(zsrc.begin(), z);
      Morphism m = eng.identity(zsrc);
      m = eng.apply_local(m, eng.dagger(eng.vertex(a.x, b.x, z)), 0);
      m = eng.apply_local(m, g, 1);
      m = eng.apply_local(m, f, 0);
      m = eng.apply_local(m, eng.vertex(a.x, b.x, z), nb);
      out += from_morphism(z, b.in, a.out, m).coeff;
    }
  }
  return num_->products.emplace(key, std::move(out)).first->second;
}

TubeElement TubeAlgebra::multiply(const TubeElement& a, const TubeElement& b) const {
  if (a.alg != this || b.alg != this) throw AlgebraMismatch("elements from different tube algebras");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (a.coeff[i] == cplx(0)) continue;
    for (int j = 0; j < dim(); ++j) {
      if (b.coeff[j] == cplx(0)) continue;
      out += a.coeff[i] * b.coeff[j] * basis_product(i, j);
    }
  }
  return TubeElement{this, std::move(out)};
}

Eigen::VectorXcd TubeAlgebra::star_basis(int i) const {
  std::lock_guard<std::recursive_mutex> lk(num_->mu);
  if (num_->starv.empty()) num_->starv.resize(dim());
  if (num_->starv[i].size()) return num_->starv[i];

  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  const TubeBasisElem& e = basis_[i];
  Morphism g = eng.dagger(unit_morphism(i));  // W_out (x) -> (x) W_in
  g = eng.bend_first_dst_to_src(g);           // (x*) W_out (x) -> W_in
  g = eng.bend_last_src_to_dst(g);            // (x*) W_out -> W_in (x*)
  num_->starv[i] = from_morphism(cat.dual[e.x], e.out, e.in, g).coeff;
  return num_->starv[i];
}

TubeElement TubeAlgebra::star(const TubeElement& a) const {
  if (a.alg != this) throw AlgebraMismatch("star: foreign element");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    if (a.coeff[i] != cplx(0)) out += std::conj(a.coeff[i]) * star_basis(i);
  return TubeElement{this, std::move(out)};
}

TubeElement TubeAlgebra::add(const TubeElement& a, const TubeElement& b) const {
  if (a.alg != this || b.alg != this) throw AlgebraMismatch("add: foreign element");
  return TubeElement{this, a.coeff + b.coeff};
}

TubeElement TubeAlgebra::scale(const TubeElement& a, cplx s) const {
  return TubeElement{this, a.coeff * s};
}

TubeElement TubeAlgebra::identity() const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
  for (const auto& l : labellings()) v += boundary_projector(l).coeff;
  return TubeElement{this, std::move(v)};
}

TubeElement TubeAlgebra::boundary_projector(const Labelling& a) const {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  Word src = signed_word(cat, circle_.signs, a);
  src.insert(src.begin(), 0);
  Word dst = signed_word(cat, circle_.signs, a);
  dst.push_back(0);
  Morphism m = eng.zero(src, dst);
  for (Label c : eng.word_channels(src)) {
    int d1 = eng.tree_dim(src, c), d2 = eng.tree_dim(dst, c);
    if (d1 != d2) throw ShapeMismatch("unit slot mismatch");
    // The unit letter does not change intermediates; both tree bases are the
    // underlying word's trees in the same lexicographic order.
    m.blocks[c] = Eigen::MatrixXcd::Identity(d2, d1);
  }
  return from_morphism(0, a, a, m);
}

TubeElement TubeAlgebra::rotation_element() const {
  if (circle_.n() != 1)
    throw ShapeMismatch("rotation element defined for one-point circles only");
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
  for (Label a = 0; a < cat.n(); ++a) {
    Labelling l{a};
    Word w0 = signed_word(cat, circle_.signs, l);
    const Label x = w0[0];
    Morphism m = eng.identity({x, w0[0]});
    v += from_morphism(x, l, l, m).coeff;
  }
  return TubeElement{this, std::move(v)};
}

cplx TubeAlgebra::tau(const TubeElement& a) const {
  ensure_numerics();
  cplx s = 0;
  for (int i = 0; i < dim(); ++i)
    if (a.coeff[i] != cplx(0)) s += a.coeff[i] * num_->trL[i];
  return s;
}

double TubeAlgebra::norm(const TubeElement& a) const {
  TubeElement p = multiply(star(a), a);
  return std::sqrt(std::max(0.0, tau(p).real()));
}

void TubeAlgebra::ensure_numerics() const {
  std::lock_guard<std::recursive_mutex> lk(num_->mu);
  if (num_->frame_built) return;
  const int d = dim();
  num_->L.resize(d);
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXcd li(d, d);
    for (int j = 0; j < d; ++j) li.col(j) = basis_product(i, j);
    num_->L[i] = std::move(li);
  }
  num_->trL.resize(d);
  for (int i = 0; i < d; ++i) num_->trL[i] = num_->L[i].trace();

  // GNS inner product <s,t> = tau(s* t); left multiplication becomes a *-rep.
  Eigen::MatrixXcd G(d, d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXcd si = star_basis(i);
    for (int j = 0; j < d; ++j) {
      cplx val = 0;
      for (int k = 0; k < d; ++k) {
        if (si[k] == cplx(0)) continue;
        val += si[k] * basis_product(k, j).cwiseProduct(num_->trL).sum();
      }
      G(i, j) = val;
    }
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (G + G.adjoint()));
  if (llt.info() != Eigen::Success)
    throw NumericalDegeneracy("tube GNS Gram not positive definite");
  Eigen::MatrixXcd Lc = llt.matrixL();
  num_->Ainv = Lc.adjoint();
  num_->A = Lc.adjoint().inverse();
  num_->frame_built = true;
}

Eigen::MatrixXcd TubeAlgebra::rep(const TubeElement& t) const {
  ensure_numerics();
  const int d = dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    if (t.coeff[i] != cplx(0)) m += t.coeff[i] * num_->L[i];
  return num_->Ainv * m * num_->A;
}

const Decomposition& TubeAlgebra::decomposition(unsigned seed) const {
  ensure_numerics();
  std::lock_guard<std::recursive_mutex> lk(num_->mu);
  auto it = num_->decomp.find(seed);
  if (it != num_->decomp.end()) return it->second;

  const int d = dim();
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;

  std::vector<Eigen::MatrixXcd> rho(d);
  for (int i = 0; i < d; ++i)
    rho[i] = rep(TubeElement{this, Eigen::VectorXcd::Unit(d, i)});

  // Center as the kernel of v -> [rho(e_i), rho(v)]; use the Gram of the
  // stacked commutator map to avoid a huge SVD.
  Eigen::MatrixXcd G2 = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXcd cols(d * d, d);
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXcd com = rho[i] * rho[j] - rho[j] * rho[i];
      cols.col(j) = Eigen::Map<Eigen::VectorXcd>(com.data(), d * d);
    }
    G2 += cols.adjoint() * cols;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ces(G2);
  double lmax = std::max(1.0, ces.eigenvalues().maxCoeff());
  int nullity = 0;
  for (int i = 0; i < d; ++i)
    if (ces.eigenvalues()[i] <= 1e-14 * lmax) ++nullity;
  if (nullity == 0) throw NumericalDegeneracy("tube center not found");
  Eigen::MatrixXcd Z = ces.eigenvectors().leftCols(nullity);
  const int nblocks = nullity;

  TubeElement h = zero_element();
  Clusters clusters;
  bool ok = false;
  for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
    Eigen::VectorXcd zc(nblocks);
    for (int i = 0; i < nblocks; ++i) zc[i] = cplx(gauss(rng), gauss(rng));
    TubeElement cand{this, Z * zc};
    TubeElement herm = add(cand, star(cand));
    double nn = herm.coeff.norm();
    if (nn < 1e-12) continue;
    herm = scale(herm, 1.0 / nn);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep(herm));
    clusters = cluster_eigen(es.eigenvalues(), 1e-7);
    if (static_cast<int>(clusters.values.size()) == nblocks && clusters.min_gap > 1e-6) {
      h = herm;
      ok = true;
    }
  }
  if (!ok) throw NumericalDegeneracy("could not separate tube blocks");

  TubeElement one = identity();
  std::vector<TubeElement> projs;
  for (int k = 0; k < nblocks; ++k) {
    TubeElement p = one;
    for (int l = 0; l < nblocks; ++l) {
      if (l == k) continue;
      TubeElement factor = add(h, scale(one, -clusters.values[l]));
      p = multiply(p, scale(factor, 1.0 / (clusters.values[k] - clusters.values[l])));
    }
    for (int polish = 0; polish < 2; ++polish) {
      TubeElement p2 = multiply(p, p);
      TubeElement p3 = multiply(p2, p);
      p = add(scale(p2, 3.0), scale(p3, -2.0));
    }
    projs.push_back(p);
  }

  Decomposition dec;
  dec.seed = seed;
  auto ls = labellings();

  for (int k = 0; k < nblocks; ++k) {
    BlockData bd;
    bd.central_projector = projs[k].coeff;
    double k2 = tau(projs[k]).real();
    int ksize = static_cast<int>(std::lround(std::sqrt(std::max(0.0, k2))));
    if (std::abs(k2 - double(ksize) * ksize) > 1e-6 * std::max(1.0, std::abs(k2)))
      throw NumericalDegeneracy("block size not an integer");
    bd.size = ksize;

    std::vector<TubeElement> minimal;
    for (const auto& a : ls) {
      TubeElement qa = multiply(boundary_projector(a), projs[k]);
      int m = static_cast<int>(std::lround(tau(qa).real() / ksize));
      if (m == 0) continue;
      TubeElement y = zero_element();
      std::vector<double> mus;
      bool sep = false;
      for (int attempt = 0; attempt < 8 && !sep; ++attempt) {
        TubeElement r = random_element(rng);
        TubeElement z = add(r, star(r));
        y = multiply(multiply(qa, z), qa);
        double nn = y.coeff.norm();
        if (nn < 1e-12) continue;
        y = scale(y, 1.0 / nn);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep(y));
        Clusters all = cluster_eigen(es.eigenvalues(), 1e-7);
        std::vector<double> nz;
        for (double v : all.values)
          if (std::abs(v) > 1e-5) nz.push_back(v);
        if (static_cast<int>(nz.size()) == m) {
          std::vector<double> withz = nz;
          withz.push_back(0.0);
          std::sort(withz.begin(), withz.end());
          double gap = 1e9;
          for (std::size_t t = 1; t < withz.size(); ++t)
            gap = std::min(gap, withz[t] - withz[t - 1]);
          if (gap > 1e-6) {
            mus = nz;
            std::sort(mus.begin(), mus.end(), std::greater<double>());
            sep = true;
          }
        }
      }
      if (!sep) throw NumericalDegeneracy("corner spectrum not separable");
      for (int i = 0; i < m; ++i) {
        TubeElement p = one;
        std::vector<double> roots;
        for (int l = 0; l < m; ++l)
          if (l != i) roots.push_back(mus[l]);
        roots.push_back(0.0);
        for (double r0 : roots) {
          TubeElement factor = add(y, scale(one, -r0));
          p = multiply(p, scale(factor, 1.0 / (mus[i] - r0)));
        }
        for (int polish = 0; polish < 2; ++polish) {
          TubeElement p2 = multiply(p, p);
          TubeElement p3 = multiply(p2, p);
          p = add(scale(p2, 3.0), scale(p3, -2.0));
        }
        bd.module_basis.push_back({a, i});
        minimal.push_back(p);
      }
    }
    if (static_cast<int>(bd.module_basis.size()) != ksize)
      throw NumericalDegeneracy("block module basis size mismatch");

    std::vector<TubeElement> u;
    for (int r = 0; r < ksize; ++r) {
      if (r == 0) {
        u.push_back(minimal[0]);
        continue;
      }
      bool got = false;
      for (int attempt = 0; attempt < 16 && !got; ++attempt) {
        TubeElement rnd = random_element(rng);
        TubeElement cand = multiply(multiply(minimal[r], rnd), minimal[0]);
        double mu = tau(multiply(star(cand), cand)).real() / ksize;
        if (mu > 1e-8) {
          u.push_back(scale(cand, 1.0 / std::sqrt(mu)));
          got = true;
        }
      }
      if (!got) throw NumericalDegeneracy("partial isometry construction failed");
    }
    bd.units.assign(ksize, std::vector<Eigen::VectorXcd>(ksize));
    for (int r = 0; r < ksize; ++r)
      for (int s = 0; s < ksize; ++s) bd.units[r][s] = multiply(u[r], star(u[s])).coeff;

    dec.blocks.push_back(std::move(bd));
  }

  if (circle_.n() == 1) {
    TubeElement rot = rotation_element();
    for (auto& bd : dec.blocks) {
      TubeElement p{this, bd.central_projector};
      cplx th = tau(multiply(p, rot)) / tau(p);
      double mod = std::abs(th);
      if (std::abs(mod - 1.0) > 1e-6)
        throw NonScalarAction("rotation element not unimodular on block");
      bd.twist = th / mod;
    }
  }

  std::sort(dec.blocks.begin(), dec.blocks.end(), [](const BlockData& a, const BlockData& b) {
    if (a.size != b.size) return a.size < b.size;
    std::vector<std::string> la, lb;
    for (const auto& [l, i] : a.module_basis) la.push_back(pack_labelling(l));
    for (const auto& [l, i] : b.module_basis) lb.push_back(pack_labelling(l));
    if (la != lb) return la < lb;
    double aa = std::arg(a.twist), ab = std::arg(b.twist);
    if (aa < -1e-12) aa += 2 * M_PI;
    if (ab < -1e-12) ab += 2 * M_PI;
    return aa + 1e-9 < ab;
  });

  return num_->decomp.emplace(seed, std::move(dec)).first->second;
}

std::vector<TubeElement> TubeAlgebra::minimal_central_projections(unsigned seed) const {
  const Decomposition& dec = decomposition(seed);
  std::vector<TubeElement> out;
  for (const auto& b : dec.blocks) out.push_back(TubeElement{this, b.central_projector});
  return out;
}

std::vector<Eigen::MatrixXcd> TubeAlgebra::irrep_module(int block, unsigned seed) const {
  const Decomposition& dec = decomposition(seed);
  const BlockData& bd = dec.blocks.at(block);
  const int k = bd.size;
  std::vector<Eigen::MatrixXcd> out(dim());
  std::vector<TubeElement> left, right;
  for (int r = 0; r < k; ++r) {
    left.push_back(star(TubeElement{this, bd.units[r][0]}));
    right.push_back(TubeElement{this, bd.units[r][0]});
  }
  for (int i = 0; i < dim(); ++i) {
    TubeElement t{this, Eigen::VectorXcd::Unit(dim(), i)};
    Eigen::MatrixXcd m(k, k);
    for (int s = 0; s < k; ++s) {
      TubeElement ts = multiply(t, right[s]);
      for (int r = 0; r < k; ++r) m(r, s) = tau(multiply(left[r], ts)) / double(k);
    }
    out[i] = std::move(m);
  }
  return out;
}

cplx TubeAlgebra::twist_of(int block, unsigned seed) const {
  if (circle_.n() != 1) throw ShapeMismatch("twist needs a one-point circle");
  return decomposition(seed).blocks.at(block).twist;
}

IntervalAlgebra::IntervalAlgebra(ContextPtr ctx, DecoratedInterval ival)
    : ctx_(std::move(ctx)), ival_(std::move(ival)) {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  for (const auto& in : all_labellings(cat.n(), ival_.n()))
    for (const auto& out : all_labellings(cat.n(), ival_.n())) {
      Word ws = signed_word(cat, ival_.signs, in);
      Word wd = signed_word(cat, ival_.signs, out);
      for (Label c = 0; c < cat.n(); ++c) {
        int din = eng.tree_dim(ws, c), dout = eng.tree_dim(wd, c);
        for (int tin = 0; tin < din; ++tin)
          for (int tout = 0; tout < dout; ++tout) {
            index_[elem_key(0, in, out, c, tin, tout)] = static_cast<int>(basis_.size());
            basis_.push_back({in, out, c, tin, tout});
          }
      }
    }
}

Eigen::VectorXcd IntervalAlgebra::from_morphism(const Labelling& in, const Labelling& out,
                                                const Morphism& f) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
  for (const auto& [c, m] : f.blocks)
    for (int tout = 0; tout < m.rows(); ++tout)
      for (int tin = 0; tin < m.cols(); ++tin) {
        if (m(tout, tin) == cplx(0)) continue;
        auto it = index_.find(elem_key(0, in, out, c, tin, tout));
        if (it == index_.end()) throw ShapeMismatch("interval element entry missing");
        v[it->second] += m(tout, tin);
      }
  return v;
}

Morphism IntervalAlgebra::morphism_of(const Eigen::VectorXcd& v, const Labelling& in,
                                      const Labelling& out) const {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  Word ws = signed_word(cat, ival_.signs, in);
  Word wd = signed_word(cat, ival_.signs, out);
  Morphism f = eng.zero(ws, wd);
  for (Label c = 0; c < cat.n(); ++c) {
    int din = eng.tree_dim(ws, c), dout = eng.tree_dim(wd, c);
    if (!din || !dout) continue;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dout, din);
    bool any = false;
    for (int tin = 0; tin < din; ++tin)
      for (int tout = 0; tout < dout; ++tout) {
        auto it = index_.find(elem_key(0, in, out, c, tin, tout));
        if (it != index_.end() && v[it->second] != cplx(0)) {
          m(tout, tin) = v[it->second];
          any = true;
        }
      }
    if (any) f.blocks[c] = std::move(m);
  }
  return f;
}

Eigen::VectorXcd IntervalAlgebra::multiply(const Eigen::VectorXcd& a,
                                           const Eigen::VectorXcd& b) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (a[i] == cplx(0)) continue;
    const Elem& ea = basis_[i];
    for (int j = 0; j < dim(); ++j) {
      if (b[j] == cplx(0)) continue;
      const Elem& eb = basis_[j];
      if (ea.in != eb.out || ea.c != eb.c || ea.tin != eb.tout) continue;
      auto it = index_.find(elem_key(0, eb.in, ea.out, ea.c, eb.tin, ea.tout));
      if (it != index_.end()) out[it->second] += a[i] * b[j];
    }
  }
  return out;
}

Eigen::VectorXcd IntervalAlgebra::star(const Eigen::VectorXcd& a) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    if (a[i] == cplx(0)) continue;
    const Elem& e = basis_[i];
    auto it = index_.find(elem_key(0, e.out, e.in, e.c, e.tout, e.tin));
    if (it != index_.end()) out[it->second] += std::conj(a[i]);
  }
  return out;
}

Eigen::VectorXcd IntervalAlgebra::identity() const {
  const auto& cat = ctx_->cat;
  const Engine& eng = ctx_->eng;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
  for (const auto& l : all_labellings(cat.n(), ival_.n())) {
    Word w = signed_word(cat, ival_.signs, l);
    v += from_morphism(l, l, eng.identity(w));
  }
  return v;
}

Eigen::VectorXcd IntervalAlgebra::random_element(std::mt19937& rng) const {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

TubeElement embed_cylinder_element(const IntervalAlgebra& sub, const Eigen::VectorXcd& elem,
                                   const TubeAlgebra& full, int pos) {
  const auto& cat = full.cat();
  const auto& eng = full.eng();
  const auto& csigns = full.circle().signs;
  const auto& isigns = sub.interval().signs;
  const int k = static_cast<int>(isigns.size());
  if (pos < 0 || pos + k > static_cast<int>(csigns.size()))
    throw ShapeMismatch("interval does not fit in circle");
  for (int i = 0; i < k; ++i)
    if (csigns[pos + i] != isigns[i]) throw ShapeMismatch("interval signs mismatch");

  const int rest = static_cast<int>(csigns.size()) - k;
  TubeElement out = full.zero_element();
  for (int bi = 0; bi < sub.dim(); ++bi) {
    if (elem[bi] == cplx(0)) continue;
    const auto& be = sub.basis()[bi];
    Morphism g = sub.morphism_of(Eigen::VectorXcd::Unit(sub.dim(), bi), be.in, be.out);
    for (const auto& rl : all_labellings(cat.n(), rest)) {
      Labelling in_full, out_full;
      int r = 0;
      for (int i = 0; i < static_cast<int>(csigns.size()); ++i) {
        if (i >= pos && i < pos + k) {
          in_full.push_back(be.in[i - pos]);
          out_full.push_back(be.out[i - pos]);
        } else {
          in_full.push_back(rl[r]);
          out_full.push_back(rl[r]);
          ++r;
        }
      }
      Word w = signed_word(cat, csigns, in_full);
      w.insert(w.begin(), 0);
      Morphism m = eng.identity(w);
      m = eng.apply_local(m, g, 1 + pos);
      out = full.add(out, full.scale(full.from_morphism(0, in_full, out_full, m), elem[bi]));
    }
  }
  return out;
}

}  // namespace tubecat::tube
