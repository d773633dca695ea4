#include "tubecat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tubecat::diag {

namespace {

std::string wkey(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Label l : w) s.push_back(static_cast<char>(l + 1));
  return s;
}

std::uint64_t pack4(int a, int b, int c, int d) {
  return (std::uint64_t(std::uint16_t(a)) << 48) | (std::uint64_t(std::uint16_t(b)) << 32) |
         (std::uint64_t(std::uint16_t(c)) << 16) | std::uint64_t(std::uint16_t(d));
}

std::uint64_t pack7(const GroupedBasis::Item& it) {
  // alpha,mu,beta,rho < 256; tp,tu,ts < 65536 each packed into remaining bits.
  std::uint64_t hi = (std::uint64_t(std::uint8_t(it.alpha)) << 24) |
                     (std::uint64_t(std::uint8_t(it.mu)) << 16) |
                     (std::uint64_t(std::uint8_t(it.beta)) << 8) | std::uint64_t(std::uint8_t(it.rho));
  std::uint64_t lo = (std::uint64_t(std::uint16_t(it.tp)) << 32) |
                     (std::uint64_t(std::uint16_t(it.tu)) << 16) | std::uint64_t(std::uint16_t(it.ts));
  return (hi << 32) ^ lo ^ (hi >> 7);
}

Word slice(const Word& w, int from, int to) { return Word(w.begin() + from, w.begin() + to); }

}  // namespace

Word dual_word(const FusionCategoryData& cat, const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (Label& l : out) l = cat.dual[l];
  return out;
}

std::string word_name(const FusionCategoryData& cat, const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += cat.labels[w[i]];
  }
  return s + ")";
}

int TreeSpace::index_of(const std::vector<Label>& path) const {
  auto it = std::lower_bound(paths.begin(), paths.end(), path);
  if (it == paths.end() || *it != path) return -1;
  return static_cast<int>(it - paths.begin());
}

Morphism& Morphism::operator*=(cplx s) {
  for (auto& [c, m] : blocks) m *= s;
  return *this;
}

Morphism& Morphism::operator+=(const Morphism& o) {
  for (const auto& [c, m] : o.blocks) {
    auto it = blocks.find(c);
    if (it == blocks.end())
      blocks[c] = m;
    else
      it->second += m;
  }
  return *this;
}

double Morphism::norm_max() const {
  double s = 0;
  for (const auto& [c, m] : blocks)
    if (m.size()) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

bool Morphism::is_zero(double tol) const { return norm_max() <= tol; }

int PairBasis::index_of(Label alpha, int t1, Label mu, int t2) const {
  auto it = lookup_.find(pack4(alpha, t1, mu, t2));
  return it == lookup_.end() ? -1 : it->second;
}

int GroupedBasis::index_of(const Item& it) const {
  auto f = lookup.find(pack7(it));
  return f == lookup.end() ? -1 : f->second;
}

struct Engine::Caches {
  std::recursive_mutex mu;
  std::unordered_map<std::string, TreeSpace> trees;
  std::unordered_map<std::string, PairBasis> pairs;
  std::unordered_map<std::string, Eigen::MatrixXcd> splits;
  std::unordered_map<std::string, GroupedBasis> grouped;
};

Engine::Engine(const FusionCategoryData& cat) : cat_(&cat), caches_(new Caches) {}
Engine::~Engine() = default;

const TreeSpace& Engine::trees(const Word& w, Label c) const {
  std::lock_guard<std::recursive_mutex> lk(caches_->mu);
  std::string key = wkey(w) + "#" + std::to_string(c);
  auto it = caches_->trees.find(key);
  if (it != caches_->trees.end()) return it->second;

  TreeSpace ts;
  ts.word = w;
  ts.channel = c;
  if (w.empty()) {
    if (c == 0) ts.paths.push_back({});
  } else {
    // Depth-first in ascending label order yields lexicographic paths.
    std::vector<Label> path{w[0]};
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == w.size()) {
        if (path.back() == c) ts.paths.push_back(path);
        return;
      }
      for (Label m = 0; m < cat_->n(); ++m)
        if (cat_->admissible(path.back(), w[i], m)) {
          path.push_back(m);
          rec(i + 1);
          path.pop_back();
        }
    };
    rec(1);
  }
  return caches_->trees.emplace(key, std::move(ts)).first->second;
}

int Engine::tree_dim(const Word& w, Label c) const { return trees(w, c).dim(); }

std::vector<Label> Engine::word_channels(const Word& w) const {
  std::vector<Label> out;
  for (Label c = 0; c < cat_->n(); ++c)
    if (tree_dim(w, c) > 0) out.push_back(c);
  return out;
}

long Engine::hom_dim(const Word& src, const Word& dst) const {
  long d = 0;
  for (Label c = 0; c < cat_->n(); ++c) d += long(tree_dim(src, c)) * tree_dim(dst, c);
  return d;
}

const PairBasis& Engine::pair_basis(const Word& w1, const Word& w2, Label c) const {
  std::lock_guard<std::recursive_mutex> lk(caches_->mu);
  std::string key = wkey(w1) + "|" + wkey(w2) + "#" + std::to_string(c);
  auto it = caches_->pairs.find(key);
  if (it != caches_->pairs.end()) return it->second;

  PairBasis pb;
  for (Label alpha = 0; alpha < cat_->n(); ++alpha) {
    int d1 = tree_dim(w1, alpha);
    if (!d1) continue;
    for (Label mu = 0; mu < cat_->n(); ++mu) {
      if (!cat_->admissible(alpha, mu, c)) continue;
      int d2 = tree_dim(w2, mu);
      if (!d2) continue;
      for (int t1 = 0; t1 < d1; ++t1)
        for (int t2 = 0; t2 < d2; ++t2) {
          pb.lookup_[pack4(alpha, t1, mu, t2)] = static_cast<int>(pb.items.size());
          pb.items.push_back({alpha, mu, t1, t2});
        }
    }
  }
  return caches_->pairs.emplace(key, std::move(pb)).first->second;
}

const Eigen::MatrixXcd& Engine::split(const Word& w, int k, Label c) const {
  std::lock_guard<std::recursive_mutex> lk(caches_->mu);
  std::string key = wkey(w) + "@" + std::to_string(k) + "#" + std::to_string(c);
  auto it = caches_->splits.find(key);
  if (it != caches_->splits.end()) return it->second;

  const int n = static_cast<int>(w.size());
  const Word left = slice(w, 0, k), right = slice(w, k, n);
  const PairBasis& out = pair_basis(left, right, c);
  const TreeSpace& tw = trees(w, c);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(out.items.size(), tw.dim());

  if (n == 0) {
    if (c == 0 && !out.items.empty()) m(0, 0) = 1.0;
  } else if (k == n) {
    for (int t = 0; t < tw.dim(); ++t) m(out.index_of(c, t, 0, 0), t) = 1.0;
  } else if (k == 0) {
    for (int t = 0; t < tw.dim(); ++t) m(out.index_of(0, 0, c, t), t) = 1.0;
  } else {
    const Word wp = slice(w, 0, n - 1);
    const Label z = w[n - 1];
    const Word rightp = slice(w, k, n - 1);
    for (int t = 0; t < tw.dim(); ++t) {
      const auto& path = tw.paths[t];
      const Label cp = path[n - 2];
      std::vector<Label> pathp(path.begin(), path.end() - 1);
      const TreeSpace& twp = trees(wp, cp);
      const int tp = twp.index_of(pathp);
      const Eigen::MatrixXcd& sp = split(wp, k, cp);
      const PairBasis& in = pair_basis(left, rightp, cp);
      for (std::size_t i = 0; i < in.items.size(); ++i) {
        const cplx coeff = sp(i, tp);
        if (coeff == cplx(0)) continue;
        const auto& item = in.items[i];
        const TreeSpace& t2ps = trees(rightp, item.mu);
        for (Label mu = 0; mu < cat_->n(); ++mu) {
          if (!cat_->admissible(item.mu, z, mu)) continue;
          if (!cat_->admissible(item.alpha, mu, c)) continue;
          std::vector<Label> t2path = t2ps.paths[item.t2];
          t2path.push_back(mu);
          const int t2 = trees(right, mu).index_of(t2path);
          if (t2 < 0) continue;
          const cplx f = cat_->fsym(item.alpha, item.mu, z, c, cp, mu);
          if (f == cplx(0)) continue;
          m(out.index_of(item.alpha, item.t1, mu, t2), t) += coeff * f;
        }
      }
    }
  }
  return caches_->splits.emplace(key, std::move(m)).first->second;
}

const GroupedBasis& Engine::grouped(const Word& w, int k, int l, Label c) const {
  std::lock_guard<std::recursive_mutex> lk(caches_->mu);
  std::string key = wkey(w) + "@" + std::to_string(k) + "+" + std::to_string(l) + "#" + std::to_string(c);
  auto it = caches_->grouped.find(key);
  if (it != caches_->grouped.end()) return it->second;

  const int n = static_cast<int>(w.size());
  const Word prefix = slice(w, 0, k), rest = slice(w, k, n);
  const Word seg = slice(w, k, k + l), suffix = slice(w, k + l, n);
  const PairBasis& p1 = pair_basis(prefix, rest, c);
  const Eigen::MatrixXcd& s1 = split(w, k, c);

  GroupedBasis gb;
  // Enumerate grouped items in a canonical order.
  for (Label alpha = 0; alpha < cat_->n(); ++alpha) {
    int dp = tree_dim(prefix, alpha);
    if (!dp) continue;
    for (Label rho = 0; rho < cat_->n(); ++rho) {
      if (!cat_->admissible(alpha, rho, c)) continue;
      for (Label mu = 0; mu < cat_->n(); ++mu) {
        int du = tree_dim(seg, mu);
        if (!du) continue;
        for (Label beta = 0; beta < cat_->n(); ++beta) {
          if (!cat_->admissible(mu, beta, rho)) continue;
          int ds = tree_dim(suffix, beta);
          if (!ds) continue;
          for (int tp = 0; tp < dp; ++tp)
            for (int tu = 0; tu < du; ++tu)
              for (int ts = 0; ts < ds; ++ts) {
                GroupedBasis::Item item{alpha, mu, beta, rho, tp, tu, ts};
                gb.lookup[pack7(item)] = static_cast<int>(gb.items.size());
                gb.items.push_back(item);
              }
        }
      }
    }
  }
  gb.to_grouped = Eigen::MatrixXcd::Zero(gb.items.size(), tree_dim(w, c));
  for (std::size_t i1 = 0; i1 < p1.items.size(); ++i1) {
    const auto& a = p1.items[i1];  // (alpha, tp, rho, trest)
    const PairBasis& p2 = pair_basis(seg, suffix, a.mu);
    const Eigen::MatrixXcd& s2 = split(rest, l, a.mu);
    for (std::size_t i2 = 0; i2 < p2.items.size(); ++i2) {
      const auto& b = p2.items[i2];  // (mu, tu, beta, ts)
      GroupedBasis::Item item{a.alpha, b.alpha, b.mu, a.mu, a.t1, b.t1, b.t2};
      const int row = gb.index_of(item);
      if (row < 0) continue;
      gb.to_grouped.row(row) += s2(i2, a.t2) * s1.row(i1);
    }
  }
  return caches_->grouped.emplace(key, std::move(gb)).first->second;
}

Morphism Engine::identity(const Word& w) const {
  Morphism m;
  m.src = m.dst = w;
  for (Label c : word_channels(w))
    m.blocks[c] = Eigen::MatrixXcd::Identity(tree_dim(w, c), tree_dim(w, c));
  return m;
}

Morphism Engine::zero(const Word& src, const Word& dst) const {
  Morphism m;
  m.src = src;
  m.dst = dst;
  return m;
}

Morphism Engine::vertex(Label a, Label b, Label c) const {
  if (!cat_->admissible(a, b, c))
    throw ShapeMismatch("vertex on inadmissible triple");
  Morphism m;
  m.src = {a, b};
  m.dst = {c};
  m.blocks[c] = Eigen::MatrixXcd::Constant(1, 1, 1.0);
  return m;
}

Morphism Engine::coev(Label a) const {
  Morphism m;
  m.src = {};
  m.dst = {a, cat_->dual[a]};
  m.blocks[0] = Eigen::MatrixXcd::Constant(1, 1, std::sqrt(cat_->qdim[a]));
  return m;
}

Morphism Engine::coev_l(Label a) const {
  Morphism m;
  m.src = {};
  m.dst = {cat_->dual[a], a};
  m.blocks[0] = Eigen::MatrixXcd::Constant(1, 1, std::sqrt(cat_->qdim[a]));
  return m;
}

Morphism Engine::ev(Label a) const {
  Morphism m;
  m.src = {cat_->dual[a], a};
  m.dst = {};
  m.blocks[0] = Eigen::MatrixXcd::Constant(1, 1, std::sqrt(cat_->qdim[a]));
  return m;
}

Morphism Engine::ev_r(Label a) const {
  Morphism m;
  m.src = {a, cat_->dual[a]};
  m.dst = {};
  m.blocks[0] = Eigen::MatrixXcd::Constant(1, 1, std::sqrt(cat_->qdim[a]));
  return m;
}

Morphism Engine::compose(const Morphism& g, const Morphism& f) const {
  if (g.src != f.dst) throw ShapeMismatch("compose: middle words differ");
  Morphism out;
  out.src = f.src;
  out.dst = g.dst;
  for (const auto& [c, gm] : g.blocks) {
    const Eigen::MatrixXcd* fm = f.block(c);
    if (!fm || !fm->size() || !gm.size()) continue;
    out.blocks[c] = gm * (*fm);
  }
  return out;
}

Morphism Engine::dagger(const Morphism& f) const {
  Morphism out;
  out.src = f.dst;
  out.dst = f.src;
  for (const auto& [c, m] : f.blocks) out.blocks[c] = m.adjoint();
  return out;
}

Morphism Engine::add(const Morphism& f, const Morphism& g) const {
  if (f.src != g.src || f.dst != g.dst) throw ShapeMismatch("add: shapes differ");
  Morphism out = f;
  out += g;
  return out;
}

Morphism Engine::scale(const Morphism& f, cplx s) const {
  Morphism out = f;
  out *= s;
  return out;
}

cplx Engine::trace(const Morphism& f) const {
  if (f.src != f.dst) throw ShapeMismatch("trace needs an endomorphism");
  cplx t = 0;
  for (const auto& [c, m] : f.blocks) t += cat_->qdim[c] * m.trace();
  return t;
}

cplx Engine::inner(const Morphism& f, const Morphism& g) const {
  if (f.src != g.src || f.dst != g.dst) throw ShapeMismatch("inner: shapes differ");
  cplx t = 0;
  for (const auto& [c, m] : f.blocks) {
    const Eigen::MatrixXcd* gm = g.block(c);
    if (gm && gm->size() && m.size()) t += cat_->qdim[c] * (m.adjoint() * (*gm)).trace();
  }
  return t;
}

Morphism Engine::apply_local(const Morphism& F, const Morphism& f, int k) const {
  const Word& w = F.dst;
  const int l = static_cast<int>(f.src.size());
  const int l2 = static_cast<int>(f.dst.size());
  if (k < 0 || k + l > static_cast<int>(w.size()))
    throw ShapeMismatch("apply_local: segment out of range");
  if (!std::equal(f.src.begin(), f.src.end(), w.begin() + k))
    throw ShapeMismatch("apply_local: segment word mismatch");

  Word w2(w.begin(), w.begin() + k);
  w2.insert(w2.end(), f.dst.begin(), f.dst.end());
  w2.insert(w2.end(), w.begin() + k + l, w.end());

  Morphism out;
  out.src = F.src;
  out.dst = w2;
  for (const auto& [c, Fc] : F.blocks) {
    if (!Fc.size()) continue;
    if (tree_dim(w2, c) == 0) continue;
    const GroupedBasis& G = grouped(w, k, l, c);
    const GroupedBasis& G2 = grouped(w2, k, l2, c);
    Eigen::MatrixXcd mid = G.to_grouped * Fc;
    Eigen::MatrixXcd mid2 = Eigen::MatrixXcd::Zero(G2.items.size(), Fc.cols());
    for (std::size_t i = 0; i < G.items.size(); ++i) {
      const auto& item = G.items[i];
      const Eigen::MatrixXcd* fb = f.block(item.mu);
      if (!fb || !fb->rows()) continue;
      for (int tv = 0; tv < fb->rows(); ++tv) {
        const cplx coeff = (*fb)(tv, item.tu);
        if (coeff == cplx(0)) continue;
        GroupedBasis::Item tgt{item.alpha, item.mu, item.beta, item.rho, item.tp, tv, item.ts};
        const int row = G2.index_of(tgt);
        if (row < 0) continue;
        mid2.row(row) += coeff * mid.row(i);
      }
    }
    Eigen::MatrixXcd res = G2.to_grouped.adjoint() * mid2;
    if (res.size()) out.blocks[c] = std::move(res);
  }
  return out;
}

Morphism Engine::apply_local_src(const Morphism& F, const Morphism& f, int k) const {
  return dagger(apply_local(dagger(F), dagger(f), k));
}

Morphism Engine::tensor(const Morphism& f, const Morphism& g) const {
  Word w = f.src;
  w.insert(w.end(), g.src.begin(), g.src.end());
  Morphism m = identity(w);
  m = apply_local(m, f, 0);
  m = apply_local(m, g, static_cast<int>(f.dst.size()));
  return m;
}

Morphism Engine::bend_first_src_to_dst(const Morphism& f) const {
  // (a)u -> v  becomes  u -> (a*)v
  if (f.src.empty()) throw ShapeMismatch("bend: empty source");
  const Label a = f.src.front();
  Morphism m = identity(Word(f.src.begin() + 1, f.src.end()));
  m = apply_local(m, coev_l(a), 0);  // u -> (a*, a) u
  return apply_local(m, f, 1);
}

Morphism Engine::bend_last_src_to_dst(const Morphism& f) const {
  // u(a) -> v  becomes  u -> v(a*)
  if (f.src.empty()) throw ShapeMismatch("bend: empty source");
  const Label a = f.src.back();
  Morphism m = identity(Word(f.src.begin(), f.src.end() - 1));
  m = apply_local(m, coev(a), static_cast<int>(m.dst.size()));  // u -> u (a, a*)
  return apply_local(m, f, 0);
}

Morphism Engine::bend_first_dst_to_src(const Morphism& f) const {
  // u -> (a)v  becomes  (a*)u -> v
  if (f.dst.empty()) throw ShapeMismatch("bend: empty target");
  const Label a = f.dst.front();
  Word src2{cat_->dual[a]};
  src2.insert(src2.end(), f.src.begin(), f.src.end());
  Morphism m = identity(src2);
  m = apply_local(m, f, 1);           // (a*)u -> (a*)(a)v
  return apply_local(m, ev(a), 0);    // -> v
}

Morphism Engine::bend_last_dst_to_src(const Morphism& f) const {
  // u -> v(a)  becomes  u(a*) -> v
  if (f.dst.empty()) throw ShapeMismatch("bend: empty target");
  const Label a = f.dst.back();
  Word src2 = f.src;
  src2.push_back(cat_->dual[a]);
  Morphism m = identity(src2);
  m = apply_local(m, f, 0);  // u(a*) -> v(a)(a*)
  return apply_local(m, ev_r(a), static_cast<int>(f.dst.size()) - 1);
}

Morphism Engine::random_morphism(const Word& src, const Word& dst, std::mt19937& rng) const {
  std::normal_distribution<double> g(0.0, 1.0);
  Morphism m = zero(src, dst);
  for (Label c = 0; c < cat_->n(); ++c) {
    int r = tree_dim(dst, c), s = tree_dim(src, c);
    if (!r || !s) continue;
    Eigen::MatrixXcd b(r, s);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < s; ++j) b(i, j) = cplx(g(rng), g(rng));
    m.blocks[c] = b;
  }
  return m;
}

Engine::HomBasis Engine::hom_basis(const Word& src, const Word& dst) const {
  HomBasis hb;
  for (Label c = 0; c < cat_->n(); ++c) {
    int r = tree_dim(dst, c), s = tree_dim(src, c);
    for (int td = 0; td < r; ++td)
      for (int ts = 0; ts < s; ++ts) hb.items.push_back({c, td, ts});
  }
  return hb;
}

Eigen::VectorXcd Engine::flatten(const Morphism& f) const {
  HomBasis hb = hom_basis(f.src, f.dst);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(hb.items.size());
  for (std::size_t i = 0; i < hb.items.size(); ++i) {
    const auto& it = hb.items[i];
    const Eigen::MatrixXcd* b = f.block(it.c);
    if (b && b->size()) v[i] = (*b)(it.tdst, it.tsrc);
  }
  return v;
}

Morphism Engine::unflatten(const Word& src, const Word& dst, const Eigen::VectorXcd& v) const {
  Morphism f = zero(src, dst);
  HomBasis hb = hom_basis(src, dst);
  for (Label c = 0; c < cat_->n(); ++c) {
    int r = tree_dim(dst, c), s = tree_dim(src, c);
    if (r && s) f.blocks[c] = Eigen::MatrixXcd::Zero(r, s);
  }
  for (std::size_t i = 0; i < hb.items.size(); ++i) {
    const auto& it = hb.items[i];
    f.blocks[it.c](it.tdst, it.tsrc) = v[i];
  }
  return f;
}

}  // namespace tubecat::diag
