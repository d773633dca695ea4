#include "tubecat/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tubecat {

using json = nlohmann::ordered_json;

cplx FusionCategoryData::fsym(Label a, Label b, Label c, Label d, Label e, Label f) const {
  if (!(admissible(a, b, e) && admissible(e, c, d) && admissible(b, c, f) && admissible(a, f, d)))
    return 0.0;
  auto it = fsymbols.find(fkey(a, b, c, d, e, f));
  if (it != fsymbols.end()) return it->second;
  // Omitted entries: 1 for pointed categories (trivial associator convenience),
  // else 0. Builtins always carry explicit tables for non-pointed cases.
  return pointed() ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
}

std::vector<Label> FusionCategoryData::fgrid_e(Label a, Label b, Label c, Label d) const {
  std::vector<Label> out;
  for (Label e = 0; e < n(); ++e)
    if (admissible(a, b, e) && admissible(e, c, d)) out.push_back(e);
  return out;
}

std::vector<Label> FusionCategoryData::fgrid_f(Label a, Label b, Label c, Label d) const {
  std::vector<Label> out;
  for (Label f = 0; f < n(); ++f)
    if (admissible(b, c, f) && admissible(a, f, d)) out.push_back(f);
  return out;
}

Eigen::MatrixXcd FusionCategoryData::fmatrix(Label a, Label b, Label c, Label d) const {
  check_label(a); check_label(b); check_label(c); check_label(d);
  auto es = fgrid_e(a, b, c, d);
  auto fs = fgrid_f(a, b, c, d);
  Eigen::MatrixXcd m(es.size(), fs.size());
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = 0; j < fs.size(); ++j) m(i, j) = fsym(a, b, c, d, es[i], fs[j]);
  return m;
}

Label FusionCategoryData::label_index(const std::string& name) const {
  for (int i = 0; i < n(); ++i)
    if (labels[i] == name) return i;
  throw UnknownLabel("no such label: " + name);
}

bool FusionCategoryData::pointed() const {
  for (Label a = 0; a < n(); ++a)
    for (Label b = 0; b < n(); ++b)
      if (channels(a, b).size() != 1) return false;
  return true;
}

double ValidationReport::max_residual() const {
  double m = 0;
  for (const auto& it : items) m = std::max(m, it.residual);
  return m;
}

const ValidationItem& ValidationReport::worst() const {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < items.size(); ++i)
    if (items[i].residual > items[arg].residual) arg = i;
  return items[arg];
}

void recompute_dimensions(FusionCategoryData& cat) {
  const int n = cat.n();
  cat.qdim.assign(n, 1.0);
  for (Label a = 0; a < n; ++a) {
    Eigen::MatrixXd na(n, n);
    for (Label b = 0; b < n; ++b)
      for (Label c = 0; c < n; ++c) na(b, c) = cat.admissible(a, b, c) ? 1.0 : 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(na);
    double rho = 0;
    for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    cat.qdim[a] = rho;
  }
  double s = 0;
  for (double d : cat.qdim) s += d * d;
  cat.total_dim = std::sqrt(s);
}

void check_structure(const FusionCategoryData& cat) {
  const int n = cat.n();
  if (n < 1) throw ValidationError("category needs at least the unit label");
  if (static_cast<int>(cat.dual.size()) != n) throw ValidationError("dual table size mismatch");
  for (Label a = 0; a < n; ++a) {
    if (!cat.valid_label(cat.dual[a])) throw ValidationError("dual out of range");
    if (cat.dual[cat.dual[a]] != a)
      throw ValidationError("dual is not an involution at label " + cat.labels[a]);
  }
  if (cat.dual[0] != 0) throw ValidationError("unit must be self-dual");
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b) {
      if (cat.admissible(0, a, b) != (a == b) || cat.admissible(a, 0, b) != (a == b))
        throw ValidationError("unit does not fuse trivially");
      if (cat.admissible(a, b, 0) != (b == cat.dual[a]))
        throw ValidationError("N[a][b][unit] must be delta_{b,a*}");
    }
}

namespace {

double pentagon_residual(const FusionCategoryData& cat) {
  // [F^{pcd}_s]_{qv} [F^{abv}_s]_{pu} = sum_r [F^{abc}_q]_{pr} [F^{ard}_s]_{qu} [F^{bcd}_u]_{rv}
  const int n = cat.n();
  double worst = 0;
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b)
      for (Label c = 0; c < n; ++c)
        for (Label d = 0; d < n; ++d)
          for (Label s = 0; s < n; ++s)
            for (Label p : cat.channels(a, b)) {
              if (p >= n) continue;
              for (Label q : cat.channels(p, c)) {
                if (!cat.admissible(q, d, s)) continue;
                for (Label v : cat.channels(c, d))
                  for (Label u : cat.channels(b, v)) {
                    if (!cat.admissible(a, u, s)) continue;
                    cplx lhs = cat.fsym(p, c, d, s, q, v) * cat.fsym(a, b, v, s, p, u);
                    cplx rhs = 0;
                    for (Label r : cat.channels(b, c))
                      rhs += cat.fsym(a, b, c, q, p, r) * cat.fsym(a, r, d, s, q, u) *
                             cat.fsym(b, c, d, u, r, v);
                    worst = std::max(worst, std::abs(lhs - rhs));
                  }
              }
            }
  return worst;
}

double funitarity_residual(const FusionCategoryData& cat) {
  const int n = cat.n();
  double worst = 0;
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b)
      for (Label c = 0; c < n; ++c)
        for (Label d = 0; d < n; ++d) {
          Eigen::MatrixXcd m = cat.fmatrix(a, b, c, d);
          if (m.rows() == 0 || m.cols() == 0) continue;
          if (m.rows() != m.cols()) return 1.0;  // admissible grids must match
          Eigen::MatrixXcd g = m.adjoint() * m;
          worst = std::max(worst,
                           (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
        }
  return worst;
}

double funit_residual(const FusionCategoryData& cat) {
  // With strict unitors, any F with a unit among (a,b,c) is the identity grid.
  const int n = cat.n();
  double worst = 0;
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b)
      for (Label c = 0; c < n; ++c)
        for (Label d = 0; d < n; ++d) {
          if (a != 0 && b != 0 && c != 0) continue;
          auto es = cat.fgrid_e(a, b, c, d);
          auto fs = cat.fgrid_f(a, b, c, d);
          for (std::size_t i = 0; i < es.size(); ++i)
            for (std::size_t j = 0; j < fs.size(); ++j) {
              cplx want = (i == j) ? 1.0 : 0.0;
              worst = std::max(worst, std::abs(cat.fsym(a, b, c, d, es[i], fs[j]) - want));
            }
        }
  return worst;
}

double pivotal_residual(const FusionCategoryData& cat) {
  // d_a [F^{a a* a}_a]_{1,1} = 1 makes the bent-line moves trivial.
  double worst = 0;
  for (Label a = 0; a < cat.n(); ++a) {
    cplx v = cat.fsym(a, cat.dual[a], a, a, 0, 0);
    worst = std::max(worst, std::abs(cat.qdim[a] * v - 1.0));
  }
  return worst;
}

}  // namespace

ValidationReport validate(const FusionCategoryData& cat, double tol) {
  ValidationReport rep;
  rep.tolerance = tol;
  double structural = 0;
  try {
    check_structure(cat);
  } catch (const ValidationError&) {
    structural = 1;
  }
  rep.items.push_back({"structure", structural});

  FusionCategoryData copy = cat;
  recompute_dimensions(copy);
  double dq = 0;
  for (int a = 0; a < cat.n(); ++a) dq = std::max(dq, std::abs(copy.qdim[a] - cat.qdim[a]));
  rep.items.push_back({"qdim-perron-frobenius", dq});
  rep.items.push_back({"qdim-unit", std::abs(cat.qdim[0] - 1.0)});
  double dd = 0;
  for (int a = 0; a < cat.n(); ++a) dd = std::max(dd, std::abs(cat.qdim[a] - cat.qdim[cat.dual[a]]));
  rep.items.push_back({"qdim-dual-symmetry", dd});
  double s = 0;
  for (double d : cat.qdim) s += d * d;
  rep.items.push_back({"total-dim", std::abs(cat.total_dim * cat.total_dim - s)});
  rep.items.push_back({"f-unitarity", funitarity_residual(cat)});
  rep.items.push_back({"f-unit-normalization", funit_residual(cat)});
  rep.items.push_back({"pivotal-normalization", pivotal_residual(cat)});
  rep.items.push_back({"pentagon", pentagon_residual(cat)});
  return rep;
}

double quantum_dimension(const FusionCategoryData& cat, Label a) {
  cat.check_label(a);
  return cat.qdim[a];
}

namespace {

FusionCategoryData make_base(std::vector<std::string> labels, std::vector<Label> dual) {
  FusionCategoryData cat;
  cat.labels = std::move(labels);
  cat.dual = std::move(dual);
  cat.fusion.assign(std::size_t(cat.n()) * cat.n() * cat.n(), 0);
  return cat;
}

void set_fuse(FusionCategoryData& cat, Label a, Label b, Label c) {
  cat.fusion[(std::size_t(a) * cat.n() + b) * cat.n() + c] = 1;
}

FusionCategoryData make_vec_zn(int N) {
  std::vector<std::string> names;
  std::vector<Label> dual;
  for (int k = 0; k < N; ++k) {
    names.push_back(std::to_string(k));
    dual.push_back((N - k) % N);
  }
  FusionCategoryData cat = make_base(names, dual);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) set_fuse(cat, a, b, (a + b) % N);
  // All F-symbols 1 (trivial cocycle); the omitted-entry default covers them.
  recompute_dimensions(cat);
  return cat;
}

FusionCategoryData make_fibonacci() {
  FusionCategoryData cat = make_base({"1", "tau"}, {0, 1});
  set_fuse(cat, 0, 0, 0);
  set_fuse(cat, 0, 1, 1);
  set_fuse(cat, 1, 0, 1);
  set_fuse(cat, 1, 1, 0);
  set_fuse(cat, 1, 1, 1);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const Label t = 1;
  // Nontrivial matrix [F^{ttt}_t] in basis (e,f) over {1,tau}.
  cat.fsymbols[fkey(t, t, t, t, 0, 0)] = 1.0 / phi;
  cat.fsymbols[fkey(t, t, t, t, 0, t)] = 1.0 / std::sqrt(phi);
  cat.fsymbols[fkey(t, t, t, t, t, 0)] = 1.0 / std::sqrt(phi);
  cat.fsymbols[fkey(t, t, t, t, t, t)] = -1.0 / phi;
  // Remaining admissible entries are 1.
  for (Label a = 0; a <= 1; ++a)
    for (Label b = 0; b <= 1; ++b)
      for (Label c = 0; c <= 1; ++c)
        for (Label d = 0; d <= 1; ++d)
          for (Label e : cat.fgrid_e(a, b, c, d))
            for (Label f : cat.fgrid_f(a, b, c, d))
              if (!cat.fsymbols.count(fkey(a, b, c, d, e, f)))
                cat.fsymbols[fkey(a, b, c, d, e, f)] = 1.0;
  recompute_dimensions(cat);
  return cat;
}

FusionCategoryData make_ising() {
  // labels 0=1, 1=sigma, 2=psi
  FusionCategoryData cat = make_base({"1", "sigma", "psi"}, {0, 1, 2});
  const Label I = 0, S = 1, P = 2;
  set_fuse(cat, I, I, I);
  set_fuse(cat, I, S, S); set_fuse(cat, S, I, S);
  set_fuse(cat, I, P, P); set_fuse(cat, P, I, P);
  set_fuse(cat, S, S, I); set_fuse(cat, S, S, P);
  set_fuse(cat, S, P, S); set_fuse(cat, P, S, S);
  set_fuse(cat, P, P, I);
  const double r = 1.0 / std::sqrt(2.0);
  cat.fsymbols[fkey(S, S, S, S, I, I)] = r;
  cat.fsymbols[fkey(S, S, S, S, I, P)] = r;
  cat.fsymbols[fkey(S, S, S, S, P, I)] = r;
  cat.fsymbols[fkey(S, S, S, S, P, P)] = -r;
  cat.fsymbols[fkey(S, P, S, P, S, S)] = -1.0;
  cat.fsymbols[fkey(P, S, P, S, S, S)] = -1.0;
  for (Label a = 0; a < 3; ++a)
    for (Label b = 0; b < 3; ++b)
      for (Label c = 0; c < 3; ++c)
        for (Label d = 0; d < 3; ++d)
          for (Label e : cat.fgrid_e(a, b, c, d))
            for (Label f : cat.fgrid_f(a, b, c, d))
              if (!cat.fsymbols.count(fkey(a, b, c, d, e, f)))
                cat.fsymbols[fkey(a, b, c, d, e, f)] = 1.0;
  recompute_dimensions(cat);
  return cat;
}

}  // namespace

FusionCategoryData builtin(const std::string& name) {
  FusionCategoryData cat;
  if (name == "trivial") {
    cat = make_vec_zn(1);
  } else if (name.rfind("vec_z", 0) == 0) {
    int N = 0;
    try {
      N = std::stoi(name.substr(5));
    } catch (...) {
      throw UnknownBuiltin("unknown builtin category: " + name);
    }
    if (N < 1 || N > 64) throw UnknownBuiltin("vec_zN builtin needs 1 <= N <= 64");
    cat = make_vec_zn(N);
  } else if (name == "fibonacci") {
    cat = make_fibonacci();
  } else if (name == "ising") {
    cat = make_ising();
  } else {
    throw UnknownBuiltin("unknown builtin category: " + name);
  }
  check_structure(cat);
  return cat;
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

FusionCategoryData parse_category(const std::string& text, double tol) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed category JSON: ") + e.what());
  }
  try {
    FusionCategoryData cat;
    for (const auto& l : j.at("labels")) cat.labels.push_back(l.get<std::string>());
    const std::string unit = j.at("unit").get<std::string>();
    if (cat.labels.empty() || cat.labels[0] != unit)
      throw ParseError("unit must be the first entry of labels");
    const int n = cat.n();
    cat.dual.assign(n, -1);
    for (const auto& [k, v] : j.at("dual").items())
      cat.dual[cat.label_index(k)] = cat.label_index(v.get<std::string>());
    for (Label a = 0; a < n; ++a)
      if (cat.dual[a] < 0) throw ParseError("dual table misses label " + cat.labels[a]);
    cat.fusion.assign(std::size_t(n) * n * n, 0);
    for (const auto& t : j.at("fusion")) {
      if (t.size() != 3) throw ParseError("fusion triple must have three labels");
      Label a = cat.label_index(t[0].get<std::string>());
      Label b = cat.label_index(t[1].get<std::string>());
      Label c = cat.label_index(t[2].get<std::string>());
      auto& slot = cat.fusion[(std::size_t(a) * n + b) * n + c];
      if (slot) throw ValidationError("fusion multiplicity > 1 at (" + cat.labels[a] + "," +
                                      cat.labels[b] + "," + cat.labels[c] + ")");
      slot = 1;
    }
    if (j.contains("fsymbols")) {
      for (const auto& e : j["fsymbols"]) {
        Label a = cat.label_index(e.at("a").get<std::string>());
        Label b = cat.label_index(e.at("b").get<std::string>());
        Label c = cat.label_index(e.at("c").get<std::string>());
        Label d = cat.label_index(e.at("d").get<std::string>());
        Label ee = cat.label_index(e.at("e").get<std::string>());
        Label f = cat.label_index(e.at("f").get<std::string>());
        double re = e.value("re", 0.0), im = e.value("im", 0.0);
        cat.fsymbols[fkey(a, b, c, d, ee, f)] = cplx(re, im);
      }
    }
    check_structure(cat);
    recompute_dimensions(cat);
    ValidationReport rep = validate(cat, tol);
    if (!rep.passed()) {
      const auto& w = rep.worst();
      throw ValidationError("invariant '" + w.name + "' violated, residual " + fmt_double(w.residual));
    }
    return cat;
  } catch (const json::exception& e) {
    throw ParseError(std::string("category JSON missing fields: ") + e.what());
  }
}

FusionCategoryData load_category(const std::string& path, double tol) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open category file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_category(ss.str(), tol);
}

std::string serialize(const FusionCategoryData& cat) {
  json j;
  j["labels"] = cat.labels;
  j["unit"] = cat.labels[0];
  json dual = json::object();
  for (int a = 0; a < cat.n(); ++a) dual[cat.labels[a]] = cat.labels[cat.dual[a]];
  j["dual"] = dual;
  json fusion = json::array();
  for (Label a = 0; a < cat.n(); ++a)
    for (Label b = 0; b < cat.n(); ++b)
      for (Label c = 0; c < cat.n(); ++c)
        if (cat.admissible(a, b, c)) fusion.push_back({cat.labels[a], cat.labels[b], cat.labels[c]});
  j["fusion"] = fusion;
  std::vector<std::uint64_t> keys;
  for (const auto& [k, v] : cat.fsymbols) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  json fs = json::array();
  for (auto k : keys) {
    const cplx v = cat.fsymbols.at(k);
    json e;
    e["a"] = cat.labels[(k >> 40) & 0xff];
    e["b"] = cat.labels[(k >> 32) & 0xff];
    e["c"] = cat.labels[(k >> 24) & 0xff];
    e["d"] = cat.labels[(k >> 16) & 0xff];
    e["e"] = cat.labels[(k >> 8) & 0xff];
    e["f"] = cat.labels[k & 0xff];
    e["re"] = v.real();
    e["im"] = v.imag();
    fs.push_back(e);
  }
  j["fsymbols"] = fs;
  return j.dump(2);
}

FusionCategoryData resolve_category(const std::string& name_or_path, double tol) {
  static const char* names[] = {"trivial", "fibonacci", "ising"};
  for (const char* n : names)
    if (name_or_path == n) return builtin(name_or_path);
  if (name_or_path.rfind("vec_z", 0) == 0 && name_or_path.find('.') == std::string::npos)
    return builtin(name_or_path);
  return load_category(name_or_path, tol);
}

std::string content_hash(const FusionCategoryData& cat) {
  const std::string s = serialize(cat);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tubecat
