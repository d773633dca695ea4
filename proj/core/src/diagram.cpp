#include "tubecat/diagram.hpp"

namespace tubecat::diag {

long hom_dimension(const FusionCategoryData& cat, const ObjectWord& source,
                   const ObjectWord& target) {
  for (auto [l, s] : source.letters) cat.check_label(l);
  for (auto [l, s] : target.letters) cat.check_label(l);
  Engine eng(cat);
  return eng.hom_dim(source.to_word(cat), target.to_word(cat));
}

Eigen::MatrixXcd f_move(const FusionCategoryData& cat, Label a, Label b, Label c, Label d) {
  return cat.fmatrix(a, b, c, d);
}

std::vector<std::pair<Label, double>> coloured_vertex_pair(const FusionCategoryData& cat,
                                                           const Word& word) {
  Engine eng(cat);
  std::vector<std::pair<Label, double>> out;
  for (Label a : eng.word_channels(word)) out.push_back({a, cat.qdim[a]});
  return out;
}

Morphism vertex_pair_morphism(const Engine& eng, const Word& word, Label a) {
  // Projector onto the channel-a isotypic component, scaled by 1/d_a so that
  // sum_a d_a * pair_a = id.
  Morphism m = eng.zero(word, word);
  int d = eng.tree_dim(word, a);
  if (d > 0)
    m.blocks[a] =
        Eigen::MatrixXcd::Identity(d, d) / eng.cat().qdim[a];
  return m;
}

std::vector<std::pair<Label, double>> dotted_line_expansion(const FusionCategoryData& cat) {
  std::vector<std::pair<Label, double>> out;
  const double d2 = cat.total_dim * cat.total_dim;
  for (Label a = 0; a < cat.n(); ++a) out.push_back({a, cat.qdim[a] / d2});
  return out;
}

double loop_value(const Engine& eng, Label a) {
  // ev_r(a) ∘ coev(a): a closed loop.
  Morphism m = eng.compose(eng.ev_r(a), eng.coev(a));
  const Eigen::MatrixXcd* b = m.block(0);
  return b && b->size() ? (*b)(0, 0).real() : 0.0;
}

}  // namespace tubecat::diag
