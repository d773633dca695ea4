#pragma once

#include <utility>
#include <vector>

#include "tubecat/engine.hpp"

namespace tubecat::diag {

// A word of signed labels; sign -1 means the dual object.
struct ObjectWord {
  std::vector<std::pair<Label, int>> letters;

  Word to_word(const FusionCategoryData& cat) const {
    Word w;
    for (auto [l, s] : letters) w.push_back(s >= 0 ? l : cat.dual[l]);
    return w;
  }
};

// dim Hom(source -> target) by fusion-matrix products.
long hom_dimension(const FusionCategoryData& cat, const ObjectWord& source, const ObjectWord& target);

// [F^{abc}_d] on the admissible grid; unitary.
Eigen::MatrixXcd f_move(const FusionCategoryData& cat, Label a, Label b, Label c, Label d);

// Channels and weights of the resolution of identity on a word:
// sum_a weight_a * (coloured vertex pair on channel a) = id.
std::vector<std::pair<Label, double>> coloured_vertex_pair(const FusionCategoryData& cat,
                                                           const Word& word);

// The normalized pair on one channel; the weighted sum over channels is id.
Morphism vertex_pair_morphism(const Engine& eng, const Word& word, Label a);

// The dotted (regular) line: {(a, d_a / D^2)}.
std::vector<std::pair<Label, double>> dotted_line_expansion(const FusionCategoryData& cat);

// Closed a-loop value, evaluated diagrammatically; equals d_a.
double loop_value(const Engine& eng, Label a);

}  // namespace tubecat::diag
