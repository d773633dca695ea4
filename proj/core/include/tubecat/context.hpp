#pragma once

#include <memory>

#include "tubecat/engine.hpp"
#include "tubecat/fusion.hpp"

namespace tubecat {

// Category data plus its memoized diagram engine, shared across modules.
struct Context {
  FusionCategoryData cat;
  diag::Engine eng;

  explicit Context(FusionCategoryData c) : cat(std::move(c)), eng(cat) {}
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
};

using ContextPtr = std::shared_ptr<Context>;

inline ContextPtr make_context(FusionCategoryData c) {
  return std::make_shared<Context>(std::move(c));
}

}  // namespace tubecat
