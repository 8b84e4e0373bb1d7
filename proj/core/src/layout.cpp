#include "nhfields/layout.hpp"

#include <string>

#include "nhfields/errors.hpp"

namespace nhfields {

void JetLayout::validate() const {
  if (n < 0) throw InvalidArgument("n must be >= 0, got " + std::to_string(n));
  if (m < 1) throw InvalidArgument("m must be >= 1, got " + std::to_string(m));
}

void Dims::validate() const {
  layout.validate();
  if (k < 0 || k > layout.jet_dim()) {
    throw InvalidArgument("k must lie in [0, m(n+1)], got " + std::to_string(k));
  }
}

}  // namespace nhfields
