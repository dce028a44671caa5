#pragma once

#include <stdexcept>

#include "gcgeo/rational.hpp"

namespace gcgeo {

// Normalization choices that the square equation leaves open.  The defaults
// reproduce the worked symplectic and complex structures; alternatives are
// exposed so the effect of either choice can be inspected directly.
struct Conventions {
  // The square equation asks the homotopy-corrected square of the
  // endomorphism tower to be this multiple of the identity in bidegree (1,0).
  Rational square_rhs = rat(-1);
  // Twist the internal differential of the homotopy tower by the bracket
  // with the endomorphism tower; switching this off uses the plain internal
  // differential instead.
  bool twisted_square_differential = true;
  // Sign of the diagonal blocks when a structure is induced from a
  // generalized complex one.  Both signs produce a valid lift.
  int diagonal_sign = 1;
};

inline void validate(const Conventions& conv) {
  if (conv.diagonal_sign != 1 && conv.diagonal_sign != -1)
    throw std::invalid_argument("diagonal sign must be +1 or -1");
}

}  // namespace gcgeo
