#pragma once

// Closed terms used by the demos, the acceptance suite and the built-in
// prelude of the surface language.

#include "cau/syntax.hpp"

namespace cau {

Term identity();          // λx.x
Term plus();              // λm n f x. m f (n f x)
Term sum9();              // nine-argument sum
Term pair_ctor();         // λx y p. p x y
Replacement<Term> theta_plus();  // the contraction-counting replacement

/// Number of β, β! and ti leaves of a trail.
std::uint32_t count_contractions(const Trail& q);

}  // namespace cau
