#include "cau/corpus.hpp"

namespace cau {

Term identity() { return lam(var(1)); }

Term plus() {
  // m=4 n=3 f=2 x=1
  return lam(lam(lam(lam(app(var(4), var(2), app(var(3), var(2), var(1)))))));
}

Term sum9() {
  Term acc = var(1);
  for (std::uint32_t i = 2; i <= 9; ++i) acc = app(plus(), var(i), acc);
  for (int i = 0; i < 9; ++i) acc = lam(acc);
  return acc;
}

Term pair_ctor() { return lam(lam(lam(app(var(1), var(3), var(2))))); }

Replacement<Term> theta_plus() {
  return {church(0), plus(), church(1), church(1), church(1), identity(), plus(), plus(), sum9()};
}

std::uint32_t count_contractions(const Trail& q) {
  switch (q.kind()) {
    case Kind::beta:
    case Kind::beta_bang:
    case Kind::ti:
      return 1;
    default: {
      std::uint32_t n = 0;
      for (std::size_t i = 0; i < q.arity(); ++i)
        if (q.node()->kid(i)->sort() == Sort::trail) n += count_contractions(q.trail(i));
      return n;
    }
  }
}

}  // namespace cau
