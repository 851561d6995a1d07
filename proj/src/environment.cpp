#include "environment.hpp"

namespace tnkit::env {

DenseTensor trivial() { return DenseTensor({1, 1, 1}, {Scalar(1)}); }

DenseTensor extend_left(const DenseTensor& left, const DenseTensor& bra, const DenseTensor& w,
                        const DenseTensor& ket) {
  DenseTensor t = contract(left, ket, {{2, 0}});           // bl wl i kr
  t = contract(t, w, {{1, 0}, {2, 2}});                    // bl kr o wr
  t = contract(t, bra.conj(), {{0, 0}, {2, 1}});           // kr wr br
  return permute(t, {2, 1, 0});
}

DenseTensor extend_right(const DenseTensor& right, const DenseTensor& bra, const DenseTensor& w,
                         const DenseTensor& ket) {
  DenseTensor t = contract(ket, right, {{2, 2}});          // kl i br wr
  t = contract(t, w, {{1, 2}, {3, 3}});                    // kl br wl o
  t = contract(t, bra.conj(), {{1, 2}, {3, 1}});           // kl wl bl
  return permute(t, {2, 1, 0});
}

DenseTensor apply1(const DenseTensor& left, const DenseTensor& w, const DenseTensor& right,
                   const DenseTensor& x) {
  DenseTensor t = contract(left, x, {{2, 0}});             // bl wl i kr
  t = contract(t, w, {{1, 0}, {2, 2}});                    // bl kr o wr
  return contract(t, right, {{1, 2}, {3, 1}});             // bl o br
}

DenseTensor apply2(const DenseTensor& left, const DenseTensor& w1, const DenseTensor& w2,
                   const DenseTensor& right, const DenseTensor& x) {
  DenseTensor t = contract(left, x, {{2, 0}});             // bl wl i1 i2 kr
  t = contract(t, w1, {{1, 0}, {2, 2}});                   // bl i2 kr o1 wm
  t = contract(t, w2, {{4, 0}, {1, 2}});                   // bl kr o1 o2 wr
  return contract(t, right, {{1, 2}, {4, 1}});             // bl o1 o2 br
}

Matrix dense1(const DenseTensor& left, const DenseTensor& w, const DenseTensor& right) {
  DenseTensor t = contract(left, w, {{1, 0}});             // bl kl o i wr
  t = contract(t, right, {{4, 1}});                        // bl kl o i br kr
  return permute(t, {0, 2, 4, 1, 3, 5}).to_matrix(3);
}

Matrix dense2(const DenseTensor& left, const DenseTensor& w1, const DenseTensor& w2,
              const DenseTensor& right) {
  DenseTensor t = contract(left, w1, {{1, 0}});            // bl kl o1 i1 wm
  t = contract(t, w2, {{4, 0}});                           // bl kl o1 i1 o2 i2 wr
  t = contract(t, right, {{6, 1}});                        // bl kl o1 i1 o2 i2 br kr
  return permute(t, {0, 2, 4, 6, 1, 3, 5, 7}).to_matrix(4);
}

DenseTensor identity_core(Index d) {
  DenseTensor c({1, d, d, 1});
  for (Index s = 0; s < d; ++s) c({0, s, s, 0}) = 1.0;
  return c;
}

}  // namespace tnkit::env
