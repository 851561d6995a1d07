#pragma once

// Environment contractions shared by the sweeping algorithms.
// Environments are (bra bond, operator bond, ket bond).

#include "tnkit/tensor.hpp"

namespace tnkit::env {

DenseTensor trivial();

// Absorbs one site into a left environment: bra (bl,o,br), W (wl,o,i,wr),
// ket (kl,i,kr) turn L(bl,wl,kl) into L(br,wr,kr).
DenseTensor extend_left(const DenseTensor& left, const DenseTensor& bra, const DenseTensor& w,
                        const DenseTensor& ket);
DenseTensor extend_right(const DenseTensor& right, const DenseTensor& bra, const DenseTensor& w,
                         const DenseTensor& ket);

// Effective operator applied to a one-site ket (kl,i,kr) -> (bl,o,br).
DenseTensor apply1(const DenseTensor& left, const DenseTensor& w, const DenseTensor& right,
                   const DenseTensor& x);
// Two-site ket (kl,i1,i2,kr) -> (bl,o1,o2,br).
DenseTensor apply2(const DenseTensor& left, const DenseTensor& w1, const DenseTensor& w2,
                   const DenseTensor& right, const DenseTensor& x);

// Explicit effective matrices, rows (bl,o,br) and columns (kl,i,kr).
Matrix dense1(const DenseTensor& left, const DenseTensor& w, const DenseTensor& right);
Matrix dense2(const DenseTensor& left, const DenseTensor& w1, const DenseTensor& w2,
              const DenseTensor& right);

// Identity operator core (1, d, d, 1).
DenseTensor identity_core(Index d);

}  // namespace tnkit::env
