#pragma once

#include <Eigen/Dense>

namespace qkr {

// Unitary DFT pair used for position <-> momentum basis changes.
//
//   forward:  y_n = (1/sqrt(N)) sum_j x_j exp(-2 pi i j n / N)
//   backward: y_j = (1/sqrt(N)) sum_n x_n exp(+2 pi i j n / N)
//
// Both act in place. Plans are cached per transform size and reused; the
// cache is thread safe, and concurrent execution on distinct vectors is
// allowed once a size has been planned.
void dft_forward(Eigen::VectorXcd& x);
void dft_backward(Eigen::VectorXcd& x);

// Plans both directions for size n up front (avoids paying plan creation
// inside timed or multi-threaded sections).
void dft_warmup(int n);

}  // namespace qkr
