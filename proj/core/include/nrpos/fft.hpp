// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Mixed-radix complex DFT in double precision.
//
// Sizes factor into radix-4/2/3/5 butterflies with a generic O(p^2) butterfly
// for any remaining prime p, so every length is supported (the 839 and 139
// preamble lengths included). Twiddles are built once per size and cached.
// The code avoids FMA contraction-sensitive reassociation, so a given input
// produces the same bits on every IEEE-754 platform built with
// -ffp-contract=off.

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nrpos {

using Cplx = std::complex<double>;

// X[k] = sum_n x[n] exp(-j 2 pi k n / N), unnormalized.
std::vector<Cplx> fft(std::span<const Cplx> x);

// x[n] = scale * sum_k X[k] exp(+j 2 pi k n / N). Pass scale = 1/N for the
// exact inverse of fft().
std::vector<Cplx> ifft(std::span<const Cplx> x, double scale = 1.0);

}  // namespace nrpos
