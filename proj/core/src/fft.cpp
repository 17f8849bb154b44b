// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace nrpos {
namespace {

// Plain complex product; std::complex operator* routes through the C99
// Annex G inf/nan recovery path, which we neither need nor want in the
// inner loops.
inline Cplx mul(const Cplx& a, const Cplx& b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

struct Plan {
  std::size_t n = 0;
  std::vector<Cplx> twiddles;           // exp(-j 2 pi i / n)
  std::vector<std::size_t> factors;     // (radix, remaining length) pairs
};

std::shared_ptr<const Plan> make_plan(std::size_t n) {
  auto plan = std::make_shared<Plan>();
  plan->n = n;
  plan->twiddles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(i) /
                         static_cast<double>(n);
    plan->twiddles[i] = {std::cos(phase), std::sin(phase)};
  }
  std::size_t rest = n;
  std::size_t p = 4;
  while (rest > 1) {
    while (rest % p != 0) {
      if (p == 4) p = 2;
      else if (p == 2) p = 3;
      else p += 2;
      if (p * p > rest) p = rest;
    }
    rest /= p;
    plan->factors.push_back(p);
    plan->factors.push_back(rest);
  }
  return plan;
}

std::shared_ptr<const Plan> plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Plan>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = make_plan(n);
  return slot;
}

void butterfly2(Cplx* out, std::size_t fstride, const Plan& plan,
                std::size_t m) {
  Cplx* out2 = out + m;
  for (std::size_t k = 0; k < m; ++k) {
    const Cplx t = mul(out2[k], plan.twiddles[k * fstride]);
    out2[k] = out[k] - t;
    out[k] += t;
  }
}

void butterfly4(Cplx* out, std::size_t fstride, const Plan& plan,
                std::size_t m) {
  const auto& tw = plan.twiddles;
  for (std::size_t k = 0; k < m; ++k) {
    const Cplx s0 = mul(out[k + m], tw[k * fstride]);
    const Cplx s1 = mul(out[k + 2 * m], tw[2 * k * fstride]);
    const Cplx s2 = mul(out[k + 3 * m], tw[3 * k * fstride]);
    const Cplx s5 = out[k] - s1;
    out[k] += s1;
    const Cplx s3 = s0 + s2;
    const Cplx s4 = s0 - s2;
    out[k + 2 * m] = out[k] - s3;
    out[k] += s3;
    out[k + m] = {s5.real() + s4.imag(), s5.imag() - s4.real()};
    out[k + 3 * m] = {s5.real() - s4.imag(), s5.imag() + s4.real()};
  }
}

void butterfly_generic(Cplx* out, std::size_t fstride, const Plan& plan,
                       std::size_t m, std::size_t p) {
  const auto& tw = plan.twiddles;
  std::vector<Cplx> scratch(p);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t q = 0, k = u; q < p; ++q, k += m) scratch[q] = out[k];
    for (std::size_t q1 = 0, k = u; q1 < p; ++q1, k += m) {
      std::size_t twidx = 0;
      Cplx acc = scratch[0];
      for (std::size_t q = 1; q < p; ++q) {
        twidx += fstride * k;
        if (twidx >= plan.n) twidx %= plan.n;
        acc += mul(scratch[q], tw[twidx]);
      }
      out[k] = acc;
    }
  }
}

void work(Cplx* out, const Cplx* in, std::size_t fstride,
          const std::size_t* factors, const Plan& plan) {
  const std::size_t p = factors[0];
  const std::size_t m = factors[1];
  Cplx* const begin = out;
  if (m == 1) {
    for (std::size_t q = 0; q < p; ++q, in += fstride) out[q] = *in;
  } else {
    for (std::size_t q = 0; q < p; ++q, in += fstride, out += m) {
      work(out, in, fstride * p, factors + 2, plan);
    }
  }
  switch (p) {
    case 2: butterfly2(begin, fstride, plan, m); break;
    case 4: butterfly4(begin, fstride, plan, m); break;
    default: butterfly_generic(begin, fstride, plan, m, p); break;
  }
}

}  // namespace

std::vector<Cplx> fft(std::span<const Cplx> x) {
  std::vector<Cplx> out(x.size());
  if (x.size() <= 1) {
    std::copy(x.begin(), x.end(), out.begin());
    return out;
  }
  const auto plan = plan_for(x.size());
  work(out.data(), x.data(), 1, plan->factors.data(), *plan);
  return out;
}

std::vector<Cplx> ifft(std::span<const Cplx> x, double scale) {
  std::vector<Cplx> conj_in(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) conj_in[i] = std::conj(x[i]);
  auto out = fft(conj_in);
  for (auto& v : out) v = {v.real() * scale, -v.imag() * scale};
  return out;
}

}  // namespace nrpos
