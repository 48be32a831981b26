#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "leakwave/acoustics.hpp"

namespace leakwave {

/// Forward real transform, X[k] = sum_n x[n] e^{-2 pi i k n / N}, k = 0..N/2.
std::vector<cdouble> rfft(std::span<const double> x);

/// Inverse of rfft() for a length-n signal, including the 1/N factor.
std::vector<double> irfft(std::span<const cdouble> spectrum, std::size_t n);

/// Bin frequencies k fs / n of rfft() output.
std::vector<double> rfft_frequencies(std::size_t n, double sample_rate);

/// Hann window sampled over n points with w[0] = w[n-1] = 0 (tapers, gates).
std::vector<double> hann_symmetric(std::size_t n);
/// Hann window with period n (w[0] = 0, w[n] would be 0); used for Welch blocks.
std::vector<double> hann_periodic(std::size_t n);

}  // namespace leakwave
