#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace chirpcs {

using cplx = std::complex<double>;

/// In-place unnormalized fast Walsh-Hadamard transform:
/// out[l] = sum_x (-1)^(l.x) v[x]. Iterative butterfly, O(N log N) additions.
/// Callers own the normalization (fwht(fwht(v)) = N * v).
void fwht(std::span<cplx> v);

/// O(N^2) direct evaluation; test oracle for fwht.
std::vector<cplx> wht_direct(std::span<const cplx> v);

struct Peak {
    std::size_t index = 0;
    double power = 0.0;  // squared magnitude |v[index]|^2
};

/// argmax_l |v[l]|^2 with ties broken toward the lowest index.
Peak power_spectrum_peak(std::span<const cplx> v);

}  // namespace chirpcs
