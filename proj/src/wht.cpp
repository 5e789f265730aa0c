#include "chirpcs/wht.hpp"

#include <bit>
#include <stdexcept>

namespace chirpcs {

void fwht(std::span<cplx> v) {
    const std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fwht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const cplx x = v[j];
                const cplx y = v[j + h];
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
    }
}

std::vector<cplx> wht_direct(std::span<const cplx> v) {
    const std::size_t n = v.size();
    std::vector<cplx> out(n);
    for (std::size_t l = 0; l < n; ++l) {
        cplx acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            const int sign = std::popcount(l & x) & 1 ? -1 : 1;
            acc += static_cast<double>(sign) * v[x];
        }
        out[l] = acc;
    }
    return out;
}

Peak power_spectrum_peak(std::span<const cplx> v) {
    Peak best;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double p = std::norm(v[i]);
        if (p > best.power) {
            best.power = p;
            best.index = i;
        }
    }
    return best;
}

}  // namespace chirpcs
