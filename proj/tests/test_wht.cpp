#include <doctest.h>

#include <cmath>

#include "chirpcs/rng.hpp"
#include "chirpcs/wht.hpp"

using namespace chirpcs;

namespace {

std::vector<cplx> random_vector(std::size_t n, Rng& rng) {
    std::vector<cplx> v(n);
    for (auto& z : v) z = {rng.next_gaussian(), rng.next_gaussian()};
    return v;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST_CASE("impulse and constant inputs") {
    const std::size_t n = 8;
    std::vector<cplx> delta(n, 0.0);
    delta[0] = 1.0;
    fwht(delta);
    for (std::size_t i = 0; i < n; ++i) CHECK(delta[i] == cplx(1.0, 0.0));

    std::vector<cplx> ones(n, 1.0);
    fwht(ones);
    CHECK(ones[0] == cplx(8.0, 0.0));
    for (std::size_t i = 1; i < n; ++i) CHECK(ones[i] == cplx(0.0, 0.0));
}

TEST_CASE("rejects non-power-of-two lengths") {
    std::vector<cplx> v(6, 0.0);
    CHECK_THROWS_AS(fwht(v), std::invalid_argument);
}

TEST_CASE("matches the direct O(N^2) oracle for m <= 5") {
    Rng rng(42);
    for (int m = 1; m <= 5; ++m) {
        const std::size_t n = std::size_t(1) << m;
        std::vector<cplx> v = random_vector(n, rng);
        const std::vector<cplx> expected = wht_direct(v);
        fwht(v);
        CHECK(max_abs_diff(v, expected) <= 1e-12);
    }
}

TEST_CASE("involution: fwht(fwht(v)) = N v up to m = 15") {
    Rng rng(43);
    for (int m : {3, 8, 15}) {
        const std::size_t n = std::size_t(1) << m;
        const std::vector<cplx> v = random_vector(n, rng);
        std::vector<cplx> w = v;
        fwht(w);
        fwht(w);
        double max_rel = 0.0;
        double scale = 0.0;
        for (const auto& z : v) scale = std::max(scale, std::abs(z));
        for (std::size_t i = 0; i < n; ++i)
            max_rel = std::max(max_rel, std::abs(w[i] - static_cast<double>(n) * v[i]));
        CHECK(max_rel <= 1e-10 * static_cast<double>(n) * scale);
    }
}

TEST_CASE("Parseval up to m = 15") {
    Rng rng(44);
    for (int m : {4, 10, 15}) {
        const std::size_t n = std::size_t(1) << m;
        std::vector<cplx> v = random_vector(n, rng);
        double in_energy = 0.0;
        for (const auto& z : v) in_energy += std::norm(z);
        fwht(v);
        double out_energy = 0.0;
        for (const auto& z : v) out_energy += std::norm(z);
        CHECK(std::abs(out_energy - static_cast<double>(n) * in_energy) <=
              1e-10 * static_cast<double>(n) * in_energy);
    }
}

TEST_CASE("linearity") {
    Rng rng(45);
    const std::size_t n = 64;
    const std::vector<cplx> u = random_vector(n, rng);
    const std::vector<cplx> v = random_vector(n, rng);
    const cplx a{1.7, -0.3}, b{-0.4, 2.1};
    std::vector<cplx> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = a * u[i] + b * v[i];
    std::vector<cplx> tu = u, tv = v;
    fwht(mix);
    fwht(tu);
    fwht(tv);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(mix[i] - (a * tu[i] + b * tv[i])));
        scale = std::max(scale, std::abs(mix[i]));
    }
    CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("peak detection with lowest-index tie break") {
    std::vector<cplx> spike(16, 0.0);
    spike[5] = 16.0;
    const Peak p1 = power_spectrum_peak(spike);
    CHECK(p1.index == 5);
    CHECK(p1.power == doctest::Approx(256.0));

    std::vector<cplx> flat(8, 1.0);
    const Peak p2 = power_spectrum_peak(flat);
    CHECK(p2.index == 0);
    CHECK(p2.power == doctest::Approx(1.0));

    std::vector<cplx> two(8, 0.0);
    two[2] = 3.0;
    two[6] = 2.0;
    const Peak p3 = power_spectrum_peak(two);
    CHECK(p3.index == 2);
    CHECK(p3.power == doctest::Approx(9.0));
}
