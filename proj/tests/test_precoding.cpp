// Tests for the sub-connected precoding layer: noise budget, analog
// structure checks, the exact transmit-power rescale and the SINR / sum
// spectral-efficiency expressions. SINR and SE are verified against scalar
// triple-loop re-derivations on deterministic pseudo-random instances.

#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "rpabeam/precoding.hpp"

using namespace rpabeam;

namespace {

struct Instance {
    std::vector<Eigen::MatrixXcd> channels; // rows are h^H
    AnalogPrecoder analog;
    DigitalPrecoderSet digital;
    SubarrayMapping mapping;
};

Instance random_instance(int nc, int users, int nt, int chains, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> ph(-kPi, kPi);

    Instance inst;
    inst.mapping = SubarrayMapping::contiguous(nt, chains);
    inst.analog.phases.resize(static_cast<std::size_t>(nt));
    for (double& p : inst.analog.phases)
        p = ph(gen);
    for (int g = 0; g < nc; ++g) {
        Eigen::MatrixXcd H(users, nt);
        Eigen::MatrixXcd Fbb(chains, users);
        for (int u = 0; u < users; ++u)
            for (int m = 0; m < nt; ++m)
                H(u, m) = cplx(n(gen), n(gen));
        for (int r = 0; r < chains; ++r)
            for (int u = 0; u < users; ++u)
                Fbb(r, u) = cplx(n(gen), n(gen));
        inst.channels.push_back(H);
        inst.digital.push_back(Fbb);
    }
    return inst;
}

// Scalar re-derivation of the SINR: effective gains via explicit loops.
double sinr_oracle(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& F,
                   const Eigen::MatrixXcd& Fbb, double sigma2, int user)
{
    const int chains = static_cast<int>(F.cols());
    const int users = static_cast<int>(Fbb.cols());
    const int nt = static_cast<int>(F.rows());
    std::vector<cplx> gains(static_cast<std::size_t>(users), cplx(0.0, 0.0));
    for (int k = 0; k < users; ++k)
        for (int r = 0; r < chains; ++r) {
            cplx hf(0.0, 0.0);
            for (int m = 0; m < nt; ++m)
                hf += H(user, m) * F(m, r);
            gains[static_cast<std::size_t>(k)] += hf * Fbb(r, k);
        }
    double interference = 0.0;
    for (int k = 0; k < users; ++k)
        if (k != user)
            interference += std::norm(gains[static_cast<std::size_t>(k)]);
    return std::norm(gains[static_cast<std::size_t>(user)]) / (interference + sigma2);
}

double sum_se_oracle(const Instance& inst, double sigma2)
{
    const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);
    double acc = 0.0;
    for (std::size_t g = 0; g < inst.channels.size(); ++g)
        for (int u = 0; u < inst.channels[g].rows(); ++u)
            acc += std::log2(1.0 + sinr_oracle(inst.channels[g], F, inst.digital[g], sigma2, u));
    return acc / static_cast<double>(inst.channels.size());
}

} // namespace

TEST_CASE("noise power follows the closed-form density-times-spacing law")
{
    // -174 dBm/Hz over one 900 kHz subcarrier of a 7.2 MHz / 8 grid.
    const double sigma2 = noise_power(-174.0, 7.2e6, 8);
    const double expect = std::pow(10.0, (-174.0 - 30.0) / 10.0) * (7.2e6 / 8.0);
    CHECK(sigma2 == doctest::Approx(expect).epsilon(1e-12));
    CHECK(sigma2 == doctest::Approx(3.583e-15).epsilon(1e-3));
    // Narrower spacing lowers the per-subcarrier noise.
    CHECK(noise_power(-174.0, 7.2e6, 16) < sigma2);
    CHECK_THROWS_AS(noise_power(-174.0, 0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(noise_power(-174.0, 7.2e6, 0), std::invalid_argument);
}

TEST_CASE("contiguous mapping partitions antennas into equal blocks")
{
    const SubarrayMapping map = SubarrayMapping::contiguous(8, 4);
    CHECK(map.subarray_size() == 2);
    for (int m = 0; m < 8; ++m)
        CHECK(map.chain_of(m) == m / 2);
    for (int r = 0; r < 4; ++r)
        CHECK(map.first_antenna(r) == 2 * r);
    CHECK_THROWS_AS(SubarrayMapping::contiguous(8, 3), std::invalid_argument);
    CHECK_THROWS_AS(SubarrayMapping::contiguous(0, 1), std::invalid_argument);
}

TEST_CASE("analog matrix is block diagonal with the requested phases")
{
    const SubarrayMapping map = SubarrayMapping::contiguous(6, 3);
    AnalogPrecoder analog;
    analog.phases = {0.1, -0.2, 0.3, 2.5, -2.9, 1.0};
    const Eigen::MatrixXcd F = analog.matrix(map);
    REQUIRE(F.rows() == 6);
    REQUIRE(F.cols() == 3);
    for (int m = 0; m < 6; ++m)
        for (int r = 0; r < 3; ++r) {
            if (r == map.chain_of(m)) {
                CHECK(std::abs(F(m, r) -
                               std::polar(1.0, analog.phases[static_cast<std::size_t>(m)])) <
                      1e-15);
            } else {
                CHECK(F(m, r) == cplx(0.0, 0.0));
            }
        }
    AnalogPrecoder bad;
    bad.phases = {0.0, 0.0};
    CHECK_THROWS_AS(bad.matrix(map), std::invalid_argument);
}

TEST_CASE("validate_analog reports modulus and support violations")
{
    const SubarrayMapping map = SubarrayMapping::contiguous(4, 2);
    AnalogPrecoder analog;
    analog.phases = {0.5, 1.5, -0.5, 0.0};
    Eigen::MatrixXcd F = analog.matrix(map);
    CHECK(validate_analog(F, map).ok);
    CHECK(validate_analog(analog, map).ok);

    // Break unit modulus inside the support.
    Eigen::MatrixXcd F1 = F;
    F1(1, 0) *= 1.5;
    const AnalogReport r1 = validate_analog(F1, map);
    CHECK_FALSE(r1.ok);
    REQUIRE(r1.violations.size() == 1);
    CHECK(r1.violations[0].row == 1);
    CHECK(r1.violations[0].col == 0);
    CHECK(r1.violations[0].magnitude == doctest::Approx(1.5));
    CHECK_FALSE(r1.violations[0].outside_support);

    // Leak energy outside the block-diagonal support.
    Eigen::MatrixXcd F2 = F;
    F2(0, 1) = cplx(0.1, 0.0);
    const AnalogReport r2 = validate_analog(F2, map);
    CHECK_FALSE(r2.ok);
    REQUIRE(r2.violations.size() == 1);
    CHECK(r2.violations[0].outside_support);

    // Shape mismatch short-circuits.
    CHECK_FALSE(validate_analog(Eigen::MatrixXcd::Zero(3, 2), map).ok);
}

TEST_CASE("normalize_power hits the transmit budget exactly")
{
    const Instance inst = random_instance(4, 2, 8, 4, 1234);
    const double pt = 2.5;
    const DigitalPrecoderSet out =
        normalize_power(inst.digital, inst.analog, inst.mapping, pt);
    const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);

    double total = 0.0, before = 0.0;
    for (std::size_t g = 0; g < out.size(); ++g) {
        total += (F * out[g]).squaredNorm();
        before += (F * inst.digital[g]).squaredNorm();
    }
    CHECK(total / static_cast<double>(out.size()) == doctest::Approx(pt).epsilon(1e-12));

    // One global scalar: every precoder is the input times the same factor.
    const double scale = std::sqrt(pt * static_cast<double>(out.size()) / before);
    for (std::size_t g = 0; g < out.size(); ++g)
        CHECK((out[g] - scale * inst.digital[g]).norm() <= 1e-12 * inst.digital[g].norm());

    CHECK_THROWS_AS(normalize_power({}, inst.analog, inst.mapping, pt), std::invalid_argument);
    CHECK_THROWS_AS(normalize_power(inst.digital, inst.analog, inst.mapping, 0.0),
                    std::invalid_argument);
    DigitalPrecoderSet zeros = {Eigen::MatrixXcd::Zero(4, 2)};
    CHECK_THROWS_AS(normalize_power(zeros, inst.analog, inst.mapping, pt),
                    std::invalid_argument);
}

TEST_CASE("sinr matches the scalar oracle on random instances")
{
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        const Instance inst = random_instance(3, 3, 6, 3, seed);
        const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);
        const double sigma2 = 0.37;
        for (std::size_t g = 0; g < inst.channels.size(); ++g) {
            for (int u = 0; u < 3; ++u) {
                const double got = sinr(inst.channels[g], F, inst.digital[g], sigma2, u);
                const double ref = sinr_oracle(inst.channels[g], F, inst.digital[g], sigma2, u);
                CHECK(got == doctest::Approx(ref).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("sum spectral efficiency matches the scalar oracle")
{
    for (unsigned seed : {11u, 12u, 13u}) {
        const Instance inst = random_instance(5, 2, 8, 4, seed);
        const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);
        const double sigma2 = 1.3e-2;
        CHECK(sum_se(inst.channels, F, inst.digital, sigma2) ==
              doctest::Approx(sum_se_oracle(inst, sigma2)).epsilon(1e-10));
    }
}

TEST_CASE("noiseless SINR is invariant to a global digital rescale")
{
    const Instance inst = random_instance(2, 3, 6, 3, 77);
    const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);
    for (std::size_t g = 0; g < inst.channels.size(); ++g) {
        for (int u = 0; u < 3; ++u) {
            const double base =
                detail::sinr_unchecked(inst.channels[g], F, inst.digital[g], 0.0, u);
            const double scaled = detail::sinr_unchecked(
                inst.channels[g], F, Eigen::MatrixXcd(3.7 * inst.digital[g]), 0.0, u);
            CHECK(scaled == doctest::Approx(base).epsilon(1e-10));
        }
    }
}

TEST_CASE("SINR is invariant to a common phase shift of all analog phases")
{
    const Instance inst = random_instance(2, 2, 8, 4, 99);
    AnalogPrecoder shifted = inst.analog;
    for (double& p : shifted.phases)
        p += 1.234;
    const Eigen::MatrixXcd F0 = inst.analog.matrix(inst.mapping);
    const Eigen::MatrixXcd F1 = shifted.matrix(inst.mapping);
    const double sigma2 = 0.05;
    for (std::size_t g = 0; g < inst.channels.size(); ++g)
        for (int u = 0; u < 2; ++u)
            CHECK(sinr(inst.channels[g], F0, inst.digital[g], sigma2, u) ==
                  doctest::Approx(sinr(inst.channels[g], F1, inst.digital[g], sigma2, u))
                      .epsilon(1e-12));
}

TEST_CASE("sum SE increases strictly with the transmit power budget")
{
    const Instance inst = random_instance(4, 2, 8, 4, 2024);
    const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);
    const double sigma2 = noise_power(-174.0, 7.2e6, 4);
    double prev = -1.0;
    for (double pt_dbm : {10.0, 20.0, 30.0, 40.0}) {
        const DigitalPrecoderSet scaled =
            normalize_power(inst.digital, inst.analog, inst.mapping, dbm_to_watts(pt_dbm));
        const double se = sum_se(inst.channels, F, scaled, sigma2);
        CHECK(se > prev);
        prev = se;
    }
}

TEST_CASE("sinr and sum_se validate their arguments")
{
    const Instance inst = random_instance(2, 2, 4, 2, 5);
    const Eigen::MatrixXcd F = inst.analog.matrix(inst.mapping);
    CHECK_THROWS_AS(sinr(inst.channels[0], F, inst.digital[0], 0.0, 0), std::domain_error);
    CHECK_THROWS_AS(sinr(inst.channels[0], F, inst.digital[0], -1.0, 0), std::domain_error);
    CHECK_THROWS_AS(sinr(inst.channels[0], F, inst.digital[0], 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(sum_se(inst.channels, F, DigitalPrecoderSet{inst.digital[0]}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(sum_se({}, F, {}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sum_se(inst.channels, F, inst.digital, 0.0), std::domain_error);
}
