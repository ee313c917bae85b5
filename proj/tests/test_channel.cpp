// Tests for array geometry, path sampling and the per-mode channel tensor.
// The tensor builder is checked entry-by-entry against an independent scalar
// re-derivation of the Rician multipath superposition with hand-built path
// sets, so every weight, phase ramp and steering term is covered.

#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rpabeam/channel.hpp"
#include "rpabeam/geometry.hpp"
#include "rpabeam/pattern_codebook.hpp"
#include "rpabeam/rng.hpp"
#include "rpabeam/system_config.hpp"

using namespace rpabeam;

namespace {

SystemConfig tiny_config()
{
    SystemConfig cfg;
    cfg.num_antennas = 4;
    cfg.upa_rows = 2;
    cfg.upa_cols = 2;
    cfg.num_rf_chains = 2;
    cfg.num_users = 2;
    cfg.num_subcarriers = 3;
    cfg.num_patterns = 2;
    cfg.validate();
    return cfg;
}

// Independent steering computation: gain times plane-wave phase, written
// with std::polar rather than a complex exponential.
cplx steer_oracle(const ArrayGeometry& geom, const PatternCodebook& book, int mode, int ant,
                  double theta, double phi, double fc)
{
    const double lambda = kSpeedOfLight / fc;
    const auto& p = geom.positions[static_cast<std::size_t>(ant)];
    const double proj = std::sin(theta) * std::cos(phi) * p[0] +
                        std::sin(theta) * std::sin(phi) * p[1] + std::cos(theta) * p[2];
    return book.gain(mode, theta, phi) * std::polar(1.0, -2.0 * kPi / lambda * proj);
}

// Scalar re-derivation of one tensor entry from a path set.
cplx tensor_oracle(const SystemConfig& cfg, const ArrayGeometry& geom,
                   const PatternCodebook& book, const PathSet& ps, int g, int ant, int mode)
{
    const double fg =
        ((g + 1) - 0.5 * (cfg.num_subcarriers + 1)) * cfg.bandwidth_hz / cfg.num_subcarriers;
    const double kr = ps.rician_k_linear;
    cplx h(0.0, 0.0);
    auto add = [&](const Path& path, double weight) {
        const cplx beta = ps.large_scale_gain * path.gain *
                          std::polar(1.0, -2.0 * kPi * path.delay_s * fg);
        h += weight * beta *
             steer_oracle(geom, book, mode, ant, path.theta_rad, path.phi_rad,
                          cfg.carrier_freq_hz);
    };
    add(ps.los, std::sqrt(kr / (kr + 1.0)));
    for (const Path& p : ps.nlos)
        add(p, std::sqrt(1.0 / (kr + 1.0)));
    return h;
}

std::vector<PathSet> handmade_paths(const SystemConfig& cfg)
{
    std::vector<PathSet> paths(2);
    PathSet& a = paths[0];
    a.rician_k_linear = db_to_linear(9.0);
    a.large_scale_gain = 3.2e-6;
    a.los = {0.40, -1.10, cplx(1.0, 0.0), 6.70e-5};
    a.nlos = {{0.45, -0.90, cplx(0.60, -0.30), 6.74e-5},
              {0.35, -1.30, cplx(0.20, 0.70), 6.71e-5}};
    PathSet& b = paths[1];
    b.rician_k_linear = db_to_linear(4.0);
    b.large_scale_gain = 2.1e-6;
    b.los = {0.80, 2.00, cplx(1.0, 0.0), 7.10e-5};
    b.nlos = {{0.78, 2.20, cplx(-0.40, 0.10), 7.15e-5}};
    (void)cfg;
    return paths;
}

} // namespace

TEST_CASE("UPA element positions follow the row-major grid")
{
    const double s = 0.07;
    const ArrayGeometry geom = ArrayGeometry::upa(2, 3, s);
    REQUIRE(geom.num_antennas() == 6);
    for (int row = 0; row < 2; ++row) {
        for (int col = 0; col < 3; ++col) {
            const auto& p = geom.positions[static_cast<std::size_t>(row * 3 + col)];
            CHECK(p[0] == doctest::Approx(col * s).epsilon(1e-15));
            CHECK(p[1] == doctest::Approx(row * s).epsilon(1e-15));
            CHECK(p[2] == 0.0);
        }
    }
}

TEST_CASE("steering vector matches the scalar oracle")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);

    for (int mode = 0; mode < cfg.num_patterns; ++mode) {
        PatternVector modes(static_cast<std::size_t>(cfg.num_antennas), mode);
        // Mix modes across elements on the second pass.
        if (mode == 1)
            modes = {0, 1, 1, 0};
        for (double theta : {0.3, 1.0, 2.2}) {
            for (double phi : {-2.5, 0.4, 3.0}) {
                const Eigen::VectorXcd a =
                    steering_vector(geom, book, modes, theta, phi, cfg.carrier_freq_hz);
                REQUIRE(a.size() == cfg.num_antennas);
                for (int ant = 0; ant < cfg.num_antennas; ++ant) {
                    const cplx ref = steer_oracle(geom, book, modes[static_cast<std::size_t>(ant)],
                                                  ant, theta, phi, cfg.carrier_freq_hz);
                    CHECK(std::abs(a(ant) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
                }
            }
        }
    }
}

TEST_CASE("steering phase progression along a row is geometric")
{
    // Single-row array: the phase ratio between adjacent elements is
    // exp(-j 2 pi d/lambda sin(theta) cos(phi)), independent of the element.
    SystemConfig cfg = tiny_config();
    cfg.upa_rows = 1;
    cfg.upa_cols = 4;
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    PatternCodebook book = codebook_from_config(cfg);
    const PatternVector modes(4, 0);
    const double theta = 1.1, phi = 0.7;
    const Eigen::VectorXcd a = steering_vector(geom, book, modes, theta, phi, cfg.carrier_freq_hz);
    const double d = cfg.element_spacing_m();
    const cplx expect =
        std::polar(1.0, -2.0 * kPi * d / cfg.wavelength_m() * std::sin(theta) * std::cos(phi));
    for (int ant = 0; ant + 1 < 4; ++ant) {
        const cplx ratio = a(ant + 1) / a(ant);
        CHECK(std::abs(ratio - expect) < 1e-12);
    }
}

TEST_CASE("steering vector rejects a pattern vector of the wrong length")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    CHECK_THROWS_AS(steering_vector(geom, book, PatternVector{0, 1}, 1.0, 0.0,
                                    cfg.carrier_freq_hz),
                    std::invalid_argument);
}

TEST_CASE("subcarrier frequencies are the centered OFDM grid")
{
    const auto f = subcarrier_frequencies(8, 7.2e6);
    REQUIRE(f.size() == 8);
    const double df = 7.2e6 / 8.0;
    for (int g = 0; g < 8; ++g)
        CHECK(f[static_cast<std::size_t>(g)] ==
              doctest::Approx(((g + 1) - 4.5) * df).epsilon(1e-15));
    // The grid is symmetric around DC.
    double sum = 0.0;
    for (double v : f)
        sum += v;
    CHECK(sum == doctest::Approx(0.0).scale(7.2e6));
    CHECK(f[1] - f[0] == doctest::Approx(df).epsilon(1e-15));
    CHECK_THROWS_AS(subcarrier_frequencies(0, 7.2e6), std::invalid_argument);
}

TEST_CASE("channel tensor matches the scalar multipath oracle")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    const std::vector<PathSet> paths = handmade_paths(cfg);

    const EmCsiTensor t = build_emcsi(cfg, geom, book, paths);
    REQUIRE(t.subcarriers() == 3);
    REQUIRE(t.users() == 2);
    REQUIRE(t.antennas() == 4);
    REQUIRE(t.modes() == 2);

    for (int g = 0; g < 3; ++g) {
        for (int u = 0; u < 2; ++u) {
            for (int ant = 0; ant < 4; ++ant) {
                for (int mode = 0; mode < 2; ++mode) {
                    const cplx ref = tensor_oracle(cfg, geom, book,
                                                   paths[static_cast<std::size_t>(u)], g, ant,
                                                   mode);
                    CHECK(std::abs(t.at(g, u, ant, mode) - ref) <= 1e-12 * std::abs(ref));
                }
            }
        }
    }
}

TEST_CASE("channel tensor is linear in the large-scale gain")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    std::vector<PathSet> paths = handmade_paths(cfg);
    const EmCsiTensor base = build_emcsi(cfg, geom, book, paths);
    for (auto& ps : paths)
        ps.large_scale_gain *= 2.0;
    const EmCsiTensor doubled = build_emcsi(cfg, geom, book, paths);
    for (std::size_t i = 0; i < base.data().size(); ++i)
        CHECK(std::abs(doubled.data()[i] - 2.0 * base.data()[i]) <=
              1e-12 * std::abs(base.data()[i]));
}

TEST_CASE("without scatterers the tensor is the weighted LoS response")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    std::vector<PathSet> paths = handmade_paths(cfg);
    for (auto& ps : paths)
        ps.nlos.clear();

    const EmCsiTensor t = build_emcsi(cfg, geom, book, paths);
    for (int u = 0; u < 2; ++u) {
        const PathSet& ps = paths[static_cast<std::size_t>(u)];
        const double w = std::sqrt(ps.rician_k_linear / (ps.rician_k_linear + 1.0));
        for (int g = 0; g < 3; ++g) {
            const double fg = t.subcarrier_freqs[static_cast<std::size_t>(g)];
            for (int ant = 0; ant < 4; ++ant) {
                for (int mode = 0; mode < 2; ++mode) {
                    const cplx ref = w * ps.large_scale_gain *
                                     std::polar(1.0, -2.0 * kPi * ps.los.delay_s * fg) *
                                     steer_oracle(geom, book, mode, ant, ps.los.theta_rad,
                                                  ps.los.phi_rad, cfg.carrier_freq_hz);
                    CHECK(std::abs(t.at(g, u, ant, mode) - ref) <= 1e-12 * std::abs(ref));
                }
            }
        }
    }
}

TEST_CASE("equal path delays make the magnitude flat across subcarriers")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    std::vector<PathSet> paths = handmade_paths(cfg);
    for (auto& ps : paths)
        for (auto& p : ps.nlos)
            p.delay_s = ps.los.delay_s; // zero excess delay everywhere

    const EmCsiTensor t = build_emcsi(cfg, geom, book, paths);
    for (int u = 0; u < 2; ++u)
        for (int ant = 0; ant < 4; ++ant)
            for (int mode = 0; mode < 2; ++mode)
                for (int g = 1; g < 3; ++g)
                    CHECK(std::abs(t.at(g, u, ant, mode)) ==
                          doctest::Approx(std::abs(t.at(0, u, ant, mode))).epsilon(1e-10));
}

TEST_CASE("sampled path sets satisfy the documented distribution invariants")
{
    SystemConfig cfg;
    cfg.validate();
    for (std::uint64_t seed : {1ull, 77ull, 991ull}) {
        for (int u = 0; u < cfg.num_users; ++u) {
            const PathSet ps = sample_path_set(cfg, seed, u);
            CHECK(ps.rician_k_linear == doctest::Approx(db_to_linear(cfg.rician_k_db)));
            // LoS direction inside the service cone.
            CHECK(ps.los.theta_rad >= 0.0);
            CHECK(ps.los.theta_rad <= deg2rad(cfg.paths.max_nadir_offset_deg) + 1e-12);
            // Free-space amplitude and delay at the slant distance.
            const double slant = cfg.haps_altitude_m / std::cos(ps.los.theta_rad);
            CHECK(ps.large_scale_gain ==
                  doctest::Approx(cfg.wavelength_m() / (4.0 * kPi * slant)).epsilon(1e-12));
            CHECK(ps.los.delay_s == doctest::Approx(slant / kSpeedOfLight).epsilon(1e-12));
            CHECK(ps.los.gain == cplx(1.0, 0.0));
            REQUIRE(static_cast<int>(ps.nlos.size()) == cfg.num_nlos_paths);
            double total = 0.0;
            for (const Path& p : ps.nlos) {
                const double excess = p.delay_s - ps.los.delay_s;
                CHECK(excess > 0.0);
                CHECK(excess <= cfg.paths.max_excess_delay_s + 1e-18);
                CHECK(std::abs(p.theta_rad - ps.los.theta_rad) <=
                      deg2rad(cfg.paths.nlos_elevation_spread_deg) + 1e-12);
                total += std::norm(p.gain);
            }
            // Scatterer gains are renormalized to unit total power.
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("path sampling is deterministic per (seed, user) and differs across users")
{
    SystemConfig cfg;
    const PathSet a = sample_path_set(cfg, 42, 0);
    const PathSet b = sample_path_set(cfg, 42, 0);
    const PathSet c = sample_path_set(cfg, 42, 1);
    CHECK(a.los.theta_rad == b.los.theta_rad);
    CHECK(a.los.phi_rad == b.los.phi_rad);
    REQUIRE(a.nlos.size() == b.nlos.size());
    for (std::size_t i = 0; i < a.nlos.size(); ++i)
        CHECK(a.nlos[i].gain == b.nlos[i].gain);
    CHECK(a.los.theta_rad != c.los.theta_rad);
}

TEST_CASE("apply_pattern conjugates and selects the per-antenna mode")
{
    EmCsiTensor t(2, 2, 3, 2);
    t.subcarrier_freqs = {-1.0, 1.0};
    // Fill with distinct values so any indexing mistake is caught.
    for (int g = 0; g < 2; ++g)
        for (int u = 0; u < 2; ++u)
            for (int ant = 0; ant < 3; ++ant)
                for (int mode = 0; mode < 2; ++mode)
                    t.at(g, u, ant, mode) =
                        cplx(g + 10.0 * u + 100.0 * ant, mode + 0.5);

    const PatternVector c = {1, 0, 1};
    const auto channels = apply_pattern(t, c);
    REQUIRE(channels.size() == 2);
    for (int g = 0; g < 2; ++g) {
        REQUIRE(channels[static_cast<std::size_t>(g)].rows() == 2);
        REQUIRE(channels[static_cast<std::size_t>(g)].cols() == 3);
        for (int u = 0; u < 2; ++u)
            for (int ant = 0; ant < 3; ++ant)
                CHECK(channels[static_cast<std::size_t>(g)](u, ant) ==
                      std::conj(t.at(g, u, ant, c[static_cast<std::size_t>(ant)])));
    }

    CHECK_THROWS_AS(apply_pattern(t, PatternVector{0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(apply_pattern(t, PatternVector{0, 1, 2}), std::domain_error);
    CHECK_THROWS_AS(apply_pattern(t, PatternVector{0, -1, 0}), std::domain_error);
}

TEST_CASE("generate_sample is reproducible and seed-sensitive")
{
    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    const EmCsiTensor a = generate_sample(cfg, geom, book, 5);
    const EmCsiTensor b = generate_sample(cfg, geom, book, 5);
    const EmCsiTensor c = generate_sample(cfg, geom, book, 6);
    REQUIRE(a.data().size() == b.data().size());
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        same = same && a.data()[i] == b.data()[i];
        diff = diff || a.data()[i] != c.data()[i];
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("tensor construction rejects non-positive dimensions and mismatched inputs")
{
    CHECK_THROWS_AS(EmCsiTensor(0, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(EmCsiTensor(1, 1, -2, 1), std::invalid_argument);

    const SystemConfig cfg = tiny_config();
    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);
    // Wrong number of path sets.
    CHECK_THROWS_AS(build_emcsi(cfg, geom, book, std::vector<PathSet>(1)), ConfigError);
    // Wrong codebook size.
    const PatternCodebook big = PatternCodebook::default_modes(3);
    CHECK_THROWS_AS(build_emcsi(cfg, geom, big, handmade_paths(cfg)), ConfigError);
}
