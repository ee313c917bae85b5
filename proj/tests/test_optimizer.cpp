// Tests for the Adam optimizer, the warmup learning-rate schedule and the
// binary checkpoint format. The first Adam step is checked against the
// closed form (bias correction makes it -lr * sign(g) for fresh moments),
// convergence on a quadratic bowl, and checkpoints must round-trip values,
// names and metadata exactly.

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "rpabeam/autodiff.hpp"
#include "rpabeam/checkpoint.hpp"
#include "rpabeam/common.hpp"
#include "rpabeam/optimizer.hpp"

using namespace rpabeam;

TEST_CASE("a zero gradient leaves parameters untouched")
{
    ad::ParameterStore store;
    Eigen::MatrixXd init(2, 2);
    init << 1.0, -2.0, 3.0, -4.0;
    const ad::Tensor w = store.add("w", init);
    nn::Adam adam(store);
    adam.zero_grad();
    adam.step(0.1);
    CHECK(w->value == init);
    CHECK(adam.steps_taken() == 1);
}

TEST_CASE("the first step moves each weight by -lr times the gradient sign")
{
    // With zero-initialized moments, bias correction gives
    // m_hat = g, v_hat = g^2, so the update is lr * g / (|g| + eps).
    ad::ParameterStore store;
    Eigen::MatrixXd init(1, 3);
    init << 0.5, -0.25, 2.0;
    const ad::Tensor w = store.add("w", init);
    nn::Adam adam(store);

    // Loss sum(w * k) has constant gradient k.
    Eigen::MatrixXd k(1, 3);
    k << 2.0, -3.0, 0.5;
    ad::backward(ad::sum(ad::mul(w, ad::constant(k))));
    adam.step(0.01);
    for (int j = 0; j < 3; ++j) {
        const double g = k(0, j);
        const double expect = init(0, j) - 0.01 * g / (std::abs(g) + 1e-8);
        CHECK(w->value(0, j) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("Adam drives a quadratic bowl to its minimum")
{
    ad::ParameterStore store;
    Eigen::MatrixXd start(3, 1);
    start << 4.0, -3.0, 2.5;
    const ad::Tensor x = store.add("x", start);
    Eigen::MatrixXd target(3, 1);
    target << 1.0, 0.5, -2.0;
    nn::Adam adam(store);

    for (int it = 0; it < 800; ++it) {
        adam.zero_grad();
        const ad::Tensor d = ad::sub(x, ad::constant(target));
        ad::backward(ad::sum(ad::mul(d, d)));
        adam.step(0.05);
    }
    CHECK((x->value - target).norm() < 1e-3);
}

TEST_CASE("warmup schedule rises linearly then decays as an inverse square root")
{
    const double peak = 3e-4;
    const std::int64_t warmup = 100;
    // Linear ramp: step/warmup of the peak.
    CHECK(nn::warmup_lr(peak, 1, warmup) == doctest::Approx(peak * 0.01).epsilon(1e-12));
    CHECK(nn::warmup_lr(peak, 50, warmup) == doctest::Approx(peak * 0.5).epsilon(1e-12));
    // Knot: exactly the peak at step == warmup.
    CHECK(nn::warmup_lr(peak, warmup, warmup) == doctest::Approx(peak).epsilon(1e-12));
    // Decay: peak * sqrt(warmup / step).
    CHECK(nn::warmup_lr(peak, 400, warmup) == doctest::Approx(peak * 0.5).epsilon(1e-12));
    CHECK(nn::warmup_lr(peak, 10000, warmup) == doctest::Approx(peak * 0.1).epsilon(1e-12));
    // Monotone rise before, monotone fall after.
    for (std::int64_t s = 2; s <= warmup; ++s)
        CHECK(nn::warmup_lr(peak, s, warmup) > nn::warmup_lr(peak, s - 1, warmup));
    for (std::int64_t s = warmup + 1; s < warmup + 50; ++s)
        CHECK(nn::warmup_lr(peak, s + 1, warmup) < nn::warmup_lr(peak, s, warmup));
}

TEST_CASE("checkpoints round-trip values, order and metadata")
{
    const std::string path = "/tmp/rpabeam_test_ck.rpac";
    ad::ParameterStore store;
    Eigen::MatrixXd a(2, 3), b(1, 4);
    a << 1.5, -2.25, 3.0, 1e-12, -7.5e8, 0.0;
    b << -0.1, 0.2, -0.3, 0.4;
    store.add("enc.w", a);
    store.add("enc.b", b);
    save_checkpoint(path, store, "key = value\n");

    ad::ParameterStore other;
    const ad::Tensor wa = other.add("enc.w", Eigen::MatrixXd::Zero(2, 3));
    const ad::Tensor wb = other.add("enc.b", Eigen::MatrixXd::Zero(1, 4));
    const std::string meta = load_checkpoint(path, other);
    CHECK(meta == "key = value\n");
    CHECK(wa->value == a); // bit-exact doubles
    CHECK(wb->value == b);

    CHECK(read_checkpoint_metadata(path) == "key = value\n");
    std::remove(path.c_str());
}

TEST_CASE("checkpoint loading rejects mismatched stores")
{
    const std::string path = "/tmp/rpabeam_test_ck_bad.rpac";
    ad::ParameterStore store;
    store.add("w", Eigen::MatrixXd::Ones(2, 2));
    save_checkpoint(path, store);

    SUBCASE("unknown parameter name")
    {
        ad::ParameterStore other;
        other.add("different", Eigen::MatrixXd::Zero(2, 2));
        CHECK_THROWS_AS(load_checkpoint(path, other), IoError);
    }
    SUBCASE("shape mismatch")
    {
        ad::ParameterStore other;
        other.add("w", Eigen::MatrixXd::Zero(4, 4));
        CHECK_THROWS_AS(load_checkpoint(path, other), IoError);
    }
    SUBCASE("missing coverage: store has extra parameters")
    {
        ad::ParameterStore other;
        other.add("w", Eigen::MatrixXd::Zero(2, 2));
        other.add("extra", Eigen::MatrixXd::Zero(1, 1));
        CHECK_THROWS_AS(load_checkpoint(path, other), IoError);
    }
    SUBCASE("absent file")
    {
        ad::ParameterStore other;
        other.add("w", Eigen::MatrixXd::Zero(2, 2));
        CHECK_THROWS_AS(load_checkpoint("/tmp/rpabeam_ck_nope.rpac", other), IoError);
        CHECK_THROWS_AS(read_checkpoint_metadata("/tmp/rpabeam_ck_nope.rpac"), IoError);
    }
    std::remove(path.c_str());
}

TEST_CASE("optimizer states of identical runs stay in lockstep")
{
    // Two independent stores driven by the same gradients produce the same
    // trajectories: the update must depend only on (grads, step count).
    auto run = [](int iters) {
        ad::ParameterStore store;
        Eigen::MatrixXd init(2, 2);
        init << 0.3, -0.4, 0.5, -0.6;
        const ad::Tensor w = store.add("w", init);
        nn::Adam adam(store);
        for (int i = 0; i < iters; ++i) {
            adam.zero_grad();
            ad::backward(ad::sum(ad::mul(w, w)));
            adam.step(nn::warmup_lr(1e-2, i + 1, 10));
        }
        return w->value;
    };
    CHECK(run(25) == run(25));
}
