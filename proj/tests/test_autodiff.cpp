// Tests for the reverse-mode engine. Every differentiable op goes through a
// central-difference harness (relative tolerance 1e-5); a few ops also get
// closed-form gradient checks at much tighter tolerances. Structural
// behavior (graph pruning, accumulation, no-grad mode, the straight-through
// selector) is covered separately.

#include "doctest.h"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rpabeam/autodiff.hpp"

using namespace rpabeam;
using ad::Tensor;

namespace {

// Deterministic, well-scaled test matrices with distinct entries.
Eigen::MatrixXd probe(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                      double phase = 0.0)
{
    Eigen::MatrixXd m(rows, cols);
    const double n = static_cast<double>(rows * cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double t = static_cast<double>(r * cols + c);
            const double u = 0.5 + 0.5 * std::sin(2.7 * t + phase); // (0,1)
            m(r, c) = lo + (hi - lo) * (u + t / (7.0 * n)) / (1.0 + 1.0 / 7.0);
        }
    return m;
}

using GraphFn = std::function<Tensor(const std::vector<Tensor>&)>;

double eval_value(const GraphFn& f, const std::vector<Eigen::MatrixXd>& vals)
{
    ad::NoGradGuard guard;
    std::vector<Tensor> ins;
    ins.reserve(vals.size());
    for (const auto& v : vals)
        ins.push_back(ad::make_tensor(v));
    return f(ins)->scalar();
}

// Central-difference check of every input entry against the backward pass.
void check_gradients(const GraphFn& f, std::vector<Eigen::MatrixXd> vals, double tol = 1e-5)
{
    std::vector<Tensor> ins;
    ins.reserve(vals.size());
    for (const auto& v : vals)
        ins.push_back(ad::make_tensor(v, true));
    const Tensor loss = f(ins);
    ad::backward(loss);

    for (std::size_t i = 0; i < vals.size(); ++i) {
        for (Eigen::Index r = 0; r < vals[i].rows(); ++r) {
            for (Eigen::Index c = 0; c < vals[i].cols(); ++c) {
                const double h = 1e-6 * std::max(1.0, std::abs(vals[i](r, c)));
                auto shifted = vals;
                shifted[i](r, c) += h;
                const double fp = eval_value(f, shifted);
                shifted[i](r, c) -= 2.0 * h;
                const double fm = eval_value(f, shifted);
                const double fd = (fp - fm) / (2.0 * h);
                const double got = ins[i]->grad(r, c);
                CHECK(std::abs(got - fd) <= tol * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

// Weighted sum turns any op output into a scalar with non-uniform weights,
// so transposition and indexing mistakes cannot cancel out.
Tensor pin(const Tensor& t)
{
    const Eigen::MatrixXd w = probe(t->rows(), t->cols(), -1.3, 1.7, 0.9);
    return ad::sum(ad::mul(t, ad::constant(w)));
}

} // namespace

TEST_CASE("finite differences validate every elementwise op")
{
    const Eigen::MatrixXd a = probe(3, 4, -1.5, 1.5);
    const Eigen::MatrixXd b = probe(3, 4, 0.4, 2.0, 1.3); // positive: safe divisor
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::add(in[0], in[1])); },
                    {a, b});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::sub(in[0], in[1])); },
                    {a, b});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::mul(in[0], in[1])); },
                    {a, b});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::div(in[0], in[1])); },
                    {a, b});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::neg(in[0])); }, {a});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::add_scalar(in[0], 0.37)); }, {a});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::mul_scalar(in[0], -2.1)); }, {a});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::mul_scalar_t(in[0], in[1])); },
        {a, probe(1, 1, 0.6, 1.4)});
}

TEST_CASE("finite differences validate the nonlinearities")
{
    const Eigen::MatrixXd x = probe(3, 4, -1.8, 1.8);
    const Eigen::MatrixXd pos = probe(3, 4, 0.3, 2.5, 0.4);
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::exp(in[0])); }, {x});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::log(in[0])); }, {pos});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::sqrt(in[0])); }, {pos});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::cos(in[0])); }, {x});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::sin(in[0])); }, {x});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::tanh(in[0])); }, {x});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::gelu(in[0])); }, {x});
}

TEST_CASE("finite differences validate linear algebra and shape ops")
{
    const Eigen::MatrixXd a = probe(3, 4, -1.0, 1.0);
    const Eigen::MatrixXd b = probe(4, 2, -1.2, 1.2, 2.2);
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::matmul(in[0], in[1])); },
                    {a, b});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::transpose(in[0])); },
                    {a});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::reshape(in[0], 2, 6)); }, {a});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::slice_cols(in[0], 1, 2)); }, {a});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::slice_rows(in[0], 1, 2)); }, {a});
    check_gradients(
        [](const std::vector<Tensor>& in) {
            return pin(ad::concat_cols({in[0], in[1], in[0]}));
        },
        {a, probe(3, 2, -0.8, 0.8, 3.0)});
}

TEST_CASE("finite differences validate reductions and broadcasts")
{
    const Eigen::MatrixXd a = probe(3, 4, -1.4, 1.4);
    const Eigen::MatrixXd sq = probe(4, 4, -1.0, 1.0, 1.1);
    check_gradients([](const std::vector<Tensor>& in) { return ad::sum(in[0]); }, {a});
    check_gradients([](const std::vector<Tensor>& in) { return ad::mean(in[0]); }, {a});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::row_sum(in[0])); }, {a});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::col_sum(in[0])); }, {a});
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::diag_part(in[0])); },
                    {sq});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::scale_rows(in[0], in[1])); },
        {a, probe(3, 1, 0.5, 1.5)});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::scale_cols(in[0], in[1])); },
        {a, probe(1, 4, 0.5, 1.5, 0.7)});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::add_rowvec(in[0], in[1])); },
        {a, probe(1, 4, -1.0, 1.0, 0.2)});
}

TEST_CASE("finite differences validate the network primitives")
{
    const Eigen::MatrixXd x = probe(3, 5, -2.0, 2.0);
    check_gradients([](const std::vector<Tensor>& in) { return pin(ad::softmax_rows(in[0])); },
                    {x});
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::layer_norm_rows(in[0])); }, {x},
        2e-5);
    // Relaxed mode makes the straight-through selector smooth end to end.
    check_gradients(
        [](const std::vector<Tensor>& in) {
            return pin(ad::ste_argmax_rows(in[0], 0.7, /*relaxed=*/true));
        },
        {x});
    const Eigen::MatrixXd blocks = probe(12, 3, -1.0, 1.0, 0.5); // 4 groups x 3 rows
    const Eigen::MatrixXd weights = probe(3, 3, 0.1, 0.9, 1.9);
    check_gradients(
        [](const std::vector<Tensor>& in) { return pin(ad::mode_gather(in[0], in[1])); },
        {blocks, weights});
}

TEST_CASE("a deep composite graph passes finite differences")
{
    // Chains matmul, bias broadcast, normalization, gelu and softmax the way
    // the encoder does.
    const Eigen::MatrixXd x = probe(4, 3, -1.0, 1.0);
    const Eigen::MatrixXd w = probe(3, 6, -0.7, 0.7, 1.0);
    const Eigen::MatrixXd b = probe(1, 6, -0.2, 0.2, 2.0);
    const Eigen::MatrixXd v = probe(6, 2, -0.9, 0.9, 3.0);
    check_gradients(
        [](const std::vector<Tensor>& in) {
            Tensor h = ad::add_rowvec(ad::matmul(in[0], in[1]), in[2]);
            h = ad::gelu(ad::layer_norm_rows(h));
            h = ad::softmax_rows(ad::matmul(h, in[3]));
            return pin(ad::log(ad::add_scalar(h, 1.0)));
        },
        {x, w, b, v}, 2e-5);
}

TEST_CASE("sum backward produces exact unit gradients")
{
    const Tensor a = ad::make_tensor(probe(3, 4, -1.0, 1.0), true);
    ad::backward(ad::sum(a));
    CHECK(a->grad == Eigen::MatrixXd::Ones(3, 4));
}

TEST_CASE("quadratic form gradient matches the closed form")
{
    // f = ||W x||^2 has gradient 2 W^T W x.
    const Eigen::MatrixXd W = probe(4, 3, -1.0, 1.0);
    const Eigen::MatrixXd xv = probe(3, 1, -1.0, 1.0, 0.8);
    const Tensor x = ad::make_tensor(xv, true);
    const Tensor y = ad::matmul(ad::constant(W), x);
    ad::backward(ad::sum(ad::mul(y, y)));
    const Eigen::MatrixXd expect = 2.0 * W.transpose() * W * xv;
    CHECK((x->grad - expect).norm() <= 1e-10 * expect.norm());
}

TEST_CASE("softmax rows sum to one and layer norm kills constant rows")
{
    const Tensor x = ad::make_tensor(probe(3, 5, -2.0, 2.0));
    const Eigen::MatrixXd s = ad::softmax_rows(x)->value;
    for (Eigen::Index r = 0; r < 3; ++r)
        CHECK(s.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd flat(2, 4);
    flat << 3.0, 3.0, 3.0, 3.0, -1.0, -1.0, -1.0, -1.0;
    const Eigen::MatrixXd ln = ad::layer_norm_rows(ad::make_tensor(flat))->value;
    CHECK(ln.cwiseAbs().maxCoeff() == 0.0);

    // Standardization: zero mean, unit variance per generic row.
    const Eigen::MatrixXd g = ad::layer_norm_rows(x)->value;
    for (Eigen::Index r = 0; r < 3; ++r) {
        CHECK(g.row(r).mean() == doctest::Approx(0.0).scale(1.0));
        CHECK(g.row(r).squaredNorm() / 5.0 == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("reshape is row-major")
{
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const Eigen::MatrixXd r = ad::reshape(ad::make_tensor(m), 3, 2)->value;
    Eigen::MatrixXd expect(3, 2);
    expect << 1, 2, 3, 4, 5, 6;
    CHECK(r == expect);
}

TEST_CASE("hard straight-through selector: one-hot forward, softmax backward")
{
    Eigen::MatrixXd logits(3, 4);
    logits << 0.1, 2.0, -1.0, 0.5, //
        3.0, 3.0, 1.0, 2.9,        // tie between columns 0 and 1
        -5.0, -6.0, -4.5, -7.0;
    const Tensor lt_hard = ad::make_tensor(logits, true);
    const Tensor hard = ad::ste_argmax_rows(lt_hard, 0.5);

    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 4);
    expect(0, 1) = 1.0;
    expect(1, 0) = 1.0; // tie resolves to the lowest index
    expect(2, 2) = 1.0;
    CHECK(hard->value == expect);

    // The backward of hard and relaxed mode is the same softmax pullback.
    const Tensor lt_soft = ad::make_tensor(logits, true);
    const Tensor soft = ad::ste_argmax_rows(lt_soft, 0.5, true);
    ad::backward(pin(hard));
    ad::backward(pin(soft));
    CHECK((lt_hard->grad - lt_soft->grad).norm() <= 1e-14 * lt_soft->grad.norm());

    // Relaxed forward is exactly softmax(logits / temperature).
    const Eigen::MatrixXd ref =
        ad::softmax_rows(ad::make_tensor(Eigen::MatrixXd(logits / 0.5)))->value;
    CHECK((soft->value - ref).norm() <= 1e-14);
}

TEST_CASE("plain argmax_rows breaks ties toward the lowest index")
{
    Eigen::MatrixXd m(2, 3);
    m << 1.0, 1.0, 0.0, -2.0, -1.0, -1.0;
    const std::vector<int> idx = ad::argmax_rows(m);
    REQUIRE(idx.size() == 2);
    CHECK(idx[0] == 0);
    CHECK(idx[1] == 1);
}

TEST_CASE("mode_gather forward matches the contraction oracle")
{
    const int groups = 3, n = 2, m = 4;
    const Eigen::MatrixXd blocks = probe(groups * n, m, -1.0, 1.0);
    const Eigen::MatrixXd weights = probe(n, m, 0.0, 1.0, 1.5);
    const Eigen::MatrixXd out =
        ad::mode_gather(ad::make_tensor(blocks), ad::make_tensor(weights))->value;
    REQUIRE(out.rows() == groups);
    REQUIRE(out.cols() == n);
    for (int i = 0; i < groups; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < m; ++k)
                acc += blocks(i * n + j, k) * weights(j, k);
            CHECK(out(i, j) == doctest::Approx(acc).epsilon(1e-12));
        }

    // One-hot weights reduce the contraction to plain column selection.
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, m);
    onehot(0, 2) = 1.0;
    onehot(1, 0) = 1.0;
    const Eigen::MatrixXd sel =
        ad::mode_gather(ad::make_tensor(blocks), ad::make_tensor(onehot))->value;
    for (int i = 0; i < groups; ++i) {
        CHECK(sel(i, 0) == blocks(i * n + 0, 2));
        CHECK(sel(i, 1) == blocks(i * n + 1, 0));
    }
}

TEST_CASE("backward rejects non-scalar and non-differentiable losses")
{
    const Tensor a = ad::make_tensor(probe(2, 2, -1.0, 1.0), true);
    CHECK_THROWS_AS(ad::backward(ad::mul_scalar(a, 2.0)), std::invalid_argument);
    const Tensor c = ad::scalar(1.5); // constant: requires_grad false
    CHECK_THROWS_AS(ad::backward(c), std::invalid_argument);
}

TEST_CASE("gradients accumulate until cleared")
{
    ad::ParameterStore store;
    const Tensor a = store.add("a", probe(2, 3, -1.0, 1.0));
    ad::backward(ad::sum(a));
    ad::backward(ad::sum(a));
    CHECK(a->grad == Eigen::MatrixXd::Constant(2, 3, 2.0));
    store.zero_grad();
    CHECK(a->grad == Eigen::MatrixXd::Zero(2, 3));
}

TEST_CASE("NoGradGuard suppresses graph recording")
{
    const Tensor a = ad::make_tensor(probe(2, 2, -1.0, 1.0), true);
    Tensor out;
    {
        ad::NoGradGuard guard;
        CHECK_FALSE(ad::grad_enabled());
        out = ad::sum(ad::mul(a, a));
    }
    CHECK(ad::grad_enabled());
    CHECK_FALSE(out->requires_grad);
    CHECK(out->parents.empty());
    CHECK_THROWS_AS(ad::backward(out), std::invalid_argument);
}

TEST_CASE("constant inputs are pruned from the graph")
{
    const Tensor a = ad::make_tensor(probe(2, 2, -1.0, 1.0), true);
    const Tensor c = ad::constant(probe(2, 2, 0.5, 1.5));
    const Tensor loss = ad::sum(ad::mul(a, c));
    ad::backward(loss);
    CHECK(a->grad == c->value);     // chain rule through the product
    CHECK(c->grad.size() == 0);     // never touched
    CHECK_FALSE(c->requires_grad);
}

TEST_CASE("backward is deterministic across repeated graph builds")
{
    const Eigen::MatrixXd xv = probe(3, 3, -1.0, 1.0);
    Eigen::MatrixXd first;
    for (int rep = 0; rep < 2; ++rep) {
        const Tensor x = ad::make_tensor(xv, true);
        const Tensor loss =
            ad::sum(ad::mul(ad::softmax_rows(ad::matmul(x, ad::transpose(x))), ad::constant(xv)));
        ad::backward(loss);
        if (rep == 0)
            first = x->grad;
        else
            CHECK(x->grad == first); // bitwise equal
    }
}

TEST_CASE("parameter store enforces unique names and preserves order")
{
    ad::ParameterStore store;
    store.add("w1", Eigen::MatrixXd::Zero(2, 3));
    store.add("b1", Eigen::MatrixXd::Zero(1, 3));
    CHECK_THROWS_AS(store.add("w1", Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
    CHECK(store.size() == 2);
    CHECK(store.scalar_count() == 9);
    CHECK(store.items()[0].first == "w1");
    CHECK(store.items()[1].first == "b1");
    CHECK(store.find("b1") != nullptr);
    CHECK(store.find("nope") == nullptr);
    // Reused values keep shape, and the handles require gradients.
    CHECK(store.find("w1")->requires_grad);
}

TEST_CASE("shape mismatches raise invalid_argument with both shapes")
{
    const Tensor a = ad::make_tensor(Eigen::MatrixXd::Zero(2, 3));
    const Tensor b = ad::make_tensor(Eigen::MatrixXd::Zero(3, 2));
    CHECK_THROWS_WITH_AS(ad::add(a, b), doctest::Contains("2x3"), std::invalid_argument);
    CHECK_THROWS_AS(ad::matmul(a, a), std::invalid_argument);
    CHECK_THROWS_AS(ad::reshape(a, 4, 2), std::invalid_argument);
    CHECK_THROWS_AS(ad::slice_cols(a, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(ad::diag_part(a), std::invalid_argument);
}
