// SPDX-License-Identifier: Apache-2.0
//
// rpabeam - hybrid beamforming with pattern-reconfigurable antennas
// Copyright (C) 2026 the rpabeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "rpabeam/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace rpabeam::ad {
namespace {

thread_local bool t_grad_enabled = true;

std::string dims(const Eigen::MatrixXd& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(const char* op, const Tensor& t)
{
    if (!t)
        throw std::invalid_argument(std::string(op) + ": null tensor");
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b)
{
    require(op, a);
    require(op, b);
    if (a->rows() != b->rows() || a->cols() != b->cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch (" + dims(a->value) +
                                    " vs " + dims(b->value) + ")");
}

/// Builds the result node; edges and the pullback are recorded only when
/// some input needs gradients and recording is enabled on this thread.
Tensor make_op(Eigen::MatrixXd value, std::vector<Tensor> parents,
               std::function<void(const Eigen::MatrixXd&)> fn)
{
    bool track = t_grad_enabled;
    if (track) {
        bool any = false;
        for (const Tensor& p : parents)
            any = any || p->requires_grad;
        track = any;
    }
    auto out = std::make_shared<Node>(std::move(value), track);
    if (track) {
        out->parents = std::move(parents);
        out->backward_fn = std::move(fn);
    }
    return out;
}

template <class F, class DF>
Tensor unary_elementwise(const char* name, const Tensor& a, F f, DF dfdx)
{
    require(name, a);
    Eigen::MatrixXd v = a->value.unaryExpr(f);
    Tensor pa = a;
    return make_op(std::move(v), {a}, [pa, dfdx](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad.array() += g.array() * pa->value.unaryExpr(dfdx).array();
    });
}

Eigen::MatrixXd softmax_rows_value(const Eigen::MatrixXd& x)
{
    Eigen::MatrixXd s(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        Eigen::RowVectorXd e = (x.row(i).array() - m).exp().matrix();
        s.row(i) = e / e.sum();
    }
    return s;
}

/// Vector-Jacobian product of row-wise softmax with output s.
Eigen::MatrixXd softmax_rows_vjp(const Eigen::MatrixXd& s, const Eigen::MatrixXd& g)
{
    Eigen::MatrixXd out(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const double dot = (g.row(i).array() * s.row(i).array()).sum();
        out.row(i) = (s.row(i).array() * (g.row(i).array() - dot)).matrix();
    }
    return out;
}

} // namespace

Node::Node(Eigen::MatrixXd v, bool needs_grad) : value(std::move(v)), requires_grad(needs_grad)
{
    if (value.rows() <= 0 || value.cols() <= 0)
        throw std::invalid_argument("tensor dimensions must be positive");
    if (requires_grad)
        grad = Eigen::MatrixXd::Zero(value.rows(), value.cols());
}

double Node::scalar() const
{
    if (!is_scalar())
        throw std::logic_error("tensor of shape " + dims(value) + " is not a scalar");
    return value(0, 0);
}

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }

NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

// --- construction -------------------------------------------------------

Tensor make_tensor(Eigen::MatrixXd value, bool requires_grad)
{
    return std::make_shared<Node>(std::move(value), requires_grad);
}

Tensor constant(Eigen::MatrixXd value) { return make_tensor(std::move(value), false); }

Tensor scalar(double value)
{
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = value;
    return make_tensor(std::move(m), false);
}

Tensor zeros(Eigen::Index rows, Eigen::Index cols, bool requires_grad)
{
    return make_tensor(Eigen::MatrixXd::Zero(rows, cols), requires_grad);
}

// --- elementwise --------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b)
{
    require_same_shape("add", a, b);
    Tensor pa = a, pb = b;
    return make_op(a->value + b->value, {a, b}, [pa, pb](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g;
        if (pb->requires_grad)
            pb->grad += g;
    });
}

Tensor sub(const Tensor& a, const Tensor& b)
{
    require_same_shape("sub", a, b);
    Tensor pa = a, pb = b;
    return make_op(a->value - b->value, {a, b}, [pa, pb](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g;
        if (pb->requires_grad)
            pb->grad -= g;
    });
}

Tensor mul(const Tensor& a, const Tensor& b)
{
    require_same_shape("mul", a, b);
    Tensor pa = a, pb = b;
    return make_op(a->value.cwiseProduct(b->value), {a, b},
                   [pa, pb](const Eigen::MatrixXd& g) {
                       if (pa->requires_grad)
                           pa->grad.array() += g.array() * pb->value.array();
                       if (pb->requires_grad)
                           pb->grad.array() += g.array() * pa->value.array();
                   });
}

Tensor div(const Tensor& a, const Tensor& b)
{
    require_same_shape("div", a, b);
    Tensor pa = a, pb = b;
    return make_op(a->value.cwiseQuotient(b->value), {a, b},
                   [pa, pb](const Eigen::MatrixXd& g) {
                       if (pa->requires_grad)
                           pa->grad.array() += g.array() / pb->value.array();
                       if (pb->requires_grad)
                           pb->grad.array() -= g.array() * pa->value.array() /
                                               pb->value.array().square();
                   });
}

Tensor neg(const Tensor& a)
{
    require("neg", a);
    Tensor pa = a;
    return make_op(-a->value, {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad -= g;
    });
}

Tensor add_scalar(const Tensor& a, double s)
{
    require("add_scalar", a);
    Tensor pa = a;
    return make_op((a->value.array() + s).matrix(), {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g;
    });
}

Tensor mul_scalar(const Tensor& a, double s)
{
    require("mul_scalar", a);
    Tensor pa = a;
    return make_op(a->value * s, {a}, [pa, s](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g * s;
    });
}

Tensor mul_scalar_t(const Tensor& a, const Tensor& s)
{
    require("mul_scalar_t", a);
    require("mul_scalar_t", s);
    if (!s->is_scalar())
        throw std::invalid_argument("mul_scalar_t: scale must be 1x1, got " + dims(s->value));
    Tensor pa = a, ps = s;
    return make_op(a->value * s->value(0, 0), {a, s}, [pa, ps](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g * ps->value(0, 0);
        if (ps->requires_grad)
            ps->grad(0, 0) += (g.array() * pa->value.array()).sum();
    });
}

Tensor exp(const Tensor& a)
{
    return unary_elementwise(
        "exp", a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Tensor log(const Tensor& a)
{
    return unary_elementwise(
        "log", a, [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a)
{
    return unary_elementwise(
        "sqrt", a, [](double x) { return std::sqrt(x); },
        [](double x) { return 0.5 / std::sqrt(x); });
}

Tensor cos(const Tensor& a)
{
    return unary_elementwise(
        "cos", a, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); });
}

Tensor sin(const Tensor& a)
{
    return unary_elementwise(
        "sin", a, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
}

Tensor tanh(const Tensor& a)
{
    return unary_elementwise(
        "tanh", a, [](double x) { return std::tanh(x); },
        [](double x) {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        });
}

Tensor gelu(const Tensor& a)
{
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    constexpr double inv_sqrt2pi = 0.3989422804014326779;
    return unary_elementwise(
        "gelu", a,
        [=](double x) { return 0.5 * x * (1.0 + std::erf(x * inv_sqrt2)); },
        [=](double x) {
            return 0.5 * (1.0 + std::erf(x * inv_sqrt2)) +
                   x * inv_sqrt2pi * std::exp(-0.5 * x * x);
        });
}

// --- linear algebra and shape ------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b)
{
    require("matmul", a);
    require("matmul", b);
    if (a->cols() != b->rows())
        throw std::invalid_argument("matmul: inner dimensions disagree (" + dims(a->value) +
                                    " times " + dims(b->value) + ")");
    Tensor pa = a, pb = b;
    return make_op(a->value * b->value, {a, b}, [pa, pb](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad.noalias() += g * pb->value.transpose();
        if (pb->requires_grad)
            pb->grad.noalias() += pa->value.transpose() * g;
    });
}

Tensor transpose(const Tensor& a)
{
    require("transpose", a);
    Tensor pa = a;
    return make_op(a->value.transpose(), {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g.transpose();
    });
}

Tensor reshape(const Tensor& a, Eigen::Index rows, Eigen::Index cols)
{
    require("reshape", a);
    if (rows <= 0 || cols <= 0 || rows * cols != a->rows() * a->cols())
        throw std::invalid_argument("reshape: cannot view " + dims(a->value) + " as " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    const Eigen::Index ac = a->cols();
    Eigen::MatrixXd v(rows, cols);
    for (Eigen::Index k = 0; k < rows * cols; ++k)
        v(k / cols, k % cols) = a->value(k / ac, k % ac);
    Tensor pa = a;
    return make_op(std::move(v), {a}, [pa, cols, ac](const Eigen::MatrixXd& g) {
        if (!pa->requires_grad)
            return;
        const Eigen::Index n = g.rows() * g.cols();
        for (Eigen::Index k = 0; k < n; ++k)
            pa->grad(k / ac, k % ac) += g(k / cols, k % cols);
    });
}

Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count)
{
    require("slice_cols", a);
    if (start < 0 || count <= 0 || start + count > a->cols())
        throw std::invalid_argument("slice_cols: range [" + std::to_string(start) + ", " +
                                    std::to_string(start + count) + ") outside " +
                                    dims(a->value));
    Tensor pa = a;
    return make_op(a->value.middleCols(start, count), {a},
                   [pa, start, count](const Eigen::MatrixXd& g) {
                       if (pa->requires_grad)
                           pa->grad.middleCols(start, count) += g;
                   });
}

Tensor slice_rows(const Tensor& a, Eigen::Index start, Eigen::Index count)
{
    require("slice_rows", a);
    if (start < 0 || count <= 0 || start + count > a->rows())
        throw std::invalid_argument("slice_rows: range [" + std::to_string(start) + ", " +
                                    std::to_string(start + count) + ") outside " +
                                    dims(a->value));
    Tensor pa = a;
    return make_op(a->value.middleRows(start, count), {a},
                   [pa, start, count](const Eigen::MatrixXd& g) {
                       if (pa->requires_grad)
                           pa->grad.middleRows(start, count) += g;
                   });
}

Tensor concat_cols(const std::vector<Tensor>& parts)
{
    if (parts.empty())
        throw std::invalid_argument("concat_cols: need at least one part");
    Eigen::Index rows = 0, cols = 0;
    for (const Tensor& p : parts) {
        require("concat_cols", p);
        if (rows == 0)
            rows = p->rows();
        if (p->rows() != rows)
            throw std::invalid_argument("concat_cols: row counts disagree");
        cols += p->cols();
    }
    Eigen::MatrixXd v(rows, cols);
    Eigen::Index off = 0;
    for (const Tensor& p : parts) {
        v.middleCols(off, p->cols()) = p->value;
        off += p->cols();
    }
    std::vector<Tensor> copy = parts;
    return make_op(std::move(v), parts, [copy](const Eigen::MatrixXd& g) {
        Eigen::Index off = 0;
        for (const Tensor& p : copy) {
            if (p->requires_grad)
                p->grad += g.middleCols(off, p->cols());
            off += p->cols();
        }
    });
}

// --- reductions and broadcasts ------------------------------------------

Tensor sum(const Tensor& a)
{
    require("sum", a);
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = a->value.sum();
    Tensor pa = a;
    return make_op(std::move(v), {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad.array() += g(0, 0);
    });
}

Tensor mean(const Tensor& a)
{
    require("mean", a);
    const double n = static_cast<double>(a->rows() * a->cols());
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = a->value.sum() / n;
    Tensor pa = a;
    return make_op(std::move(v), {a}, [pa, n](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad.array() += g(0, 0) / n;
    });
}

Tensor row_sum(const Tensor& a)
{
    require("row_sum", a);
    Tensor pa = a;
    return make_op(a->value.rowwise().sum(), {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g.col(0).replicate(1, pa->cols());
    });
}

Tensor col_sum(const Tensor& a)
{
    require("col_sum", a);
    Tensor pa = a;
    return make_op(a->value.colwise().sum(), {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g.replicate(pa->rows(), 1);
    });
}

Tensor diag_part(const Tensor& a)
{
    require("diag_part", a);
    if (a->rows() != a->cols())
        throw std::invalid_argument("diag_part: matrix is not square, got " + dims(a->value));
    Tensor pa = a;
    return make_op(a->value.diagonal(), {a}, [pa](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad.diagonal() += g.col(0);
    });
}

Tensor scale_rows(const Tensor& a, const Tensor& s)
{
    require("scale_rows", a);
    require("scale_rows", s);
    if (s->rows() != a->rows() || s->cols() != 1)
        throw std::invalid_argument("scale_rows: scale must be " + std::to_string(a->rows()) +
                                    "x1, got " + dims(s->value));
    Eigen::MatrixXd v = a->value.cwiseProduct(s->value.replicate(1, a->cols()));
    Tensor pa = a, ps = s;
    return make_op(std::move(v), {a, s}, [pa, ps](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g.cwiseProduct(ps->value.replicate(1, g.cols()));
        if (ps->requires_grad)
            ps->grad.col(0) += g.cwiseProduct(pa->value).rowwise().sum();
    });
}

Tensor scale_cols(const Tensor& a, const Tensor& s)
{
    require("scale_cols", a);
    require("scale_cols", s);
    if (s->cols() != a->cols() || s->rows() != 1)
        throw std::invalid_argument("scale_cols: scale must be 1x" + std::to_string(a->cols()) +
                                    ", got " + dims(s->value));
    Eigen::MatrixXd v = a->value.cwiseProduct(s->value.replicate(a->rows(), 1));
    Tensor pa = a, ps = s;
    return make_op(std::move(v), {a, s}, [pa, ps](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g.cwiseProduct(ps->value.replicate(g.rows(), 1));
        if (ps->requires_grad)
            ps->grad.row(0) += g.cwiseProduct(pa->value).colwise().sum();
    });
}

Tensor add_rowvec(const Tensor& a, const Tensor& b)
{
    require("add_rowvec", a);
    require("add_rowvec", b);
    if (b->cols() != a->cols() || b->rows() != 1)
        throw std::invalid_argument("add_rowvec: vector must be 1x" +
                                    std::to_string(a->cols()) + ", got " + dims(b->value));
    Eigen::MatrixXd v = a->value + b->value.replicate(a->rows(), 1);
    Tensor pa = a, pb = b;
    return make_op(std::move(v), {a, b}, [pa, pb](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += g;
        if (pb->requires_grad)
            pb->grad.row(0) += g.colwise().sum();
    });
}

// --- neural-network primitives ------------------------------------------

Tensor softmax_rows(const Tensor& a)
{
    require("softmax_rows", a);
    Eigen::MatrixXd s = softmax_rows_value(a->value);
    Tensor pa = a;
    Eigen::MatrixXd s_copy = s;
    return make_op(std::move(s), {a}, [pa, s_copy](const Eigen::MatrixXd& g) {
        if (pa->requires_grad)
            pa->grad += softmax_rows_vjp(s_copy, g);
    });
}

Tensor layer_norm_rows(const Tensor& a)
{
    require("layer_norm_rows", a);
    constexpr double eps = 1e-12;
    const Eigen::Index r = a->rows(), c = a->cols();
    Eigen::MatrixXd xhat(r, c);
    Eigen::VectorXd sigma(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double mu = a->value.row(i).mean();
        const double var = (a->value.row(i).array() - mu).square().mean();
        sigma(i) = std::sqrt(var + eps);
        xhat.row(i) = ((a->value.row(i).array() - mu) / sigma(i)).matrix();
    }
    Tensor pa = a;
    Eigen::MatrixXd xhat_copy = xhat;
    return make_op(std::move(xhat), {a}, [pa, xhat_copy, sigma](const Eigen::MatrixXd& g) {
        if (!pa->requires_grad)
            return;
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double g_mean = g.row(i).mean();
            const double gy_mean = (g.row(i).array() * xhat_copy.row(i).array()).mean();
            pa->grad.row(i) +=
                ((g.row(i).array() - g_mean - xhat_copy.row(i).array() * gy_mean) / sigma(i))
                    .matrix();
        }
    });
}

Tensor ste_argmax_rows(const Tensor& logits, double temperature, bool relaxed)
{
    require("ste_argmax_rows", logits);
    if (!(temperature > 0.0))
        throw std::invalid_argument("ste_argmax_rows: temperature must be positive");
    Eigen::MatrixXd soft = softmax_rows_value(logits->value / temperature);
    Eigen::MatrixXd v;
    if (relaxed) {
        v = soft;
    } else {
        v = Eigen::MatrixXd::Zero(logits->rows(), logits->cols());
        const std::vector<int> best = argmax_rows(logits->value);
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            v(i, best[static_cast<std::size_t>(i)]) = 1.0;
    }
    Tensor pl = logits;
    return make_op(std::move(v), {logits}, [pl, soft, temperature](const Eigen::MatrixXd& g) {
        if (pl->requires_grad)
            pl->grad += softmax_rows_vjp(soft, g) / temperature;
    });
}

Tensor mode_gather(const Tensor& blocks, const Tensor& weights)
{
    require("mode_gather", blocks);
    require("mode_gather", weights);
    const Eigen::Index n = weights->rows();
    const Eigen::Index m = weights->cols();
    if (n <= 0 || blocks->rows() % n != 0 || blocks->cols() != m)
        throw std::invalid_argument("mode_gather: blocks " + dims(blocks->value) +
                                    " incompatible with weights " + dims(weights->value));
    const Eigen::Index groups = blocks->rows() / n;
    Eigen::MatrixXd v(groups, n);
    for (Eigen::Index i = 0; i < groups; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            v(i, j) = blocks->value.row(i * n + j).dot(weights->value.row(j));
    Tensor pb = blocks, pw = weights;
    return make_op(std::move(v), {blocks, weights}, [pb, pw, n](const Eigen::MatrixXd& g) {
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                if (pw->requires_grad)
                    pw->grad.row(j) += g(i, j) * pb->value.row(i * n + j);
                if (pb->requires_grad)
                    pb->grad.row(i * n + j) += g(i, j) * pw->value.row(j);
            }
    });
}

// --- graph traversal ------------------------------------------------------

void backward(const Tensor& loss)
{
    require("backward", loss);
    if (!loss->is_scalar())
        throw std::invalid_argument("backward: loss must be 1x1, got " + dims(loss->value));
    if (!loss->requires_grad)
        throw std::invalid_argument("backward: loss does not require gradients");

    // Iterative post-order walk; `order` ends up with parents before
    // children, so the reverse sweep visits each node after all its uses.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    visited.insert(loss.get());
    stack.emplace_back(loss.get(), 0);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent->requires_grad && visited.insert(parent).second)
                stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->grad(0, 0) += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backward_fn)
            (*it)->backward_fn((*it)->grad);
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& m)
{
    std::vector<int> out(static_cast<std::size_t>(m.rows()), 0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        int best = 0;
        for (Eigen::Index j = 1; j < m.cols(); ++j)
            if (m(i, j) > m(i, best))
                best = static_cast<int>(j);
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

// --- parameters -----------------------------------------------------------

Tensor ParameterStore::add(const std::string& name, Eigen::MatrixXd value)
{
    if (find(name))
        throw std::invalid_argument("parameter '" + name + "' already registered");
    Tensor t = make_tensor(std::move(value), true);
    items_.emplace_back(name, t);
    return t;
}

Tensor ParameterStore::find(const std::string& name) const
{
    for (const auto& [key, tensor] : items_)
        if (key == name)
            return tensor;
    return nullptr;
}

std::size_t ParameterStore::scalar_count() const
{
    std::size_t n = 0;
    for (const auto& [key, tensor] : items_)
        n += static_cast<std::size_t>(tensor->rows() * tensor->cols());
    return n;
}

void ParameterStore::zero_grad()
{
    for (const auto& [key, tensor] : items_)
        tensor->grad.setZero();
}

} // namespace rpabeam::ad
