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

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace rpabeam::ad {

class Node;

/// Graph handle. Tensors are dense real matrices; complex quantities are
/// carried as (real, imag) pairs of tensors by the layers above.
using Tensor = std::shared_ptr<Node>;

/// One vertex of the expression DAG built eagerly by the op functions.
/// `grad` accumulates across backward() calls until explicitly cleared.
class Node {
  public:
    Node(Eigen::MatrixXd v, bool needs_grad);

    Eigen::Index rows() const { return value.rows(); }
    Eigen::Index cols() const { return value.cols(); }
    bool is_scalar() const { return value.rows() == 1 && value.cols() == 1; }
    double scalar() const;

    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    std::vector<Tensor> parents;
    std::function<void(const Eigen::MatrixXd&)> backward_fn;
    bool requires_grad = false;
};

/// True unless a NoGradGuard is live on this thread.
bool grad_enabled();

/// RAII switch that records no graph edges in its scope (inference mode).
class NoGradGuard {
  public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

  private:
    bool previous_;
};

// --- construction -------------------------------------------------------

Tensor make_tensor(Eigen::MatrixXd value, bool requires_grad = false);
Tensor constant(Eigen::MatrixXd value);
Tensor scalar(double value);
Tensor zeros(Eigen::Index rows, Eigen::Index cols, bool requires_grad = false);

// --- elementwise --------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);
/// Scales every entry of `a` by the 1x1 graph tensor `s` (both differentiable).
Tensor mul_scalar_t(const Tensor& a, const Tensor& s);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor cos(const Tensor& a);
Tensor sin(const Tensor& a);
Tensor tanh(const Tensor& a);
/// Exact Gaussian-error-linear unit 0.5 x (1 + erf(x / sqrt 2)).
Tensor gelu(const Tensor& a);

// --- linear algebra and shape ------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// Row-major reinterpretation to (rows, cols); element count must match.
Tensor reshape(const Tensor& a, Eigen::Index rows, Eigen::Index cols);
Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count);
Tensor slice_rows(const Tensor& a, Eigen::Index start, Eigen::Index count);
Tensor concat_cols(const std::vector<Tensor>& parts);

// --- reductions and broadcasts ------------------------------------------

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor row_sum(const Tensor& a);  ///< (r,c) -> (r,1)
Tensor col_sum(const Tensor& a);  ///< (r,c) -> (1,c)
Tensor diag_part(const Tensor& a); ///< square (n,n) -> (n,1)
/// out(i,j) = a(i,j) * s(i,0); s has shape (rows,1).
Tensor scale_rows(const Tensor& a, const Tensor& s);
/// out(i,j) = a(i,j) * s(0,j); s has shape (1,cols).
Tensor scale_cols(const Tensor& a, const Tensor& s);
/// Adds the (1,cols) row vector b to every row of a.
Tensor add_rowvec(const Tensor& a, const Tensor& b);

// --- neural-network primitives ------------------------------------------

Tensor softmax_rows(const Tensor& a);
/// Per-row standardization (x - mean) / sqrt(var + 1e-12); affine terms are
/// applied by the caller. A constant row maps to zeros.
Tensor layer_norm_rows(const Tensor& a);

/// Hard row-wise argmax as a one-hot matrix with a straight-through
/// backward: gradients flow as if the output were softmax(logits / temp).
/// Ties resolve to the lowest column index. With relaxed = true the forward
/// itself is softmax(logits / temp), which makes the whole graph smooth for
/// derivative checks.
Tensor ste_argmax_rows(const Tensor& logits, double temperature, bool relaxed = false);

/// Contracts per-row selection weights against stacked feature blocks:
/// blocks is (groups*n, m), weights is (n, m) and
/// out(i, j) = sum_m blocks(i*n + j, m) * weights(j, m).
Tensor mode_gather(const Tensor& blocks, const Tensor& weights);

// --- graph traversal ------------------------------------------------------

/// Reverse-mode sweep from a scalar loss; accumulates into .grad of every
/// reachable tensor that requires gradients. Throws std::invalid_argument
/// if loss is not a 1x1 tensor with gradients enabled.
void backward(const Tensor& loss);

/// Plain (non-graph) row-wise argmax with ties to the lowest index.
std::vector<int> argmax_rows(const Eigen::MatrixXd& m);

// --- parameters -----------------------------------------------------------

/// Named collection of trainable leaves. Iteration order is insertion
/// order, which fixes the optimizer state layout and the checkpoint layout.
class ParameterStore {
  public:
    /// Registers a fresh leaf tensor; duplicate names are rejected.
    Tensor add(const std::string& name, Eigen::MatrixXd value);

    Tensor find(const std::string& name) const; ///< nullptr when absent
    std::size_t size() const { return items_.size(); }
    std::size_t scalar_count() const;
    void zero_grad();

    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }

  private:
    std::vector<std::pair<std::string, Tensor>> items_;
};

} // namespace rpabeam::ad
