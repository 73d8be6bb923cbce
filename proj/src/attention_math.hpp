// Copyright 2026 The convrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "convrec/embedding.hpp"

namespace convrec::detail {

inline Vector softmax(const Vector& scores) {
  const double top = scores.maxCoeff();
  Vector e = (scores.array() - top).exp().matrix();
  return e / e.sum();
}

// pre.row(r) = W [u; inputs.row(r)] + b, scores[r] = h . ReLU(pre.row(r)).
inline void attention_forward(const AttentionNet& net, const Vector& u, const Matrix& inputs,
                              Matrix& pre, Vector& scores) {
  const auto d = u.size();
  const Vector user_part = net.weight.leftCols(d) * u + net.bias;
  pre = inputs * net.weight.rightCols(d).transpose();
  pre.rowwise() += user_part.transpose();
  scores = pre.cwiseMax(0.0) * net.head;
}

// Backprop of the scores given d(loss)/d(scores). Accumulates into the net
// gradient, the user gradient and the per-relation input gradient rows.
inline void attention_backward(const AttentionNet& net, const Vector& u, const Matrix& inputs,
                               const Matrix& pre, const Vector& grad_scores, AttentionNet& grad_net,
                               Eigen::Ref<Vector> grad_u, Matrix& grad_inputs) {
  const auto d = u.size();
  const Matrix hidden = pre.cwiseMax(0.0);
  grad_net.head.noalias() += hidden.transpose() * grad_scores;
  // grad wrt pre: grad_scores[r] * head, masked by ReLU.
  Matrix grad_pre = grad_scores * net.head.transpose();
  grad_pre.array() *= (pre.array() > 0.0).cast<double>();
  const Vector grad_pre_sum = grad_pre.colwise().sum().transpose();
  grad_net.bias += grad_pre_sum;
  grad_net.weight.leftCols(d).noalias() += grad_pre_sum * u.transpose();
  grad_net.weight.rightCols(d).noalias() += grad_pre.transpose() * inputs;
  grad_u.noalias() += net.weight.leftCols(d).transpose() * grad_pre_sum;
  grad_inputs.noalias() += grad_pre * net.weight.rightCols(d);
}

// d(loss)/d(logits) of a softmax given d(loss)/d(probabilities).
inline Vector softmax_backward(const Vector& probs, const Vector& grad_probs) {
  const double inner = probs.dot(grad_probs);
  return (probs.array() * (grad_probs.array() - inner)).matrix();
}

}  // namespace convrec::detail
