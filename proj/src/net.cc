// Copyright 2026 The pubmdp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pubmdp/net.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace pubmdp {

BeliefEncoder::BeliefEncoder(const GameTree& tree) : tree_(tree) {
  path_slots_ = tree.max_nonterminal_public_depth();
  num_public_obs_ = tree.game().num_public_obs();
  int offset = path_slots_ * num_public_obs_;
  indicator_offset_.resize(tree.num_players());
  for (int p = 0; p < tree.num_players(); ++p) {
    indicator_offset_[p] = offset;
    offset += tree.max_info_states_in_public(p);
  }
  input_size_ = offset;
}

Eigen::VectorXd BeliefEncoder::Encode(const PublicBelief& belief) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(input_size_);
  const PublicState& ps = tree_.public_state(belief.public_state);
  for (size_t d = 0; d < ps.obs_seq.size(); ++d) {
    out[static_cast<int>(d) * num_public_obs_ + ps.obs_seq[d]] = 1.0;
  }
  for (int p = 0; p < tree_.num_players(); ++p) {
    for (size_t r = 0; r < belief.indicators[p].size(); ++r) {
      if (belief.indicators[p][r]) {
        out[indicator_offset_[p] + static_cast<int>(r)] = 1.0;
      }
    }
  }
  return out;
}

TwoHeadMlp::TwoHeadMlp(const MlpConfig& config, RandomStream* rng)
    : config_(config) {
  if (config_.input_size < 1 || config_.logits_size < 1 ||
      config_.hidden_layers < 1 || config_.hidden_units < 1) {
    throw std::runtime_error("invalid network shape");
  }
  const int64_t h = config_.hidden_units;
  int64_t offset = 0;
  const auto claim = [&offset](int64_t rows, int64_t cols) {
    Span span{offset, rows, cols};
    offset += rows * cols;
    return span;
  };
  for (int layer = 0; layer < config_.hidden_layers; ++layer) {
    const int64_t fan_in = layer == 0 ? config_.input_size : h;
    weight_spans_.push_back(claim(h, fan_in));
    bias_spans_.push_back(claim(h, 1));
  }
  value_weight_ = claim(1, h);
  value_bias_ = claim(1, 1);
  policy_weight_ = claim(config_.logits_size, h);
  policy_bias_ = claim(config_.logits_size, 1);

  params_.setZero(offset);
  grads_.setZero(offset);
  adam_m_.setZero(offset);
  adam_v_.setZero(offset);

  for (int layer = 0; layer < config_.hidden_layers; ++layer) {
    auto w = MatOf(params_, weight_spans_[layer]);
    const double scale = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (int64_t c = 0; c < w.cols(); ++c) {
      for (int64_t r = 0; r < w.rows(); ++r) {
        w(r, c) = scale * rng->Gaussian();
      }
    }
  }
  const double head_scale = 0.01 / std::sqrt(static_cast<double>(h));
  auto wv = MatOf(params_, value_weight_);
  for (int64_t c = 0; c < wv.cols(); ++c) wv(0, c) = head_scale * rng->Gaussian();
  auto wp = MatOf(params_, policy_weight_);
  for (int64_t c = 0; c < wp.cols(); ++c) {
    for (int64_t r = 0; r < wp.rows(); ++r) {
      wp(r, c) = head_scale * rng->Gaussian();
    }
  }
}

void TwoHeadMlp::Forward(const Eigen::VectorXd& input, Activation* act) const {
  act->input = input;
  act->hidden.resize(config_.hidden_layers);
  const Eigen::VectorXd* prev = &act->input;
  for (int layer = 0; layer < config_.hidden_layers; ++layer) {
    act->hidden[layer] =
        (MatOf(params_, weight_spans_[layer]) * *prev +
         MatOf(params_, bias_spans_[layer]).col(0))
            .cwiseMax(0.0);
    prev = &act->hidden[layer];
  }
  act->value_raw = MatOf(params_, value_weight_).row(0).dot(*prev) +
                   params_[value_bias_.offset];
  act->logits = MatOf(params_, policy_weight_) * *prev +
                MatOf(params_, policy_bias_).col(0);
}

void TwoHeadMlp::StartBatch() { grads_.setZero(); }

void TwoHeadMlp::Backward(const Activation& act, double dvalue_raw,
                          const Eigen::VectorXd& dlogits) {
  const Eigen::VectorXd& top = act.hidden.back();
  MatOf(grads_, value_weight_).row(0) += dvalue_raw * top.transpose();
  grads_[value_bias_.offset] += dvalue_raw;
  MatOf(grads_, policy_weight_) += dlogits * top.transpose();
  MatOf(grads_, policy_bias_).col(0) += dlogits;

  Eigen::VectorXd dhidden =
      MatOf(params_, value_weight_).row(0).transpose() * dvalue_raw +
      MatOf(params_, policy_weight_).transpose() * dlogits;
  for (int layer = config_.hidden_layers - 1; layer >= 0; --layer) {
    const Eigen::VectorXd dz =
        (act.hidden[layer].array() > 0.0).cast<double>() * dhidden.array();
    const Eigen::VectorXd& below =
        layer == 0 ? act.input : act.hidden[layer - 1];
    MatOf(grads_, weight_spans_[layer]) += dz * below.transpose();
    MatOf(grads_, bias_spans_[layer]).col(0) += dz;
    if (layer > 0) {
      dhidden = MatOf(params_, weight_spans_[layer]).transpose() * dz;
    }
  }
}

void TwoHeadMlp::AdamStep() {
  ++adam_step_;
  const double b1 = config_.adam_beta1;
  const double b2 = config_.adam_beta2;
  adam_m_ = b1 * adam_m_ + (1.0 - b1) * grads_;
  adam_v_ = b2 * adam_v_.array() + (1.0 - b2) * grads_.array().square();
  const double m_correction =
      1.0 - std::pow(b1, static_cast<double>(adam_step_));
  const double v_correction =
      1.0 - std::pow(b2, static_cast<double>(adam_step_));
  params_.array() -=
      config_.learning_rate * (adam_m_.array() / m_correction) /
      ((adam_v_.array() / v_correction).sqrt() + config_.adam_epsilon);
}

void TwoHeadMlp::SetParameters(const Eigen::VectorXd& params) {
  if (params.size() != params_.size()) {
    throw std::runtime_error("parameter vector size mismatch");
  }
  params_ = params;
}

void TwoHeadMlp::Save(std::ostream& out) const {
  out << "mlp 1 " << config_.input_size << ' ' << config_.logits_size << ' '
      << config_.hidden_layers << ' ' << config_.hidden_units << ' '
      << adam_step_ << '\n';
  out.precision(17);
  for (int64_t i = 0; i < params_.size(); ++i) out << params_[i] << '\n';
  for (int64_t i = 0; i < adam_m_.size(); ++i) out << adam_m_[i] << '\n';
  for (int64_t i = 0; i < adam_v_.size(); ++i) out << adam_v_[i] << '\n';
}

void TwoHeadMlp::Load(std::istream& in) {
  std::string magic;
  int version = 0, input = 0, logits = 0, layers = 0, units = 0;
  int64_t step = 0;
  in >> magic >> version >> input >> logits >> layers >> units >> step;
  if (!in || magic != "mlp" || version != 1) {
    throw std::runtime_error("unrecognized network checkpoint");
  }
  if (input != config_.input_size || logits != config_.logits_size ||
      layers != config_.hidden_layers || units != config_.hidden_units) {
    throw std::runtime_error("network checkpoint shape mismatch");
  }
  adam_step_ = step;
  for (int64_t i = 0; i < params_.size(); ++i) in >> params_[i];
  for (int64_t i = 0; i < adam_m_.size(); ++i) in >> adam_m_[i];
  for (int64_t i = 0; i < adam_v_.size(); ++i) in >> adam_v_[i];
  if (!in) throw std::runtime_error("truncated network checkpoint");
}

}  // namespace pubmdp
