// Copyright 2026 The Trajformer Authors
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

#include "trajformer/optim.hpp"

#include <algorithm>
#include <cmath>

#include "trajformer/errors.hpp"

namespace trajformer
{

template <typename T>
std::size_t ParameterSet<T>::add(std::string name, Tensor<T> value)
{
  if (contains(name)) {
    throw ContractError("duplicate parameter name: " + name);
  }
  Tensor<T> grad(value.shape());
  params_.push_back(Parameter<T>{std::move(name), std::move(value), std::move(grad)});
  return params_.size() - 1;
}

template <typename T>
std::size_t ParameterSet<T>::index_of(const std::string & name) const
{
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) {
      return i;
    }
  }
  throw ContractError("unknown parameter: " + name);
}

template <typename T>
bool ParameterSet<T>::contains(const std::string & name) const
{
  return std::any_of(
    params_.begin(), params_.end(), [&](const auto & p) { return p.name == name; });
}

template <typename T>
std::size_t ParameterSet<T>::scalar_count() const
{
  std::size_t n = 0;
  for (const auto & p : params_) {
    n += p.value.size();
  }
  return n;
}

template <typename T>
void ParameterSet<T>::zero_grad()
{
  for (auto & p : params_) {
    if (p.grad.shape() != p.value.shape()) {
      p.grad = Tensor<T>(p.value.shape());
    } else {
      p.grad.fill(T(0));
    }
  }
}

template <typename T>
AdamState make_adam_state(const ParameterSet<T> & params)
{
  AdamState s;
  for (const auto & p : params) {
    s.m.emplace_back(p.value.shape());
    s.v.emplace_back(p.value.shape());
  }
  return s;
}

template <typename T>
void adam_step(AdamState & state, ParameterSet<T> & params, double lr)
{
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError(
      "adam_step: optimizer holds " + std::to_string(state.m.size()) + " moments for " +
      std::to_string(params.size()) + " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter<T> & p = params[i];
    if (
      state.m[i].shape() != p.value.shape() || state.v[i].shape() != p.value.shape() ||
      p.grad.shape() != p.value.shape())
    {
      throw DimensionError(
        "adam_step: shape mismatch for " + p.name + ": parameter " +
        shape_string(p.value.shape()) + ", moment " + shape_string(state.m[i].shape()) +
        ", gradient " + shape_string(p.grad.shape()));
    }
  }
  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter<T> & p = params[i];
    Tensor<float> & m = state.m[i];
    Tensor<float> & v = state.v[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = static_cast<double>(p.grad[j]);
      const double mj = b1 * m[j] + (1.0 - b1) * g;
      const double vj = b2 * v[j] + (1.0 - b2) * g * g;
      m[j] = static_cast<float>(mj);
      v[j] = static_cast<float>(vj);
      const double mhat = mj / c1;
      const double vhat = vj / c2;
      p.value[j] = static_cast<T>(static_cast<double>(p.value[j]) - lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

void LrSchedule::validate() const
{
  if (!(warmup_steps > 0 && warmup_steps < total_steps)) {
    throw ConfigError(
      "learning-rate schedule needs 0 < warmup_steps < total_steps, got warmup " +
      std::to_string(warmup_steps) + ", total " + std::to_string(total_steps));
  }
  if (!(peak_lr >= 0.0) || !std::isfinite(peak_lr)) {
    throw ConfigError("learning-rate schedule needs a finite peak_lr >= 0");
  }
}

double lr_at(const LrSchedule & sched, long long step)
{
  sched.validate();
  const auto total = static_cast<long long>(sched.total_steps);
  const auto warm = static_cast<long long>(sched.warmup_steps);
  step = std::clamp(step, 0LL, total);
  if (step <= warm) {
    return sched.peak_lr * static_cast<double>(step) / static_cast<double>(warm);
  }
  return sched.peak_lr * static_cast<double>(total - step) / static_cast<double>(total - warm);
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template AdamState make_adam_state<float>(const ParameterSet<float> &);
template AdamState make_adam_state<double>(const ParameterSet<double> &);
template void adam_step<float>(AdamState &, ParameterSet<float> &, double);
template void adam_step<double>(AdamState &, ParameterSet<double> &, double);

}  // namespace trajformer
