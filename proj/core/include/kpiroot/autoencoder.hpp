// Copyright 2026 The kpiroot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace kpiroot {

/// How the error threshold is derived from the training-window errors.
/// mean_std: mean + k * std. median_mad: median + k * 1.4826 * MAD, which
/// ignores the anomalous windows a training component may itself contain.
enum class ThresholdRule { mean_std, median_mad };

std::string_view to_string(ThresholdRule rule);
ThresholdRule threshold_rule_from_string(std::string_view name);

/// Hyper-parameters of the sliding-window reconstruction detector.
struct AutoencoderConfig {
  std::size_t window_length = 32;
  std::size_t epochs = 500;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  /// Stride between training windows; 0 selects ceil(window_length / 8).
  /// Threshold statistics always use every stride-1 window.
  std::size_t train_stride = 0;
  /// Upper bound on training windows; the stride grows to respect it.
  /// 0 disables the bound.
  std::size_t max_train_windows = 256;
  ThresholdRule threshold_rule = ThresholdRule::mean_std;
  double threshold_k = 3.0;

  /// Effective training stride for a component of `length` samples.
  std::size_t resolved_train_stride(std::size_t length) const;
};

/// A batch of equal-length windows stored contiguously, window after window.
struct WindowBatch {
  std::size_t length = 0;
  std::size_t count = 0;
  std::vector<double> data;

  static WindowBatch sliding(std::span<const double> values, std::size_t length,
                             std::size_t stride = 1);
};

/// Dense encoder-decoder W -> ceil(W/2) -> ceil(W/4) -> ceil(W/2) -> W.
///
/// Hidden layers use tanh; the output layer is linear. The first hidden
/// activation is added to the output of the third layer (skip connection).
/// Parameters live in one flat vector: W1, b1, W2, b2, W3, b3, W4, b4, each
/// matrix column-major with shape (fan_out x fan_in).
class Autoencoder {
 public:
  Autoencoder() = default;
  Autoencoder(std::size_t window_length, std::uint64_t seed);

  std::size_t window_length() const noexcept { return window_; }
  std::size_t hidden_width() const noexcept { return hidden1_; }
  std::size_t bottleneck_width() const noexcept { return hidden2_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<const double> parameters() const noexcept { return params_; }
  void set_parameters(std::span<const double> params);

  /// Mean squared reconstruction error over every element of the batch.
  double loss(const WindowBatch& batch) const;
  /// Loss and its gradient with respect to parameters().
  double loss_and_gradient(const WindowBatch& batch, std::vector<double>& gradient) const;
  /// Per-window mean squared reconstruction error.
  std::vector<double> window_errors(const WindowBatch& batch) const;

 private:
  std::size_t window_ = 0;
  std::size_t hidden1_ = 0;
  std::size_t hidden2_ = 0;
  std::vector<double> params_;
};

/// Trained reconstruction detector for one decomposed component.
///
/// Inputs are standardised with the training component's mean and
/// population std before windowing. A window is anomalous when its error
/// exceeds `threshold() = training_center + threshold_k * training_spread`,
/// both statistics taken over the stride-1 window errors as selected by the
/// threshold rule. A zero MAD falls back to the population std.
class ReconstructionDetector {
 public:
  static constexpr int kFormatVersion = 1;

  ReconstructionDetector() = default;

  const AutoencoderConfig& config() const noexcept { return config_; }
  const Autoencoder& model() const noexcept { return model_; }
  double threshold() const noexcept { return threshold_; }
  double training_center() const noexcept { return training_center_; }
  double training_spread() const noexcept { return training_spread_; }
  double input_mean() const noexcept { return input_mean_; }
  double input_scale() const noexcept { return input_scale_; }
  double initial_loss() const noexcept { return initial_loss_; }
  double final_loss() const noexcept { return final_loss_; }

  /// Errors of every stride-1 window of `component`.
  std::vector<double> window_errors(std::span<const double> component) const;

  nlohmann::json to_json() const;
  static ReconstructionDetector from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ReconstructionDetector load(const std::filesystem::path& path);

  friend ReconstructionDetector train_reconstruction_detector(
      std::span<const double> component, const AutoencoderConfig& cfg);

 private:
  AutoencoderConfig config_;
  Autoencoder model_;
  double input_mean_ = 0.0;
  double input_scale_ = 1.0;
  double threshold_ = 0.0;
  double training_center_ = 0.0;
  double training_spread_ = 0.0;
  double initial_loss_ = 0.0;
  double final_loss_ = 0.0;
};

/// Full-batch Adam on the mean squared reconstruction error. Deterministic
/// for a given (component, cfg). Throws InsufficientDataError when the
/// component is shorter than 2 * window_length, ParameterError when
/// window_length < 4.
ReconstructionDetector train_reconstruction_detector(std::span<const double> component,
                                                     const AutoencoderConfig& cfg);

/// Sorted sample indices covered by at least one window whose error is above
/// the detector threshold.
std::vector<std::size_t> detect_component_anomalies(std::span<const double> component,
                                                    const ReconstructionDetector& detector);

}  // namespace kpiroot
