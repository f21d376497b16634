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

#include "kpiroot/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

using Matrix = Eigen::MatrixXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Offsets of each tensor inside the flat parameter vector.
struct Layout {
  std::size_t in, h1, h2;
  std::size_t w1, b1, w2, b2, w3, b3, w4, b4, total;

  Layout(std::size_t window, std::size_t hidden1, std::size_t hidden2)
      : in(window), h1(hidden1), h2(hidden2) {
    w1 = 0;
    b1 = w1 + h1 * in;
    w2 = b1 + h1;
    b2 = w2 + h2 * h1;
    w3 = b2 + h2;
    b3 = w3 + h1 * h2;
    w4 = b3 + h1;
    b4 = w4 + in * h1;
    total = b4 + in;
  }
};

struct Forward {
  Matrix a1, a2, t3, d3, y;
};

Forward forward(const Layout& L, std::span<const double> p, const ConstMatrixMap& x) {
  const ConstMatrixMap W1(p.data() + L.w1, L.h1, L.in);
  const ConstVectorMap b1(p.data() + L.b1, L.h1);
  const ConstMatrixMap W2(p.data() + L.w2, L.h2, L.h1);
  const ConstVectorMap b2(p.data() + L.b2, L.h2);
  const ConstMatrixMap W3(p.data() + L.w3, L.h1, L.h2);
  const ConstVectorMap b3(p.data() + L.b3, L.h1);
  const ConstMatrixMap W4(p.data() + L.w4, L.in, L.h1);
  const ConstVectorMap b4(p.data() + L.b4, L.in);

  Forward f;
  f.a1 = ((W1 * x).colwise() + b1).array().tanh();
  f.a2 = ((W2 * f.a1).colwise() + b2).array().tanh();
  f.t3 = ((W3 * f.a2).colwise() + b3).array().tanh();
  f.d3 = f.t3 + f.a1;
  f.y = (W4 * f.d3).colwise() + b4;
  return f;
}

double population_std(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double e : v) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double med = v[mid];
  if (v.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return med;
}

std::vector<double> standardize(std::span<const double> component, double mean, double scale) {
  std::vector<double> out(component.size());
  for (std::size_t i = 0; i < component.size(); ++i) out[i] = (component[i] - mean) / scale;
  return out;
}

}  // namespace

std::string_view to_string(ThresholdRule rule) {
  return rule == ThresholdRule::mean_std ? "mean_std" : "median_mad";
}

ThresholdRule threshold_rule_from_string(std::string_view name) {
  if (name == "mean_std") return ThresholdRule::mean_std;
  if (name == "median_mad") return ThresholdRule::median_mad;
  throw ParameterError("unknown threshold rule '" + std::string(name) + "'");
}

std::size_t AutoencoderConfig::resolved_train_stride(std::size_t length) const {
  std::size_t stride = train_stride != 0 ? train_stride : std::max<std::size_t>(1, ceil_div(window_length, 8));
  if (max_train_windows != 0 && length > window_length) {
    const std::size_t windows = length - window_length + 1;
    stride = std::max(stride, ceil_div(windows, max_train_windows));
  }
  return stride;
}

WindowBatch WindowBatch::sliding(std::span<const double> values, std::size_t length,
                                 std::size_t stride) {
  if (length == 0 || stride == 0 || values.size() < length) {
    throw ParameterError("WindowBatch::sliding: invalid window length or stride");
  }
  WindowBatch batch;
  batch.length = length;
  batch.count = (values.size() - length) / stride + 1;
  batch.data.resize(batch.length * batch.count);
  for (std::size_t k = 0; k < batch.count; ++k) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(k * stride), length,
                batch.data.begin() + static_cast<std::ptrdiff_t>(k * length));
  }
  return batch;
}

Autoencoder::Autoencoder(std::size_t window_length, std::uint64_t seed)
    : window_(window_length),
      hidden1_(ceil_div(window_length, 2)),
      hidden2_(ceil_div(window_length, 4)) {
  if (window_length < 4) throw ParameterError("autoencoder window length must be >= 4");
  const Layout L(window_, hidden1_, hidden2_);
  params_.assign(L.total, 0.0);

  // Glorot-uniform weights, zero biases.
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t offset, std::size_t fan_out, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < fan_out * fan_in; ++i) params_[offset + i] = dist(rng);
  };
  fill(L.w1, L.h1, L.in);
  fill(L.w2, L.h2, L.h1);
  fill(L.w3, L.h1, L.h2);
  fill(L.w4, L.in, L.h1);
}

void Autoencoder::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw ParameterError("autoencoder expects " + std::to_string(params_.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  std::copy(params.begin(), params.end(), params_.begin());
}

std::vector<double> Autoencoder::window_errors(const WindowBatch& batch) const {
  if (batch.length != window_) throw ParameterError("window length does not match the model");
  const Layout L(window_, hidden1_, hidden2_);
  const ConstMatrixMap x(batch.data.data(), static_cast<Eigen::Index>(batch.length),
                         static_cast<Eigen::Index>(batch.count));
  const Forward f = forward(L, params_, x);
  const Eigen::VectorXd err =
      (f.y - x).array().square().colwise().sum().transpose() / static_cast<double>(window_);
  return {err.data(), err.data() + err.size()};
}

double Autoencoder::loss(const WindowBatch& batch) const {
  const auto errors = window_errors(batch);
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

double Autoencoder::loss_and_gradient(const WindowBatch& batch,
                                      std::vector<double>& gradient) const {
  if (batch.length != window_) throw ParameterError("window length does not match the model");
  const Layout L(window_, hidden1_, hidden2_);
  const ConstMatrixMap x(batch.data.data(), static_cast<Eigen::Index>(batch.length),
                         static_cast<Eigen::Index>(batch.count));
  const std::span<const double> p = params_;
  const Forward f = forward(L, p, x);

  const double norm = 1.0 / static_cast<double>(batch.count * window_);
  const Matrix diff = f.y - x;
  const double loss = diff.squaredNorm() * norm;

  gradient.assign(L.total, 0.0);
  MatrixMap gW1(gradient.data() + L.w1, L.h1, L.in);
  VectorMap gb1(gradient.data() + L.b1, L.h1);
  MatrixMap gW2(gradient.data() + L.w2, L.h2, L.h1);
  VectorMap gb2(gradient.data() + L.b2, L.h2);
  MatrixMap gW3(gradient.data() + L.w3, L.h1, L.h2);
  VectorMap gb3(gradient.data() + L.b3, L.h1);
  MatrixMap gW4(gradient.data() + L.w4, L.in, L.h1);
  VectorMap gb4(gradient.data() + L.b4, L.in);

  const ConstMatrixMap W2(p.data() + L.w2, L.h2, L.h1);
  const ConstMatrixMap W3(p.data() + L.w3, L.h1, L.h2);
  const ConstMatrixMap W4(p.data() + L.w4, L.in, L.h1);

  const Matrix dy = 2.0 * norm * diff;
  gW4.noalias() = dy * f.d3.transpose();
  gb4 = dy.rowwise().sum();

  const Matrix dd3 = W4.transpose() * dy;
  const Matrix dz3 = dd3.array() * (1.0 - f.t3.array().square());
  gW3.noalias() = dz3 * f.a2.transpose();
  gb3 = dz3.rowwise().sum();

  const Matrix dz2 = (W3.transpose() * dz3).array() * (1.0 - f.a2.array().square());
  gW2.noalias() = dz2 * f.a1.transpose();
  gb2 = dz2.rowwise().sum();

  // The skip connection routes dd3 straight back into a1.
  const Matrix da1 = W2.transpose() * dz2 + dd3;
  const Matrix dz1 = da1.array() * (1.0 - f.a1.array().square());
  gW1.noalias() = dz1 * x.transpose();
  gb1 = dz1.rowwise().sum();
  return loss;
}

ReconstructionDetector train_reconstruction_detector(std::span<const double> component,
                                                     const AutoencoderConfig& cfg) {
  if (cfg.window_length < 4) throw ParameterError("reconstruction window length must be >= 4");
  if (component.size() < 2 * cfg.window_length) {
    throw InsufficientDataError("reconstruction detector needs at least " +
                                std::to_string(2 * cfg.window_length) + " samples, got " +
                                std::to_string(component.size()));
  }
  if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");

  ReconstructionDetector det;
  det.config_ = cfg;
  const double mean =
      std::accumulate(component.begin(), component.end(), 0.0) / static_cast<double>(component.size());
  const double sd = population_std(component, mean);
  det.input_mean_ = mean;
  det.input_scale_ = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;

  const auto standardized = standardize(component, det.input_mean_, det.input_scale_);
  const WindowBatch train = WindowBatch::sliding(standardized, cfg.window_length,
                                                 cfg.resolved_train_stride(standardized.size()));

  det.model_ = Autoencoder(cfg.window_length, cfg.seed);
  std::vector<double> params(det.model_.parameters().begin(), det.model_.parameters().end());
  std::vector<double> grad;
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  det.initial_loss_ = det.model_.loss(train);
  double b1t = 1.0;
  double b2t = 1.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    det.model_.loss_and_gradient(train, grad);
    b1t *= beta1;
    b2t *= beta2;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i];
      m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i];
      const double mhat = m1[i] / (1.0 - b1t);
      const double vhat = m2[i] / (1.0 - b2t);
      params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + eps);
    }
    det.model_.set_parameters(params);
  }
  det.final_loss_ = det.model_.loss(train);

  const auto errors = det.window_errors(component);
  const double error_mean =
      std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
  double center = error_mean;
  double spread = population_std(errors, error_mean);
  if (cfg.threshold_rule == ThresholdRule::median_mad) {
    const double median = median_of(errors);
    std::vector<double> deviations(errors.size());
    std::transform(errors.begin(), errors.end(), deviations.begin(),
                   [median](double e) { return std::abs(e - median); });
    const double mad_spread = 1.4826 * median_of(deviations);
    center = median;
    if (mad_spread > 0.0) spread = mad_spread;
  }
  det.training_center_ = center;
  det.training_spread_ = spread;
  det.threshold_ = center + cfg.threshold_k * spread;
  return det;
}

std::vector<double> ReconstructionDetector::window_errors(std::span<const double> component) const {
  const auto standardized = standardize(component, input_mean_, input_scale_);
  return model_.window_errors(WindowBatch::sliding(standardized, config_.window_length, 1));
}

std::vector<std::size_t> detect_component_anomalies(std::span<const double> component,
                                                    const ReconstructionDetector& detector) {
  const std::size_t window = detector.config().window_length;
  if (component.size() < window) return {};
  const auto errors = detector.window_errors(component);

  // Difference array: +1 where a flagged window starts, -1 past its end.
  std::vector<int> cover(component.size() + 1, 0);
  for (std::size_t s = 0; s < errors.size(); ++s) {
    if (errors[s] > detector.threshold()) {
      ++cover[s];
      --cover[s + window];
    }
  }
  std::vector<std::size_t> out;
  int running = 0;
  for (std::size_t i = 0; i < component.size(); ++i) {
    running += cover[i];
    if (running > 0) out.push_back(i);
  }
  return out;
}

nlohmann::json ReconstructionDetector::to_json() const {
  nlohmann::json j;
  j["format"] = "kpiroot.reconstruction_detector";
  j["version"] = kFormatVersion;
  j["config"] = {{"window_length", config_.window_length},
                 {"epochs", config_.epochs},
                 {"learning_rate", config_.learning_rate},
                 {"seed", config_.seed},
                 {"train_stride", config_.train_stride},
                 {"max_train_windows", config_.max_train_windows},
                 {"threshold_rule", to_string(config_.threshold_rule)},
                 {"threshold_k", config_.threshold_k}};
  j["input_mean"] = input_mean_;
  j["input_scale"] = input_scale_;
  j["threshold"] = threshold_;
  j["training_center"] = training_center_;
  j["training_spread"] = training_spread_;
  j["initial_loss"] = initial_loss_;
  j["final_loss"] = final_loss_;
  j["parameters"] = std::vector<double>(model_.parameters().begin(), model_.parameters().end());
  return j;
}

ReconstructionDetector ReconstructionDetector::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "kpiroot.reconstruction_detector") {
      throw ParseError("not a reconstruction detector checkpoint");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw ParseError("unsupported detector checkpoint version " + j.at("version").dump());
    }
    ReconstructionDetector det;
    const auto& c = j.at("config");
    det.config_.window_length = c.at("window_length").get<std::size_t>();
    det.config_.epochs = c.at("epochs").get<std::size_t>();
    det.config_.learning_rate = c.at("learning_rate").get<double>();
    det.config_.seed = c.at("seed").get<std::uint64_t>();
    det.config_.train_stride = c.at("train_stride").get<std::size_t>();
    det.config_.max_train_windows = c.at("max_train_windows").get<std::size_t>();
    det.config_.threshold_rule =
        threshold_rule_from_string(c.at("threshold_rule").get<std::string>());
    det.config_.threshold_k = c.at("threshold_k").get<double>();
    det.input_mean_ = j.at("input_mean").get<double>();
    det.input_scale_ = j.at("input_scale").get<double>();
    det.threshold_ = j.at("threshold").get<double>();
    det.training_center_ = j.at("training_center").get<double>();
    det.training_spread_ = j.at("training_spread").get<double>();
    det.initial_loss_ = j.at("initial_loss").get<double>();
    det.final_loss_ = j.at("final_loss").get<double>();
    det.model_ = Autoencoder(det.config_.window_length, 0);
    det.model_.set_parameters(j.at("parameters").get<std::vector<double>>());
    return det;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed detector checkpoint: ") + e.what());
  } catch (const ParameterError& e) {
    throw ParseError(std::string("malformed detector checkpoint: ") + e.what());
  }
}

void ReconstructionDetector::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

ReconstructionDetector ReconstructionDetector::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, path.string());
  }
}

}  // namespace kpiroot
