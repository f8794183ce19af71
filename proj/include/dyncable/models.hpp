#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dyncable/datasets.hpp"

namespace dyncable {

struct TrainConfig {
  double learning_rate = 1e-3;
  double finetune_learning_rate = 1e-4;
  int batch_size = 64;
  int epochs = 200;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;
};

struct Normalizer {
  Eigen::VectorXd mean, std;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;    // rows = samples
  Eigen::MatrixXd invert(const Eigen::MatrixXd& x) const;
  static Normalizer fit(const Eigen::MatrixXd& x);
};

// Forward dynamics regressor: action -> predicted Cartesian endpoint.
// Four fully connected layers, 256 hidden units, rectifier activations,
// linear output; trained with mean squared endpoint error.
class MLPForward {
 public:
  static constexpr int kHidden = 256;

  // in_dim is 3 (A1) or 4 (A2).
  explicit MLPForward(int in_dim = 3, std::uint64_t seed = 0);

  int input_dim() const { return in_dim_; }

  PlanePoint predict(const Action& a) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const;  // rows in

  double final_train_loss() const { return final_train_loss_; }
  double final_val_loss() const { return final_val_loss_; }

  std::string to_json() const;
  static MLPForward from_json(const std::string& text);

  // Mean squared error (normalized space) and its weight gradients for a
  // batch; exposed so gradient checks can diff it directly.
  double loss_and_gradients(const Eigen::MatrixXd& x_norm,
                            const Eigen::MatrixXd& y_norm,
                            std::vector<Eigen::MatrixXd>* grad_w,
                            std::vector<Eigen::VectorXd>* grad_b) const;

  std::vector<Eigen::MatrixXd>& weights() { return w_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }
  const Normalizer& input_norm() const { return in_norm_; }
  const Normalizer& target_norm() const { return out_norm_; }

  friend MLPForward train_mlp(const Dataset& dataset, const TrainConfig& cfg);
  friend MLPForward finetune_mlp(const MLPForward& model, const Dataset& real,
                                 const TrainConfig& cfg);

 private:
  void fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lr,
           int epochs, int batch_size, std::uint64_t seed,
           double val_fraction, bool refit_normalizers);

  int in_dim_;
  std::vector<Eigen::MatrixXd> w_;
  std::vector<Eigen::VectorXd> b_;
  Normalizer in_norm_, out_norm_;
  double final_train_loss_ = 0.0;
  double final_val_loss_ = 0.0;
};

MLPForward train_mlp(const Dataset& dataset, const TrainConfig& cfg);
MLPForward finetune_mlp(const MLPForward& model, const Dataset& real,
                        const TrainConfig& cfg);

// Exact GP regression with a squared-exponential kernel; hyperparameters
// picked by marginal likelihood over a small grid. Capped at 2000 training
// points (seed-deterministic uniform subset beyond that).
class GPForward {
 public:
  static constexpr int kMaxPoints = 2000;

  GPForward() = default;

  static GPForward fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       std::uint64_t seed = 0);

  PlanePoint predict(const Action& a) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const;

  int input_dim() const { return static_cast<int>(x_.cols()); }
  double length_scale() const { return length_scale_; }
  double noise() const { return noise_; }

  std::string to_json() const;
  static GPForward from_json(const std::string& text);

 private:
  Eigen::MatrixXd x_;       // normalized training inputs
  Eigen::MatrixXd alpha_;   // K^-1 y, per output column
  Normalizer in_norm_, out_norm_;
  double length_scale_ = 1.0;  // shared across normalized dimensions
  double noise_ = 1e-2;
};

GPForward train_gp(const Dataset& dataset, std::uint64_t seed = 0);

// Dataset -> (inputs, targets) design matrices for valid transitions.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> design_matrices(const Dataset& ds);

Eigen::VectorXd action_to_input(const Action& a, int dim);

}  // namespace dyncable
