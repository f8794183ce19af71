#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dyncable/models.hpp"
#include "json.hpp"

namespace dyncable {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols =
      rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean.transpose()).array().rowwise() /
         std.transpose().array();
}

Eigen::MatrixXd Normalizer::invert(const Eigen::MatrixXd& x) const {
  return (x.array().rowwise() * std.transpose().array()).matrix().rowwise() +
         mean.transpose();
}

Normalizer Normalizer::fit(const Eigen::MatrixXd& x) {
  Normalizer n;
  n.mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - n.mean.transpose();
  n.std = (centered.array().square().colwise().mean()).sqrt();
  for (Eigen::Index i = 0; i < n.std.size(); ++i)
    if (n.std(i) < 1e-12) n.std(i) = 1.0;  // constant column
  return n;
}

Eigen::VectorXd action_to_input(const Action& a, int dim) {
  Eigen::VectorXd v(dim);
  v(0) = a.theta1;
  v(1) = a.theta2;
  v(2) = a.r2;
  if (dim == 4) {
    if (!a.psi)
      throw std::invalid_argument("action_to_input: model expects psi");
    v(3) = *a.psi;
  }
  return v;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> design_matrices(
    const Dataset& ds) {
  const auto valid = ds.valid();
  if (valid.empty()) throw std::invalid_argument("dataset has no valid rows");
  const int dim = valid.front()->action.psi ? 4 : 3;
  Eigen::MatrixXd x(valid.size(), dim), y(valid.size(), 2);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    x.row(i) = action_to_input(valid[i]->action, dim).transpose();
    y(i, 0) = valid[i]->endpoint_xy.x;
    y(i, 1) = valid[i]->endpoint_xy.y;
  }
  return {x, y};
}

MLPForward::MLPForward(int in_dim, std::uint64_t seed) : in_dim_(in_dim) {
  if (in_dim != 3 && in_dim != 4)
    throw std::invalid_argument("MLPForward: input dim must be 3 or 4");
  const int widths[5] = {in_dim, kHidden, kHidden, kHidden, 2};
  std::mt19937_64 rng(seed);
  for (int l = 0; l < 4; ++l) {
    // He initialization for the rectifier layers.
    std::normal_distribution<double> g(0.0, std::sqrt(2.0 / widths[l]));
    Eigen::MatrixXd w(widths[l + 1], widths[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = g(rng);
    w_.push_back(w);
    b_.push_back(Eigen::VectorXd::Zero(widths[l + 1]));
  }
  in_norm_.mean = Eigen::VectorXd::Zero(in_dim);
  in_norm_.std = Eigen::VectorXd::Ones(in_dim);
  out_norm_.mean = Eigen::VectorXd::Zero(2);
  out_norm_.std = Eigen::VectorXd::Ones(2);
}

Eigen::MatrixXd MLPForward::predict(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != in_dim_)
    throw std::invalid_argument("MLPForward::predict: dimension mismatch");
  Eigen::MatrixXd h = in_norm_.apply(inputs);
  for (std::size_t l = 0; l < w_.size(); ++l) {
    h = (h * w_[l].transpose()).rowwise() + b_[l].transpose();
    if (l + 1 < w_.size()) h = h.cwiseMax(0.0);
  }
  return out_norm_.invert(h);
}

PlanePoint MLPForward::predict(const Action& a) const {
  Eigen::MatrixXd x = action_to_input(a, in_dim_).transpose();
  const Eigen::MatrixXd y = predict(x);
  return {y(0, 0), y(0, 1)};
}

double MLPForward::loss_and_gradients(
    const Eigen::MatrixXd& x_norm, const Eigen::MatrixXd& y_norm,
    std::vector<Eigen::MatrixXd>* grad_w,
    std::vector<Eigen::VectorXd>* grad_b) const {
  const Eigen::Index n = x_norm.rows();
  std::vector<Eigen::MatrixXd> act;  // post-activation outputs per layer
  act.push_back(x_norm);
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::MatrixXd z =
        (act.back() * w_[l].transpose()).rowwise() + b_[l].transpose();
    if (l + 1 < w_.size()) z = z.cwiseMax(0.0);
    act.push_back(std::move(z));
  }
  const Eigen::MatrixXd diff = act.back() - y_norm;
  const double loss = diff.array().square().sum() / static_cast<double>(n);

  if (grad_w) {
    grad_w->assign(w_.size(), Eigen::MatrixXd());
    grad_b->assign(b_.size(), Eigen::VectorXd());
    Eigen::MatrixXd delta = 2.0 * diff / static_cast<double>(n);
    for (int l = static_cast<int>(w_.size()) - 1; l >= 0; --l) {
      (*grad_w)[l] = delta.transpose() * act[l];
      (*grad_b)[l] = delta.colwise().sum().transpose();
      if (l > 0) {
        delta = delta * w_[l];
        delta.array() *= (act[l].array() > 0.0).cast<double>();
      }
    }
  }
  return loss;
}

void MLPForward::fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     double lr, int epochs, int batch_size,
                     std::uint64_t seed, double val_fraction,
                     bool refit_normalizers) {
  if (refit_normalizers) {
    in_norm_ = Normalizer::fit(x);
    out_norm_ = Normalizer::fit(y);
  }
  const Eigen::MatrixXd xn = in_norm_.apply(x);
  const Eigen::MatrixXd yn = out_norm_.apply(y);

  std::mt19937_64 rng(seed ^ 0x5deece66dull);
  std::vector<Eigen::Index> order(xn.rows());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const Eigen::Index n_val = std::min<Eigen::Index>(
      xn.rows() - 1,
      static_cast<Eigen::Index>(std::llround(val_fraction * xn.rows())));
  const Eigen::Index n_train = xn.rows() - n_val;
  Eigen::MatrixXd xt(n_train, xn.cols()), yt(n_train, yn.cols());
  Eigen::MatrixXd xv(n_val, xn.cols()), yv(n_val, yn.cols());
  for (Eigen::Index i = 0; i < n_train; ++i) {
    xt.row(i) = xn.row(order[i]);
    yt.row(i) = yn.row(order[i]);
  }
  for (Eigen::Index i = 0; i < n_val; ++i) {
    xv.row(i) = xn.row(order[n_train + i]);
    yv.row(i) = yn.row(order[n_train + i]);
  }

  // Adam.
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    mw.push_back(Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols()));
    vw.push_back(Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols()));
    mb.push_back(Eigen::VectorXd::Zero(b_[l].size()));
    vb.push_back(Eigen::VectorXd::Zero(b_[l].size()));
  }

  long step = 0;
  std::vector<Eigen::Index> batch_order(n_train);
  std::iota(batch_order.begin(), batch_order.end(), 0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(batch_order.begin(), batch_order.end(), rng);
    for (Eigen::Index off = 0; off < n_train; off += batch_size) {
      const Eigen::Index bs =
          std::min<Eigen::Index>(batch_size, n_train - off);
      Eigen::MatrixXd xb(bs, xt.cols()), yb(bs, yt.cols());
      for (Eigen::Index i = 0; i < bs; ++i) {
        xb.row(i) = xt.row(batch_order[off + i]);
        yb.row(i) = yt.row(batch_order[off + i]);
      }
      std::vector<Eigen::MatrixXd> gw;
      std::vector<Eigen::VectorXd> gb;
      const double loss = loss_and_gradients(xb, yb, &gw, &gb);
      if (!std::isfinite(loss))
        throw std::runtime_error("train_mlp: loss diverged at epoch " +
                                 std::to_string(epoch));
      if (lr == 0.0) continue;
      ++step;
      const double bc1 = 1.0 - std::pow(beta1, step);
      const double bc2 = 1.0 - std::pow(beta2, step);
      for (std::size_t l = 0; l < w_.size(); ++l) {
        mw[l] = beta1 * mw[l] + (1.0 - beta1) * gw[l];
        vw[l] = beta2 * vw[l].array().matrix() +
                (1.0 - beta2) * gw[l].array().square().matrix();
        w_[l].array() -= lr * (mw[l].array() / bc1) /
                         ((vw[l].array() / bc2).sqrt() + eps);
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * gb[l];
        vb[l] = beta2 * vb[l].array().matrix() +
                (1.0 - beta2) * gb[l].array().square().matrix();
        b_[l].array() -= lr * (mb[l].array() / bc1) /
                         ((vb[l].array() / bc2).sqrt() + eps);
      }
    }
  }
  final_train_loss_ = loss_and_gradients(xt, yt, nullptr, nullptr);
  final_val_loss_ =
      n_val > 0 ? loss_and_gradients(xv, yv, nullptr, nullptr) : 0.0;
}

MLPForward train_mlp(const Dataset& dataset, const TrainConfig& cfg) {
  const auto [x, y] = design_matrices(dataset);
  if (x.rows() < 100)
    throw std::invalid_argument("train_mlp: need at least 100 valid rows");
  MLPForward model(static_cast<int>(x.cols()), cfg.seed);
  model.fit(x, y, cfg.learning_rate, cfg.epochs, cfg.batch_size, cfg.seed,
            cfg.validation_fraction, true);
  return model;
}

MLPForward finetune_mlp(const MLPForward& model, const Dataset& real,
                        const TrainConfig& cfg) {
  const auto [x, y] = design_matrices(real);
  if (x.cols() != model.in_dim_)
    throw std::invalid_argument("finetune_mlp: input dimension mismatch");
  MLPForward out = model;
  out.fit(x, y, cfg.finetune_learning_rate, cfg.epochs, cfg.batch_size,
          cfg.seed, cfg.validation_fraction, false);
  return out;
}

std::string MLPForward::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "mlp";
  j["in_dim"] = in_dim_;
  j["in_mean"] = vector_to_json(in_norm_.mean);
  j["in_std"] = vector_to_json(in_norm_.std);
  j["out_mean"] = vector_to_json(out_norm_.mean);
  j["out_std"] = vector_to_json(out_norm_.std);
  j["final_train_loss"] = final_train_loss_;
  j["final_val_loss"] = final_val_loss_;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (const auto& w : w_) j["weights"].push_back(matrix_to_json(w));
  for (const auto& b : b_) j["biases"].push_back(vector_to_json(b));
  return j.dump();
}

MLPForward MLPForward::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("kind") != "mlp" || j.at("schema_version") != 1)
    throw std::runtime_error("MLPForward::from_json: wrong model file");
  MLPForward m(j.at("in_dim").get<int>());
  m.in_norm_.mean = vector_from_json(j.at("in_mean"));
  m.in_norm_.std = vector_from_json(j.at("in_std"));
  m.out_norm_.mean = vector_from_json(j.at("out_mean"));
  m.out_norm_.std = vector_from_json(j.at("out_std"));
  m.final_train_loss_ = j.at("final_train_loss").get<double>();
  m.final_val_loss_ = j.at("final_val_loss").get<double>();
  m.w_.clear();
  m.b_.clear();
  for (const auto& w : j.at("weights")) m.w_.push_back(matrix_from_json(w));
  for (const auto& b : j.at("biases")) m.b_.push_back(vector_from_json(b));
  return m;
}

}  // namespace dyncable
