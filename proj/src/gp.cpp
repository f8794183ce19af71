#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dyncable/models.hpp"
#include "json.hpp"

namespace dyncable {

namespace {

Eigen::MatrixXd sq_dist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

Eigen::MatrixXd kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       double length_scale) {
  return (-sq_dist(a, b) / (2.0 * length_scale * length_scale))
      .array()
      .exp()
      .matrix();
}

// Log marginal likelihood summed over output columns, or -inf when the
// kernel cannot be factorized even after jitter escalation.
double log_marginal(const Eigen::MatrixXd& k_noisy, const Eigen::MatrixXd& y,
                    Eigen::LLT<Eigen::MatrixXd>* out_llt) {
  Eigen::MatrixXd k = k_noisy;
  double jitter = 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  while (llt.info() != Eigen::Success && jitter < 1e-2) {
    k = k_noisy + jitter * Eigen::MatrixXd::Identity(k.rows(), k.cols());
    llt.compute(k);
    jitter *= 10.0;
  }
  if (llt.info() != Eigen::Success)
    return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd alpha = llt.solve(y);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    logdet += std::log(llt.matrixL()(i, i));
  double lml = 0.0;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    lml += -0.5 * y.col(c).dot(alpha.col(c)) - logdet -
           0.5 * k.rows() * std::log(2.0 * M_PI);
  }
  if (out_llt) *out_llt = llt;
  return lml;
}

}  // namespace

GPForward GPForward::fit(const Eigen::MatrixXd& x_raw,
                         const Eigen::MatrixXd& y_raw, std::uint64_t seed) {
  Eigen::MatrixXd x = x_raw, y = y_raw;
  if (x.rows() > kMaxPoints) {
    std::vector<Eigen::Index> order(x.rows());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc908ull);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd xs(kMaxPoints, x.cols()), ys(kMaxPoints, y.cols());
    for (Eigen::Index i = 0; i < kMaxPoints; ++i) {
      xs.row(i) = x.row(order[i]);
      ys.row(i) = y.row(order[i]);
    }
    x = xs;
    y = ys;
  }

  GPForward gp;
  gp.in_norm_ = Normalizer::fit(x);
  gp.out_norm_ = Normalizer::fit(y);
  gp.x_ = gp.in_norm_.apply(x);
  const Eigen::MatrixXd yn = gp.out_norm_.apply(y);

  const double length_scales[] = {0.3, 0.5, 1.0, 2.0, 4.0};
  const double noises[] = {1e-4, 1e-3, 1e-2, 1e-1};
  double best_lml = -std::numeric_limits<double>::infinity();
  Eigen::LLT<Eigen::MatrixXd> best_llt;
  for (double ls : length_scales) {
    const Eigen::MatrixXd k = kernel(gp.x_, gp.x_, ls);
    for (double sn : noises) {
      const Eigen::MatrixXd kn =
          k + sn * Eigen::MatrixXd::Identity(k.rows(), k.cols());
      Eigen::LLT<Eigen::MatrixXd> llt;
      const double lml = log_marginal(kn, yn, &llt);
      if (lml > best_lml) {
        best_lml = lml;
        best_llt = llt;
        gp.length_scale_ = ls;
        gp.noise_ = sn;
      }
    }
  }
  if (!std::isfinite(best_lml))
    throw std::runtime_error("train_gp: kernel singular for every candidate");
  gp.alpha_ = best_llt.solve(yn);
  return gp;
}

GPForward train_gp(const Dataset& dataset, std::uint64_t seed) {
  const auto [x, y] = design_matrices(dataset);
  if (x.rows() < 50)
    throw std::invalid_argument("train_gp: need at least 50 valid rows");
  return GPForward::fit(x, y, seed);
}

Eigen::MatrixXd GPForward::predict(const Eigen::MatrixXd& inputs) const {
  if (inputs.cols() != x_.cols())
    throw std::invalid_argument("GPForward::predict: dimension mismatch");
  const Eigen::MatrixXd xs = in_norm_.apply(inputs);
  const Eigen::MatrixXd ks = kernel(xs, x_, length_scale_);
  return out_norm_.invert(ks * alpha_);
}

PlanePoint GPForward::predict(const Action& a) const {
  Eigen::MatrixXd x =
      action_to_input(a, static_cast<int>(x_.cols())).transpose();
  const Eigen::MatrixXd y = predict(x);
  return {y(0, 0), y(0, 1)};
}

std::string GPForward::to_json() const {
  auto mat = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [](const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
  };
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "gp";
  j["length_scale"] = length_scale_;
  j["noise"] = noise_;
  j["x"] = mat(x_);
  j["alpha"] = mat(alpha_);
  j["in_mean"] = vec(in_norm_.mean);
  j["in_std"] = vec(in_norm_.std);
  j["out_mean"] = vec(out_norm_.mean);
  j["out_std"] = vec(out_norm_.std);
  return j.dump();
}

GPForward GPForward::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("kind") != "gp" || j.at("schema_version") != 1)
    throw std::runtime_error("GPForward::from_json: wrong model file");
  auto mat = [](const nlohmann::json& v) {
    const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
    const Eigen::Index cols =
        rows > 0 ? static_cast<Eigen::Index>(v[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[r][c].get<double>();
    return m;
  };
  auto vec = [](const nlohmann::json& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v[i].get<double>();
    return out;
  };
  GPForward gp;
  gp.length_scale_ = j.at("length_scale").get<double>();
  gp.noise_ = j.at("noise").get<double>();
  gp.x_ = mat(j.at("x"));
  gp.alpha_ = mat(j.at("alpha"));
  gp.in_norm_.mean = vec(j.at("in_mean"));
  gp.in_norm_.std = vec(j.at("in_std"));
  gp.out_norm_.mean = vec(j.at("out_mean"));
  gp.out_norm_.std = vec(j.at("out_std"));
  return gp;
}

}  // namespace dyncable
