#pragma once

#include "sidql/dataset.hpp"
#include "sidql/error.hpp"
#include "sidql/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sidql {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Weights and biases of the three affine layers. Gradients and Adam
/// moments use the same layout.
struct Params {
  std::array<MatrixXd, 3> w;  // w[l] is out x in
  std::array<VectorXd, 3> b;

  static Params zeros_like(const Params& p) {
    Params z;
    for (int l = 0; l < 3; ++l) {
      z.w[l] = MatrixXd::Zero(p.w[l].rows(), p.w[l].cols());
      z.b[l] = VectorXd::Zero(p.b[l].size());
    }
    return z;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (int l = 0; l < 3; ++l) n += static_cast<std::size_t>(w[l].size() + b[l].size());
    return n;
  }

  bool all_finite() const {
    for (int l = 0; l < 3; ++l)
      if (!w[l].allFinite() || !b[l].allFinite()) return false;
    return true;
  }

  /// Visits every scalar in declaration order: w0, b0, w1, b1, w2, b2, each
  /// in storage (column-major) order.
  template <class F>
  void for_each(F&& f) {
    for (int l = 0; l < 3; ++l) {
      for (Eigen::Index i = 0; i < w[l].size(); ++i) f(w[l].data()[i]);
      for (Eigen::Index i = 0; i < b[l].size(); ++i) f(b[l].data()[i]);
    }
  }
};

struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  Params m, v;
};

/// Two hidden rectifier layers and a linear output layer.
class QNetwork {
 public:
  using Shape = std::array<std::size_t, 4>;  // input, hidden 1, hidden 2, output

  QNetwork() = default;

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  QNetwork(const Shape& shape, std::uint64_t seed) : shape_(shape), seed_(seed) {
    for (auto s : shape)
      if (s == 0) throw Error(Errc::InvalidArgument, "layer sizes must be positive");
    Rng rng(seed);
    for (int l = 0; l < 3; ++l) {
      const auto in = static_cast<Eigen::Index>(shape[l]), out = static_cast<Eigen::Index>(shape[l + 1]);
      const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
      p_.w[l].resize(out, in);
      for (Eigen::Index i = 0; i < p_.w[l].size(); ++i) p_.w[l].data()[i] = uniform(rng, -bound, bound);
      p_.b[l] = VectorXd::Zero(out);
    }
  }

  const Shape& shape() const { return shape_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t input_size() const { return shape_[0]; }
  std::size_t output_size() const { return shape_[3]; }
  std::size_t parameter_count() const { return p_.size(); }
  Params& params() { return p_; }
  const Params& params() const { return p_; }

  VectorXd forward(const VectorXd& x) const {
    check_input(x.size());
    return forward_from_hidden(p_.w[0] * x + p_.b[0]);
  }

  /// Forward pass given the first layer's pre-activation. Lets callers
  /// update that product incrementally when only a few inputs change.
  VectorXd forward_from_hidden(const VectorXd& z1) const {
    const VectorXd a2 = (p_.w[1] * z1.cwiseMax(0.0) + p_.b[1]).cwiseMax(0.0);
    return p_.w[2] * a2 + p_.b[2];
  }

  /// Columns of `x` are inputs; columns of the result are outputs.
  MatrixXd forward_batch(const MatrixXd& x) const {
    check_input(x.rows());
    const MatrixXd a1 = ((p_.w[0] * x).colwise() + p_.b[0]).cwiseMax(0.0);
    const MatrixXd a2 = ((p_.w[1] * a1).colwise() + p_.b[1]).cwiseMax(0.0);
    return (p_.w[2] * a2).colwise() + p_.b[2];
  }

 private:
  void check_input(Eigen::Index n) const {
    if (static_cast<std::size_t>(n) != shape_[0])
      throw Error(Errc::ShapeMismatch, "network expects " + std::to_string(shape_[0]) + " inputs, got " + std::to_string(n));
  }

  Shape shape_{};
  std::uint64_t seed_ = 0;
  Params p_;
};

struct HuberValue {
  double loss;
  double grad;  // d loss / d pred
};

inline HuberValue huber(double pred, double target, double delta = 1.0) {
  const double e = pred - target;
  if (std::abs(e) <= delta) return {0.5 * e * e, e};
  return {delta * (std::abs(e) - 0.5 * delta), e > 0 ? delta : -delta};
}

inline AdamState make_adam(const QNetwork& net, double lr = 0.01) {
  AdamState a;
  a.lr = lr;
  a.m = Params::zeros_like(net.params());
  a.v = Params::zeros_like(net.params());
  return a;
}

/// Training batch: column j of `inputs` was answered with `actions[j]`, whose
/// output should move toward `targets[j]`.
struct Batch {
  MatrixXd inputs;
  std::vector<std::size_t> actions;
  std::vector<double> targets;
};

struct Gradient {
  double loss = 0.0;  // mean Huber loss over the batch
  Params grad;
};

/// Exact gradient of the mean Huber loss; only the chosen action's output
/// of each example carries loss.
inline Gradient gradients(const QNetwork& net, const Batch& batch, double delta = 1.0) {
  const auto cols = batch.inputs.cols();
  if (cols == 0) throw Error(Errc::InvalidArgument, "empty training batch");
  if (batch.actions.size() != static_cast<std::size_t>(cols) || batch.targets.size() != static_cast<std::size_t>(cols))
    throw Error(Errc::ShapeMismatch, "batch inputs, actions and targets differ in length");
  if (static_cast<std::size_t>(batch.inputs.rows()) != net.input_size())
    throw Error(Errc::ShapeMismatch, "batch input size does not match the network");
  const Params& p = net.params();
  const MatrixXd& x = batch.inputs;
  const MatrixXd z1 = (p.w[0] * x).colwise() + p.b[0];
  const MatrixXd a1 = z1.cwiseMax(0.0);
  const MatrixXd z2 = (p.w[1] * a1).colwise() + p.b[1];
  const MatrixXd a2 = z2.cwiseMax(0.0);
  const MatrixXd q = (p.w[2] * a2).colwise() + p.b[2];

  Gradient g;
  MatrixXd dq = MatrixXd::Zero(q.rows(), cols);
  const double inv_b = 1.0 / static_cast<double>(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto a = static_cast<Eigen::Index>(batch.actions[static_cast<std::size_t>(j)]);
    if (a >= q.rows()) throw Error(Errc::ShapeMismatch, "action index outside the output layer");
    const HuberValue h = huber(q(a, j), batch.targets[static_cast<std::size_t>(j)], delta);
    g.loss += h.loss * inv_b;
    dq(a, j) = h.grad * inv_b;
  }
  g.grad.w[2] = dq * a2.transpose();
  g.grad.b[2] = dq.rowwise().sum();
  const MatrixXd dz2 = (p.w[2].transpose() * dq).cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  g.grad.w[1] = dz2 * a1.transpose();
  g.grad.b[1] = dz2.rowwise().sum();
  const MatrixXd dz1 = (p.w[1].transpose() * dz2).cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  g.grad.w[0] = dz1 * x.transpose();
  g.grad.b[0] = dz1.rowwise().sum();
  return g;
}

inline void adam_step(Params& p, AdamState& s, const Params& g) {
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.eps);
  };
  for (int l = 0; l < 3; ++l) {
    update(p.w[l], s.m.w[l], s.v.w[l], g.w[l]);
    update(p.b[l], s.m.b[l], s.v.b[l], g.b[l]);
  }
}

/// One Adam step on the mean Huber loss. Returns the loss before the step.
inline double backward_and_step(QNetwork& net, AdamState& adam, const Batch& batch, double delta = 1.0) {
  Gradient g = gradients(net, batch, delta);
  if (!std::isfinite(g.loss) || !g.grad.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite gradient at Adam step " << adam.step + 1 << " (loss " << g.loss << ", batch " << batch.actions.size() << ")";
    throw Error(Errc::NonFiniteGradient, msg.str());
  }
  adam_step(net.params(), adam, g.grad);
  return g.loss;
}

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  QNetwork net;
  AdamState adam;
  std::optional<QNetwork> target;
  std::map<std::string, std::string> extra;  // counters and config echoes
};

namespace detail {

inline void put_params(std::ostream& out, const Params& p) {
  for (int l = 0; l < 3; ++l) {
    for (Eigen::Index i = 0; i < p.w[l].size(); ++i) put_f64_le(out, p.w[l].data()[i]);
    for (Eigen::Index i = 0; i < p.b[l].size(); ++i) put_f64_le(out, p.b[l].data()[i]);
  }
}

inline void get_params(std::istream& in, Params& p) {
  p.for_each([&](double& v) {
    if (!get_f64_le(in, v)) throw Error(Errc::CorruptCheckpoint, "checkpoint body is truncated");
  });
}

}  // namespace detail

/// Text header (magic, version, shape, seed, Adam settings, extra keys)
/// followed by little-endian float64 blocks: parameters, Adam first and
/// second moments, then the target network when present.
inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  const auto& s = ck.net.shape();
  out << "SIDQL-QNET " << kCheckpointVersion << "\n";
  out << "shape " << s[0] << ' ' << s[1] << ' ' << s[2] << ' ' << s[3] << "\n";
  out << "seed " << ck.net.seed() << "\n";
  out << "adam " << detail::format_double(ck.adam.lr) << ' ' << detail::format_double(ck.adam.beta1) << ' '
      << detail::format_double(ck.adam.beta2) << ' ' << detail::format_double(ck.adam.eps) << ' ' << ck.adam.step << "\n";
  out << "target " << (ck.target ? 1 : 0) << "\n";
  for (const auto& [k, v] : ck.extra) out << "extra " << k << ' ' << v << "\n";
  out << "end_header\n";
  detail::put_params(out, ck.net.params());
  detail::put_params(out, ck.adam.m);
  detail::put_params(out, ck.adam.v);
  if (ck.target) detail::put_params(out, ck.target->params());
  if (!out) throw Error(Errc::Io, "failed writing " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  auto corrupt = [&](const std::string& why) { return Error(Errc::CorruptCheckpoint, path.string() + ": " + why); };
  std::string line;
  if (!std::getline(in, line) || line.rfind("SIDQL-QNET ", 0) != 0) throw corrupt("missing magic");
  int version = 0;
  try {
    version = std::stoi(line.substr(11));
  } catch (const std::exception&) {
    throw corrupt("bad version field");
  }
  if (version != kCheckpointVersion)
    throw Error(Errc::VersionMismatch, path.string() + ": checkpoint version " + std::to_string(version) + ", expected " +
                                           std::to_string(kCheckpointVersion));
  QNetwork::Shape shape{};
  std::uint64_t seed = 0;
  Checkpoint ck;
  bool has_shape = false, has_target = false, done = false;
  while (std::getline(in, line)) {
    if (line == "end_header") {
      done = true;
      break;
    }
    std::istringstream s(line);
    std::string key;
    s >> key;
    if (key == "shape") {
      has_shape = static_cast<bool>(s >> shape[0] >> shape[1] >> shape[2] >> shape[3]);
    } else if (key == "seed") {
      s >> seed;
    } else if (key == "adam") {
      if (!(s >> ck.adam.lr >> ck.adam.beta1 >> ck.adam.beta2 >> ck.adam.eps >> ck.adam.step)) throw corrupt("bad adam line");
    } else if (key == "target") {
      int t = 0;
      s >> t;
      has_target = t != 0;
    } else if (key == "extra") {
      std::string k, v;
      s >> k;
      std::getline(s >> std::ws, v);
      ck.extra[k] = v;
    } else {
      throw corrupt("unknown header key '" + key + "'");
    }
  }
  if (!done) throw corrupt("header not terminated");
  if (!has_shape) throw corrupt("missing shape");
  try {
    ck.net = QNetwork(shape, seed);
  } catch (const Error&) {
    throw corrupt("invalid shape");
  }
  ck.adam.m = Params::zeros_like(ck.net.params());
  ck.adam.v = Params::zeros_like(ck.net.params());
  detail::get_params(in, ck.net.params());
  detail::get_params(in, ck.adam.m);
  detail::get_params(in, ck.adam.v);
  if (has_target) {
    ck.target = ck.net;
    detail::get_params(in, ck.target->params());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw corrupt("trailing bytes after the last block");
  return ck;
}

}  // namespace sidql
