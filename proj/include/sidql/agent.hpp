#pragma once

#include "sidql/baselines.hpp"
#include "sidql/dataset.hpp"
#include "sidql/error.hpp"
#include "sidql/keyframes.hpp"
#include "sidql/metrics.hpp"
#include "sidql/neural.hpp"
#include "sidql/replay.hpp"
#include "sidql/rng.hpp"
#include "sidql/spherical.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sidql {

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t batch_size = 256;
  std::size_t memory_capacity = 10000;
  std::size_t train_interval = 100;   // environment steps between updates
  std::size_t target_interval = 100;  // updates between target refreshes
  double gamma = 0.5;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;  // of all environment steps
  std::size_t episodes = 2000;
  std::size_t keyframes = 5;
  std::size_t hidden1 = 1024;
  std::size_t hidden2 = 512;
  double huber_delta = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const {
    return {{"learning_rate", learning_rate},
            {"batch_size", batch_size},
            {"memory_capacity", memory_capacity},
            {"train_interval", train_interval},
            {"target_interval", target_interval},
            {"gamma", gamma},
            {"epsilon_start", epsilon_start},
            {"epsilon_end", epsilon_end},
            {"epsilon_decay_fraction", epsilon_decay_fraction},
            {"episodes", episodes},
            {"keyframes", keyframes},
            {"hidden1", hidden1},
            {"hidden2", hidden2},
            {"huber_delta", huber_delta},
            {"adam_beta1", adam_beta1},
            {"adam_beta2", adam_beta2},
            {"adam_eps", adam_eps},
            {"seed", seed}};
  }

  /// Missing keys keep their defaults; unknown keys are rejected.
  static TrainConfig from_json(const nlohmann::json& j) {
    TrainConfig c;
    if (!j.is_object()) throw Error(Errc::InvalidArgument, "config must be a JSON object");
    try {
      for (const auto& [key, value] : j.items()) {
        if (key == "learning_rate") c.learning_rate = value.get<double>();
        else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
        else if (key == "memory_capacity") c.memory_capacity = value.get<std::size_t>();
        else if (key == "train_interval") c.train_interval = value.get<std::size_t>();
        else if (key == "target_interval") c.target_interval = value.get<std::size_t>();
        else if (key == "gamma") c.gamma = value.get<double>();
        else if (key == "epsilon_start") c.epsilon_start = value.get<double>();
        else if (key == "epsilon_end") c.epsilon_end = value.get<double>();
        else if (key == "epsilon_decay_fraction") c.epsilon_decay_fraction = value.get<double>();
        else if (key == "episodes") c.episodes = value.get<std::size_t>();
        else if (key == "keyframes") c.keyframes = value.get<std::size_t>();
        else if (key == "hidden1") c.hidden1 = value.get<std::size_t>();
        else if (key == "hidden2") c.hidden2 = value.get<std::size_t>();
        else if (key == "huber_delta") c.huber_delta = value.get<double>();
        else if (key == "adam_beta1") c.adam_beta1 = value.get<double>();
        else if (key == "adam_beta2") c.adam_beta2 = value.get<double>();
        else if (key == "adam_eps") c.adam_eps = value.get<double>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else throw Error(Errc::InvalidArgument, "unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::InvalidArgument, std::string("config: ") + e.what());
    }
    c.validate();
    return c;
  }

  void validate() const {
    auto bad = [](const std::string& what) { return Error(Errc::InvalidArgument, "config: " + what); };
    if (!(learning_rate > 0)) throw bad("learning_rate must be positive");
    if (batch_size == 0 || memory_capacity == 0 || train_interval == 0 || target_interval == 0) throw bad("sizes and intervals must be positive");
    if (batch_size > memory_capacity) throw bad("batch_size exceeds memory_capacity");
    if (!(gamma >= 0 && gamma <= 1)) throw bad("gamma must lie in [0, 1]");
    if (!(epsilon_start >= 0 && epsilon_start <= 1 && epsilon_end >= 0 && epsilon_end <= 1)) throw bad("epsilon must lie in [0, 1]");
    if (!(epsilon_decay_fraction > 0 && epsilon_decay_fraction <= 1)) throw bad("epsilon_decay_fraction must lie in (0, 1]");
    if (keyframes < 2) throw bad("keyframes must be at least 2");
    if (hidden1 == 0 || hidden2 == 0) throw bad("hidden sizes must be positive");
    if (!(huber_delta > 0)) throw bad("huber_delta must be positive");
  }

  std::string hash() const { return detail::hex64(detail::fnv1a(to_json().dump())); }
};

/// Per-frame features in the network input.
inline constexpr double kRateClamp = 10.0;

inline std::size_t state_size(std::size_t frames, std::size_t joints) { return frames * (4 * joints + 1); }

/// Index of frame n's mask bit in the encoded state.
inline std::size_t mask_slot(std::size_t n, std::size_t joints) { return n * (4 * joints + 1) + 4 * joints; }

/// Encoding with every mask bit cleared. Per frame: for each joint
/// [theta / pi, wrap(phi) / pi, clamp(theta_dot) / 10, clamp(phi_dot) / 10],
/// then the frame's mask bit.
inline VectorXd encode_features(const SphericalSequence& sph) {
  const std::size_t n_frames = sph.frames(), m_joints = sph.joints();
  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(state_size(n_frames, m_joints)));
  Eigen::Index i = 0;
  for (std::size_t n = 0; n < n_frames; ++n) {
    for (std::size_t m = 0; m < m_joints; ++m) {
      const std::size_t k = sph.at(n, m);
      x[i++] = sph.theta[k] / kPi;
      x[i++] = wrap_angle(sph.phi[k]) / kPi;
      x[i++] = std::clamp(sph.theta_dot[k], -kRateClamp, kRateClamp) / kRateClamp;
      x[i++] = std::clamp(sph.phi_dot[k], -kRateClamp, kRateClamp) / kRateClamp;
    }
    ++i;
  }
  return x;
}

inline void set_mask(VectorXd& x, const KeyframeSet& keys, std::size_t joints) {
  for (auto k : keys.indices()) x[static_cast<Eigen::Index>(mask_slot(k, joints))] = 1.0;
}

inline VectorXd encode_state(const SphericalSequence& sph, const KeyframeSet& keys) {
  if (keys.frame_count() != sph.frames()) throw Error(Errc::ShapeMismatch, "keyframe set does not match the sequence length");
  VectorXd x = encode_features(sph);
  set_mask(x, keys, sph.joints());
  return x;
}

inline std::vector<std::size_t> valid_actions(const KeyframeSet& keys) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < keys.frame_count(); ++f)
    if (!keys.contains(f)) out.push_back(f);
  return out;
}

/// Highest output among non-keyframes; ties go to the lowest frame.
inline std::size_t masked_argmax(const VectorXd& q, const KeyframeSet& keys) {
  if (static_cast<std::size_t>(q.size()) != keys.frame_count()) throw Error(Errc::ShapeMismatch, "network output size differs from the frame count");
  std::size_t best = keys.frame_count();
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < keys.frame_count(); ++f) {
    if (keys.contains(f)) continue;
    if (best == keys.frame_count() || q[static_cast<Eigen::Index>(f)] > best_q) {
      best = f;
      best_q = q[static_cast<Eigen::Index>(f)];
    }
  }
  if (best == keys.frame_count()) throw Error(Errc::NoValidAction, "every frame is already a keyframe");
  return best;
}

/// Epsilon-greedy choice given the network's outputs for the current state.
inline std::size_t act(const VectorXd& q, const KeyframeSet& keys, double epsilon, Rng& rng) {
  const auto valid = valid_actions(keys);
  if (valid.empty()) throw Error(Errc::NoValidAction, "every frame is already a keyframe");
  if (uniform01(rng) < epsilon) return valid[static_cast<std::size_t>(uniform_index(rng, valid.size()))];
  return masked_argmax(q, keys);
}

inline std::size_t act(const QNetwork& net, const SphericalSequence& sph, const KeyframeSet& keys, double epsilon, Rng& rng) {
  return act(net.forward(encode_state(sph, keys)), keys, epsilon, rng);
}

/// r for a terminal step, otherwise r + gamma * max over valid next actions.
inline double td_target(double reward, bool terminal, const VectorXd& next_q, const KeyframeSet& next_keys, double gamma) {
  if (terminal) return reward;
  return reward + gamma * next_q[static_cast<Eigen::Index>(masked_argmax(next_q, next_keys))];
}

/// First-layer product for one sequence, updated as keyframes are added.
/// The feature part is multiplied once; each mask bit then adds one column.
class PolicyCache {
 public:
  PolicyCache(const QNetwork& net, const SphericalSequence& sph) : net_(&net), joints_(sph.joints()) {
    if (net.input_size() != state_size(sph.frames(), sph.joints()))
      throw Error(Errc::ShapeMismatch, "network expects " + std::to_string(net.input_size()) + " inputs, sequence encodes to " +
                                           std::to_string(state_size(sph.frames(), sph.joints())));
    if (net.output_size() != sph.frames()) throw Error(Errc::ShapeMismatch, "network output size differs from the frame count");
    z1_ = net.params().w[0] * encode_features(sph) + net.params().b[0];
  }

  void add(std::size_t frame) { z1_ += net_->params().w[0].col(static_cast<Eigen::Index>(mask_slot(frame, joints_))); }

  VectorXd q() const { return net_->forward_from_hidden(z1_); }

 private:
  const QNetwork* net_;
  std::size_t joints_;
  VectorXd z1_;
};

struct Inference {
  KeyframeSet keys;
  double seconds = 0.0;
  std::size_t evaluations = 0;
};

/// W - 2 greedy steps of the trained policy from {0, N - 1}.
inline Inference infer_keyframes(const QNetwork& net, const SphericalSequence& sph, std::size_t w) {
  detail::check_w(sph.frames(), w);
  const auto start = std::chrono::steady_clock::now();
  Inference out{KeyframeSet::endpoints(sph.frames())};
  if (w > 2) {
    PolicyCache cache(net, sph);
    for (auto k : out.keys.indices()) cache.add(k);
    while (out.keys.size() < w) {
      const std::size_t a = masked_argmax(cache.q(), out.keys);
      ++out.evaluations;
      out.keys = out.keys.with(a);
      cache.add(a);
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Stored step. States are kept as (sequence, keyframe set) and encoded when
/// sampled; storing the dense vectors would need N(4M+1) doubles each.
struct Transition {
  std::size_t sequence = 0;
  KeyframeSet keys;
  std::size_t action = 0;
  double reward = 0.0;
  KeyframeSet next_keys;
  bool terminal = false;
};

struct UpdateRecord {
  std::uint64_t global_step = 0;
  std::uint64_t episode = 0;
  double loss = 0.0;
  double episode_reward = 0.0;  // accumulated in the current episode so far
  double epsilon = 0.0;
};

struct EpisodeRecord {
  std::uint64_t episode = 0;
  std::size_t sequence = 0;
  double reward = 0.0;
  double q0 = 0.0;
  double q_final = 0.0;
  std::vector<std::size_t> keyframes;
};

/// Everything needed to continue training later.
struct AgentState {
  QNetwork main, target;
  AdamState adam;
  std::uint64_t global_step = 0;
  std::uint64_t episodes = 0;
  std::uint64_t updates = 0;
  std::string rng_state;  // serialised engine, empty before the first run
};

struct TrainResult {
  AgentState state;
  std::vector<UpdateRecord> updates;
  std::vector<EpisodeRecord> episodes;
  std::vector<std::size_t> skipped;  // degenerate sequences left out
};

inline double epsilon_at(const TrainConfig& cfg, std::uint64_t step, std::uint64_t total_steps) {
  const double horizon = std::max(1.0, cfg.epsilon_decay_fraction * static_cast<double>(total_steps));
  const double t = std::min(1.0, static_cast<double>(step) / horizon);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * t;
}

inline AgentState fresh_agent(const TrainConfig& cfg, std::size_t frames, std::size_t joints) {
  AgentState s;
  s.main = QNetwork({state_size(frames, joints), cfg.hidden1, cfg.hidden2, frames}, cfg.seed);
  s.target = s.main;
  s.adam = make_adam(s.main, cfg.learning_rate);
  s.adam.beta1 = cfg.adam_beta1;
  s.adam.beta2 = cfg.adam_beta2;
  s.adam.eps = cfg.adam_eps;
  return s;
}

struct TrainHooks {
  std::function<void(const UpdateRecord&)> on_update;
  std::function<void(const EpisodeRecord&)> on_episode;
};

/// Deep Q-learning over keyframe choices. Runs cfg.episodes episodes on top
/// of `resume` (or a fresh agent). Each episode draws a sequence uniformly
/// with replacement and adds W - 2 keyframes.
inline TrainResult train(const std::vector<SphericalSequence>& dataset, const TrainConfig& cfg, std::optional<AgentState> resume = {},
                         const TrainHooks& hooks = {}) {
  cfg.validate();
  if (dataset.empty()) throw Error(Errc::EmptyDataset, "no training sequences");
  const std::size_t n_frames = dataset.front().frames(), m_joints = dataset.front().joints();
  if (cfg.keyframes > n_frames) throw Error(Errc::InvalidW, "keyframe count exceeds the window length");

  TrainResult result;
  std::vector<std::size_t> usable;
  std::vector<double> q0(dataset.size(), 0.0);
  std::vector<VectorXd> features(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset[i];
    if (s.frames() != n_frames || s.joints() != m_joints) throw Error(Errc::ShapeMismatch, "training sequences differ in shape");
    q0[i] = q_error(s, KeyframeSet::endpoints(n_frames));
    if (!(q0[i] > kDegenerateError)) {
      result.skipped.push_back(i);
      continue;
    }
    usable.push_back(i);
    features[i] = encode_features(s);
  }
  if (usable.empty()) throw Error(Errc::EmptyDataset, "every training sequence is degenerate");

  AgentState st = resume ? std::move(*resume) : fresh_agent(cfg, n_frames, m_joints);
  if (st.main.input_size() != state_size(n_frames, m_joints) || st.main.output_size() != n_frames)
    throw Error(Errc::ShapeMismatch, "checkpoint network does not fit the training data");
  st.adam.lr = cfg.learning_rate;
  Rng rng(cfg.seed);
  if (!st.rng_state.empty()) {
    std::istringstream in(st.rng_state);
    in >> rng;
  }

  auto encode = [&](std::size_t seq, const KeyframeSet& keys) {
    VectorXd x = features[seq];
    set_mask(x, keys, m_joints);
    return x;
  };

  ReplayMemory<Transition> memory(cfg.memory_capacity);
  const std::size_t steps_per_episode = cfg.keyframes - 2;
  const std::uint64_t total_steps = (st.episodes + cfg.episodes) * steps_per_episode;

  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    const std::size_t seq = usable[static_cast<std::size_t>(uniform_index(rng, usable.size()))];
    const SphericalSequence& sph = dataset[seq];
    EpisodeScorer scorer(sph, q0[seq]);
    EpisodeRecord ep{st.episodes, seq, 0.0, q0[seq], q0[seq], {}};
    std::optional<PolicyCache> policy;
    std::uint64_t policy_version = std::numeric_limits<std::uint64_t>::max();

    for (std::size_t i = 0; i < steps_per_episode; ++i) {
      const double eps = epsilon_at(cfg, st.global_step, total_steps);
      const KeyframeSet before = scorer.keys();
      const auto valid = valid_actions(before);
      std::size_t action;
      if (uniform01(rng) < eps) {
        action = valid[static_cast<std::size_t>(uniform_index(rng, valid.size()))];
      } else {
        if (policy_version != st.updates) {
          policy.emplace(st.main, sph);
          for (auto k : before.indices()) policy->add(k);
          policy_version = st.updates;
        }
        action = masked_argmax(policy->q(), before);
      }
      const double reward = scorer.add(action);
      if (policy && policy_version == st.updates) policy->add(action);
      ep.reward += reward;
      const bool terminal = i + 1 == steps_per_episode;
      memory.push({seq, before, action, reward, scorer.keys(), terminal});
      ++st.global_step;

      if (memory.size() >= cfg.batch_size && st.global_step % cfg.train_interval == 0) {
        const auto picked = memory.sample(cfg.batch_size, rng);
        const auto b = static_cast<Eigen::Index>(picked.size());
        Batch batch;
        batch.inputs.resize(static_cast<Eigen::Index>(state_size(n_frames, m_joints)), b);
        MatrixXd next(batch.inputs.rows(), b);
        for (Eigen::Index j = 0; j < b; ++j) {
          const Transition& t = *picked[static_cast<std::size_t>(j)];
          batch.inputs.col(j) = encode(t.sequence, t.keys);
          next.col(j) = t.terminal ? features[t.sequence] : encode(t.sequence, t.next_keys);
        }
        const MatrixXd next_q = st.target.forward_batch(next);
        for (Eigen::Index j = 0; j < b; ++j) {
          const Transition& t = *picked[static_cast<std::size_t>(j)];
          batch.actions.push_back(t.action);
          batch.targets.push_back(td_target(t.reward, t.terminal, next_q.col(j), t.next_keys, cfg.gamma));
        }
        const double loss = backward_and_step(st.main, st.adam, batch, cfg.huber_delta);
        ++st.updates;
        if (st.updates % cfg.target_interval == 0) st.target = st.main;
        UpdateRecord rec{st.global_step, st.episodes, loss, ep.reward, eps};
        result.updates.push_back(rec);
        if (hooks.on_update) hooks.on_update(rec);
      }
    }
    ep.q_final = scorer.q();
    ep.keyframes = scorer.keys().indices();
    ++st.episodes;
    result.episodes.push_back(ep);
    if (hooks.on_episode) hooks.on_episode(ep);
  }
  std::ostringstream out;
  out << rng;
  st.rng_state = out.str();
  result.state = std::move(st);
  return result;
}

inline Checkpoint to_checkpoint(const AgentState& s, const TrainConfig& cfg) {
  Checkpoint ck{s.main, s.adam, s.target, {}};
  ck.extra["global_step"] = std::to_string(s.global_step);
  ck.extra["episodes"] = std::to_string(s.episodes);
  ck.extra["updates"] = std::to_string(s.updates);
  ck.extra["keyframes"] = std::to_string(cfg.keyframes);
  ck.extra["gamma"] = detail::format_double(cfg.gamma);
  ck.extra["config_hash"] = cfg.hash();
  if (!s.rng_state.empty()) ck.extra["rng"] = s.rng_state;
  return ck;
}

inline AgentState from_checkpoint(const Checkpoint& ck) {
  AgentState s;
  s.main = ck.net;
  s.target = ck.target ? *ck.target : ck.net;
  s.adam = ck.adam;
  auto counter = [&](const char* key) -> std::uint64_t {
    auto it = ck.extra.find(key);
    if (it == ck.extra.end()) return 0;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw Error(Errc::CorruptCheckpoint, std::string("bad counter '") + key + "'");
    }
  };
  s.global_step = counter("global_step");
  s.episodes = counter("episodes");
  s.updates = counter("updates");
  if (auto it = ck.extra.find("rng"); it != ck.extra.end()) s.rng_state = it->second;
  return s;
}

}  // namespace sidql
