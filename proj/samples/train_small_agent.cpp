// Trains a small agent on procedural windows and compares it with the
// baselines on held-out ones. Takes about a minute.

#include "sidql/sidql.hpp"

#include <iostream>

using namespace sidql;

int main() {
  const Skeleton sk = parse_asf(cmu_style_asf());
  std::vector<SphericalSequence> train_set, test_set;
  for (const auto& clip : synth_corpus(sk, 12, 4, 3)) {
    const bool held_out = clip.name.rfind("s01_", 0) == 0 || clip.name.rfind("s02_", 0) == 0;
    for (const auto& w : preprocess(forward_kinematics(sk, clip.motion), PreprocessConfig{}))
      (held_out ? test_set : train_set).push_back(sequence_to_spherical(w.motion));
  }

  TrainConfig cfg;
  cfg.hidden1 = 256;
  cfg.hidden2 = 128;
  cfg.episodes = 3000;
  TrainHooks hooks;
  hooks.on_update = [](const UpdateRecord& u) {
    if (u.global_step % 1000 == 0) std::cout << "step " << u.global_step << " loss " << u.loss << " eps " << u.epsilon << "\n";
  };
  const TrainResult r = train(train_set, cfg, {}, hooks);
  std::cout << train_set.size() << " training windows, " << r.updates.size() << " updates\n";

  auto mean = [&](const Selector& s) { return test_mean_angle_error(test_set, s).mean; };
  std::cout << "W=5 on " << test_set.size() << " held-out windows\n"
            << "  rc     " << mean([](const SphericalSequence& s) { return select_random(s.frames(), 5, 7); }) << "\n"
            << "  uc     " << mean([](const SphericalSequence& s) { return select_uniform(s.frames(), 5); }) << "\n"
            << "  greedy " << mean([](const SphericalSequence& s) { return select_greedy(s, 5); }) << "\n"
            << "  agent  " << mean([&](const SphericalSequence& s) { return infer_keyframes(r.state.main, s, 5).keys; }) << "\n";
}
