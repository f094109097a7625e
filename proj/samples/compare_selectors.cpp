// Picks keyframes on one window with each baseline and prints Q.
//
//   compare_selectors [skeleton.asf motion.amc]
//
// With no arguments a procedural walk is used.

#include "sidql/sidql.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace sidql;

static std::string read(const char* path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int main(int argc, char** argv) {
  try {
    const Skeleton sk = parse_asf(argc > 2 ? read(argv[1]) : cmu_style_asf());
    const RawMotion raw = argc > 2 ? parse_amc(read(argv[2]), sk) : synth_clip(sk, ClipKind::Walk, 480, 1);
    const auto windows = preprocess(forward_kinematics(sk, raw), PreprocessConfig{});
    const SphericalSequence sph = sequence_to_spherical(windows.front().motion);
    std::cout << windows.size() << " windows, using the first: " << sph.frames() << " frames, " << sph.joints() << " joints\n";
    for (std::size_t w : {5, 10, 15}) {
      const KeyframeSet picks[] = {select_random(sph.frames(), w, 0), select_uniform(sph.frames(), w), select_greedy(sph, w)};
      const char* names[] = {"rc", "uc", "greedy"};
      for (int i = 0; i < 3; ++i) {
        std::cout << "W=" << w << " " << names[i] << " Q=" << q_error(sph, picks[i]) << " keys";
        for (auto k : picks[i].indices()) std::cout << ' ' << k;
        std::cout << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
