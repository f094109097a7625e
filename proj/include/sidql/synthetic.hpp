#pragma once

#include "sidql/amc.hpp"
#include "sidql/geometry.hpp"
#include "sidql/rng.hpp"
#include "sidql/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace sidql {

/// An ASF skeleton with the 30 bone names and hierarchy of the CMU subjects.
/// Directions, lengths and limits are hand-picked approximations.
inline std::string cmu_style_asf() {
  struct Bone {
    const char* name;
    std::array<double, 3> dir;
    double length;
    std::array<double, 3> axis;
    const char* dof;
  };
  static const Bone bones[] = {
      {"lhipjoint", {0.64, -0.69, 0.34}, 2.40, {0, 0, 0}, ""},
      {"lfemur", {0.34, -0.94, 0.0}, 7.15, {0, 0, 20}, "rx ry rz"},
      {"ltibia", {0.34, -0.94, 0.0}, 7.49, {0, 0, 20}, "rx"},
      {"lfoot", {0.05, -0.25, 0.97}, 2.36, {-90, 7, 20}, "rx rz"},
      {"ltoes", {0.0, -0.05, 1.0}, 1.18, {-90, 7, 20}, "rx"},
      {"rhipjoint", {-0.64, -0.69, 0.34}, 2.40, {0, 0, 0}, ""},
      {"rfemur", {-0.34, -0.94, 0.0}, 7.15, {0, 0, -20}, "rx ry rz"},
      {"rtibia", {-0.34, -0.94, 0.0}, 7.49, {0, 0, -20}, "rx"},
      {"rfoot", {-0.05, -0.25, 0.97}, 2.36, {-90, -7, -20}, "rx rz"},
      {"rtoes", {0.0, -0.05, 1.0}, 1.18, {-90, -7, -20}, "rx"},
      {"lowerback", {0.01, 1.0, -0.05}, 2.04, {0, 0, 0}, "rx ry rz"},
      {"upperback", {0.0, 1.0, 0.02}, 2.06, {0, 0, 0}, "rx ry rz"},
      {"thorax", {0.0, 1.0, 0.05}, 2.07, {0, 0, 0}, "rx ry rz"},
      {"lowerneck", {0.0, 0.94, -0.33}, 1.75, {0, 0, 0}, "rx ry rz"},
      {"upperneck", {0.0, 0.99, 0.12}, 1.76, {0, 0, 0}, "rx ry rz"},
      {"head", {0.0, 0.99, 0.10}, 1.77, {0, 0, 0}, "rx ry rz"},
      {"lclavicle", {0.97, 0.22, -0.05}, 3.58, {0, 0, 0}, "ry rz"},
      {"lhumerus", {1.0, 0.0, 0.0}, 5.03, {0, 0, -90}, "rx ry rz"},
      {"lradius", {1.0, 0.0, 0.0}, 3.44, {0, 0, -90}, "rx"},
      {"lwrist", {1.0, 0.0, 0.0}, 1.72, {0, 0, -90}, "ry"},
      {"lhand", {1.0, 0.0, 0.0}, 0.69, {0, 0, -90}, "rx rz"},
      {"lfingers", {1.0, 0.0, 0.0}, 0.56, {0, 0, -90}, "rx"},
      {"lthumb", {0.71, 0.0, 0.71}, 0.80, {-90, -45, -90}, "rx rz"},
      {"rclavicle", {-0.97, 0.22, -0.05}, 3.58, {0, 0, 0}, "ry rz"},
      {"rhumerus", {-1.0, 0.0, 0.0}, 5.03, {0, 0, 90}, "rx ry rz"},
      {"rradius", {-1.0, 0.0, 0.0}, 3.44, {0, 0, 90}, "rx"},
      {"rwrist", {-1.0, 0.0, 0.0}, 1.72, {0, 0, 90}, "ry"},
      {"rhand", {-1.0, 0.0, 0.0}, 0.69, {0, 0, 90}, "rx rz"},
      {"rfingers", {-1.0, 0.0, 0.0}, 0.56, {0, 0, 90}, "rx"},
      {"rthumb", {-0.71, 0.0, 0.71}, 0.80, {-90, 45, 90}, "rx rz"},
  };
  std::ostringstream s;
  s << "# skeleton with CMU bone names and hierarchy, hand-picked geometry\n:version 1.10\n:name VICON\n";
  s << ":units\n  mass 1.0\n  length 0.45\n  angle deg\n:documentation\n";
  s << ":root\n  order TX TY TZ RX RY RZ\n  axis XYZ\n  position 0 0 0\n  orientation 0 0 0\n:bonedata\n";
  int id = 1;
  for (const auto& b : bones) {
    s << "  begin\n     id " << id++ << "\n     name " << b.name << "\n     direction " << b.dir[0] << ' ' << b.dir[1] << ' ' << b.dir[2]
      << "\n     length " << b.length << "\n     axis " << b.axis[0] << ' ' << b.axis[1] << ' ' << b.axis[2] << " XYZ\n";
    const std::string dof = b.dof;
    if (!dof.empty()) {
      s << "    dof " << dof << "\n";
      std::istringstream d(dof);
      std::string t;
      bool first = true;
      while (d >> t) {
        s << (first ? "    limits " : "           ") << "(-170.0 170.0)\n";
        first = false;
      }
    }
    s << "  end\n";
  }
  s << ":hierarchy\n  begin\n"
       "    root lhipjoint rhipjoint lowerback\n"
       "    lhipjoint lfemur\n    lfemur ltibia\n    ltibia lfoot\n    lfoot ltoes\n"
       "    rhipjoint rfemur\n    rfemur rtibia\n    rtibia rfoot\n    rfoot rtoes\n"
       "    lowerback upperback\n    upperback thorax\n    thorax lowerneck lclavicle rclavicle\n"
       "    lowerneck upperneck\n    upperneck head\n"
       "    lclavicle lhumerus\n    lhumerus lradius\n    lradius lwrist\n    lwrist lhand lthumb\n    lhand lfingers\n"
       "    rclavicle rhumerus\n    rhumerus rradius\n    rradius rwrist\n    rwrist rhand rthumb\n    rhand rfingers\n"
       "  end\n";
  return s.str();
}

enum class ClipKind { Walk, Run, Jump, Wave };

inline const char* clip_kind_name(ClipKind k) {
  switch (k) {
    case ClipKind::Walk: return "walk";
    case ClipKind::Run: return "run";
    case ClipKind::Jump: return "jump";
    case ClipKind::Wave: return "wave";
  }
  return "?";
}

namespace detail {

inline double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

/// Channel curves in degrees (rotations) or skeleton units (root
/// translation) keyed by "joint.channel".
using Curve = std::function<double(double)>;

struct ClipBuilder {
  std::map<std::string, std::vector<Curve>> curves;
  void add(const std::string& key, Curve c) { curves[key].push_back(std::move(c)); }
  double eval(const std::string& key, double t) const {
    auto it = curves.find(key);
    if (it == curves.end()) return 0.0;
    double v = 0.0;
    for (const auto& c : it->second) v += c(t);
    return v;
  }
};

}  // namespace detail

/// Procedural clip at 120 frames per second. Each kind has a periodic core,
/// slow drift on every channel, and a few abrupt gestures at random times so
/// that the interesting frames are unevenly spaced.
inline RawMotion synth_clip(const Skeleton& sk, ClipKind kind, std::size_t frames, std::uint64_t seed) {
  Rng rng(seed);
  detail::ClipBuilder b;
  const double duration = static_cast<double>(frames) / 120.0;
  const double two_pi = kTwoPi;

  double pace = 1.0, amp = 1.0, speed = 0.0;
  switch (kind) {
    case ClipKind::Walk: pace = uniform(rng, 0.8, 1.1); amp = uniform(rng, 0.8, 1.1); speed = uniform(rng, 25, 35); break;
    case ClipKind::Run: pace = uniform(rng, 1.3, 1.7); amp = uniform(rng, 1.4, 1.8); speed = uniform(rng, 60, 80); break;
    case ClipKind::Jump: pace = uniform(rng, 0.4, 0.6); amp = 0.4; speed = uniform(rng, 0, 8); break;
    case ClipKind::Wave: pace = uniform(rng, 0.3, 0.5); amp = 0.3; speed = 0; break;
  }
  const double phase0 = uniform(rng, 0, two_pi);
  // tempo drifts a little so cycles are not perfectly periodic
  const double tempo_mod = uniform(rng, 0.05, 0.15), tempo_freq = uniform(rng, 0.1, 0.3);
  auto gait = [=](double t) { return two_pi * pace * (t + tempo_mod * std::sin(two_pi * tempo_freq * t) / (two_pi * tempo_freq)) + phase0; };

  for (int side = 0; side < 2; ++side) {
    const std::string p = side == 0 ? "l" : "r";
    const double off = side == 0 ? 0.0 : kPi;
    const double sgn = side == 0 ? 1.0 : -1.0;
    b.add(p + "femur.rx", [=](double t) { return -25.0 * amp * std::sin(gait(t) + off) - 5.0; });
    b.add(p + "femur.rz", [=](double t) { return sgn * 4.0 * amp * std::cos(gait(t) + off); });
    b.add(p + "tibia.rx", [=](double t) { return 30.0 * amp * (1.0 + std::sin(gait(t) + off + kPi / 2)) / 2.0 + 5.0; });
    b.add(p + "foot.rx", [=](double t) { return -12.0 * amp * std::sin(gait(t) + off + 0.6); });
    b.add(p + "toes.rx", [=](double t) { return 10.0 * amp * std::max(0.0, std::sin(gait(t) + off - 0.8)); });
    b.add(p + "humerus.rx", [=](double t) { return 18.0 * amp * std::sin(gait(t) + off + kPi); });
    b.add(p + "humerus.rz", [=](double) { return sgn * (70.0 - 8.0 * amp); });
    b.add(p + "radius.rx", [=](double t) { return (kind == ClipKind::Run ? 75.0 : 20.0) + 10.0 * amp * std::sin(gait(t) + off); });
    b.add(p + "clavicle.rz", [=](double t) { return sgn * 3.0 * amp * std::sin(gait(t) + off); });
  }
  b.add("lowerback.ry", [=](double t) { return 5.0 * amp * std::sin(gait(t)); });
  b.add("thorax.ry", [=](double t) { return -6.0 * amp * std::sin(gait(t)); });
  b.add("root.tz", [=](double t) { return speed * t; });
  b.add("root.ty", [=](double t) { return 17.0 + 0.6 * amp * std::cos(2.0 * gait(t)); });
  b.add("root.ry", [=](double t) { return 4.0 * amp * std::sin(gait(t)); });

  // slow drift on every rotation channel
  for (std::size_t j = 0; j < sk.size(); ++j) {
    const auto& joint = sk.joints[j];
    const auto& order = j == 0 ? sk.root_order : joint.dof;
    for (auto c : order) {
      if (!is_rotation(c)) continue;
      const std::string key = joint.name + "." + std::string(channel_name(c));
      const double a = uniform(rng, 1.0, 4.0), f = uniform(rng, 0.1, 0.5), ph = uniform(rng, 0, two_pi);
      b.add(key, [=](double t) { return a * std::sin(two_pi * f * t + ph); });
    }
  }

  // gestures: a channel group moves to a new offset over a short ramp
  const std::vector<std::vector<std::string>> groups = {
      {"lhumerus.rz", "lradius.rx", "lwrist.ry"}, {"rhumerus.rz", "rradius.rx", "rwrist.ry"},
      {"lowerback.rx", "upperback.rx", "thorax.rx"}, {"lowerneck.ry", "upperneck.ry", "head.ry"},
      {"lfemur.rx", "ltibia.rx"}, {"rfemur.rx", "rtibia.rx"}};
  const int gestures = 1 + static_cast<int>(uniform_index(rng, 4));
  for (int g = 0; g < gestures; ++g) {
    const auto& group = groups[static_cast<std::size_t>(uniform_index(rng, groups.size()))];
    const double t0 = uniform(rng, 0.05, 0.95) * duration, ramp = uniform(rng, 0.08, 0.35);
    const double hold = uniform(rng, 0.2, 1.5);
    for (const auto& key : group) {
      const double delta = uniform(rng, -45, 45);
      b.add(key, [=](double t) { return delta * (detail::smoothstep((t - t0) / ramp) - detail::smoothstep((t - t0 - ramp - hold) / ramp)); });
    }
  }

  if (kind == ClipKind::Jump) {
    const int jumps = 1 + static_cast<int>(uniform_index(rng, 2));
    for (int k = 0; k < jumps; ++k) {
      const double tj = uniform(rng, 0.15, 0.85) * duration, crouch = uniform(rng, 0.3, 0.6), flight = uniform(rng, 0.35, 0.55);
      const double height = uniform(rng, 4, 10);
      auto bend = [=](double t) {
        const double down = detail::smoothstep((t - (tj - crouch)) / crouch) - detail::smoothstep((t - tj) / 0.12);
        const double land = detail::smoothstep((t - tj - flight) / 0.08) - detail::smoothstep((t - tj - flight - 0.1) / 0.4);
        return down + 0.7 * land;
      };
      auto air = [=](double t) {
        const double u = (t - tj) / flight;
        return (u > 0 && u < 1) ? 4.0 * u * (1.0 - u) : 0.0;
      };
      for (const std::string p : {"l", "r"}) {
        b.add(p + "femur.rx", [=](double t) { return -60.0 * bend(t) - 15.0 * air(t); });
        b.add(p + "tibia.rx", [=](double t) { return 80.0 * bend(t) + 10.0 * air(t); });
        b.add(p + "foot.rx", [=](double t) { return -20.0 * bend(t) + 25.0 * air(t); });
        b.add(p + "humerus.rx", [=](double t) { return 40.0 * bend(t) - 90.0 * air(t); });
      }
      b.add("lowerback.rx", [=](double t) { return 25.0 * bend(t); });
      b.add("root.ty", [=](double t) { return -5.0 * bend(t) + height * air(t); });
    }
  }

  if (kind == ClipKind::Wave) {
    const std::string p = uniform01(rng) < 0.5 ? "l" : "r";
    const double sgn = p == "l" ? 1.0 : -1.0;
    const double t_up = uniform(rng, 0.1, 0.4) * duration, t_down = t_up + uniform(rng, 1.0, 2.5);
    const double wave_f = uniform(rng, 1.5, 2.5);
    auto raised = [=](double t) { return detail::smoothstep((t - t_up) / 0.3) - detail::smoothstep((t - t_down) / 0.3); };
    b.add(p + "humerus.rz", [=](double t) { return -sgn * 80.0 * raised(t); });
    b.add(p + "radius.rx", [=](double t) { return raised(t) * (50.0 + 30.0 * std::sin(two_pi * wave_f * t)); });
    b.add(p + "wrist.ry", [=](double t) { return raised(t) * 20.0 * std::sin(two_pi * wave_f * t + 0.5); });
  }

  RawMotion motion;
  motion.first_frame_number = 1;
  for (std::size_t n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / 120.0;
    RawFrame f = zero_frame(sk);
    for (std::size_t j = 0; j < sk.size(); ++j) {
      const auto& joint = sk.joints[j];
      const auto& order = j == 0 ? sk.root_order : joint.dof;
      for (std::size_t c = 0; c < order.size(); ++c) {
        const double v = b.eval(joint.name + "." + std::string(channel_name(order[c])), t);
        f.channels[j][c] = is_rotation(order[c]) ? deg2rad(v) : v * sk.length_scale;
      }
    }
    motion.frames.push_back(std::move(f));
  }
  return motion;
}

struct SynthClip {
  std::string name;  // "sSS_TT"
  ClipKind kind;
  RawMotion motion;
};

/// `subjects` x `trials` clips of 4 to 8 seconds, kinds cycling per trial.
inline std::vector<SynthClip> synth_corpus(const Skeleton& sk, std::size_t subjects, std::size_t trials, std::uint64_t seed) {
  std::vector<SynthClip> out;
  Rng rng(seed);
  for (std::size_t s = 1; s <= subjects; ++s)
    for (std::size_t t = 1; t <= trials; ++t) {
      const auto kind = static_cast<ClipKind>((s + t) % 4);
      const std::size_t frames = 480 + static_cast<std::size_t>(uniform_index(rng, 481));
      const std::uint64_t clip_seed = rng();
      char name[32];
      std::snprintf(name, sizeof name, "s%02zu_%02zu", s, t);
      out.push_back({name, kind, synth_clip(sk, kind, frames, clip_seed)});
    }
  return out;
}

}  // namespace sidql
