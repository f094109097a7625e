#pragma once

#include "sidql/error.hpp"
#include "sidql/skeleton.hpp"

#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace sidql {

/// Channel values of one AMC frame, indexed like `Skeleton::joints`.
/// Rotations are in radians; root translations are multiplied by the
/// skeleton's length scale.
struct RawFrame {
  std::vector<std::vector<double>> channels;
};

struct RawMotion {
  std::vector<RawFrame> frames;
  std::size_t first_frame_number = 1;
};

inline RawFrame zero_frame(const Skeleton& sk) {
  RawFrame f;
  f.channels.resize(sk.size());
  for (std::size_t j = 0; j < sk.size(); ++j) f.channels[j].assign(sk.channel_count(static_cast<int>(j)), 0.0);
  return f;
}

/// Parses an AMC motion against `sk`. Frame numbers must be contiguous.
/// Angle units follow a `:DEGREES`/`:RADIANS` header, else the skeleton.
inline RawMotion parse_amc(std::istream& in, const Skeleton& sk) {
  using detail::line_prefix;
  const auto lines = detail::tokenize(in);
  bool degrees = sk.degrees;
  RawMotion motion;
  long expected = -1;

  for (const auto& line : lines) {
    const auto& t = line.tokens;
    if (t[0][0] == ':') {
      const std::string key = detail::lower(t[0]);
      if (key == ":degrees") degrees = true;
      else if (key == ":radians") degrees = false;
      continue;
    }
    const bool is_frame_number =
        t.size() == 1 && std::all_of(t[0].begin(), t[0].end(), [](unsigned char c) { return std::isdigit(c); });
    if (is_frame_number) {
      const long n = std::stol(t[0]);
      if (expected < 0) {
        motion.first_frame_number = static_cast<std::size_t>(n);
      } else if (n != expected) {
        throw Error(Errc::MalformedAmc,
                    line_prefix(line.number) + "frame " + std::to_string(n) + " follows frame " + std::to_string(expected - 1));
      }
      expected = n + 1;
      motion.frames.push_back(zero_frame(sk));
      continue;
    }
    if (motion.frames.empty()) throw Error(Errc::MalformedAmc, line_prefix(line.number) + "channel data before the first frame number");
    const int joint = sk.index_of(t[0]);
    if (joint < 0) throw Error(Errc::MalformedAmc, line_prefix(line.number) + "unknown joint '" + t[0] + "'");
    const std::size_t count = sk.channel_count(joint);
    if (t.size() - 1 != count)
      throw Error(Errc::MalformedAmc, line_prefix(line.number) + "joint '" + t[0] + "' expects " + std::to_string(count) +
                                          " channels, got " + std::to_string(t.size() - 1));
    auto& values = motion.frames.back().channels[static_cast<std::size_t>(joint)];
    for (std::size_t k = 0; k < count; ++k) {
      double v = detail::parse_number(t[k + 1], line.number, Errc::MalformedAmc);
      const Channel c = joint == 0 ? sk.root_order[k] : sk.joints[static_cast<std::size_t>(joint)].dof[k];
      if (is_rotation(c)) {
        if (degrees) v = deg2rad(v);
      } else {
        v *= sk.length_scale;
      }
      values[k] = v;
    }
  }
  if (motion.frames.empty()) throw Error(Errc::MalformedAmc, "no frames");
  return motion;
}

inline RawMotion parse_amc(std::string_view text, const Skeleton& sk) {
  std::istringstream in{std::string(text)};
  return parse_amc(in, sk);
}

/// Serialises raw frames as a fully specified AMC in degrees.
inline std::string write_amc(const Skeleton& sk, const RawMotion& motion) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "#!OML:ASF " << (sk.name.empty() ? "skeleton" : sk.name) << "\n:FULLY-SPECIFIED\n:DEGREES\n";
  for (std::size_t f = 0; f < motion.frames.size(); ++f) {
    out << (motion.first_frame_number + f) << "\n";
    const auto& frame = motion.frames[f];
    for (std::size_t j = 0; j < sk.size(); ++j) {
      const auto& values = frame.channels[j];
      if (values.empty()) continue;
      out << sk.joints[j].name;
      for (std::size_t k = 0; k < values.size(); ++k) {
        const Channel c = j == 0 ? sk.root_order[k] : sk.joints[j].dof[k];
        out << ' ' << (is_rotation(c) ? rad2deg(values[k]) : values[k] / sk.length_scale);
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace sidql
