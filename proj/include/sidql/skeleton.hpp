#pragma once

#include "sidql/error.hpp"
#include "sidql/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sidql {

enum class Channel { RX, RY, RZ, TX, TY, TZ };

inline bool is_rotation(Channel c) { return c == Channel::RX || c == Channel::RY || c == Channel::RZ; }
inline int channel_axis(Channel c) { return static_cast<int>(c) % 3; }

inline std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::RX: return "rx";
    case Channel::RY: return "ry";
    case Channel::RZ: return "rz";
    case Channel::TX: return "tx";
    case Channel::TY: return "ty";
    case Channel::TZ: return "tz";
  }
  return "?";
}

struct Joint {
  std::string name;
  int parent = -1;
  Vec3 direction = Vec3::Zero();  // unit, world frame at rest
  double length = 0.0;            // already multiplied by the length scale
  Vec3 axis = Vec3::Zero();       // radians
  std::string axis_order = "XYZ";
  std::vector<Channel> dof;
  std::vector<std::pair<double, double>> limits;  // radians, one per dof
};

/// ASF skeleton. `joints[0]` is always the root; every other entry refers to
/// an earlier parent, so a forward scan visits parents before children.
struct Skeleton {
  std::string name;
  double length_scale = 1.0;
  double mass_scale = 1.0;
  bool degrees = true;
  std::vector<Channel> root_order;
  std::string root_axis_order = "XYZ";
  Vec3 root_position = Vec3::Zero();
  Vec3 root_orientation = Vec3::Zero();  // radians
  std::vector<Joint> joints;

  std::size_t size() const { return joints.size(); }

  int index_of(std::string_view joint_name) const {
    for (std::size_t i = 0; i < joints.size(); ++i)
      if (joints[i].name == joint_name) return static_cast<int>(i);
    return -1;
  }

  std::vector<int> children(int index) const {
    std::vector<int> out;
    for (std::size_t i = 1; i < joints.size(); ++i)
      if (joints[i].parent == index) out.push_back(static_cast<int>(i));
    return out;
  }

  /// Lengths of the non-root bones, in skeleton order.
  std::vector<double> bone_lengths() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < joints.size(); ++i) out.push_back(joints[i].length);
    return out;
  }

  /// Channel count AMC lines carry for joint `index`.
  std::size_t channel_count(int index) const {
    return index == 0 ? root_order.size() : joints[static_cast<std::size_t>(index)].dof.size();
  }

  /// Names of bones with no children.
  std::vector<std::string> leaf_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 1; i < joints.size(); ++i)
      if (children(static_cast<int>(i)).empty()) out.push_back(joints[i].name);
    return out;
  }
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

/// Non-empty, comment-stripped lines with their 1-based numbers.
inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto tokens = split_ws(raw);
    if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
  }
  return lines;
}

inline double parse_number(const std::string& token, std::size_t line, Errc code) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw Error(code, "line " + std::to_string(line) + ": expected a number, got '" + token + "'");
  return v;
}

inline std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

inline Channel parse_channel(const std::string& token, std::size_t line, bool allow_translation) {
  const std::string t = lower(token);
  if (t == "rx") return Channel::RX;
  if (t == "ry") return Channel::RY;
  if (t == "rz") return Channel::RZ;
  if (allow_translation) {
    if (t == "tx") return Channel::TX;
    if (t == "ty") return Channel::TY;
    if (t == "tz") return Channel::TZ;
  }
  if (t == "tx" || t == "ty" || t == "tz" || t == "l")
    throw Error(Errc::MalformedAsf, line_prefix(line) + "dof token '" + token + "' is not supported on bones");
  throw Error(Errc::MalformedAsf, line_prefix(line) + "unknown dof token '" + token + "'");
}

inline bool valid_axis_order(std::string order) {
  std::transform(order.begin(), order.end(), order.begin(), [](unsigned char c) { return std::toupper(c); });
  std::sort(order.begin(), order.end());
  return order == "XYZ";
}

}  // namespace detail

/// Parses an Acclaim skeleton file. Angles come back in radians and bone
/// lengths are multiplied by the `:units length` factor.
inline Skeleton parse_asf(std::istream& in) {
  using detail::line_prefix;
  using detail::parse_number;
  const auto lines = detail::tokenize(in);

  Skeleton sk;
  bool have_units = false, have_root = false, have_bones = false, have_hierarchy = false;
  double angle_factor = 1.0;

  struct RawBone {
    Joint joint;
    std::size_t line;
  };
  std::vector<RawBone> bones;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> hierarchy;

  std::size_t i = 0;
  auto at_section = [&](std::size_t k) { return k < lines.size() && lines[k].tokens[0][0] == ':'; };

  while (i < lines.size()) {
    const auto& head = lines[i];
    const std::string key = detail::lower(head.tokens[0]);
    if (key[0] != ':')
      throw Error(Errc::MalformedAsf, line_prefix(head.number) + "expected a section keyword, got '" + head.tokens[0] + "'");
    ++i;
    if (key == ":name") {
      if (head.tokens.size() > 1) sk.name = head.tokens[1];
    } else if (key == ":units") {
      have_units = true;
      for (; i < lines.size() && !at_section(i); ++i) {
        const auto& t = lines[i].tokens;
        if (t.size() < 2) throw Error(Errc::MalformedAsf, line_prefix(lines[i].number) + "incomplete units entry");
        const std::string unit = detail::lower(t[0]);
        if (unit == "length") {
          sk.length_scale = parse_number(t[1], lines[i].number, Errc::MalformedAsf);
        } else if (unit == "mass") {
          sk.mass_scale = parse_number(t[1], lines[i].number, Errc::MalformedAsf);
        } else if (unit == "angle") {
          const std::string a = detail::lower(t[1]);
          if (a == "deg" || a == "degree" || a == "degrees") sk.degrees = true;
          else if (a == "rad" || a == "radian" || a == "radians") sk.degrees = false;
          else throw Error(Errc::MalformedAsf, line_prefix(lines[i].number) + "unknown angle unit '" + t[1] + "'");
        }
      }
    } else if (key == ":root") {
      have_root = true;
      for (; i < lines.size() && !at_section(i); ++i) {
        const auto& t = lines[i].tokens;
        const std::string field = detail::lower(t[0]);
        if (field == "order") {
          for (std::size_t k = 1; k < t.size(); ++k)
            sk.root_order.push_back(detail::parse_channel(t[k], lines[i].number, true));
        } else if (field == "axis") {
          if (t.size() < 2 || !detail::valid_axis_order(t[1]))
            throw Error(Errc::MalformedAsf, line_prefix(lines[i].number) + "bad root axis order");
          sk.root_axis_order = t[1];
        } else if (field == "position" || field == "orientation") {
          if (t.size() < 4) throw Error(Errc::MalformedAsf, line_prefix(lines[i].number) + "expected three values");
          Vec3 v(parse_number(t[1], lines[i].number, Errc::MalformedAsf), parse_number(t[2], lines[i].number, Errc::MalformedAsf),
                 parse_number(t[3], lines[i].number, Errc::MalformedAsf));
          (field == "position" ? sk.root_position : sk.root_orientation) = v;
        } else {
          throw Error(Errc::MalformedAsf, line_prefix(lines[i].number) + "unknown root field '" + t[0] + "'");
        }
      }
    } else if (key == ":bonedata") {
      have_bones = true;
      while (i < lines.size() && !at_section(i)) {
        if (detail::lower(lines[i].tokens[0]) != "begin")
          throw Error(Errc::MalformedAsf, line_prefix(lines[i].number) + "expected 'begin'");
        RawBone bone{{}, lines[i].number};
        ++i;
        bool closed = false;
        while (i < lines.size() && !at_section(i)) {
          const auto& t = lines[i].tokens;
          const std::size_t ln = lines[i].number;
          const std::string field = detail::lower(t[0]);
          ++i;
          if (field == "end") {
            closed = true;
            break;
          }
          if (field == "id") continue;
          if (field == "name") {
            if (t.size() < 2) throw Error(Errc::MalformedAsf, line_prefix(ln) + "bone without a name");
            bone.joint.name = t[1];
          } else if (field == "direction") {
            if (t.size() < 4) throw Error(Errc::MalformedAsf, line_prefix(ln) + "direction needs three values");
            bone.joint.direction = Vec3(parse_number(t[1], ln, Errc::MalformedAsf), parse_number(t[2], ln, Errc::MalformedAsf),
                                        parse_number(t[3], ln, Errc::MalformedAsf));
          } else if (field == "length") {
            if (t.size() < 2) throw Error(Errc::MalformedAsf, line_prefix(ln) + "missing length");
            bone.joint.length = parse_number(t[1], ln, Errc::MalformedAsf);
          } else if (field == "axis") {
            if (t.size() < 5 || !detail::valid_axis_order(t[4]))
              throw Error(Errc::MalformedAsf, line_prefix(ln) + "axis needs three angles and an order");
            bone.joint.axis = Vec3(parse_number(t[1], ln, Errc::MalformedAsf), parse_number(t[2], ln, Errc::MalformedAsf),
                                   parse_number(t[3], ln, Errc::MalformedAsf));
            bone.joint.axis_order = t[4];
          } else if (field == "dof") {
            for (std::size_t k = 1; k < t.size(); ++k) bone.joint.dof.push_back(detail::parse_channel(t[k], ln, false));
          } else if (field == "limits") {
            // "(lo hi)" pairs, first on this line and then one per line.
            std::vector<std::string> numbers;
            auto collect = [&](const std::vector<std::string>& toks, std::size_t from) {
              for (std::size_t k = from; k < toks.size(); ++k) {
                std::string s = toks[k];
                s.erase(std::remove(s.begin(), s.end(), '('), s.end());
                s.erase(std::remove(s.begin(), s.end(), ')'), s.end());
                if (!s.empty()) numbers.push_back(s);
              }
            };
            collect(t, 1);
            while (i < lines.size() && lines[i].tokens[0].front() == '(') collect(lines[i++].tokens, 0);
            if (numbers.size() % 2 != 0) throw Error(Errc::MalformedAsf, line_prefix(ln) + "odd number of limit values");
            for (std::size_t k = 0; k < numbers.size(); k += 2)
              bone.joint.limits.emplace_back(parse_number(numbers[k], ln, Errc::MalformedAsf),
                                             parse_number(numbers[k + 1], ln, Errc::MalformedAsf));
          } else if (field == "bodymass" || field == "cofmass") {
            continue;
          } else {
            throw Error(Errc::MalformedAsf, line_prefix(ln) + "unknown bone field '" + t[0] + "'");
          }
        }
        if (!closed) throw Error(Errc::MalformedAsf, line_prefix(bone.line) + "bone block without 'end'");
        if (bone.joint.name.empty()) throw Error(Errc::MalformedAsf, line_prefix(bone.line) + "bone without a name");
        if (!bone.joint.limits.empty() && bone.joint.limits.size() != bone.joint.dof.size())
          throw Error(Errc::MalformedAsf, line_prefix(bone.line) + "limits count does not match dof count for '" + bone.joint.name + "'");
        bones.push_back(std::move(bone));
      }
    } else if (key == ":hierarchy") {
      have_hierarchy = true;
      while (i < lines.size() && !at_section(i)) {
        const std::string t0 = detail::lower(lines[i].tokens[0]);
        if (t0 != "begin" && t0 != "end") hierarchy.emplace_back(lines[i].number, lines[i].tokens);
        ++i;
      }
    } else {
      // :version, :documentation and unknown sections carry nothing we use.
      while (i < lines.size() && !at_section(i)) ++i;
    }
  }

  if (!have_units) throw Error(Errc::MalformedAsf, "missing :units section");
  if (!have_root) throw Error(Errc::MalformedAsf, "missing :root section");
  if (!have_bones) throw Error(Errc::MalformedAsf, "missing :bonedata section");
  if (!have_hierarchy) throw Error(Errc::MalformedAsf, "missing :hierarchy section");
  if (sk.root_order.empty()) throw Error(Errc::MalformedAsf, "root declares no channel order");

  angle_factor = sk.degrees ? kPi / 180.0 : 1.0;
  sk.root_orientation *= angle_factor;

  std::map<std::string, std::size_t> by_name;
  for (std::size_t b = 0; b < bones.size(); ++b) {
    auto& j = bones[b].joint;
    if (j.name == "root") throw Error(Errc::MalformedAsf, line_prefix(bones[b].line) + "bone may not be named 'root'");
    if (!by_name.emplace(j.name, b).second)
      throw Error(Errc::MalformedAsf, line_prefix(bones[b].line) + "duplicate bone '" + j.name + "'");
    const double norm = j.direction.norm();
    if (!(norm > 0.0)) throw Error(Errc::MalformedAsf, line_prefix(bones[b].line) + "zero direction for '" + j.name + "'");
    j.direction /= norm;
    j.length *= sk.length_scale;
    if (!(j.length > 0.0)) throw Error(Errc::MalformedAsf, line_prefix(bones[b].line) + "non-positive length for '" + j.name + "'");
    j.axis *= angle_factor;
    for (auto& [lo, hi] : j.limits) lo *= angle_factor, hi *= angle_factor;
  }

  // parent name per bone, from the hierarchy lines
  std::vector<std::string> parent_of(bones.size());
  std::map<std::string, std::vector<std::string>> kids;
  for (const auto& [ln, toks] : hierarchy) {
    const std::string& parent = toks[0];
    if (parent != "root" && !by_name.count(parent))
      throw Error(Errc::MalformedAsf, line_prefix(ln) + "hierarchy references undeclared bone '" + parent + "'");
    for (std::size_t k = 1; k < toks.size(); ++k) {
      auto it = by_name.find(toks[k]);
      if (it == by_name.end())
        throw Error(Errc::MalformedAsf, line_prefix(ln) + "hierarchy references undeclared bone '" + toks[k] + "'");
      if (!parent_of[it->second].empty())
        throw Error(Errc::MalformedAsf, line_prefix(ln) + "bone '" + toks[k] + "' has two parents");
      parent_of[it->second] = parent;
      kids[parent].push_back(toks[k]);
    }
  }

  Joint root;
  root.name = "root";
  root.axis = sk.root_orientation;
  root.axis_order = sk.root_axis_order;
  sk.joints.push_back(root);

  // breadth-first from the root gives a parent-before-child order
  std::vector<std::string> queue{"root"};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int parent_index = sk.index_of(queue[q]);
    for (const auto& child : kids[queue[q]]) {
      Joint j = bones[by_name.at(child)].joint;
      j.parent = parent_index;
      sk.joints.push_back(std::move(j));
      queue.push_back(child);
    }
  }
  if (sk.joints.size() != bones.size() + 1) {
    for (std::size_t b = 0; b < bones.size(); ++b)
      if (sk.index_of(bones[b].joint.name) < 0)
        throw Error(Errc::MalformedAsf,
                    line_prefix(bones[b].line) + "bone '" + bones[b].joint.name + "' is not connected to the root");
  }
  return sk;
}

inline Skeleton parse_asf(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_asf(in);
}

/// Writes a skeleton back out in the CMU flavour of the ASF format.
inline std::string write_asf(const Skeleton& sk) {
  const double af = sk.degrees ? 180.0 / kPi : 1.0;
  std::ostringstream out;
  out << std::setprecision(12);
  out << "# AST/ASF file generated by sidql\n:version 1.10\n:name " << (sk.name.empty() ? "skeleton" : sk.name) << "\n";
  out << ":units\n  mass " << sk.mass_scale << "\n  length " << sk.length_scale << "\n  angle " << (sk.degrees ? "deg" : "rad") << "\n";
  out << ":documentation\n  generated\n";
  out << ":root\n   order";
  for (auto c : sk.root_order) {
    std::string n(channel_name(c));
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) { return std::toupper(ch); });
    out << ' ' << n;
  }
  out << "\n   axis " << sk.root_axis_order << "\n   position " << sk.root_position.x() << ' ' << sk.root_position.y() << ' '
      << sk.root_position.z() << "\n   orientation " << sk.root_orientation.x() * af << ' ' << sk.root_orientation.y() * af << ' '
      << sk.root_orientation.z() * af << "\n";
  out << ":bonedata\n";
  for (std::size_t i = 1; i < sk.joints.size(); ++i) {
    const auto& j = sk.joints[i];
    out << "  begin\n     id " << i << "\n     name " << j.name << "\n     direction " << j.direction.x() << ' ' << j.direction.y() << ' '
        << j.direction.z() << "\n     length " << j.length / sk.length_scale << "\n     axis " << j.axis.x() * af << ' '
        << j.axis.y() * af << ' ' << j.axis.z() * af << "  " << j.axis_order << "\n";
    if (!j.dof.empty()) {
      out << "    dof";
      for (auto c : j.dof) out << ' ' << channel_name(c);
      out << "\n";
      if (!j.limits.empty()) {
        out << "    limits";
        for (std::size_t k = 0; k < j.limits.size(); ++k)
          out << (k == 0 ? " (" : "           (") << j.limits[k].first * af << ' ' << j.limits[k].second * af << ")\n";
      }
    }
    out << "  end\n";
  }
  out << ":hierarchy\n  begin\n";
  for (std::size_t i = 0; i < sk.joints.size(); ++i) {
    const auto kids = sk.children(static_cast<int>(i));
    if (kids.empty()) continue;
    out << "    " << sk.joints[i].name;
    for (int k : kids) out << ' ' << sk.joints[static_cast<std::size_t>(k)].name;
    out << "\n";
  }
  out << "  end\n";
  return out.str();
}

}  // namespace sidql
