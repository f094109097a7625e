#pragma once

#include "sidql/error.hpp"
#include "sidql/motion.hpp"
#include "sidql/preprocess.hpp"
#include "sidql/rng.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sidql {

namespace fs = std::filesystem;

namespace detail {

inline void put_f64_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

inline bool get_f64_le(std::istream& in, double& v) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  v = std::bit_cast<double>(bits);
  return true;
}

inline std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

/// 64-bit FNV-1a; stable across platforms, used for manifest/config hashes.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

}  // namespace detail

inline constexpr int kWindowFormatVersion = 1;

/// Window record: a text header
///
///     SIDQL-WINDOW 1
///     source <id>
///     frames <N>
///     joints <M>
///     dt <seconds>
///     joint <name> <parent index, -1 = root> <bone length>    (M lines)
///     end_header
///
/// followed by little-endian float64 blocks: positions then velocities, each
/// laid out frame-major, then point-major with the root as point 0, then xyz.
inline void write_window(std::ostream& out, const MotionSequence& seq) {
  seq.check_shape();
  out << "SIDQL-WINDOW " << kWindowFormatVersion << "\n";
  out << "source " << seq.source_id << "\n";
  out << "frames " << seq.frames() << "\njoints " << seq.joints() << "\ndt " << detail::format_double(seq.dt) << "\n";
  for (std::size_t m = 0; m < seq.joints(); ++m)
    out << "joint " << seq.joint_names[m] << ' ' << seq.parents[m] << ' ' << detail::format_double(seq.bone_lengths[m]) << "\n";
  out << "end_header\n";
  for (const auto* block : {&seq.positions, &seq.velocities}) {
    const auto& roots = block == &seq.positions ? seq.root_positions : seq.root_velocities;
    for (std::size_t n = 0; n < seq.frames(); ++n) {
      for (int c = 0; c < 3; ++c) detail::put_f64_le(out, roots[n][c]);
      for (std::size_t m = 0; m < seq.joints(); ++m)
        for (int c = 0; c < 3; ++c) detail::put_f64_le(out, (*block)[n * seq.joints() + m][c]);
    }
  }
}

inline MotionSequence read_window(std::istream& in) {
  auto fail = [](const std::string& why) { return Error(Errc::Io, "window record: " + why); };
  std::string line;
  if (!std::getline(in, line) || line.rfind("SIDQL-WINDOW ", 0) != 0) throw fail("missing magic");
  if (std::stoi(line.substr(13)) != kWindowFormatVersion) throw fail("unsupported version " + line.substr(13));
  MotionSequence seq;
  std::size_t frames = 0, joints = 0;
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream s(line);
    std::string key;
    s >> key;
    if (key == "source") {
      std::getline(s >> std::ws, seq.source_id);
    } else if (key == "frames") {
      s >> frames;
    } else if (key == "joints") {
      s >> joints;
    } else if (key == "dt") {
      s >> seq.dt;
    } else if (key == "joint") {
      std::string name;
      int parent = 0;
      double length = 0;
      if (!(s >> name >> parent >> length)) throw fail("bad joint line '" + line + "'");
      seq.joint_names.push_back(name);
      seq.parents.push_back(parent);
      seq.bone_lengths.push_back(length);
    } else {
      throw fail("unknown header key '" + key + "'");
    }
  }
  if (line != "end_header") throw fail("header not terminated");
  if (seq.joint_names.size() != joints) throw fail("joint count mismatch");
  seq.root_positions.resize(frames);
  seq.root_velocities.resize(frames);
  seq.positions.resize(frames * joints);
  seq.velocities.resize(frames * joints);
  for (auto* block : {&seq.positions, &seq.velocities}) {
    auto& roots = block == &seq.positions ? seq.root_positions : seq.root_velocities;
    for (std::size_t n = 0; n < frames; ++n) {
      for (int c = 0; c < 3; ++c)
        if (!detail::get_f64_le(in, roots[n][c])) throw fail("truncated body");
      for (std::size_t m = 0; m < joints; ++m)
        for (int c = 0; c < 3; ++c)
          if (!detail::get_f64_le(in, (*block)[n * joints + m][c])) throw fail("truncated body");
    }
  }
  seq.check_shape();
  return seq;
}

inline void write_window_file(const fs::path& path, const MotionSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  write_window(out, seq);
}

inline MotionSequence read_window_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  return read_window(in);
}

struct ManifestEntry {
  std::string id;
  std::string source;
  std::string skeleton;  // file name under skeletons/
  std::size_t start_frame = 0;
  std::size_t length = 0;
  std::string split;
  std::string file;  // relative to the dataset root
};

struct DatasetManifest {
  int version = 1;
  PreprocessConfig preprocessing;
  std::string velocity_scheme = "central differences, one-sided at window ends";
  double train_fraction = 0.8;
  std::vector<ManifestEntry> windows;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["preprocessing"] = {{"source_fps", preprocessing.source_fps},
                          {"target_fps", preprocessing.target_fps},
                          {"window_len", preprocessing.window_len},
                          {"joint_exclusions", preprocessing.joint_exclusions},
                          {"seed", preprocessing.seed},
                          {"velocity_scheme", velocity_scheme},
                          {"train_fraction", train_fraction}};
    j["windows"] = nlohmann::json::array();
    for (const auto& w : windows)
      j["windows"].push_back({{"id", w.id},
                              {"source", w.source},
                              {"skeleton", w.skeleton},
                              {"start_frame", w.start_frame},
                              {"length", w.length},
                              {"split", w.split},
                              {"file", w.file}});
    return j;
  }

  static DatasetManifest from_json(const nlohmann::json& j) {
    DatasetManifest m;
    try {
      m.version = j.at("version").get<int>();
      const auto& p = j.at("preprocessing");
      m.preprocessing.source_fps = p.at("source_fps").get<double>();
      m.preprocessing.target_fps = p.at("target_fps").get<double>();
      m.preprocessing.window_len = p.at("window_len").get<std::size_t>();
      m.preprocessing.joint_exclusions = p.at("joint_exclusions").get<std::vector<std::string>>();
      m.preprocessing.seed = p.at("seed").get<std::uint64_t>();
      m.velocity_scheme = p.at("velocity_scheme").get<std::string>();
      m.train_fraction = p.at("train_fraction").get<double>();
      for (const auto& w : j.at("windows"))
        m.windows.push_back({w.at("id").get<std::string>(), w.at("source").get<std::string>(), w.at("skeleton").get<std::string>(),
                             w.at("start_frame").get<std::size_t>(), w.at("length").get<std::size_t>(),
                             w.at("split").get<std::string>(), w.at("file").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Io, std::string("manifest: ") + e.what());
    }
    return m;
  }

  std::string hash() const { return detail::hex64(detail::fnv1a(to_json().dump())); }
};

/// Source-level split: sources are shuffled with `seed` and the first
/// round(fraction * S) go to training. With two or more sources each side
/// gets at least one.
inline std::map<std::string, std::string> assign_split(std::vector<std::string> sources, std::uint64_t seed, double train_fraction = 0.8) {
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  Rng rng(seed);
  shuffle(sources, rng);
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(sources.size())));
  if (sources.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, sources.size() - 1);
  else n_train = sources.size();
  std::map<std::string, std::string> split;
  for (std::size_t i = 0; i < sources.size(); ++i) split[sources[i]] = i < n_train ? "train" : "test";
  return split;
}

inline void save_manifest(const fs::path& dir, const DatasetManifest& m) {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(Errc::Io, "cannot write manifest in " + dir.string());
  out << m.to_json().dump(2) << "\n";
}

inline DatasetManifest load_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(Errc::Io, "no manifest.json in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, std::string("manifest: ") + e.what());
  }
  return DatasetManifest::from_json(j);
}

struct LoadedWindow {
  ManifestEntry entry;
  MotionSequence motion;
};

/// Windows of one split ("train", "test", or "" for all), in manifest order.
inline std::vector<LoadedWindow> load_windows(const fs::path& dir, const DatasetManifest& m, const std::string& split = {}) {
  std::vector<LoadedWindow> out;
  for (const auto& e : m.windows)
    if (split.empty() || e.split == split) out.push_back({e, read_window_file(dir / e.file)});
  return out;
}

}  // namespace sidql
