// mocapkf: keyframe extraction pipeline for ASF/AMC motion capture.
//
//   mocapkf synth        write a procedural CMU-style ASF/AMC corpus
//   mocapkf prep         ASF/AMC tree -> windowed dataset with manifest
//   mocapkf train        deep Q-learning on the training split
//   mocapkf eval         compare selectors, write report.csv
//   mocapkf extract      print the keyframes one selector picks for a window
//   mocapkf reconstruct  rebuild a window from keyframes and write AMC
//   mocapkf report       re-aggregate a report.csv into the method x W table
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include "sidql/sidql.hpp"
#include "sidql/report.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace sidql;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(Errc c) {
  if (is_numeric_failure(c)) return 3;
  if (c == Errc::InvalidArgument || c == Errc::InvalidW) return 1;
  return 2;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + p.string());
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> parse_indices(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& t : split_list(s)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != t.size()) throw UsageError("not a frame index: '" + t + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(Errc::Io, dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && detail::lower(e.path().extension().string()) == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string join(const std::vector<std::size_t>& v, char sep) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? std::string(1, sep) : "") << v[i];
  return s.str();
}

// ---------------------------------------------------------------- datasets

struct LoadedSet {
  DatasetManifest manifest;
  std::vector<ManifestEntry> entries;
  std::vector<SphericalSequence> sequences;
};

LoadedSet load_split(const fs::path& dir, const std::string& split) {
  LoadedSet set;
  set.manifest = load_manifest(dir);
  for (auto& w : load_windows(dir, set.manifest, split)) {
    set.entries.push_back(w.entry);
    set.sequences.push_back(sequence_to_spherical(w.motion));
    set.sequences.back().source_id = w.entry.id;
  }
  if (set.sequences.empty()) throw Error(Errc::EmptyDataset, "no windows in split '" + split + "' of " + dir.string());
  return set;
}

std::size_t find_window(const LoadedSet& set, const std::string& id) {
  for (std::size_t i = 0; i < set.entries.size(); ++i)
    if (set.entries[i].id == id) return i;
  throw Error(Errc::Io, "no window '" + id + "' in the dataset");
}

std::optional<TrainConfig> config_from(const std::string& path) {
  std::string p = path;
  if (p.empty())
    if (const char* env = std::getenv("SIDQL_CONFIG")) p = env;
  if (p.empty()) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, "config " + p + ": " + e.what());
  }
  return TrainConfig::from_json(j);
}

// ---------------------------------------------------------------- selectors

struct SelectorSet {
  const QNetwork* net = nullptr;
  std::uint64_t seed = 0;
};

std::uint64_t random_seed(std::uint64_t base, const std::string& id, std::size_t w) {
  return base ^ detail::fnv1a(id + "/" + std::to_string(w));
}

struct Selection {
  KeyframeSet keys;
  double seconds;
};

Selection run_selector(const std::string& method, const SphericalSequence& sph, std::size_t w, const SelectorSet& s) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  if (method == "rc") {
    auto k = select_random(sph.frames(), w, random_seed(s.seed, sph.source_id, w));
    return {k, elapsed()};
  }
  if (method == "uc") {
    auto k = select_uniform(sph.frames(), w);
    return {k, elapsed()};
  }
  if (method == "greedy") {
    auto k = select_greedy(sph, w);
    return {k, elapsed()};
  }
  if (method == "sidql") {
    if (!s.net) throw UsageError("method sidql needs --model");
    auto r = infer_keyframes(*s.net, sph, w);
    return {r.keys, r.seconds};
  }
  throw UsageError("unknown method '" + method + "' (expected rc, uc, greedy or sidql)");
}

void check_methods(const std::vector<std::string>& methods) {
  for (const auto& m : methods)
    if (m != "rc" && m != "uc" && m != "greedy" && m != "sidql") throw UsageError("unknown method '" + m + "'");
}

// ---------------------------------------------------------------- commands

struct SynthArgs {
  std::string out;
  std::size_t subjects = 10, trials = 4;
  std::uint64_t seed = 1;
};

int cmd_synth(const SynthArgs& a) {
  const std::string asf = cmu_style_asf();
  const Skeleton sk = parse_asf(asf);
  const auto clips = synth_corpus(sk, a.subjects, a.trials, a.seed);
  std::set<std::string> subjects;
  for (const auto& c : clips) {
    const std::string subject = c.name.substr(0, c.name.find('_'));
    if (subjects.insert(subject).second) write_text(fs::path(a.out) / "asf" / (subject + ".asf"), asf);
    write_text(fs::path(a.out) / "amc" / (c.name + ".amc"), write_amc(sk, c.motion));
  }
  std::cout << "wrote " << clips.size() << " clips for " << subjects.size() << " subjects to " << a.out << "\n";
  return 0;
}

struct PrepArgs {
  std::string asf_dir, amc_dir, out;
  double fps = 30.0, source_fps = 120.0;
  std::size_t window = 60;
  std::uint64_t seed = 0;
  std::string exclude;
  bool exclude_set = false;
};

int cmd_prep(const PrepArgs& a) {
  PreprocessConfig cfg;
  cfg.source_fps = a.source_fps;
  cfg.target_fps = a.fps;
  cfg.window_len = a.window;
  cfg.seed = a.seed;
  if (a.exclude_set) cfg.joint_exclusions = split_list(a.exclude);

  const auto asf_files = files_with_extension(a.asf_dir, ".asf");
  const auto amc_files = files_with_extension(a.amc_dir, ".amc");
  if (amc_files.empty()) {
    std::cerr << "error: no .amc files under " << a.amc_dir << "\n";
    return 2;
  }
  std::map<std::string, fs::path> asf_by_stem;
  for (const auto& p : asf_files) asf_by_stem[p.stem().string()] = p;

  const fs::path out(a.out);
  fs::create_directories(out / "windows");
  fs::create_directories(out / "skeletons");
  for (const auto& e : fs::directory_iterator(out / "windows"))
    if (e.path().extension() == ".win") fs::remove(e.path());

  std::map<std::string, Skeleton> skeletons;
  std::vector<std::pair<ManifestEntry, MotionSequence>> windows;
  std::size_t failed = 0;
  for (const auto& amc : amc_files) {
    const std::string source = amc.stem().string();
    try {
      fs::path asf;
      if (auto it = asf_by_stem.find(source.substr(0, source.find('_'))); it != asf_by_stem.end()) asf = it->second;
      else if (asf_files.size() == 1) asf = asf_files.front();
      else throw Error(Errc::Io, "no matching .asf for " + amc.filename().string());
      const std::string skel_name = asf.filename().string();
      if (!skeletons.count(skel_name)) {
        skeletons[skel_name] = parse_asf(read_text(asf));
        write_text(out / "skeletons" / skel_name, read_text(asf));
      }
      const Skeleton& sk = skeletons[skel_name];
      const RawMotion raw = parse_amc(read_text(amc), sk);
      const MotionSequence seq = forward_kinematics(sk, raw, 1.0 / cfg.source_fps, source);
      for (auto& w : preprocess(seq, cfg)) {
        ManifestEntry e;
        e.id = source + "@" + std::to_string(w.start_frame);
        e.source = source;
        e.skeleton = skel_name;
        e.start_frame = w.start_frame;
        e.length = w.motion.frames();
        e.file = "windows/" + e.id + ".win";
        windows.emplace_back(e, std::move(w.motion));
      }
    } catch (const Error& err) {
      ++failed;
      std::cerr << "warning: skipping " << amc.string() << ": " << err.what() << "\n";
    }
  }
  if (windows.empty()) {
    std::cerr << "error: no usable windows (" << failed << " of " << amc_files.size() << " files failed)\n";
    return 2;
  }
  std::vector<std::string> sources;
  for (const auto& [e, m] : windows) sources.push_back(e.source);
  DatasetManifest manifest;
  manifest.preprocessing = cfg;
  manifest.train_fraction = 0.8;
  const auto split = assign_split(sources, cfg.seed, manifest.train_fraction);
  std::sort(windows.begin(), windows.end(), [](const auto& x, const auto& y) { return x.first.id < y.first.id; });
  for (auto& [e, m] : windows) {
    e.split = split.at(e.source);
    write_window_file(out / e.file, m);
    manifest.windows.push_back(e);
  }
  save_manifest(out, manifest);
  std::size_t n_train = 0;
  for (const auto& e : manifest.windows) n_train += e.split == "train";
  std::cout << "windows " << manifest.windows.size() << " (train " << n_train << ", test " << manifest.windows.size() - n_train << ")"
            << ", failed files " << failed << ", manifest " << manifest.hash() << "\n";
  return 0;
}

struct TrainArgs {
  std::string data, out, config, resume, log;
  std::optional<std::size_t> episodes;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a) {
  TrainConfig cfg = config_from(a.config).value_or(TrainConfig{});
  if (a.episodes) cfg.episodes = *a.episodes;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const LoadedSet set = load_split(a.data, "train");

  std::optional<AgentState> resume;
  if (!a.resume.empty()) resume = from_checkpoint(load_checkpoint(a.resume));

  const fs::path out(a.out);
  const fs::path log_path = a.log.empty() ? fs::path(a.out + ".log.csv") : fs::path(a.log);
  if (log_path.has_parent_path()) fs::create_directories(log_path.parent_path());
  std::ofstream log(log_path);
  std::ofstream episodes(log_path.string() + ".episodes.csv");
  if (!log || !episodes) throw Error(Errc::Io, "cannot write " + log_path.string());
  log << "global_step,episode,loss,episode_reward,epsilon\n" << std::setprecision(12);
  episodes << "episode,sequence_id,reward,q0,q_final,keyframes\n" << std::setprecision(12);

  TrainHooks hooks;
  hooks.on_update = [&](const UpdateRecord& r) {
    log << r.global_step << ',' << r.episode << ',' << r.loss << ',' << r.episode_reward << ',' << r.epsilon << "\n";
  };
  hooks.on_episode = [&](const EpisodeRecord& r) {
    episodes << r.episode << ',' << set.entries[r.sequence].id << ',' << r.reward << ',' << r.q0 << ',' << r.q_final << ','
             << join(r.keyframes, ' ') << "\n";
  };
  const auto start = std::chrono::steady_clock::now();
  const TrainResult result = train(set.sequences, cfg, std::move(resume), hooks);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  Checkpoint ck = to_checkpoint(result.state, cfg);
  ck.extra["manifest_hash"] = set.manifest.hash();
  save_checkpoint(out, ck);
  write_text(a.out + ".config.json", cfg.to_json().dump(2) + "\n");
  std::cout << "episodes " << result.episodes.size() << " (total " << result.state.episodes << "), updates " << result.updates.size()
            << " (total " << result.state.updates << "), global step " << result.state.global_step << ", skipped degenerate "
            << result.skipped.size() << ", config " << cfg.hash() << ", " << seconds << " s\n";
  return 0;
}

struct EvalArgs {
  std::string data, split = "test", model, methods = "rc,uc,greedy,sidql", ks = "5,10,15", out = "report.csv", summary;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

int cmd_eval(const EvalArgs& a) {
  const auto methods = split_list(a.methods);
  check_methods(methods);
  std::vector<std::size_t> ks = parse_indices(a.ks);
  if (methods.empty() || ks.empty()) throw UsageError("need at least one method and one keyframe count");
  const bool need_net = std::find(methods.begin(), methods.end(), "sidql") != methods.end();
  if (need_net && a.model.empty()) throw UsageError("method sidql needs --model");
  const LoadedSet set = load_split(a.data, a.split);

  std::optional<Checkpoint> ck;
  if (need_net) ck = load_checkpoint(a.model);
  SelectorSet sel{ck ? &ck->net : nullptr, a.seed};

  RunReport report;
  report.seed = a.seed;
  report.manifest_hash = set.manifest.hash();
  if (ck)
    if (auto it = ck->extra.find("config_hash"); it != ck->extra.end()) report.config_hash = it->second;

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= set.sequences.size()) return;
      try {
        const auto& sph = set.sequences[i];
        std::vector<ReportRow> rows;
        if (!(q_error(sph, KeyframeSet::endpoints(sph.frames())) > kDegenerateError)) {
          std::lock_guard lock(mu);
          report.degenerate.push_back(sph.source_id);
          continue;
        }
        for (const auto& m : methods)
          for (auto w : ks) {
            const Selection s = run_selector(m, sph, w, sel);
            const ErrorReport e = evaluate(sph, s.keys);
            rows.push_back({sph.source_id, m, w, e.mean, e.root_rmse, s.seconds, join(s.keys.indices(), ' ')});
          }
        std::lock_guard lock(mu);
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = set.sequences.size();
        return;
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, a.jobs);
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  if (report.rows.empty()) throw Error(Errc::DegenerateSequence, "every window in the split is degenerate");
  report.sort();

  std::ostringstream csv, summary;
  write_report_csv(csv, report);
  write_summary_csv(summary, report, methods);
  write_text(a.out, csv.str());
  const std::string summary_path = a.summary.empty() ? fs::path(a.out).replace_extension(".summary.csv").string() : a.summary;
  write_text(summary_path, summary.str());
  std::cout << summary.str();
  if (!report.degenerate.empty()) std::cout << "degenerate windows excluded: " << report.degenerate.size() << "\n";
  return 0;
}

struct ExtractArgs {
  std::string data, split, seq, method = "greedy", model;
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

int cmd_extract(const ExtractArgs& a) {
  const LoadedSet set = load_split(a.data, a.split);
  const auto& sph = set.sequences[find_window(set, a.seq)];
  std::optional<Checkpoint> ck;
  if (a.method == "sidql") {
    if (a.model.empty()) throw UsageError("method sidql needs --model");
    ck = load_checkpoint(a.model);
  }
  const Selection s = run_selector(a.method, sph, a.k, {ck ? &ck->net : nullptr, a.seed});
  const ErrorReport e = evaluate(sph, s.keys);
  std::cout << "keyframes " << join(s.keys.indices(), ' ') << "\nmean_angle_error " << std::setprecision(12) << e.mean << "\nroot_rmse "
            << e.root_rmse << "\ndecision_seconds " << s.seconds << "\n";
  return 0;
}

struct ReconstructArgs {
  std::string data, split, seq, keyframes, method, model, out;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  bool strict = false;
};

int cmd_reconstruct(const ReconstructArgs& a) {
  if (a.keyframes.empty() == a.method.empty()) throw UsageError("give either --keyframes or --method");
  const LoadedSet set = load_split(a.data, a.split);
  const std::size_t idx = find_window(set, a.seq);
  const auto& sph = set.sequences[idx];
  KeyframeSet keys = KeyframeSet::endpoints(sph.frames());
  if (!a.keyframes.empty()) {
    const std::string all = detail::lower(a.keyframes);
    try {
      keys = all == "all" ? KeyframeSet::all(sph.frames()) : KeyframeSet(sph.frames(), parse_indices(a.keyframes));
    } catch (const Error& e) {
      throw UsageError(std::string("--keyframes: ") + e.what());
    }
  } else {
    std::optional<Checkpoint> ck;
    if (a.method == "sidql") {
      if (a.model.empty()) throw UsageError("method sidql needs --model");
      ck = load_checkpoint(a.model);
    }
    keys = run_selector(a.method, sph, a.k, {ck ? &ck->net : nullptr, a.seed}).keys;
  }
  const Skeleton sk = parse_asf(read_text(fs::path(a.data) / "skeletons" / set.entries[idx].skeleton));
  const ReconstructedSequence rec = reconstruct_full(sph, keys);
  const MotionSequence cart = spherical_to_cartesian(rec.motion);
  SolveReport fit;
  const std::string amc = a.strict ? export_amc(sk, cart) : export_amc_best_fit(sk, cart, &fit);
  write_text(a.out, amc);
  std::cout << "keyframes " << join(keys.indices(), ' ') << "\nmean_angle_error " << std::setprecision(12) << q_error(sph, keys)
            << "\nframes " << cart.frames() << "\n";
  if (!a.strict && fit.max_error > PoseSolver::kReachTolerance)
    std::cerr << "warning: joint '" << fit.worst_joint << "' at frame " << fit.worst_frame << " is " << fit.max_error
              << " units from the reconstruction; its channels cannot reach that pose\n";
  return 0;
}

struct ReportArgs {
  std::string in, out, methods;
};

int cmd_report(const ReportArgs& a) {
  std::istringstream in(read_text(a.in));
  std::string line;
  RunReport report;
  if (!std::getline(in, line) || line.rfind("sequence_id,", 0) != 0) throw Error(Errc::Io, a.in + " is not a report.csv");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 6) throw Error(Errc::Io, "short row in " + a.in + ": " + line);
    try {
      report.rows.push_back({f[0], f[1], std::stoul(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), f.size() > 6 ? f[6] : ""});
    } catch (const std::exception&) {
      throw Error(Errc::Io, "bad number in " + a.in + ": " + line);
    }
  }
  std::ostringstream summary;
  write_summary_csv(summary, report, split_list(a.methods));
  if (!a.out.empty()) write_text(a.out, summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyframe extraction for ASF/AMC motion capture"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a procedural CMU-style ASF/AMC corpus");
  c_synth->add_option("--out", synth.out, "Output directory (gets asf/ and amc/)")->required();
  c_synth->add_option("--subjects", synth.subjects, "Number of subjects")->check(CLI::PositiveNumber);
  c_synth->add_option("--trials", synth.trials, "Clips per subject")->check(CLI::PositiveNumber);
  c_synth->add_option("--seed", synth.seed, "Random seed");

  PrepArgs prep;
  auto* c_prep = app.add_subcommand("prep", "Parse, downsample and window an ASF/AMC tree");
  c_prep->add_option("--asf", prep.asf_dir, "Directory searched for .asf files")->required();
  c_prep->add_option("--amc", prep.amc_dir, "Directory searched for .amc files")->required();
  c_prep->add_option("--out", prep.out, "Dataset directory")->required();
  c_prep->add_option("--fps", prep.fps, "Target frame rate");
  c_prep->add_option("--source-fps", prep.source_fps, "Capture frame rate");
  c_prep->add_option("--window", prep.window, "Frames per window")->check(CLI::Range(2, 1 << 20));
  c_prep->add_option("--seed", prep.seed, "Split seed");
  auto* excl = c_prep->add_option("--exclude", prep.exclude, "Comma separated joints to drop (default: CMU leaf bones)");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the keyframe agent");
  c_train->add_option("--data", tr.data, "Dataset directory")->required();
  c_train->add_option("--out", tr.out, "Checkpoint to write")->required();
  c_train->add_option("--config", tr.config, "JSON config (default: $SIDQL_CONFIG)");
  c_train->add_option("--resume", tr.resume, "Checkpoint to continue from");
  c_train->add_option("--log", tr.log, "Training log CSV (default: <out>.log.csv)");
  c_train->add_option("--episodes", tr.episodes, "Override the episode count");
  c_train->add_option("--seed", tr.seed, "Override the seed");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate selectors on a split");
  c_eval->add_option("--data", ev.data, "Dataset directory")->required();
  c_eval->add_option("--split", ev.split, "train, test, or empty for all");
  c_eval->add_option("--model", ev.model, "Checkpoint for the sidql method");
  c_eval->add_option("--methods", ev.methods, "Comma separated: rc,uc,greedy,sidql");
  c_eval->add_option("-k,--k", ev.ks, "Comma separated keyframe counts");
  c_eval->add_option("--out", ev.out, "Per-window CSV");
  c_eval->add_option("--summary", ev.summary, "Method x W table (default: <out>.summary.csv)");
  c_eval->add_option("--seed", ev.seed, "Seed for the random selector");
  c_eval->add_option("--jobs", ev.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ExtractArgs ex;
  auto* c_extract = app.add_subcommand("extract", "Print the keyframes of one window");
  c_extract->add_option("--data", ex.data, "Dataset directory")->required();
  c_extract->add_option("--split", ex.split, "Restrict the lookup to one split");
  c_extract->add_option("--seq", ex.seq, "Window id")->required();
  c_extract->add_option("--method", ex.method, "rc, uc, greedy or sidql");
  c_extract->add_option("-k,--k", ex.k, "Keyframe count");
  c_extract->add_option("--model", ex.model, "Checkpoint for sidql");
  c_extract->add_option("--seed", ex.seed, "Seed for rc");

  ReconstructArgs rc;
  auto* c_rec = app.add_subcommand("reconstruct", "Rebuild a window from keyframes and write AMC");
  c_rec->add_option("--data", rc.data, "Dataset directory")->required();
  c_rec->add_option("--split", rc.split, "Restrict the lookup to one split");
  c_rec->add_option("--seq", rc.seq, "Window id")->required();
  c_rec->add_option("--keyframes", rc.keyframes, "Comma separated frames, or 'all'");
  c_rec->add_option("--method", rc.method, "rc, uc, greedy or sidql");
  c_rec->add_option("-k,--k", rc.k, "Keyframe count for --method");
  c_rec->add_option("--model", rc.model, "Checkpoint for sidql");
  c_rec->add_option("--seed", rc.seed, "Seed for rc");
  c_rec->add_option("--out", rc.out, "AMC file to write")->required();
  c_rec->add_flag("--strict", rc.strict, "Fail when a reconstructed pose is outside the skeleton's dof");

  ReportArgs rp;
  auto* c_report = app.add_subcommand("report", "Aggregate a report.csv");
  c_report->add_option("--in", rp.in, "report.csv from eval")->required();
  c_report->add_option("--out", rp.out, "Summary CSV to write");
  c_report->add_option("--methods", rp.methods, "Method order for the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  prep.exclude_set = excl->count() > 0;

  try {
    if (*c_synth) return cmd_synth(synth);
    if (*c_prep) return cmd_prep(prep);
    if (*c_train) return cmd_train(tr);
    if (*c_eval) return cmd_eval(ev);
    if (*c_extract) return cmd_extract(ex);
    if (*c_rec) return cmd_reconstruct(rc);
    if (*c_report) return cmd_report(rp);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
