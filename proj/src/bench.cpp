#include "hybrid/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <thread>
#include <utility>

#include "hybrid/io.hpp"
#include "hybrid/offline.hpp"
#include "hybrid/online.hpp"
#include "hybrid/relaxation.hpp"
#include "json.hpp"
#include "number_format.hpp"

namespace hybrid {

using detail::format_number;
using nlohmann::json;

LowerBounds lower_bounds(const TaskGraph& g, const Platform& platform) {
  const LpSolution sol = solve_lp(build_hlp(g, platform));
  return {sol.objective, critical_path_min(g)};
}

namespace {

constexpr Time kInf = std::numeric_limits<Time>::infinity();

class BruteForce {
 public:
  BruteForce(const TaskGraph& g, const Platform& platform)
      : g_(g), platform_(platform), finish_(g.size(), 0.0), done_(g.size(), false),
        busy_(platform.types()), tail_(g.size(), 0.0) {
    const auto order = topological_indices(g);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Time after = 0;
      for (std::size_t w : g.successors(*it)) after = std::max(after, g.task(w).min_time() + tail_[w]);
      tail_[*it] = after;
    }
  }

  Time solve() {
    search(0, 0.0);
    return best_;
  }

 private:
  // Earliest t >= ready at which fewer than count(q) intervals of type q
  // overlap [t, t + length).
  Time earliest_start(TypeIndex q, Time ready, Time length) const {
    if (length == 0) return ready;
    const auto& list = busy_[q];
    std::vector<Time> candidates{ready};
    for (const auto& [s, e] : list) {
      if (e > ready) candidates.push_back(e);
    }
    std::sort(candidates.begin(), candidates.end());
    for (Time c : candidates) {
      if (fits(q, c, length)) return c;
    }
    return candidates.back();  // unreachable: the last finish always fits
  }

  bool fits(TypeIndex q, Time start, Time length) const {
    const auto& list = busy_[q];
    const Time end = start + length;
    auto covering = [&](Time x) {
      std::size_t count = 0;
      for (const auto& [s, e] : list) {
        if (s <= x && x < e) ++count;
      }
      return count;
    };
    if (covering(start) >= platform_.count(q)) return false;
    for (const auto& [s, e] : list) {
      if (s > start && s < end && covering(s) >= platform_.count(q)) return false;
    }
    return true;
  }

  void search(std::size_t placed, Time current) {
    const std::size_t n = g_.size();
    if (placed == n) {
      best_ = std::min(best_, current);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (done_[v]) continue;
      Time ready = 0;
      bool available = true;
      for (std::size_t u : g_.predecessors(v)) {
        if (!done_[u]) {
          available = false;
          break;
        }
        ready = std::max(ready, finish_[u]);
      }
      if (!available) continue;

      const Task& t = g_.task(v);
      for (TypeIndex q = 0; q < platform_.types(); ++q) {
        if (!t.allows(q)) continue;
        const Time length = t.time_on(q);
        const Time start = earliest_start(q, ready, length);
        const Time end = start + length;
        if (std::max(current, end + tail_[v]) >= best_) continue;
        done_[v] = true;
        finish_[v] = end;
        busy_[q].emplace_back(start, end);
        search(placed + 1, std::max(current, end));
        busy_[q].pop_back();
        done_[v] = false;
      }
    }
  }

  const TaskGraph& g_;
  const Platform& platform_;
  std::vector<Time> finish_;
  std::vector<bool> done_;
  std::vector<std::vector<std::pair<Time, Time>>> busy_;
  std::vector<Time> tail_;  // min-time critical path strictly after a task
  Time best_ = kInf;
};

}  // namespace

Time brute_force_opt(const TaskGraph& g, const Platform& platform) {
  if (g.size() > kBruteForceCap) {
    throw Error(ErrorCode::TooLarge, std::to_string(g.size()) + " tasks exceed the brute-force cap of " +
                                         std::to_string(kBruteForceCap));
  }
  if (platform.types() != 2) {
    throw Error(ErrorCode::TooLarge, "brute force handles two resource types only");
  }
  validate_graph(g, platform);
  if (g.empty()) return 0;
  return BruteForce(g, platform).solve();
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"hlp-est", "hlp-ols", "qhlp-est", "qhlp-ols",
                                              "heft",    "erls",    "eft",      "greedy",
                                              "random",  "r1",      "r2",       "r3"};
  return names;
}

namespace {

std::optional<Policy> pipeline_policy(const std::string& name) {
  if (name == "hlp-est" || name == "qhlp-est") return Policy::Est;
  if (name == "hlp-ols" || name == "qhlp-ols") return Policy::Ols;
  return std::nullopt;
}

Schedule run_non_pipeline(const std::string& name, const TaskGraph& g, const Platform& platform,
                          std::uint64_t seed) {
  if (name == "heft") return heft_schedule(g, platform);
  if (auto policy = parse_online_policy(name)) {
    return online_run(g, platform, *policy, ArrivalMode::natural(), seed).schedule;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm \"" + name + "\"");
}

}  // namespace

Schedule run_algorithm(const std::string& name, const TaskGraph& g, const Platform& platform,
                       std::uint64_t seed) {
  validate_graph(g, platform);
  if (auto policy = pipeline_policy(name)) return hlp_pipeline(g, platform, *policy);
  return run_non_pipeline(name, g, platform, seed);
}

std::string InstanceSpec::name() const {
  const std::string s = std::to_string(seed);
  if (family == "forkjoin") {
    return "forkjoin-p" + std::to_string(phases) + "-w" + std::to_string(width) + "-q" +
           std::to_string(types) + "-s" + s;
  }
  if (family == "heft-adv" || family == "erls-adv") {
    return family + "-m" + std::to_string(m) + "-k" + std::to_string(k);
  }
  if (family == "hlp-adv") return family + "-m" + std::to_string(m);
  return std::filesystem::path(path).stem().string();
}

std::string InstanceSpec::params() const {
  if (family == "forkjoin") {
    return "p=" + std::to_string(phases) + ";width=" + std::to_string(width) +
           ";q=" + std::to_string(types);
  }
  if (family == "heft-adv" || family == "erls-adv") {
    return "m=" + std::to_string(m) + ";k=" + std::to_string(k);
  }
  if (family == "hlp-adv") return "m=" + std::to_string(m);
  return "path=" + std::filesystem::path(path).filename().string();
}

BuiltInstance build_instance(const InstanceSpec& spec) {
  if (spec.family == "forkjoin") {
    return {gen_forkjoin({spec.phases, spec.width, spec.seed, spec.types}), std::nullopt};
  }
  if (spec.family == "heft-adv") {
    Instance in = gen_heft_adversary(spec.m, spec.k);
    return {std::move(in.graph), std::move(in.platform)};
  }
  if (spec.family == "hlp-adv") {
    Instance in = gen_hlp_adversary(spec.m);
    return {std::move(in.graph), std::move(in.platform)};
  }
  if (spec.family == "erls-adv") {
    Instance in = gen_erls_adversary(spec.m, spec.k);
    return {std::move(in.graph), std::move(in.platform)};
  }
  if (spec.family == "file") return {read_graph(spec.path), std::nullopt};
  throw Error(ErrorCode::InvalidArgument, "unknown instance family \"" + spec.family + "\"");
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw ParseError(0, "config: " + what); }

std::vector<std::size_t> size_list(const json& entry, const char* key, bool required) {
  auto it = entry.find(key);
  if (it == entry.end()) {
    if (required) config_error(std::string("missing \"") + key + "\"");
    return {};
  }
  std::vector<std::size_t> out;
  auto take = [&](const json& v) {
    if (!v.is_number_unsigned()) config_error(std::string("\"") + key + "\" must hold non-negative integers");
    out.push_back(v.get<std::size_t>());
  };
  if (it->is_array()) {
    for (const json& v : *it) take(v);
  } else {
    take(*it);
  }
  return out;
}

std::vector<Platform> platform_list(const json& v) {
  if (!v.is_array()) config_error("\"platforms\" must be an array of strings");
  std::vector<Platform> out;
  for (const json& p : v) {
    if (!p.is_string()) config_error("\"platforms\" must be an array of strings");
    out.push_back(parse_platform(p.get<std::string>()));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    throw ParseError(static_cast<std::size_t>(line), e.what());
  }
  if (!doc.is_object()) config_error("expected an object");

  ExperimentConfig config;
  std::vector<Platform> shared;
  if (auto it = doc.find("platforms"); it != doc.end()) shared = platform_list(*it);

  auto algos = doc.find("algorithms");
  if (algos == doc.end() || !algos->is_array()) config_error("\"algorithms\" must be an array");
  for (const json& a : *algos) {
    if (!a.is_string()) config_error("\"algorithms\" must hold strings");
    const std::string name = a.get<std::string>();
    const auto& known = algorithm_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      config_error("unknown algorithm \"" + name + "\"");
    }
    config.algorithms.push_back(name);
  }

  if (auto it = doc.find("threads"); it != doc.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() == 0) config_error("\"threads\" must be >= 1");
    config.threads = it->get<std::size_t>();
  }

  auto entries = doc.find("instances");
  if (entries == doc.end() || !entries->is_array()) config_error("\"instances\" must be an array");
  for (const json& entry : *entries) {
    if (!entry.is_object() || !entry.contains("family") || !entry["family"].is_string()) {
      config_error("each instance needs a \"family\" string");
    }
    const std::string family = entry["family"].get<std::string>();
    std::vector<Platform> own = shared;
    if (auto it = entry.find("platforms"); it != entry.end()) own = platform_list(*it);

    auto add = [&](InstanceSpec spec, std::vector<Platform> platforms) {
      config.instances.push_back(std::move(spec));
      config.platforms.push_back(std::move(platforms));
    };

    if (family == "forkjoin") {
      const auto phases = size_list(entry, "phases", true);
      const auto widths = size_list(entry, "width", true);
      const auto seeds = size_list(entry, "seeds", true);
      auto types = size_list(entry, "types", false);
      if (types.empty()) types.push_back(2);
      if (own.empty()) config_error("fork-join instances need \"platforms\"");
      for (std::size_t q : types) {
        for (std::size_t p : phases) {
          for (std::size_t w : widths) {
            for (std::size_t s : seeds) {
              InstanceSpec spec;
              spec.family = family;
              spec.phases = p;
              spec.width = w;
              spec.types = q;
              spec.seed = s;
              add(spec, own);
            }
          }
        }
      }
    } else if (family == "heft-adv" || family == "erls-adv" || family == "hlp-adv") {
      InstanceSpec spec;
      spec.family = family;
      const auto m = size_list(entry, "m", true);
      spec.m = m.front();
      if (family != "hlp-adv") spec.k = size_list(entry, "k", true).front();
      add(spec, {});
    } else if (family == "file") {
      auto it = entry.find("path");
      if (it == entry.end() || !it->is_string()) config_error("file instances need a \"path\"");
      InstanceSpec spec;
      spec.family = family;
      std::filesystem::path path = it->get<std::string>();
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      spec.path = path.string();
      if (own.empty()) config_error("file instances need \"platforms\"");
      add(spec, own);
    } else {
      config_error("unknown family \"" + family + "\"");
    }
  }
  return config;
}

namespace {

struct Cell {
  std::size_t instance = 0;
  std::optional<Platform> platform;  // empty: native
};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string error_status(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code()));
  return "Internal";
}

std::string run_cell(const ExperimentConfig& config, const Cell& cell) {
  using Clock = std::chrono::steady_clock;
  const InstanceSpec& spec = config.instances[cell.instance];
  const std::string seed = std::to_string(spec.seed);
  std::string params = spec.params();
  std::string platform_text = cell.platform ? cell.platform->to_string() : "native";

  auto row = [&](const std::string& algo, const std::string& makespan, const std::string& lp,
                 const std::string& cp, const std::string& ratio, const std::string& wall,
                 const std::string& status) {
    return csv_field(spec.name()) + "," + csv_field(spec.family) + "," + csv_field(params) + "," +
           seed + "," + csv_field(platform_text) + "," + csv_field(algo) + "," + makespan + "," + lp +
           "," + cp + "," + ratio + "," + wall + "," + status + "\n";
  };

  BuiltInstance built;
  Platform platform;
  try {
    built = build_instance(spec);
    platform = cell.platform ? *cell.platform : built.native_platform.value();
    platform_text = platform.to_string();
    validate_graph(built.graph, platform);
  } catch (const std::exception& e) {
    std::string out;
    for (const auto& algo : config.algorithms) out += row(algo, "", "", "", "", "", error_status(e));
    return out;
  }
  const TaskGraph& g = built.graph;

  std::string cp_text;
  try {
    cp_text = format_number(critical_path_min(g));
  } catch (const std::exception&) {
  }

  std::optional<LpSolution> lp;
  std::string lp_status;
  const auto lp_t0 = Clock::now();
  try {
    lp = solve_lp(build_hlp(g, platform));
  } catch (const std::exception& e) {
    lp_status = error_status(e);
  }
  const double lp_ms = std::chrono::duration<double, std::milli>(Clock::now() - lp_t0).count();
  const std::string lp_text = lp ? format_number(lp->objective) : "";

  if (g.size() <= kBruteForceCap && platform.types() == 2) {
    try {
      params += ";opt=" + format_number(brute_force_opt(g, platform));
    } catch (const std::exception&) {
    }
  }

  std::string out;
  for (const std::string& algo : config.algorithms) {
    const auto t0 = Clock::now();
    try {
      Schedule s;
      double extra_ms = 0;
      if (auto policy = pipeline_policy(algo)) {
        if (!lp) throw Error(ErrorCode::Infeasible, "relaxation failed: " + lp_status);
        s = run_pipeline(g, platform, *policy, &*lp).schedule;
        extra_ms = lp_ms;
      } else {
        s = run_non_pipeline(algo, g, platform, spec.seed);
      }
      const double ms =
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count() + extra_ms;
      validate_schedule(s, g, platform);
      const Time mk = s.empty() ? 0.0 : makespan(s);
      std::string ratio;
      if (lp && lp->objective > 0) ratio = format_number(mk / lp->objective);
      std::string wall;
      if (config.timing) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", ms);
        wall = buf;
      }
      out += row(algo, format_number(mk), lp_text, cp_text, ratio, wall, "ok");
    } catch (const std::exception& e) {
      out += row(algo, "", lp_text, cp_text, "", "", error_status(e));
    }
  }
  return out;
}

}  // namespace

std::string run_experiment(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < config.instances.size(); ++i) {
    if (config.platforms[i].empty()) {
      cells.push_back({i, std::nullopt});
    } else {
      for (const Platform& p : config.platforms[i]) cells.push_back({i, p});
    }
  }

  std::vector<std::string> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) rows[c] = run_cell(config, cells[c]);
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::string out(kRunCsvHeader);
  out += "\n";
  for (const auto& r : rows) out += r;
  return out;
}

namespace {

struct Stats {
  std::size_t count = 0;
  double sum = 0;
  double min = kInf;
  double max = -kInf;

  void add(double v) {
    ++count;
    sum += v;
    min = std::min(min, v);
    max = std::max(max, v);
  }
};

// Fields may be double-quoted; "" inside quotes is a literal quote.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        out.back() += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quote");
  return out;
}

double to_double(const std::string& text, std::size_t line) {
  double v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError(line, "not a number: \"" + text + "\"");
  }
  return v;
}

}  // namespace

std::string summarize(std::string_view run_csv) {
  struct Row {
    std::string instance, family, platform, algorithm;
    double makespan = 0;
    std::optional<double> ratio;
  };
  std::vector<Row> rows;
  std::size_t line_no = 0;
  bool header = true;
  while (!run_csv.empty()) {
    const std::size_t nl = run_csv.find('\n');
    std::string_view line = run_csv.substr(0, nl);
    run_csv = nl == std::string_view::npos ? std::string_view{} : run_csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kRunCsvHeader) throw ParseError(line_no, "unexpected header");
      header = false;
      continue;
    }
    const auto f = split_csv(line, line_no);
    if (f.size() != 12) throw ParseError(line_no, "expected 12 fields, got " + std::to_string(f.size()));
    if (f[11] != "ok") continue;
    Row r{f[0], f[1], f[4], f[5], to_double(f[6], line_no), std::nullopt};
    if (!f[9].empty()) r.ratio = to_double(f[9], line_no);
    rows.push_back(std::move(r));
  }
  if (header) throw ParseError(1, "empty run file");

  std::vector<std::string> algos;
  std::vector<std::string> families;
  for (const Row& r : rows) {
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) algos.push_back(r.algorithm);
    if (std::find(families.begin(), families.end(), r.family) == families.end()) families.push_back(r.family);
  }

  std::string out = "kind,family,algorithm,baseline,count,mean,min,max\n";
  auto emit = [&](const char* kind, const std::string& family, const std::string& algo,
                  const std::string& baseline, const Stats& s) {
    if (s.count == 0) return;
    out += std::string(kind) + "," + family + "," + algo + "," + baseline + "," +
           std::to_string(s.count) + "," + format_number(s.sum / static_cast<double>(s.count)) + "," +
           format_number(s.min) + "," + format_number(s.max) + "\n";
  };

  for (const std::string& family : families) {
    for (const std::string& algo : algos) {
      Stats s;
      for (const Row& r : rows) {
        if (r.family == family && r.algorithm == algo && r.ratio) s.add(*r.ratio);
      }
      emit("ratio", family, algo, "lp_star", s);
    }
  }

  // (instance, platform) -> algorithm -> makespan
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> by_cell;
  std::map<std::pair<std::string, std::string>, std::string> family_of;
  for (const Row& r : rows) {
    by_cell[{r.instance, r.platform}][r.algorithm] = r.makespan;
    family_of[{r.instance, r.platform}] = r.family;
  }
  for (const std::string& family : families) {
    for (const std::string& a : algos) {
      for (const std::string& b : algos) {
        if (a == b) continue;
        Stats s;
        for (const auto& [key, mk] : by_cell) {
          if (family_of[key] != family) continue;
          auto ia = mk.find(a);
          auto ib = mk.find(b);
          if (ia == mk.end() || ib == mk.end()) continue;
          if (ib->second == 0) {
            if (ia->second == 0) s.add(1.0);
            continue;
          }
          s.add(ia->second / ib->second);
        }
        emit("pairwise", family, a, b, s);
      }
    }
  }
  return out;
}

}  // namespace hybrid
