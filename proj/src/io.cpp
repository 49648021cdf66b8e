#include "hybrid/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "number_format.hpp"

namespace hybrid {

using nlohmann::json;
using detail::format_number;

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    std::string reason = e.what();
    if (auto pos = reason.find("parse error"); pos != std::string::npos) reason = reason.substr(pos);
    throw ParseError(line_of(text, byte), reason);
  }
}

[[noreturn]] void structure_error(const std::string& where, const std::string& what) {
  throw ParseError(0, where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) structure_error(where, std::string("missing \"") + key + "\"");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) structure_error(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::size_t as_count(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) structure_error(where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) structure_error(where, "expected a number");
  return v.get<double>();
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    throw ParseError(line, "not a number: \"" + std::string(field) + "\"");
  }
  return value;
}

template <typename Int>
Int parse_integer(std::string_view field, std::size_t line) {
  Int value = 0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    throw ParseError(line, "not an integer: \"" + std::string(field) + "\"");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t end = line.find(sep, begin);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(begin));
      return out;
    }
    out.push_back(line.substr(begin, end - begin));
    begin = end + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

TaskGraph parse_graph(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) structure_error("document", "expected an object");
  const std::size_t q = as_count(member(doc, "q", "document"), "q");
  TaskGraph g(q);

  const json& tasks = member(doc, "tasks", "document");
  if (!tasks.is_array()) structure_error("tasks", "expected an array");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    const json& t = tasks[i];
    if (!t.is_object()) structure_error(where, "expected an object");
    const TaskId id = as_int(member(t, "id", where), where + ".id");
    const json& p = member(t, "p", where);
    if (!p.is_array()) structure_error(where + ".p", "expected an array");
    std::vector<Time> times;
    std::vector<TypeIndex> forbidden;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double v = as_number(p[k], where + ".p[" + std::to_string(k) + "]");
      if (v == -1.0) {
        forbidden.push_back(k);
        times.push_back(0.0);
      } else {
        times.push_back(v);
      }
    }
    std::string label;
    if (auto it = t.find("label"); it != t.end()) {
      if (!it->is_string()) structure_error(where + ".label", "expected a string");
      label = it->get<std::string>();
    }
    g.add_task(Task(id, std::move(times), std::move(forbidden), std::move(label)));
  }

  const json& edges = member(doc, "edges", "document");
  if (!edges.is_array()) structure_error("edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_array() || e.size() != 2) structure_error(where, "expected [from, to]");
    g.add_edge(as_int(e[0], where), as_int(e[1], where));
  }
  return g;
}

std::string format_graph(const TaskGraph& g) {
  std::string out = "{\"q\": " + std::to_string(g.type_count()) + ",\n \"tasks\": [";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Task& t = g.task(i);
    out += i == 0 ? "\n  " : ",\n  ";
    out += "{\"id\": " + std::to_string(t.id);
    if (!t.label.empty()) out += ", \"label\": " + json(t.label).dump();
    out += ", \"p\": [";
    for (TypeIndex q = 0; q < t.arity(); ++q) {
      if (q > 0) out += ", ";
      out += t.allows(q) ? format_number(t.proc_times[q]) : "-1";
    }
    out += "]}";
  }
  out += g.empty() ? "],\n \"edges\": [" : "\n ],\n \"edges\": [";
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += "[" + std::to_string(e.from) + ", " + std::to_string(e.to) + "]";
  }
  out += g.edges().empty() ? "]}\n" : "\n ]}\n";
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

TaskGraph read_graph(const std::filesystem::path& path) { return parse_graph(read_text(path)); }

void write_graph(const TaskGraph& g, const std::filesystem::path& path) {
  write_text(path, format_graph(g));
}

Platform parse_platform(std::string_view text) {
  std::vector<std::size_t> counts;
  for (std::string_view field : split(trim(text), ',')) {
    field = trim(field);
    if (field.empty()) throw ParseError(1, "empty machine count in \"" + std::string(text) + "\"");
    counts.push_back(parse_integer<std::size_t>(field, 1));
  }
  return Platform(std::move(counts));
}

std::string format_schedule_csv(const Schedule& s) {
  std::string out = "task_id,type,machine,start,finish\n";
  for (const Placement& p : s.placements) {
    out += std::to_string(p.task) + "," + std::to_string(p.type) + "," + std::to_string(p.machine) +
           "," + format_number(p.start) + "," + format_number(p.finish) + "\n";
  }
  return out;
}

Schedule parse_schedule_csv(std::string_view text) {
  Schedule s;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "task_id,type,machine,start,finish") {
        throw ParseError(line_no, "expected header task_id,type,machine,start,finish");
      }
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5) throw ParseError(line_no, "expected 5 fields");
    s.placements.push_back({parse_integer<TaskId>(trim(f[0]), line_no),
                            parse_integer<TypeIndex>(trim(f[1]), line_no),
                            parse_integer<std::size_t>(trim(f[2]), line_no),
                            parse_double(trim(f[3]), line_no), parse_double(trim(f[4]), line_no)});
  }
  if (header) throw ParseError(1, "empty schedule file");
  return s;
}

std::string format_schedule_json(const Schedule& s) {
  std::string out = "{\"format\": \"hybridsched-schedule\", \"version\": 1";
  out += ", \"makespan\": " + (s.empty() ? std::string("0") : format_number(makespan(s)));
  out += ",\n \"placements\": [";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Placement& p = s.placements[i];
    out += i == 0 ? "\n  " : ",\n  ";
    out += "{\"task\": " + std::to_string(p.task) + ", \"type\": " + std::to_string(p.type) +
           ", \"machine\": " + std::to_string(p.machine) + ", \"start\": " + format_number(p.start) +
           ", \"finish\": " + format_number(p.finish) + "}";
  }
  out += s.empty() ? "]}\n" : "\n ]}\n";
  return out;
}

Schedule parse_schedule_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) structure_error("document", "expected an object");
  const json& format = member(doc, "format", "document");
  if (format != "hybridsched-schedule") structure_error("format", "unknown schedule format");
  const json& list = member(doc, "placements", "document");
  if (!list.is_array()) structure_error("placements", "expected an array");
  Schedule s;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "placements[" + std::to_string(i) + "]";
    const json& p = list[i];
    if (!p.is_object()) structure_error(where, "expected an object");
    s.placements.push_back({as_int(member(p, "task", where), where + ".task"),
                            as_count(member(p, "type", where), where + ".type"),
                            as_count(member(p, "machine", where), where + ".machine"),
                            as_number(member(p, "start", where), where + ".start"),
                            as_number(member(p, "finish", where), where + ".finish")});
  }
  return s;
}

Schedule read_schedule(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  return path.extension() == ".json" ? parse_schedule_json(text) : parse_schedule_csv(text);
}

void write_schedule(const Schedule& s, const std::filesystem::path& path) {
  write_text(path, path.extension() == ".json" ? format_schedule_json(s) : format_schedule_csv(s));
}

}  // namespace hybrid
