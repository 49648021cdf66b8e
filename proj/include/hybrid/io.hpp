#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hybrid/schedule.hpp"
#include "hybrid/task_graph.hpp"

namespace hybrid {

/// Graph JSON:
///   {"q": 2,
///    "tasks": [{"id": 0, "label": "start", "p": [3.5, -1]}, ...],
///    "edges": [[0, 1], ...]}
/// A processing time of -1 marks a forbidden type. Numbers are written in
/// shortest round-trip form, so read(write(g)) == g bit for bit.
TaskGraph parse_graph(std::string_view text);
std::string format_graph(const TaskGraph& g);

/// Throws IoError, or ParseError carrying the 1-based line (0 when the
/// problem is structural rather than syntactic).
TaskGraph read_graph(const std::filesystem::path& path);
void write_graph(const TaskGraph& g, const std::filesystem::path& path);

/// "16,4" or "16,2,1". Throws ParseError / InvalidArgument.
Platform parse_platform(std::string_view text);

/// CSV with header task_id,type,machine,start,finish, one row per placement
/// in commit order.
std::string format_schedule_csv(const Schedule& s);
Schedule parse_schedule_csv(std::string_view text);

/// {"format": "hybridsched-schedule", "version": 1, "makespan": ..,
///  "placements": [{"task":..,"type":..,"machine":..,"start":..,"finish":..}]}
std::string format_schedule_json(const Schedule& s);
Schedule parse_schedule_json(std::string_view text);

/// Picks the format from the extension (.json, otherwise CSV).
Schedule read_schedule(const std::filesystem::path& path);
void write_schedule(const Schedule& s, const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace hybrid
