#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "tgate/calibrate.hpp"

namespace tgate {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

/// Write through a temporary file in the same directory and rename, so a
/// failed run never leaves a partial file behind.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string csv_escape(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::string str() const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

Json to_json(const TrapSpec& trap);
Json to_json(const GateConfig& config);
Json to_json(const SpaceSpec& space);
Json to_json(const GateRunOptions& options);
Json to_json(const FidelityReport& report);
Json to_json(const SweepPoint& point);
Json to_json(const PairStudy& study);

FidelityReport fidelity_report_from_json(const Json& j);
SweepPoint sweep_point_from_json(const Json& j);
PairStudy pair_study_from_json(const Json& j);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace tgate
