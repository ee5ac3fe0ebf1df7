#pragma once
#include <json.hpp>
#include <string>
#include <vector>

#include "fnls/config.hpp"

namespace fnls {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kArtifactVersion = "0.1.0";

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// UTF-8, header row, doubles in shortest round-trip form.
std::string to_csv(const CsvTable& t);

struct ResultBundle {
  Json report;                // deterministic for a fixed config and seed
  std::vector<CsvTable> tables;
  std::string config_echo;
  Json provenance;            // version, timestamps, elapsed time (not deterministic)
};

ResultBundle run(const RunConfig& cfg);

// Writes report.json, <table>.csv, config.ini and provenance.json into dir (created if missing).
void emit(const ResultBundle& bundle, const std::string& dir);

}  // namespace fnls
