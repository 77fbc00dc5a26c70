#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "json.hpp"

#include "afl/datagen.hpp"
#include "afl/orchestrator.hpp"

namespace afl {

using Json = nlohmann::ordered_json;

// The config file is one JSON document mirroring ExperimentConfig in
// snake_case, plus the compare-only target_mode field. Missing fields take
// defaults; unknown fields are rejected.
struct ConfigDocument {
  ExperimentConfig experiment;
  TargetMode target_mode = TargetMode::kFixed;
};

Json to_json(const SyntheticSpec& spec);
Json to_json(const ExperimentConfig& cfg);
Json to_json(const ExperimentResult& result);
Json to_json(const ComparisonSummary& summary);
Json to_json(const FederatedDataset& dataset, const SyntheticSpec& spec);

ConfigDocument config_from_json(const Json& doc);
std::pair<SyntheticSpec, FederatedDataset> dataset_from_json(const Json& doc);

// Fixed column order: round,test_accuracy,selected_ids,mean_valuation,
// max_staleness. selected_ids are ';'-joined in draw order.
std::string round_records_csv(const std::vector<RoundRecord>& records);

// Shortest round-trip formatting, locale-independent.
std::string format_double(double value);

// Write to <path>.tmp in the same directory, then rename into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace afl
