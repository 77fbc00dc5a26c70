#include "afl/json_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <system_error>

namespace afl {

namespace {

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
}

void check_keys(const Json& obj, const std::string& path, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError(path.empty() ? "unknown field: " + key
                                     : path + ": unknown field: " + key);
    }
  }
}

double get_double(const Json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (!j.is_number()) throw ConfigError(path + key + ": expected a number");
  return j.get<double>();
}

int get_int(const Json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (!j.is_number_integer()) throw ConfigError(path + key + ": expected an integer");
  return j.get<int>();
}

std::uint64_t get_u64(const Json& obj, const std::string& path, const char* key,
                      std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (!(j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0))) {
    throw ConfigError(path + key + ": expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

bool get_bool(const Json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (!j.is_boolean()) throw ConfigError(path + key + ": expected true or false");
  return j.get<bool>();
}

std::string get_string(const Json& obj, const std::string& path, const char* key,
                       std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& j = obj.at(key);
  if (!j.is_string()) throw ConfigError(path + key + ": expected a string");
  return j.get<std::string>();
}

SyntheticSpec spec_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path,
             {"d", "num_clients", "n_min", "n_max", "minority_fraction", "separation",
              "noise_rate", "noise_decay", "skew", "seed"});
  SyntheticSpec spec;
  const std::string p = path + ".";
  spec.d = get_int(j, p, "d", spec.d);
  spec.num_clients = get_int(j, p, "num_clients", spec.num_clients);
  spec.n_min = get_int(j, p, "n_min", spec.n_min);
  spec.n_max = get_int(j, p, "n_max", spec.n_max);
  spec.minority_fraction = get_double(j, p, "minority_fraction", spec.minority_fraction);
  spec.separation = get_double(j, p, "separation", spec.separation);
  spec.noise_rate = get_double(j, p, "noise_rate", spec.noise_rate);
  spec.noise_decay = get_double(j, p, "noise_decay", spec.noise_decay);
  spec.skew = get_double(j, p, "skew", spec.skew);
  spec.seed = get_u64(j, p, "seed", spec.seed);
  return spec;
}

Json policy_to_json(const SelectionPolicy& policy) {
  return Json{{"kind", policy.kind == PolicyKind::kUniform ? "uniform" : "afl"},
              {"temperature", policy.temperature},
              {"uniform_mix", policy.uniform_mix},
              {"clients_per_round", policy.clients_per_round}};
}

SelectionPolicy policy_from_json(const Json& j) {
  require_object(j, "policy");
  check_keys(j, "policy", {"kind", "temperature", "uniform_mix", "clients_per_round"});
  SelectionPolicy policy;
  const std::string kind = get_string(j, "policy.", "kind", "afl");
  if (kind == "uniform") {
    policy.kind = PolicyKind::kUniform;
  } else if (kind == "afl") {
    policy.kind = PolicyKind::kAfl;
  } else {
    throw ConfigError("policy.kind: must be \"uniform\" or \"afl\", got \"" + kind + "\"");
  }
  policy.temperature = get_double(j, "policy.", "temperature", policy.temperature);
  policy.uniform_mix = get_double(j, "policy.", "uniform_mix", policy.uniform_mix);
  policy.clients_per_round = get_int(j, "policy.", "clients_per_round", policy.clients_per_round);
  return policy;
}

Json train_to_json(const TrainConfig& train) {
  Json j{{"learning_rate", train.learning_rate},
         {"local_epochs", train.local_epochs}};
  if (train.batch_size == TrainConfig::kFullBatch) {
    j["batch_size"] = "full";
  } else {
    j["batch_size"] = train.batch_size;
  }
  return j;
}

TrainConfig train_from_json(const Json& j) {
  require_object(j, "train");
  check_keys(j, "train", {"learning_rate", "local_epochs", "batch_size"});
  TrainConfig train;
  train.learning_rate = get_double(j, "train.", "learning_rate", train.learning_rate);
  train.local_epochs = get_int(j, "train.", "local_epochs", train.local_epochs);
  if (j.contains("batch_size")) {
    const Json& b = j.at("batch_size");
    if (b.is_string()) {
      if (b.get<std::string>() != "full") {
        throw ConfigError("train.batch_size: must be a positive integer or \"full\"");
      }
      train.batch_size = TrainConfig::kFullBatch;
    } else if (b.is_number_integer() && b.get<int>() >= 1) {
      train.batch_size = b.get<int>();
    } else {
      throw ConfigError("train.batch_size: must be a positive integer or \"full\"");
    }
  }
  return train;
}

Json privacy_to_json(const PrivacyConfig& privacy) {
  return Json{{"enabled", privacy.enabled},
              {"epsilon", privacy.epsilon},
              {"clip_bound", privacy.clip_bound}};
}

PrivacyConfig privacy_from_json(const Json& j) {
  require_object(j, "privacy");
  check_keys(j, "privacy", {"enabled", "epsilon", "clip_bound"});
  PrivacyConfig privacy;
  privacy.enabled = get_bool(j, "privacy.", "enabled", privacy.enabled);
  privacy.epsilon = get_double(j, "privacy.", "epsilon", privacy.epsilon);
  privacy.clip_bound = get_double(j, "privacy.", "clip_bound", privacy.clip_bound);
  return privacy;
}

Json record_to_json(const RoundRecord& record) {
  Json staleness = Json::object();
  for (const auto& [gap, count] : record.staleness_histogram) {
    staleness[std::to_string(gap)] = count;
  }
  return Json{{"round", record.round},
              {"selected", record.selected},
              {"test_accuracy", record.test_accuracy},
              {"mean_valuation", record.mean_valuation},
              {"staleness_histogram", staleness},
              {"model_transmissions", record.model_transmissions}};
}

Json rounds_to_target_json(const std::optional<int>& value) {
  if (value) return Json(*value);
  return Json("not reached");
}

Json dataset_slice_to_json(const ClientDataset& data) {
  Json features = Json::array();
  for (Index i = 0; i < data.size(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < data.dim(); ++j) row.push_back(data.features(i, j));
    features.push_back(std::move(row));
  }
  Json labels = Json::array();
  for (Index i = 0; i < data.size(); ++i) labels.push_back(static_cast<int>(data.labels(i)));
  return Json{{"features", std::move(features)}, {"labels", std::move(labels)}};
}

ClientDataset dataset_slice_from_json(const Json& j, const std::string& path, int dim) {
  require_object(j, path);
  check_keys(j, path, {"features", "labels"});
  if (!j.contains("features") || !j.at("features").is_array() || j.at("features").empty()) {
    throw ConfigError(path + ".features: expected a nonempty array of rows");
  }
  if (!j.contains("labels") || !j.at("labels").is_array()) {
    throw ConfigError(path + ".labels: expected an array");
  }
  const Json& rows = j.at("features");
  const Json& labels = j.at("labels");
  if (labels.size() != rows.size()) {
    throw ConfigError(path + ": features and labels disagree on example count");
  }
  ClientDataset data;
  data.features.resize(static_cast<Index>(rows.size()), dim);
  data.labels.resize(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim)) {
      throw ConfigError(path + ".features: row " + std::to_string(i) + " does not have " +
                        std::to_string(dim) + " entries");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number()) throw ConfigError(path + ".features: non-numeric entry");
      data.features(static_cast<Index>(i), static_cast<Index>(c)) = row[c].get<double>();
    }
    const Json& label = labels[i];
    if (!label.is_number_integer() ||
        (label.get<int>() != 0 && label.get<int>() != 1)) {
      throw ConfigError(path + ".labels: entry " + std::to_string(i) + " must be 0 or 1");
    }
    data.labels(static_cast<Index>(i)) = label.get<int>();
  }
  validate_dataset(data);
  return data;
}

}  // namespace

Json to_json(const SyntheticSpec& spec) {
  return Json{{"d", spec.d},
              {"num_clients", spec.num_clients},
              {"n_min", spec.n_min},
              {"n_max", spec.n_max},
              {"minority_fraction", spec.minority_fraction},
              {"separation", spec.separation},
              {"noise_rate", spec.noise_rate},
              {"noise_decay", spec.noise_decay},
              {"skew", spec.skew},
              {"seed", spec.seed}};
}

Json to_json(const ExperimentConfig& cfg) {
  return Json{{"data", to_json(cfg.data)},
              {"policy", policy_to_json(cfg.policy)},
              {"train", train_to_json(cfg.train)},
              {"privacy", privacy_to_json(cfg.privacy)},
              {"rounds", cfg.rounds},
              {"target_accuracy", cfg.target_accuracy},
              {"master_seed", cfg.master_seed},
              {"valuation_kind", cfg.valuation_kind == ValueKind::kLoss ? "loss" : "count"},
              {"count_threshold", cfg.count_threshold}};
}

ConfigDocument config_from_json(const Json& doc) {
  require_object(doc, "config");
  check_keys(doc, "", {"data", "policy", "train", "privacy", "rounds", "target_accuracy",
                       "master_seed", "valuation_kind", "count_threshold", "target_mode"});
  ConfigDocument out;
  ExperimentConfig& cfg = out.experiment;
  if (doc.contains("data")) cfg.data = spec_from_json(doc.at("data"), "data");
  if (doc.contains("policy")) cfg.policy = policy_from_json(doc.at("policy"));
  if (doc.contains("train")) cfg.train = train_from_json(doc.at("train"));
  if (doc.contains("privacy")) cfg.privacy = privacy_from_json(doc.at("privacy"));
  cfg.rounds = get_int(doc, "", "rounds", cfg.rounds);
  cfg.target_accuracy = get_double(doc, "", "target_accuracy", cfg.target_accuracy);
  cfg.master_seed = get_u64(doc, "", "master_seed", cfg.master_seed);
  const std::string kind = get_string(doc, "", "valuation_kind", "loss");
  if (kind == "loss") {
    cfg.valuation_kind = ValueKind::kLoss;
  } else if (kind == "count") {
    cfg.valuation_kind = ValueKind::kCount;
  } else {
    throw ConfigError("valuation_kind: must be \"loss\" or \"count\", got \"" + kind + "\"");
  }
  cfg.count_threshold = get_double(doc, "", "count_threshold", cfg.count_threshold);
  const std::string mode = get_string(doc, "", "target_mode", "fixed");
  if (mode == "fixed") {
    out.target_mode = TargetMode::kFixed;
  } else if (mode == "uniform_final") {
    out.target_mode = TargetMode::kUniformFinal;
  } else {
    throw ConfigError("target_mode: must be \"fixed\" or \"uniform_final\", got \"" + mode + "\"");
  }
  validate(cfg);
  return out;
}

Json to_json(const ExperimentResult& result) {
  Json rounds = Json::array();
  for (const RoundRecord& record : result.rounds) rounds.push_back(record_to_json(record));
  Json final_model = Json::object();
  Json weights = Json::array();
  for (Index i = 0; i < result.final_model.dim(); ++i) {
    weights.push_back(result.final_model.weights(i));
  }
  final_model["weights"] = std::move(weights);
  final_model["bias"] = result.final_model.bias;
  return Json{{"config", to_json(result.config)},
              {"rounds_to_target", rounds_to_target_json(result.rounds_to_target)},
              {"final_model", std::move(final_model)},
              {"rounds", std::move(rounds)}};
}

Json to_json(const ComparisonSummary& summary) {
  Json per_seed = Json::array();
  for (const SeedComparison& entry : summary.per_seed) {
    per_seed.push_back(
        Json{{"seed", entry.seed},
             {"target_accuracy", entry.target_accuracy},
             {"uniform_rounds_to_target", rounds_to_target_json(entry.uniform_rounds)},
             {"afl_rounds_to_target", rounds_to_target_json(entry.afl_rounds)},
             {"uniform_final_accuracy", entry.uniform_final_accuracy},
             {"afl_final_accuracy", entry.afl_final_accuracy},
             {"relative_reduction", entry.relative_reduction}});
  }
  return Json{{"config", to_json(summary.base_config)},
              {"target_mode",
               summary.target_mode == TargetMode::kFixed ? "fixed" : "uniform_final"},
              {"afl_wins", summary.afl_wins},
              {"median_relative_reduction", summary.median_relative_reduction},
              {"median_abs_accuracy_delta", summary.median_abs_accuracy_delta},
              {"per_seed", std::move(per_seed)}};
}

Json to_json(const FederatedDataset& dataset, const SyntheticSpec& spec) {
  Json clients = Json::array();
  for (const ClientDataset& client : dataset.clients) {
    clients.push_back(dataset_slice_to_json(client));
  }
  return Json{{"spec", to_json(spec)},
              {"clients", std::move(clients)},
              {"test_set", dataset_slice_to_json(dataset.test_set)},
              {"per_client_minority_fraction", dataset.per_client_minority_fraction}};
}

std::pair<SyntheticSpec, FederatedDataset> dataset_from_json(const Json& doc) {
  require_object(doc, "dataset");
  check_keys(doc, "dataset", {"spec", "clients", "test_set", "per_client_minority_fraction"});
  if (!doc.contains("spec")) throw ConfigError("dataset.spec: missing");
  const SyntheticSpec spec = spec_from_json(doc.at("spec"), "dataset.spec");
  validate_spec(spec);
  if (!doc.contains("clients") || !doc.at("clients").is_array()) {
    throw ConfigError("dataset.clients: expected an array");
  }
  if (static_cast<int>(doc.at("clients").size()) != spec.num_clients) {
    throw ConfigError("dataset.clients: expected " + std::to_string(spec.num_clients) +
                      " clients, got " + std::to_string(doc.at("clients").size()));
  }
  if (!doc.contains("test_set")) throw ConfigError("dataset.test_set: missing");

  FederatedDataset dataset;
  dataset.clients.reserve(doc.at("clients").size());
  for (std::size_t i = 0; i < doc.at("clients").size(); ++i) {
    dataset.clients.push_back(dataset_slice_from_json(
        doc.at("clients")[i], "dataset.clients[" + std::to_string(i) + "]", spec.d));
  }
  dataset.test_set = dataset_slice_from_json(doc.at("test_set"), "dataset.test_set", spec.d);
  dataset.per_client_minority_fraction.reserve(dataset.clients.size());
  for (const ClientDataset& client : dataset.clients) {
    dataset.per_client_minority_fraction.push_back(minority_fraction(client));
  }
  return {spec, dataset};
}

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string round_records_csv(const std::vector<RoundRecord>& records) {
  std::string csv = "round,test_accuracy,selected_ids,mean_valuation,max_staleness\n";
  for (const RoundRecord& record : records) {
    csv += std::to_string(record.round);
    csv += ',';
    csv += format_double(record.test_accuracy);
    csv += ',';
    for (std::size_t i = 0; i < record.selected.size(); ++i) {
      if (i > 0) csv += ';';
      csv += std::to_string(record.selected[i]);
    }
    csv += ',';
    csv += format_double(record.mean_valuation);
    csv += ',';
    csv += std::to_string(record.max_staleness());
    csv += '\n';
  }
  return csv;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace afl
