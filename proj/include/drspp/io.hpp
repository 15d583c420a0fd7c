#pragma once

#include "drspp/datagen.hpp"
#include "drspp/formulations.hpp"

#include <json.hpp>

#include <string>

namespace drspp {

inline constexpr int kFormatVersion = 1;

nlohmann::json to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

nlohmann::json to_json(const InstanceConfig& c);
InstanceConfig config_from_json(const nlohmann::json& j, const InstanceConfig& defaults = {});

/// Full instance document with "format": 1.
nlohmann::json to_json(const Instance& inst);
/// Throws FormatError on a missing or unsupported format version or malformed content.
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Graph& g, const MultiStagePolicy& policy);
MultiStagePolicy policy_from_json(const nlohmann::json& j, const Graph& g);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Instance wrapping the introductory example, without samples.
Instance example1_instance();

GraphClass graph_class_from_string(const std::string& s);
AuxMode aux_mode_from_string(const std::string& s);
const char* to_string(GraphClass c);

} // namespace drspp
