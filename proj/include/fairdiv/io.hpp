#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fairdiv/instance.hpp"

namespace fairdiv {

using Json = nlohmann::ordered_json;

/// Instance document:
///   {"format": "fairdiv-instance", "version": 1, "n": .., "m": .., "scale": ..,
///    "endowments": [..], "valuations": [[row of agent 0], ...], "metadata": {..}}
std::string serialize(const Instance& inst);
Instance parse_instance(const std::string& text);

/// Allocation document: owner vector plus free-form solver metadata.
struct AllocationFile {
  Allocation allocation;
  Json meta = Json::object();
};

std::string serialize(const AllocationFile& file);
AllocationFile parse_allocation(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fairdiv
