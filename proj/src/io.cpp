#include "fairdiv/io.hpp"

#include <fstream>
#include <sstream>

namespace fairdiv {

namespace {

constexpr const char* kInstanceFormat = "fairdiv-instance";
constexpr const char* kAllocationFormat = "fairdiv-allocation";

[[noreturn]] void malformed(const std::string& why) {
  throw InstanceError(InstanceErrc::malformed_document, "malformed document: " + why);
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    malformed(e.what());
  }
}

template <typename T>
T field(const Json& doc, const char* key) {
  if (!doc.contains(key)) malformed(std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    malformed(std::string("field '") + key + "': " + e.what());
  }
}

void check_format(const Json& doc, const char* expected) {
  if (!doc.is_object()) malformed("top level is not an object");
  if (field<std::string>(doc, "format") != expected) malformed(std::string("format is not ") + expected);
  if (field<int>(doc, "version") != 1) malformed("unsupported version");
}

}  // namespace

std::string serialize(const Instance& inst) {
  Json doc;
  doc["format"] = kInstanceFormat;
  doc["version"] = 1;
  doc["n"] = inst.agents();
  doc["m"] = inst.goods();
  doc["scale"] = inst.scale();
  doc["endowments"] = Json::array();
  for (Agent i = 0; i < inst.agents(); ++i) doc["endowments"].push_back(inst.endowment(i));
  doc["valuations"] = Json::array();
  for (Agent i = 0; i < inst.agents(); ++i) {
    Json row = Json::array();
    for (Good g = 0; g < inst.goods(); ++g) row.push_back(inst.value(i, g));
    doc["valuations"].push_back(std::move(row));
  }
  Json meta = Json::object();
  meta["family"] = inst.metadata().family;
  meta["params"] = Json::object();
  for (const auto& [k, v] : inst.metadata().params) meta["params"][k] = v;
  doc["metadata"] = std::move(meta);
  return doc.dump(2) + "\n";
}

Instance parse_instance(const std::string& text) {
  const Json doc = parse_json(text);
  check_format(doc, kInstanceFormat);
  const int n = field<int>(doc, "n");
  const int m = field<int>(doc, "m");
  if (n < 1 || m < 1) throw InstanceError(InstanceErrc::dimension_mismatch, "n and m must be positive");
  const auto endow = field<std::vector<Value>>(doc, "endowments");
  const auto rows = field<std::vector<std::vector<Value>>>(doc, "valuations");
  if (static_cast<int>(endow.size()) != n)
    throw InstanceError(InstanceErrc::dimension_mismatch, "endowments length differs from n");
  if (static_cast<int>(rows.size()) != n)
    throw InstanceError(InstanceErrc::dimension_mismatch, "valuation row count differs from n");

  ValueMatrix v(n, m);
  ValueVector e(n);
  for (Agent i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != m)
      throw InstanceError(InstanceErrc::dimension_mismatch, "valuation row length differs from m");
    for (Good g = 0; g < m; ++g) v(i, g) = row[static_cast<std::size_t>(g)];
    e(i) = endow[static_cast<std::size_t>(i)];
  }

  Metadata meta;
  if (doc.contains("scale")) meta.scale = field<std::int64_t>(doc, "scale");
  if (doc.contains("metadata")) {
    const Json& md = doc.at("metadata");
    if (!md.is_object()) malformed("metadata is not an object");
    if (md.contains("family")) meta.family = field<std::string>(md, "family");
    if (md.contains("params")) meta.params = field<std::map<std::string, std::string>>(md, "params");
  }
  return Instance(std::move(v), std::move(e), std::move(meta));
}

std::string serialize(const AllocationFile& file) {
  Json doc;
  doc["format"] = kAllocationFormat;
  doc["version"] = 1;
  doc["n"] = file.allocation.agents();
  doc["m"] = file.allocation.goods();
  doc["owner"] = Json::array();
  for (Agent a : file.allocation.owners()) doc["owner"].push_back(a);
  doc["meta"] = file.meta;
  return doc.dump(2) + "\n";
}

AllocationFile parse_allocation(const std::string& text) {
  const Json doc = parse_json(text);
  check_format(doc, kAllocationFormat);
  const int n = field<int>(doc, "n");
  auto owner = field<std::vector<Agent>>(doc, "owner");
  if (doc.contains("m") && field<int>(doc, "m") != static_cast<int>(owner.size()))
    malformed("owner length differs from m");
  try {
    AllocationFile out{Allocation(std::move(owner), n)};
    if (doc.contains("meta")) out.meta = doc.at("meta");
    return out;
  } catch (const std::invalid_argument& e) {
    malformed(e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace fairdiv
