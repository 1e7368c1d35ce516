#include <fstream>

#include <json.hpp>

#include "ucgan/data/dataset.hpp"
#include "ucgan/error.hpp"
#include "ucgan/imaging/io.hpp"

namespace ucgan::data {

namespace fs = std::filesystem;

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  Manifest m;
  try {
    m.mode = parse_mode(j.value("mode", std::string("full_scale")));
    m.bit_depth = j.value("bit_depth", std::uint16_t{10});
    for (const auto& e : j.at("pairs")) {
      Manifest::Entry entry;
      entry.id = e.at("id").get<std::string>();
      entry.pan = base / e.at("pan").get<std::string>();
      entry.ms = base / e.at("ms").get<std::string>();
      if (e.contains("reference")) entry.reference = base / e.at("reference").get<std::string>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path.string() + ": " + e.what());
  }
  return m;
}

std::vector<ScenePair> load_pairs(const fs::path& manifest_path, bool with_reference) {
  const Manifest m = read_manifest(manifest_path);
  std::vector<ScenePair> pairs;
  for (const auto& e : m.entries) {
    ScenePair p;
    p.id = e.id;
    p.pan = imaging::load_raster(e.pan);
    p.lrms = imaging::load_raster(e.ms);
    if (with_reference) {
      if (!e.reference) throw ContractError("pair " + e.id + " has no reference image");
      p.reference = imaging::load_raster(*e.reference);
    }
    p.validate();
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<SourceScene> load_sources(const fs::path& manifest_path) {
  std::vector<SourceScene> out;
  for (auto& p : load_pairs(manifest_path, false)) out.push_back({p.id, std::move(p.pan), std::move(p.lrms)});
  return out;
}

void write_dataset(const fs::path& dir, const std::vector<ScenePair>& pairs, Mode mode) {
  fs::create_directories(dir);
  nlohmann::json list = nlohmann::json::array();
  std::uint16_t depth = pairs.empty() ? 10 : pairs.front().pan.bit_depth;
  for (const auto& p : pairs) {
    p.validate();
    nlohmann::json e = {{"id", p.id}, {"pan", p.id + "_pan.msr"}, {"ms", p.id + "_ms.msr"}};
    imaging::save_raster(p.pan, dir / (p.id + "_pan.msr"));
    imaging::save_raster(p.lrms, dir / (p.id + "_ms.msr"));
    if (p.reference) {
      imaging::save_raster(*p.reference, dir / (p.id + "_ref.msr"));
      e["reference"] = p.id + "_ref.msr";
    }
    list.push_back(std::move(e));
  }
  nlohmann::json j = {{"mode", to_string(mode)}, {"bit_depth", depth}, {"pairs", list}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw FormatError("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

}  // namespace ucgan::data
