#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "ucgan/error.hpp"
#include "ucgan/net/net.hpp"

namespace ucgan::net {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& in, const fs::path& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw FormatError("checkpoint " + path.string() + ": truncated");
  return v;
}

}  // namespace

void save_checkpoint(const fs::path& path, const std::vector<const ParameterSet<float>*>& sets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint " + path.string());
  std::uint32_t count = 0;
  for (const auto* s : sets) count += static_cast<std::uint32_t>(s->size());
  out.write("UCGK", 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, count);
  for (const auto* s : sets)
    for (const auto& p : *s) {
      put_u32(out, static_cast<std::uint32_t>(p.name.size()));
      out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
      const auto sh = p.tensor.shape();
      put_u32(out, 4);
      for (std::size_t d : {sh.n, sh.c, sh.h, sh.w}) put_u32(out, static_cast<std::uint32_t>(d));
      const auto data = p.tensor.data();
      out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
  if (!out) throw FormatError("failed writing checkpoint " + path.string());
}

NamedTensors read_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "UCGK", 4) != 0) {
    throw FormatError("checkpoint " + path.string() + ": bad magic");
  }
  const std::uint32_t version = get_u32(in, path);
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint " + path.string() + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32(in, path);
  NamedTensors out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = get_u32(in, path);
    if (len > 4096) throw FormatError("checkpoint " + path.string() + ": implausible name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError("checkpoint " + path.string() + ": truncated");
    const std::uint32_t rank = get_u32(in, path);
    if (rank == 0 || rank > 4) throw FormatError("checkpoint " + path.string() + ": bad rank for " + name);
    std::size_t dims[4] = {1, 1, 1, 1};
    for (std::uint32_t d = 0; d < rank; ++d) dims[4 - rank + d] = get_u32(in, path);
    const nn::Shape shape{dims[0], dims[1], dims[2], dims[3]};
    std::vector<float> values(shape.numel());
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float)))) {
      throw FormatError("checkpoint " + path.string() + ": truncated payload for " + name);
    }
    out.emplace_back(std::move(name), Tensor<float>(shape, std::move(values)));
  }
  return out;
}

void load_parameters(ParameterSet<float>& dst, const NamedTensors& entries) {
  for (auto& p : dst) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == p.name; });
    if (it == entries.end()) throw FormatError("checkpoint lacks parameter " + p.name);
    if (it->second.shape() != p.tensor.shape()) {
      throw FormatError("checkpoint shape " + it->second.shape().str() + " for " + p.name + " does not match " +
                        p.tensor.shape().str());
    }
    auto d = p.tensor.mutable_data();
    std::copy(it->second.data().begin(), it->second.data().end(), d.begin());
  }
}

BlockKind infer_block_kind(const NamedTensors& entries) {
  for (const auto& [name, t] : entries) {
    if (name.rfind("G.", 0) == 0 && name.find(".fc1.") != std::string::npos) return BlockKind::rca;
  }
  return BlockKind::residual;
}

Generator<float> load_generator(const fs::path& path, const imaging::FilterSpec& filter) {
  const auto entries = read_checkpoint(path);
  GeneratorConfig cfg;
  cfg.block = infer_block_kind(entries);
  cfg.filter = filter;
  Generator<float> g(cfg);
  load_parameters(g.params(), entries);
  return g;
}

}  // namespace ucgan::net
