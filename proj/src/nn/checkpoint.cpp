#include "pgorder/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "pgorder/error.hpp"

namespace pgorder::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'G', 'O', 'R', 'D', 'C', 'K', 'P'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(std::string("checkpoint truncated while reading ") + what);
  }
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4, what);
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

nlohmann::json header_json(const Checkpoint& c) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& r : c.history) {
    history.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_tau", r.val_tau},
                       {"val_pmr", r.val_pmr}});
  }
  const auto& m = c.config;
  return {{"config",
           {{"hidden", m.hidden},
            {"embed_dim", m.embed_dim},
            {"steps", m.steps},
            {"entity_buckets", m.entity_buckets},
            {"variant", std::string(variant_name(m.variant))},
            {"embedder", m.embedder},
            {"embed_seed", m.embed_seed},
            {"coref", m.coref},
            {"seed", m.seed}}},
          {"epoch", c.epoch},
          {"history", history}};
}

void apply_header(const nlohmann::json& j, Checkpoint& c) {
  const auto& m = j.at("config");
  c.config.hidden = m.at("hidden").get<int>();
  c.config.embed_dim = m.at("embed_dim").get<int>();
  c.config.steps = m.at("steps").get<int>();
  c.config.entity_buckets = m.at("entity_buckets").get<int>();
  c.config.variant = parse_variant(m.at("variant").get<std::string>());
  c.config.embedder = m.at("embedder").get<std::string>();
  c.config.embed_seed = m.at("embed_seed").get<std::uint64_t>();
  c.config.coref = m.at("coref").get<bool>();
  c.config.seed = m.at("seed").get<std::uint64_t>();
  c.epoch = j.at("epoch").get<int>();
  for (const auto& r : j.at("history")) {
    c.history.push_back({r.at("epoch").get<int>(), r.at("train_loss").get<double>(),
                         r.at("val_tau").get<double>(), r.at("val_pmr").get<double>()});
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kCheckpointVersion);
  const std::string header = header_json(ckpt).dump();
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  put_u32(out, static_cast<std::uint32_t>(ckpt.params.entries().size()));
  for (const auto& e : ckpt.params.entries()) {
    put_u32(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put_u32(out, static_cast<std::uint32_t>(e.value.rows));
    put_u32(out, static_cast<std::uint32_t>(e.value.cols));
    for (float v : e.value.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw Error("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  read_exact(in, magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw Error("not a checkpoint file (bad magic)");
  const std::uint32_t version = get_u32(in, "version");
  if (version != kCheckpointVersion) {
    throw Error("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t header_size = get_u32(in, "header length");
  std::string header(header_size, '\0');
  read_exact(in, header.data(), header.size(), "header");
  Checkpoint c;
  try {
    apply_header(nlohmann::json::parse(header), c);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("corrupt checkpoint header: ") + e.what());
  }
  const std::uint32_t count = get_u32(in, "parameter count");
  for (std::uint32_t p = 0; p < count; ++p) {
    std::string name(get_u32(in, "parameter name length"), '\0');
    read_exact(in, name.data(), name.size(), "parameter name");
    const auto rows = get_u32(in, "parameter shape");
    const auto cols = get_u32(in, "parameter shape");
    if (rows > (1u << 24) || cols > (1u << 24)) throw Error("corrupt checkpoint: parameter '" + name + "' shape");
    Matrix<float> m(static_cast<int>(rows), static_cast<int>(cols));
    std::vector<unsigned char> raw(m.data.size() * 4);
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), name.c_str());
    for (std::size_t i = 0; i < m.data.size(); ++i) {
      const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                                 static_cast<std::uint32_t>(raw[4 * i + 1]) << 8 |
                                 static_cast<std::uint32_t>(raw[4 * i + 2]) << 16 |
                                 static_cast<std::uint32_t>(raw[4 * i + 3]) << 24;
      m.data[i] = std::bit_cast<float>(bits);
    }
    c.params.add(std::move(name), std::move(m));
  }
  const auto expected = ParamStore<float>::zeros_like(ParamStore<float>::initialize(c.config, 0));
  if (expected.entries().size() != c.params.entries().size()) {
    throw Error("checkpoint parameters do not match its configuration");
  }
  for (std::size_t i = 0; i < expected.entries().size(); ++i) {
    const auto& want = expected.entries()[i];
    const auto& got = c.params.entries()[i];
    if (want.name != got.name || !want.value.same_shape(got.value)) {
      throw Error("checkpoint parameter '" + got.name + "' does not match its configuration");
    }
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    write_checkpoint(out, ckpt);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void require_compatible(const Checkpoint& ckpt, GraphVariant requested, bool force) {
  if (requested == ckpt.config.variant || force) return;
  throw Error("checkpoint was trained with graph variant '" + std::string(variant_name(ckpt.config.variant)) +
              "', not '" + std::string(variant_name(requested)) + "' (pass --force to override)");
}

}  // namespace pgorder::nn
