// Copyright 2026 ODC library developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "odc/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include <json.hpp>

#include "odc/errors.hpp"
#include "odc/version.hpp"

namespace odc {

namespace {

using json = nlohmann::json;

constexpr std::array<char, 8> kMagic = {'O', 'D', 'C', 'M', 'O', 'D', 'E', 'L'};

void store_u32le(unsigned char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

void store_u64le(unsigned char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t load_u32le(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
  return v;
}

std::uint64_t load_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

struct Block {
  std::string name;
  std::string type;  // "f64" | "i64"
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<unsigned char> bytes;
};

class ArchiveBuilder {
 public:
  /// Row-major little-endian float64 payload.
  void add_f64(const std::string& name, const Eigen::Ref<const Matrix>& M) {
    Block b;
    b.name = name;
    b.type = "f64";
    b.rows = M.rows();
    b.cols = M.cols();
    b.bytes.resize(static_cast<std::size_t>(M.size()) * 8);
    std::size_t pos = 0;
    for (Index r = 0; r < M.rows(); ++r) {
      for (Index c = 0; c < M.cols(); ++c) {
        store_u64le(b.bytes.data() + pos, std::bit_cast<std::uint64_t>(M(r, c)));
        pos += 8;
      }
    }
    blocks_.push_back(std::move(b));
  }

  void add_i64(const std::string& name, const std::vector<int>& v) {
    Block b;
    b.name = name;
    b.type = "i64";
    b.rows = static_cast<std::int64_t>(v.size());
    b.cols = 1;
    b.bytes.resize(v.size() * 8);
    for (std::size_t i = 0; i < v.size(); ++i) {
      store_u64le(b.bytes.data() + i * 8,
                  static_cast<std::uint64_t>(static_cast<std::int64_t>(v[i])));
    }
    blocks_.push_back(std::move(b));
  }

  /// Fills offsets/sizes/checksums relative to the payload start.
  json directory() const {
    json dir = json::array();
    std::uint64_t offset = 0;
    for (const auto& b : blocks_) {
      dir.push_back({{"name", b.name},
                     {"type", b.type},
                     {"rows", b.rows},
                     {"cols", b.cols},
                     {"offset", offset},
                     {"bytes", b.bytes.size()},
                     {"crc32", crc32(b.bytes.data(), b.bytes.size())}});
      offset += b.bytes.size();
    }
    return dir;
  }

  void write_payload(std::ofstream& out) const {
    for (const auto& b : blocks_) {
      out.write(reinterpret_cast<const char*>(b.bytes.data()),
                static_cast<std::streamsize>(b.bytes.size()));
    }
  }

 private:
  std::vector<Block> blocks_;
};

struct BlockInfo {
  std::string type;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::uint64_t offset = 0;
  std::uint64_t bytes = 0;
  std::uint32_t crc = 0;
};

class ArchiveReader {
 public:
  explicit ArchiveReader(const std::string& path) : path_(path), file_(path, std::ios::binary) {
    if (!file_) fail(ErrorCode::io_error, "cannot open '" + path + "'");
    std::array<unsigned char, 20> header;
    file_.read(reinterpret_cast<char*>(header.data()), header.size());
    if (file_.gcount() != static_cast<std::streamsize>(header.size())) {
      corrupt("truncated header");
    }
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
      corrupt("bad magic, not a model archive");
    }
    version_ = load_u32le(header.data() + 8);
    const std::uint64_t manifest_size = load_u64le(header.data() + 12);
    if (manifest_size == 0 || manifest_size > (1ull << 32)) {
      corrupt("implausible manifest size");
    }
    std::string text(manifest_size, '\0');
    file_.read(text.data(), static_cast<std::streamsize>(manifest_size));
    if (file_.gcount() != static_cast<std::streamsize>(manifest_size)) {
      corrupt("truncated manifest");
    }
    payload_start_ = header.size() + manifest_size;
    manifest_ = json::parse(text, nullptr, false);
    if (manifest_.is_discarded()) corrupt("manifest is not valid JSON");
  }

  std::uint32_t version() const { return version_; }
  const json& manifest() const { return manifest_; }

  void index_blocks() {
    for (const auto& entry : manifest_.at("blocks")) {
      BlockInfo info;
      info.type = entry.at("type").get<std::string>();
      info.rows = entry.at("rows").get<std::int64_t>();
      info.cols = entry.at("cols").get<std::int64_t>();
      info.offset = entry.at("offset").get<std::uint64_t>();
      info.bytes = entry.at("bytes").get<std::uint64_t>();
      info.crc = entry.at("crc32").get<std::uint32_t>();
      const std::string name = entry.at("name").get<std::string>();
      if (!directory_.emplace(name, info).second) {
        corrupt("duplicate block '" + name + "'");
      }
    }
  }

  Matrix f64(const std::string& name) {
    const BlockInfo& info = find(name, "f64");
    const std::vector<unsigned char> raw = read_raw(name, info);
    Matrix M(info.rows, info.cols);
    std::size_t pos = 0;
    for (Index r = 0; r < M.rows(); ++r) {
      for (Index c = 0; c < M.cols(); ++c) {
        M(r, c) = std::bit_cast<double>(load_u64le(raw.data() + pos));
        pos += 8;
      }
    }
    return M;
  }

  Vector f64_vec(const std::string& name) {
    Matrix M = f64(name);
    if (M.cols() != 1) corrupt("block '" + name + "' is not a column vector");
    return M.col(0);
  }

  std::vector<int> i64_ints(const std::string& name) {
    const BlockInfo& info = find(name, "i64");
    const std::vector<unsigned char> raw = read_raw(name, info);
    std::vector<int> v(static_cast<std::size_t>(info.rows));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto wide =
          static_cast<std::int64_t>(load_u64le(raw.data() + i * 8));
      v[i] = static_cast<int>(wide);
      if (static_cast<std::int64_t>(v[i]) != wide) {
        corrupt("index overflow in block '" + name + "'");
      }
    }
    return v;
  }

 private:
  [[noreturn]] void corrupt(const std::string& what) const {
    fail(ErrorCode::corrupt_model, path_ + ": " + what);
  }

  const BlockInfo& find(const std::string& name, const std::string& type) {
    auto it = directory_.find(name);
    if (it == directory_.end()) corrupt("missing block '" + name + "'");
    if (it->second.type != type) {
      corrupt("block '" + name + "' has type " + it->second.type +
              ", expected " + type);
    }
    const std::uint64_t expect =
        static_cast<std::uint64_t>(it->second.rows) *
        static_cast<std::uint64_t>(it->second.cols) * 8;
    if (it->second.bytes != expect || it->second.rows < 0 ||
        it->second.cols < 0) {
      corrupt("block '" + name + "' has inconsistent shape");
    }
    return it->second;
  }

  std::vector<unsigned char> read_raw(const std::string& name,
                                      const BlockInfo& info) {
    file_.clear();
    file_.seekg(static_cast<std::streamoff>(payload_start_ + info.offset));
    std::vector<unsigned char> raw(info.bytes);
    file_.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size()));
    if (file_.gcount() != static_cast<std::streamsize>(raw.size())) {
      corrupt("truncated block '" + name + "'");
    }
    if (crc32(raw.data(), raw.size()) != info.crc) {
      corrupt("checksum mismatch in block '" + name + "'");
    }
    return raw;
  }

  std::string path_;
  std::ifstream file_;
  std::uint32_t version_ = 0;
  std::uint64_t payload_start_ = 0;
  json manifest_;
  std::map<std::string, BlockInfo> directory_;
};

json hyper_to_json(const HyperParams& h) {
  json j{{"rho_x2", h.rho_x2},
         {"rho_y2", h.rho_y2},
         {"lambda_x", h.lambda_x},
         {"lambda_y", h.lambda_y},
         {"sigma_n2_default", h.sigma_n2_default},
         {"rulsif_alpha", h.rulsif_alpha},
         {"rulsif_tau2", h.rulsif_tau2},
         {"rulsif_nu", h.rulsif_nu},
         {"squared_norm", h.squared_norm}};
  json sig = json::array();
  for (Index i = 0; i < h.sigma_n2.size(); ++i) sig.push_back(h.sigma_n2(i));
  j["sigma_n2"] = std::move(sig);
  return j;
}

HyperParams hyper_from_json(const json& j) {
  HyperParams h;
  h.rho_x2 = j.at("rho_x2").get<double>();
  h.rho_y2 = j.at("rho_y2").get<double>();
  h.lambda_x = j.at("lambda_x").get<double>();
  h.lambda_y = j.at("lambda_y").get<double>();
  h.sigma_n2_default = j.at("sigma_n2_default").get<double>();
  h.rulsif_alpha = j.at("rulsif_alpha").get<double>();
  h.rulsif_tau2 = j.at("rulsif_tau2").get<double>();
  h.rulsif_nu = j.at("rulsif_nu").get<double>();
  h.squared_norm = j.at("squared_norm").get<bool>();
  const auto& sig = j.at("sigma_n2");
  h.sigma_n2.resize(static_cast<Index>(sig.size()));
  for (std::size_t i = 0; i < sig.size(); ++i) {
    h.sigma_n2(static_cast<Index>(i)) = sig[i].get<double>();
  }
  return h;
}

json config_to_json(const OdcConfig& c) {
  return json{{"M", c.M},
              {"p", c.p},
              {"t", c.t},
              {"kprime", c.kprime},
              {"machine", machine_kind_name(c.machine)},
              {"clustering", clustering_kind_name(c.clustering)}};
}

OdcConfig config_from_json(const json& j) {
  OdcConfig c;
  c.M = j.at("M").get<int>();
  c.p = j.at("p").get<double>();
  c.t = j.at("t").get<double>();
  c.kprime = j.at("kprime").get<int>();
  c.machine = machine_kind_from_string(j.at("machine").get<std::string>());
  c.clustering =
      clustering_kind_from_string(j.at("clustering").get<std::string>());
  return c;
}

}  // namespace

std::uint32_t crc32(const void* data, std::size_t size, std::uint32_t seed) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
      }
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = seed ^ 0xFFFFFFFFu;
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    crc = table[(crc ^ p[i]) & 0xFFu] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

json model_manifest(const OdcModel& model) {
  json machine_meta = json::array();
  for (const LocalMachine& machine : model.machines) {
    json meta = json::object();
    if (const auto* g = std::get_if<GprMachine>(&machine)) {
      meta["inv_pool_size"] = g->inv_pool.size();
      meta["inv_index"] = g->inv_index;
    } else if (const auto* w = std::get_if<IwtgpMachine>(&machine)) {
      meta["jitter"] = w->jitter;
    }
    machine_meta.push_back(std::move(meta));
  }

  json subdomain_meta = json::array();
  for (const Subdomain& sub : model.subdomains) {
    subdomain_meta.push_back({{"cluster_id", sub.cluster_id},
                              {"core_size", sub.core_size},
                              {"size", sub.indices.size()}});
  }

  return json{
      {"format", "odc-model"},
      {"format_version", kModelFormatVersion},
      {"library_version", kVersionString},
      {"config", config_to_json(model.config)},
      {"hyper", hyper_to_json(model.hyper)},
      {"dims",
       {{"N", model.N}, {"d_x", model.d_x}, {"d_y", model.d_y},
        {"K", model.clustering.K}}},
      {"clustering",
       {{"kind", clustering_kind_name(model.config.clustering)},
        {"K", model.clustering.K},
        {"cost", model.clustering.cost}}},
      {"subdomains", std::move(subdomain_meta)},
      {"machines", std::move(machine_meta)},
      {"feature_names", model.feature_names},
      {"output_names", model.output_names},
  };
}

void save_model(const OdcModel& model, const std::string& path) {
  ArchiveBuilder builder;
  builder.add_i64("clustering/labels", model.clustering.labels);
  builder.add_f64("clustering/centers", model.clustering.centers);
  for (std::size_t i = 0; i < model.subdomains.size(); ++i) {
    const Subdomain& sub = model.subdomains[i];
    const std::string prefix = "sub" + std::to_string(i) + "/";
    builder.add_i64(prefix + "indices", sub.indices);
    builder.add_f64(prefix + "mu", sub.mu);
    builder.add_f64(prefix + "prec", sub.prec);
  }
  for (std::size_t i = 0; i < model.machines.size(); ++i) {
    const std::string prefix = "m" + std::to_string(i) + "/";
    if (const auto* g = std::get_if<GprMachine>(&model.machines[i])) {
      builder.add_i64(prefix + "indices", g->indices);
      builder.add_f64(prefix + "X", g->X);
      builder.add_f64(prefix + "alpha", g->alpha);
      for (std::size_t k = 0; k < g->inv_pool.size(); ++k) {
        builder.add_f64(prefix + "inv" + std::to_string(k), g->inv_pool[k]);
      }
    } else if (const auto* t = std::get_if<TgpMachine>(&model.machines[i])) {
      builder.add_i64(prefix + "indices", t->indices);
      builder.add_f64(prefix + "X", t->X);
      builder.add_f64(prefix + "Y", t->Y);
      builder.add_f64(prefix + "Kx_inv", t->Kx_inv);
      builder.add_f64(prefix + "Ky_inv", t->Ky_inv);
    } else {
      const auto& w = std::get<IwtgpMachine>(model.machines[i]);
      builder.add_i64(prefix + "indices", w.indices);
      builder.add_f64(prefix + "X", w.X);
      builder.add_f64(prefix + "Y", w.Y);
      builder.add_f64(prefix + "Kx_inv", w.Kx_inv);
      builder.add_f64(prefix + "Ky_inv", w.Ky_inv);
      builder.add_f64(prefix + "Kx_inv2", w.Kx_inv2);
      builder.add_f64(prefix + "Ky_inv2", w.Ky_inv2);
    }
  }

  json manifest = model_manifest(model);
  manifest["blocks"] = builder.directory();
  const std::string text = manifest.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
  std::array<unsigned char, 20> header{};
  std::memcpy(header.data(), kMagic.data(), kMagic.size());
  store_u32le(header.data() + 8, kModelFormatVersion);
  store_u64le(header.data() + 12, text.size());
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  builder.write_payload(out);
  if (!out) fail(ErrorCode::io_error, "write failed for '" + path + "'");
}

OdcModel load_model(const std::string& path) {
  ArchiveReader reader(path);
  if (reader.version() != kModelFormatVersion) {
    fail(ErrorCode::version_mismatch,
         path + ": archive format version " + std::to_string(reader.version()) +
             ", this library reads version " +
             std::to_string(kModelFormatVersion));
  }
  try {
    reader.index_blocks();
    const json& m = reader.manifest();

    OdcModel model;
    model.config = config_from_json(m.at("config"));
    model.hyper = hyper_from_json(m.at("hyper"));
    model.N = m.at("dims").at("N").get<int>();
    model.d_x = m.at("dims").at("d_x").get<int>();
    model.d_y = m.at("dims").at("d_y").get<int>();
    model.feature_names =
        m.at("feature_names").get<std::vector<std::string>>();
    model.output_names = m.at("output_names").get<std::vector<std::string>>();

    model.clustering.K = m.at("clustering").at("K").get<int>();
    model.clustering.cost = m.at("clustering").at("cost").get<double>();
    model.clustering.labels = reader.i64_ints("clustering/labels");
    model.clustering.centers = reader.f64("clustering/centers");

    const auto& sub_meta = m.at("subdomains");
    model.subdomains.resize(sub_meta.size());
    for (std::size_t i = 0; i < sub_meta.size(); ++i) {
      Subdomain& sub = model.subdomains[i];
      const std::string prefix = "sub" + std::to_string(i) + "/";
      sub.cluster_id = sub_meta[i].at("cluster_id").get<int>();
      sub.core_size = sub_meta[i].at("core_size").get<int>();
      sub.indices = reader.i64_ints(prefix + "indices");
      sub.mu = reader.f64_vec(prefix + "mu");
      sub.prec = reader.f64(prefix + "prec");
      if (sub.core_size < 0 ||
          sub.core_size > static_cast<int>(sub.indices.size())) {
        fail(ErrorCode::corrupt_model,
             path + ": subdomain " + std::to_string(i) + " core size " +
                 std::to_string(sub.core_size) + " exceeds its member count");
      }
    }

    const auto& machine_meta = m.at("machines");
    model.machines.reserve(machine_meta.size());
    for (std::size_t i = 0; i < machine_meta.size(); ++i) {
      const std::string prefix = "m" + std::to_string(i) + "/";
      switch (model.config.machine) {
        case MachineKind::gpr: {
          GprMachine g;
          g.indices = reader.i64_ints(prefix + "indices");
          g.X = reader.f64(prefix + "X");
          g.alpha = reader.f64(prefix + "alpha");
          const std::size_t pool =
              machine_meta[i].at("inv_pool_size").get<std::size_t>();
          for (std::size_t k = 0; k < pool; ++k) {
            g.inv_pool.push_back(reader.f64(prefix + "inv" + std::to_string(k)));
          }
          g.inv_index = machine_meta[i].at("inv_index").get<std::vector<int>>();
          model.machines.emplace_back(std::move(g));
          break;
        }
        case MachineKind::tgp: {
          TgpMachine t;
          t.indices = reader.i64_ints(prefix + "indices");
          t.X = reader.f64(prefix + "X");
          t.Y = reader.f64(prefix + "Y");
          t.Kx_inv = reader.f64(prefix + "Kx_inv");
          t.Ky_inv = reader.f64(prefix + "Ky_inv");
          model.machines.emplace_back(std::move(t));
          break;
        }
        case MachineKind::iwtgp: {
          IwtgpMachine w;
          w.indices = reader.i64_ints(prefix + "indices");
          w.X = reader.f64(prefix + "X");
          w.Y = reader.f64(prefix + "Y");
          w.Kx_inv = reader.f64(prefix + "Kx_inv");
          w.Ky_inv = reader.f64(prefix + "Ky_inv");
          w.Kx_inv2 = reader.f64(prefix + "Kx_inv2");
          w.Ky_inv2 = reader.f64(prefix + "Ky_inv2");
          w.jitter = machine_meta[i].at("jitter").get<double>();
          model.machines.emplace_back(std::move(w));
          break;
        }
      }
    }

    if (model.machines.size() != model.subdomains.size()) {
      fail(ErrorCode::corrupt_model,
           path + ": machine count does not match subdomain count");
    }
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::corrupt_model,
         path + ": malformed manifest (" + std::string(e.what()) + ")");
  }
}

std::string inspect_model(const std::string& path) {
  ArchiveReader reader(path);
  return reader.manifest().dump(2);
}

}  // namespace odc
