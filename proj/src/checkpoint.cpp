//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/checkpoint.h"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace beflow {
namespace {

constexpr char kMagic[8] = { 'B', 'E', 'F', 'L', 'O', 'W', 'C', 'K' };
constexpr std::uint32_t kVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string header_text(const VectorFieldModel &m) {
  const ModelConfig &c = m.config();
  const FlowConfig &f = m.flow();
  std::ostringstream out;
  out << "embed_dim=" << c.embed_dim << '\n'
      << "hidden_dim=" << c.hidden_dim << '\n'
      << "ffn_dim=" << c.ffn_dim << '\n'
      << "layers=" << c.layers << '\n'
      << "heads=" << c.heads << '\n'
      << "max_atoms=" << c.max_atoms << '\n'
      << "feature_dim=" << m.feature_dim() << '\n'
      << "sigma=" << hex(f.sigma) << '\n'
      << "rbf_low=" << hex(f.rbf_low) << '\n'
      << "rbf_high=" << hex(f.rbf_high) << '\n'
      << "rbf_step=" << hex(f.rbf_step) << '\n'
      << "rbf_gamma=" << hex(f.rbf_gamma) << '\n'
      << "euler_steps=" << f.euler_steps << '\n';
  return out.str();
}

template<typename T> void put(std::ostream &out, T v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

class Reader {
public:
  Reader(std::istream &in, const std::string &path): in_(in), path_(path) { }

  template<typename T> T get() {
    T v;
    bytes(reinterpret_cast<char *>(&v), sizeof v);
    return v;
  }

  void bytes(char *dst, std::size_t n) {
    if (!in_.read(dst, static_cast<std::streamsize>(n)))
      throw CheckpointError("checkpoint " + path_ + " is truncated");
  }

  std::string string(std::uint32_t n) {
    if (n > (1u << 20))
      throw CheckpointError("checkpoint " + path_ + " has a corrupt header");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

private:
  std::istream &in_;
  const std::string &path_;
};

}  // namespace

void save_checkpoint(const std::string &path, const VectorFieldModel &model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw CheckpointError("cannot write checkpoint " + path);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  std::string header = header_text(model);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.tensors().size()));
  for (const TensorInfo &t: model.tensors()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::int32_t>(out, t.rows);
    put<std::int32_t>(out, t.cols);
  }
  const Eigen::VectorXd &p = model.parameters();
  put<std::uint64_t>(out, static_cast<std::uint64_t>(p.size()));
  out.write(reinterpret_cast<const char *>(p.data()),
            static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!out)
    throw CheckpointError("failed writing checkpoint " + path);
}

VectorFieldModel load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw CheckpointError("cannot open checkpoint " + path);
  Reader r(in, path);
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError(path + " is not a checkpoint");
  auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version)
                          + " is not supported");
  std::string header = r.string(r.get<std::uint32_t>());

  std::map<std::string, std::string> kv;
  std::istringstream hs(header);
  for (std::string line; std::getline(hs, line);) {
    auto eq = line.find('=');
    if (eq != std::string::npos)
      kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const char *key) -> const std::string & {
    auto it = kv.find(key);
    if (it == kv.end())
      throw CheckpointError("checkpoint header lacks " + std::string(key));
    return it->second;
  };
  ModelConfig mc;
  FlowConfig fc;
  int feature_dim = 0;
  try {
    mc.embed_dim = std::stoi(need("embed_dim"));
    mc.hidden_dim = std::stoi(need("hidden_dim"));
    mc.ffn_dim = std::stoi(need("ffn_dim"));
    mc.layers = std::stoi(need("layers"));
    mc.heads = std::stoi(need("heads"));
    mc.max_atoms = std::stoi(need("max_atoms"));
    feature_dim = std::stoi(need("feature_dim"));
    fc.sigma = std::strtod(need("sigma").c_str(), nullptr);
    fc.rbf_low = std::strtod(need("rbf_low").c_str(), nullptr);
    fc.rbf_high = std::strtod(need("rbf_high").c_str(), nullptr);
    fc.rbf_step = std::strtod(need("rbf_step").c_str(), nullptr);
    fc.rbf_gamma = std::strtod(need("rbf_gamma").c_str(), nullptr);
    fc.euler_steps = std::stoi(need("euler_steps"));
  } catch (const std::logic_error &e) {
    throw CheckpointError("checkpoint header is malformed: "
                          + std::string(e.what()));
  }

  VectorFieldModel model(mc, fc, feature_dim);
  auto count = r.get<std::uint32_t>();
  if (count != model.tensors().size())
    throw CheckpointError("checkpoint tensor table does not match its config");
  for (const TensorInfo &t: model.tensors()) {
    std::string name = r.string(r.get<std::uint32_t>());
    auto rows = r.get<std::int32_t>();
    auto cols = r.get<std::int32_t>();
    if (name != t.name || rows != t.rows || cols != t.cols)
      throw CheckpointError("checkpoint tensor " + name
                            + " does not match the expected layout");
  }
  auto total = r.get<std::uint64_t>();
  if (total != static_cast<std::uint64_t>(model.num_parameters()))
    throw CheckpointError("checkpoint parameter count mismatch");
  r.bytes(reinterpret_cast<char *>(model.parameters().data()),
          total * sizeof(double));
  return model;
}

VectorFieldModel load_checkpoint(const std::string &path,
                                 const ModelConfig &expected,
                                 int expected_feature_dim) {
  VectorFieldModel model = load_checkpoint(path);
  if (!(model.config() == expected)
      || model.feature_dim() != expected_feature_dim)
    throw CheckpointError("checkpoint " + path
                          + " was written for a different model config");
  return model;
}

}  // namespace beflow
