// Copyright 2026 The hstoolkit Authors
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

#include "hs/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "hs/common/error.hpp"

namespace hs::nn {
namespace {

void write_u64(std::ofstream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
  char buf[8];
  in.read(buf, 8);
  if (!in) throw DataError("FormatError: '" + path + "' truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i]))
         << (8 * i);
  }
  return v;
}

void write_f64(std::ofstream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64(out, bits);
}

double read_f64(std::ifstream& in, const std::string& path) {
  std::uint64_t bits = read_u64(in, path);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in, const std::string& path) {
  const std::uint64_t n = read_u64(in, path);
  if (n > (1ull << 32)) {
    throw DataError("FormatError: '" + path + "' has an implausible length");
  }
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw DataError("FormatError: '" + path + "' truncated");
  return s;
}

}  // namespace

const Tensor* CheckpointData::find(const std::string& name) const {
  for (const auto& [tensor_name, tensor] : tensors) {
    if (tensor_name == name) return &tensor;
  }
  return nullptr;
}

void save_checkpoint(const std::string& path, const std::string& manifest_json,
                     const std::vector<ParamPtr>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("FileNotFound: cannot open '" + path + "' for writing");
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_string(out, manifest_json);
  write_u64(out, params.size());
  for (const ParamPtr& p : params) {
    write_string(out, p->name);
    const Tensor& t = p->value();
    write_u64(out, t.rank());
    for (std::size_t d : t.shape()) write_u64(out, d);
    for (std::size_t i = 0; i < t.size(); ++i) write_f64(out, t[i]);
  }
  if (!out) throw DataError("WriteFailed: error writing '" + path + "'");
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound: cannot open '" + path + "'");
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw DataError("FormatError: '" + path + "' is not a checkpoint file");
  }
  CheckpointData data;
  data.manifest_json = read_string(in, path);
  const std::uint64_t count = read_u64(in, path);
  data.tensors.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = read_string(in, path);
    const std::uint64_t rank = read_u64(in, path);
    if (rank > 8) {
      throw DataError("FormatError: '" + path + "' tensor rank " +
                      std::to_string(rank) + " is implausible");
    }
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(read_u64(in, path));
    Tensor t(shape);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = read_f64(in, path);
    data.tensors.emplace_back(std::move(name), std::move(t));
  }
  return data;
}

void restore_parameters(const CheckpointData& ckpt,
                        const std::vector<ParamPtr>& params) {
  for (const ParamPtr& p : params) {
    const Tensor* stored = ckpt.find(p->name);
    if (!stored) {
      throw DataError("MissingTensor: checkpoint lacks '" + p->name + "'");
    }
    if (!stored->same_shape(p->value())) {
      throw DataError("ShapeMismatch: checkpoint tensor '" + p->name +
                      "' is " + stored->shape_string() +
                      " but the model wants " + p->value().shape_string());
    }
    p->value() = *stored;
  }
}

}  // namespace hs::nn
