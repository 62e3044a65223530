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

#include "hs/detect/embeddings.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "hs/common/error.hpp"
#include "hs/common/rng.hpp"

namespace hs::detect {

namespace {

// A header is exactly two integer tokens ("<count> <dim>").
bool is_header(const std::vector<std::string>& fields) {
  if (fields.size() != 2) return false;
  for (const std::string& f : fields) {
    if (f.empty()) return false;
    for (char c : f) {
      if (c < '0' || c > '9') return false;
    }
  }
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) fields.push_back(std::move(field));
  return fields;
}

}  // namespace

EmbeddingLoad load_pretrained_embeddings(const std::string& path,
                                         const text::Vocabulary& vocab,
                                         std::size_t dim, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DataError("FileNotFound: cannot open '" + path + "'");

  std::unordered_map<std::string, std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_ws(line);
    if (first) {
      first = false;
      if (is_header(fields)) {
        const std::size_t file_dim = std::stoull(fields[1]);
        if (file_dim != dim) {
          throw ShapeError("DimensionMismatch: embedding file is " +
                           std::to_string(file_dim) + "-dimensional, need " +
                           std::to_string(dim));
        }
        continue;
      }
    }
    if (fields.size() != dim + 1) {
      throw ShapeError("DimensionMismatch: '" + path + "' line " +
                       std::to_string(line_no) + " has " +
                       std::to_string(fields.size() - 1) +
                       " values, need " + std::to_string(dim));
    }
    std::vector<double> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      try {
        values[i] = std::stod(fields[i + 1]);
      } catch (const std::exception&) {
        throw DataError("FormatError: '" + path + "' line " +
                        std::to_string(line_no) + " value '" +
                        fields[i + 1] + "' is not a number");
      }
    }
    rows.emplace(fields[0], std::move(values));
  }

  EmbeddingLoad result;
  const std::size_t v = vocab.token_count();
  result.table = nn::Tensor({v, dim});
  Rng rng(seed);
  for (std::size_t id = 0; id < v; ++id) {
    const std::string& token = vocab.token(static_cast<int>(id));
    auto it = rows.find(token);
    double* dst = result.table.data() + id * dim;
    if (it != rows.end()) {
      ++result.found;
      for (std::size_t j = 0; j < dim; ++j) dst[j] = it->second[j];
    } else {
      ++result.missing;
      // The pad row stays zero so padding cannot leak signal.
      if (id == static_cast<std::size_t>(text::Vocabulary::kPadId)) continue;
      for (std::size_t j = 0; j < dim; ++j) dst[j] = rng.normal(0.0, 0.01);
    }
  }
  return result;
}

}  // namespace hs::detect
