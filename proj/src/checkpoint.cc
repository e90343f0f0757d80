// Copyright 2026 The DRPO Authors.
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

#include "drpo/checkpoint.h"

#include <fstream>

#include "drpo/binary_io.h"
#include "drpo/error.h"

namespace drpo {
namespace {

constexpr std::string_view kMagic = "DRPOMDL1";

enum Section : std::uint8_t {
  kStandardizer = 1,
  kEncoder = 2,
  kProjections = 3,
  kStats = 4,
  kCenter = 5,
  kEnd = 0xff,
};

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "rpo-max") return Method::kRpoMax;
  if (name == "rpo-mean") return Method::kRpoMean;
  if (name == "deep-svdd") return Method::kDeepSvdd;
  if (name == "deep-rpo-max") return Method::kDeepRpoMax;
  if (name == "deep-rpo-mean") return Method::kDeepRpoMean;
  throw UsageError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kRpoMax: return "rpo-max";
    case Method::kRpoMean: return "rpo-mean";
    case Method::kDeepSvdd: return "deep-svdd";
    case Method::kDeepRpoMax: return "deep-rpo-max";
    case Method::kDeepRpoMean: return "deep-rpo-mean";
  }
  return "rpo-max";
}

int ModelCheckpoint::input_dim() const {
  if (encoder) return encoder->input_dim();
  if (projections) return projections->input_dim();
  throw DataError("checkpoint has neither an encoder nor projections");
}

Vector ModelCheckpoint::score(const Matrix& X) const {
  if (X.cols() != input_dim()) {
    throw DataError("feature width mismatch: model expects d=" +
                    std::to_string(input_dim()) + ", input has d=" +
                    std::to_string(X.cols()));
  }
  if (X.rows() == 0) return Vector(0);
  Matrix input = X;
  if (standardizer) {
    input = ((X.rowwise() - standardizer->mean.transpose()).array().rowwise() /
             standardizer->scale.transpose().array())
                .matrix();
  }
  if (method == Method::kDeepSvdd) {
    if (!encoder || !center) throw DataError("SVDD checkpoint is incomplete");
    const Matrix z = encoder->forward(input);
    return (z.rowwise() - center->transpose()).rowwise().squaredNorm();
  }
  if (!projections || !stats) throw DataError("RPO checkpoint is incomplete");
  const Matrix latent = encoder ? encoder->forward(input) : input;
  return score_batch(latent, *projections, *stats, estimator_of(method));
}

void ModelCheckpoint::write_binary(std::ostream& out) const {
  binio::write_magic(out, kMagic);
  binio::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(method));
  if (standardizer) {
    binio::write_pod<std::uint8_t>(out, kStandardizer);
    binio::write_matrix(out, standardizer->mean);
    binio::write_matrix(out, standardizer->scale);
  }
  if (encoder) {
    binio::write_pod<std::uint8_t>(out, kEncoder);
    encoder->write_binary(out);
  }
  if (projections) {
    binio::write_pod<std::uint8_t>(out, kProjections);
    projections->write_binary(out);
  }
  if (stats) {
    binio::write_pod<std::uint8_t>(out, kStats);
    stats->write_binary(out);
  }
  if (center) {
    binio::write_pod<std::uint8_t>(out, kCenter);
    binio::write_matrix(out, *center);
  }
  binio::write_pod<std::uint8_t>(out, kEnd);
}

ModelCheckpoint ModelCheckpoint::read_binary(std::istream& in) {
  binio::expect_magic(in, kMagic);
  ModelCheckpoint ckpt;
  const auto method = binio::read_pod<std::uint8_t>(in);
  if (method > static_cast<std::uint8_t>(Method::kDeepRpoMean)) {
    throw DataError("checkpoint: unknown method tag");
  }
  ckpt.method = static_cast<Method>(method);
  for (;;) {
    const auto tag = binio::read_pod<std::uint8_t>(in);
    switch (tag) {
      case kStandardizer: {
        Standardizer s;
        s.mean = binio::read_matrix(in).col(0);
        s.scale = binio::read_matrix(in).col(0);
        ckpt.standardizer = std::move(s);
        break;
      }
      case kEncoder: ckpt.encoder = Encoder::read_binary(in); break;
      case kProjections: ckpt.projections = ProjectionSet::read_binary(in); break;
      case kStats: ckpt.stats = RpoStats::read_binary(in); break;
      case kCenter: ckpt.center = Vector(binio::read_matrix(in).col(0)); break;
      case kEnd: return ckpt;
      default: throw DataError("checkpoint: unknown section tag");
    }
  }
}

void ModelCheckpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_binary(out);
  if (!out) throw DataError("write failed: " + path);
}

ModelCheckpoint ModelCheckpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  return read_binary(in);
}

}  // namespace drpo
