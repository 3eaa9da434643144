// Copyright 2026 The emoint Authors
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

#ifndef EMOINT_FEWSHOT_EMBEDDING_H_
#define EMOINT_FEWSHOT_EMBEDDING_H_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace emoint::fewshot {

using Vector = std::vector<double>;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // One vector per input, all of one dimension. Throws kProviderError.
  virtual std::vector<Vector> Embed(const std::vector<std::string>& texts) = 0;
};

// Signed feature hashing of lowercased word tokens and their bigrams,
// L2-normalized. Empty texts map to the zero vector.
class HashedBagOfWords : public EmbeddingProvider {
 public:
  explicit HashedBagOfWords(std::size_t dimension = 256);
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;

 private:
  std::size_t dimension_;
};

struct HttpEmbeddingOptions {
  std::string url;
  std::string model;
  std::string api_key;
  std::size_t batch_size = 64;
  std::size_t parallelism = 4;
  int timeout_seconds = 60;
};

// POST {model, input} -> {data: [{embedding}]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpEmbeddingOptions options);
  std::vector<Vector> Embed(const std::vector<std::string>& texts) override;

 private:
  std::vector<Vector> EmbedOne(const std::vector<std::string>& batch) const;

  HttpEmbeddingOptions options_;
};

enum class DistanceKind { kCosine, kEuclidean };

struct EmbeddedText {
  std::string text_id;
  Vector vector;
  double centroid_dist = 0.0;
};

Vector Centroid(const std::vector<Vector>& vectors);

// Distance of every vector from the batch centroid. Cosine distance throws
// kDegenerateCentroid for a zero-norm centroid or vector.
std::vector<double> CentroidDistances(const std::vector<Vector>& vectors,
                                      DistanceKind kind = DistanceKind::kCosine);

// Throws kProviderError with the failing text id on transport or format
// problems, and kInvalidArgument when ids and texts differ in length.
std::vector<EmbeddedText> EmbedBatch(const std::vector<std::string>& text_ids,
                                     const std::vector<std::string>& texts,
                                     EmbeddingProvider& provider,
                                     DistanceKind kind = DistanceKind::kCosine);

}  // namespace emoint::fewshot

#endif  // EMOINT_FEWSHOT_EMBEDDING_H_
