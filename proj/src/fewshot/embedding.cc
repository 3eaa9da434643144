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

#include "emoint/fewshot/embedding.h"

#include <cmath>
#include <future>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/hash.h"
#include "emoint/common/url.h"
#include "emoint/dataprep/lexicon.h"
#include "httplib.h"
#include "json.hpp"

namespace emoint::fewshot {
namespace {

double Norm(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HashedBagOfWords::HashedBagOfWords(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be > 0");
  }
}

std::vector<Vector> HashedBagOfWords::Embed(
    const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    Vector v(dimension_, 0.0);
    const auto tokens = dataprep::Tokenize(text);
    auto add = [&](std::string_view feature, double weight) {
      const std::uint64_t h = Fnv1a64(feature);
      const double sign = (h >> 63) ? -1.0 : 1.0;
      v[h % dimension_] += sign * weight;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      add(tokens[i], 1.0);
      if (i + 1 < tokens.size()) add(tokens[i] + " " + tokens[i + 1], 0.5);
    }
    const double n = Norm(v);
    if (n > 0.0) {
      for (double& x : v) x /= n;
    }
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingOptions options)
    : options_(std::move(options)) {
  if (options_.batch_size == 0) options_.batch_size = 1;
  if (options_.parallelism == 0) options_.parallelism = 1;
  SplitUrl(options_.url);
}

std::vector<Vector> HttpEmbeddingProvider::EmbedOne(
    const std::vector<std::string>& batch) const {
  const UrlParts url = SplitUrl(options_.url);
  httplib::Client client(url.base);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const nlohmann::json body = {{"model", options_.model}, {"input", batch}};
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kProviderError,
                fmt::format("embedding request failed: {}",
                            httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderError,
                fmt::format("embedding endpoint returned HTTP {}",
                            res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& data = j.at("data");
    if (data.size() != batch.size()) {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("expected {} embeddings, got {}", batch.size(),
                              data.size()));
    }
    std::vector<Vector> out(batch.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      // Honour an explicit index when the provider reorders.
      const std::size_t slot =
          data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
      if (slot >= out.size()) {
        throw Error(ErrorCode::kProviderError, "embedding index out of range");
      }
      out[slot] = data[i].at("embedding").get<Vector>();
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProviderError,
                fmt::format("malformed embedding reply: {}", e.what()));
  }
}

std::vector<Vector> HttpEmbeddingProvider::Embed(
    const std::vector<std::string>& texts) {
  std::vector<Vector> out(texts.size());
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s < texts.size(); s += options_.batch_size) {
    starts.push_back(s);
  }
  // Waves of at most `parallelism` concurrent requests.
  for (std::size_t w = 0; w < starts.size(); w += options_.parallelism) {
    std::vector<std::future<void>> wave;
    for (std::size_t b = w; b < std::min(starts.size(), w + options_.parallelism);
         ++b) {
      wave.push_back(std::async(std::launch::async, [&, b] {
        const std::size_t lo = starts[b];
        const std::size_t hi = std::min(texts.size(), lo + options_.batch_size);
        std::vector<std::string> batch(texts.begin() + long(lo),
                                       texts.begin() + long(hi));
        std::vector<Vector> got = EmbedOne(batch);
        for (std::size_t i = lo; i < hi; ++i) out[i] = std::move(got[i - lo]);
      }));
    }
    std::exception_ptr first;
    for (auto& f : wave) {
      try {
        f.get();
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  }
  return out;
}

Vector Centroid(const std::vector<Vector>& vectors) {
  if (vectors.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "centroid of an empty batch");
  }
  const std::size_t d = vectors.front().size();
  Vector c(d, 0.0);
  for (const Vector& v : vectors) {
    if (v.size() != d) {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("mixed embedding dimensions {} and {}", d,
                              v.size()));
    }
    for (std::size_t i = 0; i < d; ++i) c[i] += v[i];
  }
  for (double& x : c) x /= static_cast<double>(vectors.size());
  return c;
}

std::vector<double> CentroidDistances(const std::vector<Vector>& vectors,
                                      DistanceKind kind) {
  const Vector c = Centroid(vectors);
  std::vector<double> out;
  out.reserve(vectors.size());
  if (kind == DistanceKind::kEuclidean) {
    for (const Vector& v : vectors) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        s += (v[i] - c[i]) * (v[i] - c[i]);
      }
      out.push_back(std::sqrt(s));
    }
    return out;
  }
  const double cn = Norm(c);
  if (!(cn > 1e-12)) {
    throw Error(ErrorCode::kDegenerateCentroid,
                "centroid has zero norm; cosine distance undefined");
  }
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const Vector& v = vectors[k];
    const double vn = Norm(v);
    if (!(vn > 0.0)) {
      throw Error(ErrorCode::kDegenerateCentroid,
                  fmt::format("vector {} has zero norm", k));
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * c[i];
    out.push_back(std::max(0.0, 1.0 - dot / (vn * cn)));
  }
  return out;
}

std::vector<EmbeddedText> EmbedBatch(const std::vector<std::string>& text_ids,
                                     const std::vector<std::string>& texts,
                                     EmbeddingProvider& provider,
                                     DistanceKind kind) {
  if (text_ids.size() != texts.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "text ids and texts differ in length");
  }
  if (texts.empty()) return {};
  std::vector<Vector> vectors;
  try {
    vectors = provider.Embed(texts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kProviderError) throw;
    throw Error(ErrorCode::kProviderError,
                fmt::format("embedding batch starting at '{}': {}",
                            text_ids.front(), e.what()));
  }
  if (vectors.size() != texts.size()) {
    throw Error(ErrorCode::kProviderError,
                fmt::format("provider returned {} vectors for {} texts",
                            vectors.size(), texts.size()));
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != vectors[0].size() || vectors[i].empty()) {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("bad embedding dimension for '{}'", text_ids[i]));
    }
  }
  const std::vector<double> dist = CentroidDistances(vectors, kind);
  std::vector<EmbeddedText> out(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out[i] = {text_ids[i], std::move(vectors[i]), dist[i]};
  }
  return out;
}

}  // namespace emoint::fewshot
