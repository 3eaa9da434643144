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

#ifndef EMOINT_COMMON_URL_H_
#define EMOINT_COMMON_URL_H_

#include <string>
#include <string_view>

namespace emoint {

// "https://host:8443/v1/embeddings" -> {"https://host:8443", "/v1/embeddings"}.
struct UrlParts {
  std::string base;
  std::string path;
};

// Throws kConfigError when the scheme is not http or https.
UrlParts SplitUrl(std::string_view url);

// Value of an environment variable, or empty.
std::string EnvOr(const char* name, std::string_view fallback = "");

}  // namespace emoint

#endif  // EMOINT_COMMON_URL_H_
