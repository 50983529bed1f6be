/*
 * Copyright 2026 The kcgflr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kcgflr/analysis.hpp"
#include "kcgflr/model.hpp"

namespace kcgflr::io {

using nlohmann::json;

/// 17 significant digits ("%.17g"); NaN becomes "nan".
std::string format_double(double value);

/// Writes `content` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partial file. Throws IoError naming the path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Dataset layout:
///   {"n", "J", "s", "alpha", "theta", "omega", "sigma", "seed", "stream",
///    "Xcoefs": n*J numbers row-major, "y": n numbers, "beta_star": J numbers or null}
/// theta, omega, stream and beta_star are optional on input.
json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const json& doc);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// Header "n,rep,m_star,l2_error,pred_error,omega,stop_reason,seed", rows sorted by (n, rep).
std::string format_rate_csv(const RateResult& result);
void write_rate_csv(const RateResult& result, const std::filesystem::path& path);

json rate_summary_json(const RateConfig& config, const RateResult& result);

/// Throws InvalidConfig("<context>.<key>") for the first key not in `allowed`.
void require_known_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view context);

}  // namespace kcgflr::io
