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

#include "kcgflr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <tuple>

#include "kcgflr/error.hpp"

namespace kcgflr::io {

namespace {

std::string join_context(std::string_view context, std::string_view key) {
    return context.empty() ? std::string(key) : std::string(context) + "." + std::string(key);
}

template <typename T>
T get_field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw InvalidConfig(key, "required field is missing");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidConfig(key, std::string("wrong type: ") + e.what());
    }
}

Eigen::VectorXd vector_field(const json& doc, const char* key, std::size_t expected) {
    const auto values = get_field<std::vector<double>>(doc, key);
    if (values.size() != expected)
        throw InvalidConfig(key, "expected " + std::to_string(expected) + " entries, got " + std::to_string(values.size()));
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (!v.allFinite()) throw InvalidConfig(key, "entries must be finite");
    return v;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for " + path.string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json dataset_to_json(const Dataset& d) {
    json doc;
    doc["n"] = d.n();
    doc["J"] = d.J();
    doc["s"] = d.params.s;
    doc["alpha"] = d.params.alpha;
    doc["theta"] = d.params.theta;
    doc["omega"] = d.params.omega;
    doc["sigma"] = d.params.sigma;
    doc["seed"] = d.seed;
    doc["stream"] = d.stream;
    std::vector<double> flat;
    flat.reserve(d.n() * d.J());
    for (Eigen::Index i = 0; i < d.xcoefs.rows(); ++i)
        for (Eigen::Index j = 0; j < d.xcoefs.cols(); ++j) flat.push_back(d.xcoefs(i, j));
    doc["Xcoefs"] = flat;
    doc["y"] = to_std(d.y);
    doc["beta_star"] = d.beta_star ? json(to_std(d.beta_star->coeffs())) : json(nullptr);
    return doc;
}

Dataset dataset_from_json(const json& doc) {
    if (!doc.is_object()) throw InvalidConfig("dataset", "expected a JSON object");
    require_known_keys(doc, {"n", "J", "s", "alpha", "theta", "omega", "sigma", "seed", "stream", "Xcoefs", "y", "beta_star"},
                       "");
    Dataset d;
    const auto n = get_field<std::size_t>(doc, "n");
    const auto J = get_field<std::size_t>(doc, "J");
    if (n < 1) throw InvalidConfig("n", "must be >= 1");
    if (J < 1) throw InvalidConfig("J", "must be >= 1");
    d.params.J = J;
    d.params.s = get_field<double>(doc, "s");
    d.params.alpha = get_field<double>(doc, "alpha");
    d.params.sigma = get_field<double>(doc, "sigma");
    if (doc.contains("theta")) d.params.theta = get_field<double>(doc, "theta");
    if (doc.contains("omega")) d.params.omega = get_field<double>(doc, "omega");
    d.seed = doc.contains("seed") ? get_field<std::uint64_t>(doc, "seed") : 0;
    d.stream = doc.contains("stream") ? get_field<std::uint64_t>(doc, "stream") : 0;

    const Eigen::VectorXd flat = vector_field(doc, "Xcoefs", n * J);
    d.xcoefs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(J));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < J; ++j)
            d.xcoefs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                flat[static_cast<Eigen::Index>(i * J + j)];
    d.y = vector_field(doc, "y", n);
    if (doc.contains("beta_star") && !doc.at("beta_star").is_null())
        d.beta_star = CoefVector(vector_field(doc, "beta_star", J));
    return d;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_file_atomic(path, dataset_to_json(dataset).dump(1) + "\n");
}

Dataset read_dataset(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidConfig("dataset", path.string() + ": " + e.what());
    }
    return dataset_from_json(doc);
}

std::string format_rate_csv(const RateResult& result) {
    std::vector<const RateRecord*> rows;
    rows.reserve(result.records.size());
    for (const auto& r : result.records) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(),
              [](const RateRecord* a, const RateRecord* b) { return std::tie(a->n, a->rep) < std::tie(b->n, b->rep); });

    std::string out = "n,rep,m_star,l2_error,pred_error,omega,stop_reason,seed\n";
    for (const RateRecord* r : rows) {
        out += std::to_string(r->n) + "," + std::to_string(r->rep) + "," + std::to_string(r->m_star) + "," +
               format_double(r->l2_error) + "," + format_double(r->pred_error) + "," + format_double(r->omega) + "," +
               r->stop_reason + "," + std::to_string(r->seed) + "\n";
    }
    return out;
}

void write_rate_csv(const RateResult& result, const std::filesystem::path& path) {
    write_file_atomic(path, format_rate_csv(result));
}

json rate_summary_json(const RateConfig& config, const RateResult& result) {
    json doc;
    const auto& p = config.model;
    doc["model"] = {{"s", p.s}, {"alpha", p.alpha}, {"theta", p.theta}, {"J", p.J}, {"omega", p.omega}, {"sigma", p.sigma}};
    doc["tau"] = config.tau;
    doc["replications"] = config.replications;
    doc["seed"] = config.seed;
    doc["expected_slope"] = result.expected_slope;
    doc["slope"] = std::isfinite(result.fit.slope) ? json(result.fit.slope) : json(nullptr);
    doc["intercept"] = std::isfinite(result.fit.intercept) ? json(result.fit.intercept) : json(nullptr);
    json per_n = json::array();
    for (const auto& s : result.per_n) {
        per_n.push_back({{"n", s.n},
                         {"median_l2_error", std::isfinite(s.median_l2_error) ? json(s.median_l2_error) : json(nullptr)},
                         {"median_m_star", std::isfinite(s.median_m_star) ? json(s.median_m_star) : json(nullptr)},
                         {"max_m_star", s.max_m_star},
                         {"failures", s.failures}});
    }
    doc["per_n"] = per_n;
    return doc;
}

void require_known_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view context) {
    if (!object.is_object()) throw InvalidConfig(context.empty() ? "config" : std::string(context), "expected a JSON object");
    for (const auto& item : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw InvalidConfig(join_context(context, item.key()), "unknown key");
    }
}

}  // namespace kcgflr::io
