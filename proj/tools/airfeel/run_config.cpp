// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The airfeel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "airfeel/errors.hpp"
#include "airfeel/rng.hpp"

namespace airfeel::cli {
namespace {

using nlohmann::json;
using Path = std::vector<std::string>;

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the last key in `path`, found by scanning for each quoted key in
// turn. 0 when the key does not appear in the text (a default was used).
std::size_t line_of_key(const std::string& text, const Path& path) {
    std::size_t pos = 0;
    for (const auto& key : path) {
        const std::string quoted = "\"" + key + "\"";
        std::size_t hit = std::string::npos;
        for (std::size_t at = text.find(quoted, pos); at != std::string::npos; at = text.find(quoted, at + 1)) {
            std::size_t after = at + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') {
                hit = at;
                break;
            }
        }
        if (hit == std::string::npos) return 0;
        pos = hit + quoted.size();
    }
    return line_of_offset(text, pos);
}

std::string dotted(const Path& path) {
    std::string out;
    for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
    return out;
}

class Reader {
public:
    Reader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const Path& path, const std::string& message) const {
        const std::size_t line = line_of_key(text_, path);
        std::string where = origin_;
        if (line > 0) where += ":" + std::to_string(line);
        throw ConfigError(where + ": " + (path.empty() ? "" : dotted(path) + ": ") + message);
    }

    void only_keys(const json& obj, const Path& path, std::initializer_list<const char*> allowed) const {
        if (!obj.is_object()) fail(path, "expected an object");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items())
            if (!ok.count(key)) {
                Path p = path;
                p.push_back(key);
                fail(p, "unknown key");
            }
    }

    const json* find(const json& obj, const char* key) const {
        const auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    double number(const json& v, const Path& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "expected a finite number");
        return x;
    }

    std::uint64_t uint(const json& v, const Path& path) const {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() < 0) fail(path, "expected a non-negative integer");
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (x >= 0 && x == std::floor(x) && x < 9.007199254740992e15) return static_cast<std::uint64_t>(x);
        }
        fail(path, "expected a non-negative integer");
    }

    std::string str(const json& v, const Path& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const json& v, const Path& path) const {
        if (!v.is_boolean()) fail(path, "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const json& v, const Path& path) const {
        if (!v.is_array()) fail(path, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) out.push_back(number(x, path));
        return out;
    }

    template <typename T, typename Fn>
    void opt(const json& obj, const Path& parent, const char* key, T& target, Fn&& convert) const {
        if (const json* v = find(obj, key)) {
            Path p = parent;
            p.push_back(key);
            target = convert(*v, p);
        }
    }

    [[nodiscard]] const std::string& text() const { return text_; }

private:
    const std::string& text_;
    std::string origin_;
};

PowerSchedule read_alpha(const Reader& r, const json& v, const Path& path) {
    if (v.is_number()) return PowerSchedule::constant(r.number(v, path));
    r.only_keys(v, path, {"kind", "a0", "a1", "table"});
    PowerSchedule s;
    std::string kind = "constant";
    r.opt(v, path, "kind", kind, [&](const json& x, const Path& p) { return r.str(x, p); });
    r.opt(v, path, "a0", s.a0, [&](const json& x, const Path& p) { return r.number(x, p); });
    r.opt(v, path, "a1", s.a1, [&](const json& x, const Path& p) { return r.number(x, p); });
    r.opt(v, path, "table", s.table, [&](const json& x, const Path& p) { return r.numbers(x, p); });
    Path kp = path;
    kp.push_back("kind");
    if (kind == "constant") s.kind = PowerSchedule::Kind::constant;
    else if (kind == "affine") s.kind = PowerSchedule::Kind::affine;
    else if (kind == "table") s.kind = PowerSchedule::Kind::table;
    else r.fail(kp, "must be \"constant\", \"affine\" or \"table\", got \"" + kind + "\"");
    if (s.kind == PowerSchedule::Kind::table && s.table.empty()) r.fail(kp, "a table schedule needs a non-empty table");
    return s;
}

LearningRateSchedule read_eta(const Reader& r, const json& v, const Path& path) {
    if (v.is_number()) return LearningRateSchedule::constant(r.number(v, path));
    r.only_keys(v, path, {"kind", "c0", "c1", "table"});
    LearningRateSchedule s;
    std::string kind = "constant";
    r.opt(v, path, "kind", kind, [&](const json& x, const Path& p) { return r.str(x, p); });
    r.opt(v, path, "c0", s.c0, [&](const json& x, const Path& p) { return r.number(x, p); });
    r.opt(v, path, "c1", s.c1, [&](const json& x, const Path& p) { return r.number(x, p); });
    r.opt(v, path, "table", s.table, [&](const json& x, const Path& p) { return r.numbers(x, p); });
    Path kp = path;
    kp.push_back("kind");
    if (kind == "constant") s.kind = LearningRateSchedule::Kind::constant;
    else if (kind == "inverse_affine") s.kind = LearningRateSchedule::Kind::inverse_affine;
    else if (kind == "table") s.kind = LearningRateSchedule::Kind::table;
    else r.fail(kp, "must be \"constant\", \"inverse_affine\" or \"table\", got \"" + kind + "\"");
    if (s.kind == LearningRateSchedule::Kind::table && s.table.empty()) r.fail(kp, "a table schedule needs a non-empty table");
    return s;
}

// Maps a validate() message back to the key it names.
Path key_in_message(const std::string& message) {
    static const std::vector<std::pair<std::string, Path>> keys = {
        {"sigma_h2", {"sigma_h2"}}, {"sigma_z2", {"sigma_z2"}}, {"sigma_ht2", {"sigma_ht2"}},
        {"t_rounds", {"t_rounds"}}, {"batch_size", {"batch_size"}}, {"alpha", {"alpha"}},
        {"eta", {"eta"}},           {"tau", {"tau"}},           {"m ", {"m"}},
        {"k ", {"k"}},              {"d ", {"d"}},              {"s ", {"s"}}};
    for (const auto& [prefix, path] : keys)
        if (message.rfind(prefix, 0) == 0) return path;
    return {};
}

json alpha_json(const PowerSchedule& s) {
    json j{{"kind", to_string(s.kind)}};
    if (s.kind == PowerSchedule::Kind::table) j["table"] = s.table;
    else {
        j["a0"] = s.a0;
        j["a1"] = s.a1;
    }
    return j;
}

json eta_json(const LearningRateSchedule& s) {
    json j{{"kind", to_string(s.kind)}};
    if (s.kind == LearningRateSchedule::Kind::table) j["table"] = s.table;
    else {
        j["c0"] = s.c0;
        j["c1"] = s.c1;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ":" + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                          ": malformed JSON: " + e.what());
    }
    Reader r(text, origin);
    const json* root = &doc;
    Path base;
    if (doc.is_object() && doc.contains("config") && doc.contains("schema_version")) {
        root = &doc["config"];
        base = {"config"};
    }
    const json& c = *root;
    auto sub = [&](std::initializer_list<const char*> rest) {
        Path p = base;
        for (const char* k : rest) p.emplace_back(k);
        return p;
    };
    r.only_keys(c, base,
                {"m", "k", "d", "s", "tau", "t_rounds", "sigma_h2", "sigma_z2", "sigma_ht2", "alpha", "eta", "seed",
                 "partition_mode", "batch_size", "task", "bound", "verify", "run"});

    RunConfig cfg;
    SimConfig& s = cfg.sim;
    auto size = [&](const json& v, const Path& p) { return static_cast<std::size_t>(r.uint(v, p)); };
    auto num = [&](const json& v, const Path& p) { return r.number(v, p); };
    for (const char* required : {"m", "k", "d"})
        if (!c.contains(required)) r.fail(base, std::string("missing required key \"") + required + "\"");
    r.opt(c, base, "m", s.devices, size);
    r.opt(c, base, "k", s.antennas, size);
    r.opt(c, base, "d", s.dim, size);
    r.opt(c, base, "s", s.subchannels, size);
    r.opt(c, base, "tau", s.local_steps, size);
    r.opt(c, base, "t_rounds", s.rounds, size);
    r.opt(c, base, "sigma_h2", s.sigma_h2, num);
    r.opt(c, base, "sigma_z2", s.sigma_z2, num);
    r.opt(c, base, "sigma_ht2", s.sigma_ht2, num);
    r.opt(c, base, "alpha", s.alpha, [&](const json& v, const Path& p) { return read_alpha(r, v, p); });
    r.opt(c, base, "eta", s.eta, [&](const json& v, const Path& p) { return read_eta(r, v, p); });
    r.opt(c, base, "seed", s.seed, [&](const json& v, const Path& p) { return r.uint(v, p); });
    r.opt(c, base, "partition_mode", s.partition_mode, [&](const json& v, const Path& p) {
        try {
            return parse_partition_mode(r.str(v, p));
        } catch (const ConfigError& e) {
            r.fail(p, e.what());
        }
    });
    if (c.contains("batch_size")) {
        cfg.batch_size_given = true;
        r.opt(c, base, "batch_size", s.batch_size, size);
    }

    TaskSpec& t = cfg.task.spec;
    t.dim = s.dim;
    t.partition = s.partition_mode;
    if (const json* task = r.find(c, "task")) {
        const Path p = sub({"task"});
        r.only_keys(*task, p,
                    {"family", "samples_per_device", "clusters", "mu", "L", "spectrum_jitter", "lambda", "label_noise", "cluster_spread",
                     "test_samples", "data_path"});
        r.opt(*task, p, "family", t.family, [&](const json& v, const Path& q) {
            try {
                return parse_loss_family(r.str(v, q));
            } catch (const ConfigError& e) {
                r.fail(q, e.what());
            }
        });
        r.opt(*task, p, "samples_per_device", t.samples_per_device, size);
        r.opt(*task, p, "clusters", t.clusters, size);
        r.opt(*task, p, "mu", t.mu, num);
        r.opt(*task, p, "L", t.L, num);
        r.opt(*task, p, "spectrum_jitter", t.spectrum_jitter, num);
        r.opt(*task, p, "lambda", t.lambda, num);
        r.opt(*task, p, "label_noise", t.label_noise, num);
        r.opt(*task, p, "cluster_spread", t.cluster_spread, num);
        r.opt(*task, p, "test_samples", t.test_samples, size);
        r.opt(*task, p, "data_path", cfg.task.data_path, [&](const json& v, const Path& q) { return r.str(v, q); });
        auto check = [&](bool ok, const char* key, const char* msg) {
            if (!ok) r.fail(sub({"task", key}), msg);
        };
        check(t.samples_per_device > 0, "samples_per_device", "must be positive");
        check(t.clusters > 0, "clusters", "must be positive");
        check(t.mu > 0.0, "mu", "must be positive");
        check(t.L >= t.mu, "L", "must be at least task.mu");
        check(t.spectrum_jitter >= 0.0 && t.spectrum_jitter <= 1.0, "spectrum_jitter", "must lie in [0, 1]");
        check(t.lambda >= 0.0, "lambda", "must be non-negative");
        check(t.label_noise >= 0.0, "label_noise", "must be non-negative");
    }

    if (const json* b = r.find(c, "bound")) {
        const Path p = sub({"bound"});
        r.only_keys(*b, p, {"mu", "L", "G2", "Gamma", "init_gap", "k_values"});
        BoundSection& bs = cfg.bound;
        auto onum = [&](const json& v, const Path& q) { return std::optional<double>(r.number(v, q)); };
        r.opt(*b, p, "mu", bs.mu, onum);
        r.opt(*b, p, "L", bs.L, onum);
        r.opt(*b, p, "G2", bs.G2, onum);
        r.opt(*b, p, "Gamma", bs.Gamma, onum);
        r.opt(*b, p, "init_gap", bs.init_gap, onum);
        r.opt(*b, p, "k_values", bs.k_values, [&](const json& v, const Path& q) {
            if (!v.is_array()) r.fail(q, "expected an array of positive integers");
            std::vector<std::size_t> out;
            for (const auto& x : v) {
                out.push_back(static_cast<std::size_t>(r.uint(x, q)));
                if (out.back() == 0) r.fail(q, "antenna counts must be positive");
            }
            return out;
        });
    }

    if (const json* v = r.find(c, "verify")) {
        const Path p = sub({"verify"});
        r.only_keys(*v, p, {"trials", "alpha", "updates"});
        r.opt(*v, p, "trials", cfg.verify.trials, size);
        r.opt(*v, p, "alpha", cfg.verify.alpha, num);
        r.opt(*v, p, "updates", cfg.verify.updates, [&](const json& x, const Path& q) {
            if (!x.is_array()) r.fail(q, "expected an array of update vectors");
            std::vector<ModelVector> out;
            for (const auto& u : x) {
                out.emplace_back(r.numbers(u, q));
                if (out.back().size() != s.dim) r.fail(q, "every update must have length d");
            }
            if (out.size() != s.devices) r.fail(q, "expected exactly m updates");
            return out;
        });
        if (!(cfg.verify.alpha > 0.0)) r.fail(sub({"verify", "alpha"}), "must be positive");
    }

    if (const json* v = r.find(c, "run")) {
        const Path p = sub({"run"});
        r.only_keys(*v, p, {"error_free_baseline", "channel_mode"});
        r.opt(*v, p, "error_free_baseline", cfg.run.error_free_baseline,
              [&](const json& x, const Path& q) { return r.boolean(x, q); });
        r.opt(*v, p, "channel_mode", cfg.run.channel_mode, [&](const json& x, const Path& q) {
            try {
                return parse_channel_mode(r.str(x, q));
            } catch (const ConfigError& e) {
                r.fail(q, e.what());
            }
        });
    }

    try {
        // t_rounds = 0 is meaningful for the bound (its base case); the
        // simulating commands reject it when they validate again.
        SimConfig probe = s;
        probe.rounds = std::max<std::size_t>(probe.rounds, 1);
        validate(probe);
    } catch (const ConfigError& e) {
        Path p = base;
        for (auto& k : key_in_message(e.what())) p.push_back(k);
        r.fail(p == base ? Path{} : p, e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config(buf.str(), path);
    if (!cfg.task.data_path.empty()) {
        std::filesystem::path data(cfg.task.data_path);
        if (data.is_relative()) cfg.task.data_path = (std::filesystem::path(path).parent_path() / data).lexically_normal().string();
    }
    return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
    const SimConfig& s = cfg.sim;
    const TaskSpec& t = cfg.task.spec;
    json j;
    j["m"] = s.devices;
    j["k"] = s.antennas;
    j["d"] = s.dim;
    j["s"] = s.subchannels;
    j["tau"] = s.local_steps;
    j["t_rounds"] = s.rounds;
    j["sigma_h2"] = s.sigma_h2;
    j["sigma_z2"] = s.sigma_z2;
    j["sigma_ht2"] = s.sigma_ht2;
    j["alpha"] = alpha_json(s.alpha);
    j["eta"] = eta_json(s.eta);
    j["seed"] = s.seed;
    j["partition_mode"] = to_string(s.partition_mode);
    if (cfg.batch_size_given) j["batch_size"] = s.batch_size;
    j["task"] = {{"family", to_string(t.family)},
                 {"samples_per_device", t.samples_per_device},
                 {"clusters", t.clusters},
                 {"mu", t.mu},
                 {"L", t.L},
                 {"spectrum_jitter", t.spectrum_jitter},
                 {"lambda", t.lambda},
                 {"label_noise", t.label_noise},
                 {"cluster_spread", t.cluster_spread},
                 {"test_samples", t.test_samples}};
    if (!cfg.task.data_path.empty()) j["task"]["data_path"] = cfg.task.data_path;
    json b = json::object();
    if (cfg.bound.mu) b["mu"] = *cfg.bound.mu;
    if (cfg.bound.L) b["L"] = *cfg.bound.L;
    if (cfg.bound.G2) b["G2"] = *cfg.bound.G2;
    if (cfg.bound.Gamma) b["Gamma"] = *cfg.bound.Gamma;
    if (cfg.bound.init_gap) b["init_gap"] = *cfg.bound.init_gap;
    if (!cfg.bound.k_values.empty()) b["k_values"] = cfg.bound.k_values;
    j["bound"] = b;
    json v{{"trials", cfg.verify.trials}, {"alpha", cfg.verify.alpha}};
    if (!cfg.verify.updates.empty()) {
        json ups = json::array();
        for (const auto& u : cfg.verify.updates) ups.push_back(u.values());
        v["updates"] = ups;
    }
    j["verify"] = v;
    j["run"] = {{"error_free_baseline", cfg.run.error_free_baseline},
                {"channel_mode", to_string(cfg.run.channel_mode)}};
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FederatedTask build_task(const RunConfig& cfg) {
    const RngStream root = RngStream::from_seed(cfg.sim.seed);
    TaskSpec spec = cfg.task.spec;
    spec.dim = cfg.sim.dim;
    spec.partition = cfg.sim.partition_mode;
    try {
        if (cfg.task.data_path.empty()) return make_task(spec, cfg.sim.devices, root);
        Dataset data = load_delimited(cfg.task.data_path);
        if (data.dim() != cfg.sim.dim)
            throw ConfigError("dataset '" + cfg.task.data_path + "' has " + std::to_string(data.dim()) +
                              " features but d = " + std::to_string(cfg.sim.dim));
        auto shards = partition(data, cfg.sim.devices, cfg.sim.partition_mode, root.derive(StreamLabel::partition, 0));
        return FederatedTask(spec.family, spec.lambda, std::move(shards));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("task: ") + e.what());
    }
}

}  // namespace airfeel::cli
