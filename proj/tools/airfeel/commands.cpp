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
#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "airfeel/errors.hpp"
#include "airfeel/simulation.hpp"
#include "airfeel/verify.hpp"
#include "csv.hpp"

#ifndef AIRFEEL_VERSION
#define AIRFEEL_VERSION "unknown"
#endif

namespace airfeel::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::system_clock;

std::string iso_utc(Clock::time_point tp) {
    const std::time_t t = Clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Session {
    RunConfig cfg;
    fs::path out;
    Clock::time_point started = Clock::now();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

Session open_session(const CommandOptions& opts) {
    Session s;
    s.cfg = load_config(opts.config_path);
    if (opts.seed) s.cfg.sim.seed = *opts.seed;
    s.out = resolve_out_dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(s.out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + s.out.string() + "': " + ec.message());
    return s;
}

std::ofstream open_output(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    return out;
}

json bound_json(const BoundParams& p) {
    json j{{"mu", p.mu},         {"L", p.L},           {"G2", p.G2},
           {"Gamma", p.Gamma},   {"tau", p.tau},       {"M", p.M},
           {"K", p.K},           {"d", p.d},           {"sigma_h2", p.sigma_h2},
           {"sigma_z2", p.sigma_z2}, {"sigma_ht2", p.sigma_ht2}, {"init_gap", p.init_gap}};
    return j;
}

void write_manifest(const Session& s, const std::string& command, const CommandOptions& opts,
                    const std::vector<std::string>& outputs, json extra) {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = "airfeel";
    m["version"] = AIRFEEL_VERSION;
    m["command"] = command;
    m["config_hash"] = config_hash(s.cfg);
    m["config"] = to_json(s.cfg);
    m["started_at"] = iso_utc(s.started);
    m["finished_at"] = iso_utc(Clock::now());
    m["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - s.t0).count();
    m["workers"] = opts.workers;
    json outs = json::array();
    for (const auto& o : outputs) outs.push_back((s.out / o).string());
    m["outputs"] = outs;
    for (auto& [k, v] : extra.items()) m[k] = v;
    std::ofstream out = open_output(s.out / "manifest.json");
    out << m.dump(2) << '\n';
}

// Fills a default batch size (full shard) so the manifest pins it.
void resolve_batch(RunConfig& cfg, const FederatedTask& task) {
    if (cfg.batch_size_given) return;
    std::size_t smallest = task.shard(0).size();
    for (std::size_t m = 1; m < task.devices(); ++m) smallest = std::min(smallest, task.shard(m).size());
    cfg.sim.batch_size = smallest;
    cfg.batch_size_given = true;
}

SimOptions sim_options(const RunConfig& cfg, std::size_t workers) {
    SimOptions o;
    o.error_free_baseline = cfg.run.error_free_baseline;
    o.workers = workers;
    o.channel_mode = cfg.run.channel_mode;
    return o;
}

bool has_accuracy(const FederatedTask& task) { return task.test_set().has_value(); }

json task_json(const FederatedTask& task) {
    const TaskConstants& c = task.constants();
    return {{"family", to_string(task.family())}, {"f_star", c.f_star},  {"mu", c.mu},
            {"L", c.L},                           {"Gamma", c.gamma},    {"total_samples", task.total_samples()},
            {"equal_shards", task.equal_shards()}};
}

double g2_of(const SimResult& r) { return std::max(r.grad_stats.max_sq, r.baseline_grad_stats.max_sq); }

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const NumericalAbort& e) {
        err << "airfeel: numerical abort at metrics row " << e.row() << ": " << e.what() << '\n';
        return kNumericalAbort;
    } catch (const ConfigError& e) {
        err << "airfeel: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "airfeel: invalid argument: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "airfeel: error: " << e.what() << '\n';
        return kConfigError;
    }
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v == 0)
        throw std::invalid_argument("sweep value '" + text + "' for " + key + " must be a positive integer");
    return v;
}

double parse_variance(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("sweep value '" + text + "' for " + key + " must be a non-negative number");
    return v;
}

}  // namespace

std::string resolve_out_dir(const std::string& requested) {
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "airfeel_out";
}

BoundParams resolve_bound_params(const RunConfig& cfg, const FederatedTask* task, std::optional<double> g2_estimate) {
    const BoundSection& b = cfg.bound;
    auto pick = [&](const std::optional<double>& pinned, auto derive, const char* name) {
        if (pinned) return *pinned;
        if (!task) throw ConfigError(std::string("bound.") + name + " is required when no task is available");
        return derive();
    };
    BoundParams p;
    p.mu = pick(b.mu, [&] { return task->constants().mu; }, "mu");
    p.L = pick(b.L, [&] { return task->constants().L; }, "L");
    p.Gamma = pick(b.Gamma, [&] { return task->constants().gamma; }, "Gamma");
    p.init_gap = pick(b.init_gap, [&] { return squared_norm(task->constants().theta_star); }, "init_gap");
    if (b.G2) p.G2 = *b.G2;
    else if (g2_estimate) p.G2 = *g2_estimate;
    else throw ConfigError("bound.G2 is required when no empirical estimate is available");
    p.tau = cfg.sim.local_steps;
    p.M = cfg.sim.devices;
    p.K = cfg.sim.antennas;
    p.d = cfg.sim.dim;
    p.sigma_h2 = cfg.sim.sigma_h2;
    p.sigma_z2 = cfg.sim.sigma_z2;
    p.sigma_ht2 = cfg.sim.sigma_ht2;
    p.alpha = cfg.sim.alpha;
    p.eta = cfg.sim.eta;
    return p;
}

void apply_sweep_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "k") cfg.sim.antennas = parse_count(key, value);
    else if (key == "tau") cfg.sim.local_steps = parse_count(key, value);
    else if (key == "sigma_z2") cfg.sim.sigma_z2 = parse_variance(key, value);
    else if (key == "sigma_ht2") cfg.sim.sigma_ht2 = parse_variance(key, value);
    else throw std::invalid_argument("unknown sweep key '" + key + "' (expected k, sigma_z2, sigma_ht2 or tau)");
}

int run_simulate(const CommandOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        Session s = open_session(opts);
        const FederatedTask task = build_task(s.cfg);
        resolve_batch(s.cfg, task);
        const SimResult res = simulate(s.cfg.sim, task, sim_options(s.cfg, opts.workers));

        const bool acc = has_accuracy(task);
        std::ofstream csv = open_output(s.out / "metrics.csv");
        write_row(csv, metrics_columns(acc));
        for (const auto& r : res.rows) write_row(csv, metrics_cells(r, acc));
        for (const auto& r : res.baseline_rows) write_row(csv, metrics_cells(r, acc));
        csv.close();

        json extra;
        extra["task"] = task_json(task);
        extra["g2_estimate"] = g2_of(res);
        extra["unequal_shards"] = res.unequal_shards;
        if (res.unequal_shards)
            err << "airfeel: warning: unequal shards; aggregation uses the uniform 1/M average\n";
        try {
            extra["bound_params"] = bound_json(resolve_bound_params(s.cfg, &task, g2_of(res)));
        } catch (const ConfigError&) {
        }
        extra["csv_columns"] = {{"metrics.csv", metrics_columns(acc)}};
        write_manifest(s, "simulate", opts, {"metrics.csv"}, extra);
        return static_cast<int>(kOk);
    });
}

int run_bound(const CommandOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        Session s = open_session(opts);
        const BoundSection& b = s.cfg.bound;
        std::optional<FederatedTask> task;
        std::optional<double> g2;
        if (!b.mu || !b.L || !b.Gamma || !b.init_gap || !b.G2) {
            task.emplace(build_task(s.cfg));
            resolve_batch(s.cfg, *task);
            if (!b.G2) {
                SimOptions o = sim_options(s.cfg, opts.workers);
                o.error_free_baseline = true;
                g2 = g2_of(simulate(s.cfg.sim, *task, o));
            }
        }
        const BoundParams base = resolve_bound_params(s.cfg, task ? &*task : nullptr, g2);
        std::vector<std::size_t> ks = b.k_values.empty() ? std::vector<std::size_t>{s.cfg.sim.antennas} : b.k_values;
        const std::size_t T = s.cfg.sim.rounds;

        std::ofstream csv = open_output(s.out / "bounds.csv");
        write_row(csv, bound_columns());
        json finals = json::array();
        const BoundTrace ef = bound_error_free(base, T);
        for (std::size_t K : ks) {
            BoundParams p = base;
            p.K = K;
            const BoundTrace tr = bound_theorem1(p, T);
            for (std::size_t t = 0; t <= T; ++t)
                write_row(csv, {std::to_string(K), std::to_string(t), format_double(tr.A[t]), format_double(tr.B[t]),
                                format_double(tr.bound[t]), format_double(ef.bound[t]),
                                format_double(0.5 * p.L * tr.bound[t])});
            json f{{"k", K}, {"loss_gap_bound", tr.loss_gap_bound}};
            if (p.tau == 1 && p.eta.is_constant() && p.alpha.is_constant())
                f["bound_simplified"] = bound_simplified(p, T);
            finals.push_back(f);
        }
        csv.close();
        json extra;
        extra["bound_params"] = bound_json(base);
        extra["g2_source"] = b.G2 ? "config" : "empirical_max";
        extra["final"] = finals;
        extra["error_free_loss_gap_bound"] = ef.loss_gap_bound;
        extra["csv_columns"] = {{"bounds.csv", bound_columns()}};
        write_manifest(s, "bound", opts, {"bounds.csv"}, extra);
        return static_cast<int>(kOk);
    });
}

int run_verify(const CommandOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        Session s = open_session(opts);
        if (opts.trials) s.cfg.verify.trials = *opts.trials;
        std::vector<ModelVector> updates = s.cfg.verify.updates;
        if (updates.empty())
            for (std::size_t m = 0; m < s.cfg.sim.devices; ++m) {
                ModelVector u(s.cfg.sim.dim);
                u[m % s.cfg.sim.dim] = 1.0;
                updates.push_back(u);
            }
        const std::size_t trials = s.cfg.verify.trials;
        const double alpha = s.cfg.verify.alpha;
        VerificationReport rep = mc_verify_unbiased(s.cfg.sim, updates, trials, alpha, opts.workers);
        rep.append(mc_verify_term_moments(s.cfg.sim, updates, trials, alpha, opts.workers));
        rep.append(mc_verify_interference(s.cfg.sim, trials, opts.workers));

        json entries = json::array();
        for (const auto& e : rep.entries) {
            entries.push_back({{"name", e.name},
                               {"criterion", to_string(e.criterion)},
                               {"closed_form", e.closed_form},
                               {"estimate", e.estimate},
                               {"std_error", e.std_error},
                               {"trials", e.trials},
                               {"tolerance", e.tolerance},
                               {"pass", e.pass},
                               {"insufficient_trials", e.insufficient_trials}});
            if (e.insufficient_trials) err << "airfeel: " << e.name << ": insufficient trials (" << e.trials << ")\n";
            else if (!e.pass) err << "airfeel: " << e.name << ": FAILED\n";
        }
        json doc{{"schema_version", kSchemaVersion},
                 {"config_hash", config_hash(s.cfg)},
                 {"all_pass", rep.all_pass()},
                 {"entries", entries}};
        std::ofstream out = open_output(s.out / "verify.json");
        out << doc.dump(2) << '\n';
        out.close();
        write_manifest(s, "verify", opts, {"verify.json"}, json::object());
        return static_cast<int>(rep.all_pass() ? kOk : kVerifyFailed);
    });
}

int run_sweep(const CommandOptions& opts, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.sweep_values.empty()) throw std::invalid_argument("sweep needs at least one value");
        Session s = open_session(opts);
        {
            RunConfig probe = s.cfg;
            for (const auto& v : opts.sweep_values) apply_sweep_value(probe, opts.sweep_key, v);
        }
        const FederatedTask task = build_task(s.cfg);
        resolve_batch(s.cfg, task);
        const bool acc = has_accuracy(task);

        std::ofstream csv = open_output(s.out / "sweep.csv");
        std::vector<std::string> header = {opts.sweep_key};
        for (auto& c : metrics_columns(acc)) header.push_back(c);
        write_row(csv, header);
        json points = json::array();
        for (const auto& value : opts.sweep_values) {
            RunConfig point = s.cfg;
            apply_sweep_value(point, opts.sweep_key, value);
            validate(point.sim);
            const SimResult res = simulate(point.sim, task, sim_options(point, opts.workers));
            for (const auto* rows : {&res.rows, &res.baseline_rows})
                for (const auto& r : *rows) {
                    std::vector<std::string> cells = {value};
                    for (auto& c : metrics_cells(r, acc)) cells.push_back(std::move(c));
                    write_row(csv, cells);
                }
            points.push_back({{"value", value},
                              {"final_loss_gap", res.rows.back().loss_gap},
                              {"g2_estimate", g2_of(res)}});
        }
        csv.close();
        json extra;
        extra["sweep"] = {{"key", opts.sweep_key}, {"values", opts.sweep_values}, {"points", points}};
        extra["task"] = task_json(task);
        extra["csv_columns"] = {{"sweep.csv", header}};
        write_manifest(s, "sweep", opts, {"sweep.csv"}, extra);
        return static_cast<int>(kOk);
    });
}

}  // namespace airfeel::cli
