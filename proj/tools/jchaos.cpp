// Copyright 2026 The jchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

// Command-line driver for the experiment pipeline.
//
// Exit codes: 0 success, 1 internal failure, 2 invalid input or config,
// 3 missing prerequisite, 4 resource limit.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "jchaos/error.hpp"
#include "jchaos/harness.hpp"

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out;
};

void add_common(CLI::App *sub, Common &c) {
    sub->add_option("config", c.config, "experiment config (JSON)")->required();
    sub->add_option("--seed", c.seed, "override the experiment seed");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "override the run directory");
}

jchaos::ExperimentConfig load(const Common &c) {
    jchaos::ExperimentConfig cfg = jchaos::read_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.out.empty()) cfg.out = c.out;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Control-noise benchmark pipeline for Chimera spin glasses"};
    app.require_subcommand(1);
    Common common;
    std::size_t max_records = 0;
    double fraction = 0.01;

    auto *gen = app.add_subcommand("generate", "write intended instances and ground certificates");
    add_common(gen, common);
    auto *run = app.add_subcommand("run", "sample every (instance, eta, strategy, gamma, gauge) tuple; resumable");
    add_common(run, common);
    run->add_option("--max-records", max_records, "stop after this many new records");
    auto *analyze = app.add_subcommand("analyze", "write the CSV tables under analysis/");
    add_common(analyze, common);
    auto *collapse = app.add_subcommand("collapse", "fit the collapse forms and write bound overlays");
    add_common(collapse, common);
    auto *verify = app.add_subcommand("verify", "recompute a sample of records from their archives");
    add_common(verify, common);
    verify->add_option("--fraction", fraction, "share of records to recompute")->check(CLI::Range(0.0, 1.0));
    auto *report = app.add_subcommand("report", "print a summary of the analysis");
    add_common(report, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const jchaos::ExperimentConfig cfg = load(common);
        if (gen->parsed()) {
            const auto s = jchaos::cmd_generate(cfg);
            std::cout << "instances: " << s.instances << ", certified: " << s.certified << ", flagged: " << s.flagged.size()
                      << '\n';
            for (const auto &id : s.flagged) std::cout << "  flagged " << id << '\n';
        } else if (run->parsed()) {
            const auto s = jchaos::cmd_run(cfg, {common.threads, max_records});
            std::cout << "records: " << s.total << ", new: " << s.completed << ", skipped: " << s.skipped << '\n';
        } else if (analyze->parsed()) {
            for (const auto &p : jchaos::cmd_analyze(cfg)) std::cout << p.string() << '\n';
        } else if (collapse->parsed()) {
            for (const auto &p : jchaos::cmd_collapse(cfg)) std::cout << p.string() << '\n';
        } else if (verify->parsed()) {
            const auto s = jchaos::cmd_verify(cfg, fraction);
            std::cout << "checked " << s.checked << " records, " << s.mismatches.size() << " mismatches\n";
            for (const auto &m : s.mismatches) std::cout << "  " << m << '\n';
            if (!s.ok()) return 1;
        } else if (report->parsed()) {
            std::cout << jchaos::cmd_report(cfg);
        }
    } catch (const jchaos::ResourceError &e) {
        std::cerr << "resource: " << e.what() << '\n';
        return 4;
    } catch (const jchaos::DependencyError &e) {
        std::cerr << "dependency: " << e.what() << '\n';
        return 3;
    } catch (const jchaos::InputError &e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
