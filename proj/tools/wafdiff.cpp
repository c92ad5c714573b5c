// Copyright (c) 2026 the wafdiff authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include <CLI11.hpp>

#include "wafdiff/cli.hpp"
#include "wafdiff/proxy.hpp"

namespace {

// "host:port" -> (host, port)
bool split_hostport(const std::string &s, std::string &host, uint16_t &port) {
    size_t colon = s.rfind(':');
    if (colon == std::string::npos || colon + 1 >= s.size())
        return false;
    host = s.substr(0, colon);
    try {
        unsigned long p = std::stoul(s.substr(colon + 1));
        if (p > 65535)
            return false;
        port = static_cast<uint16_t>(p);
    } catch (...) {
        return false;
    }
    return !host.empty();
}

} // namespace

int main(int argc, char **argv) {
    using namespace wafdiff;

    CLI::App app{"HTTP body-parsing discrepancy toolkit: mutation corpus "
                 "generation, WAF/framework differential testing, bypass "
                 "minimization, and a normalizing reverse proxy"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    uint64_t seed = 42;
    int jobs = 1;
    std::string policy_file;
    std::string rules_file;
    app.add_option("--seed", seed, "deterministic RNG seed")->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads for matrix runs")
        ->capture_default_str();
    app.add_option("--policy", policy_file, "normalizer policy file");
    app.add_option("--rules", rules_file, "WAF rule file");

    cli::GenerateOptions gen;
    auto *generate = app.add_subcommand("generate", "generate a mutation corpus");
    generate->add_option("--out", gen.out_dir, "output corpus directory")
        ->required();
    generate->add_option("--classes", gen.classes,
                         "all|multipart|json|xml|comma list")
        ->capture_default_str();
    generate->add_option("--per-class", gen.per_class, "mutants per class")
        ->capture_default_str();
    generate->add_option("--stack", gen.stack, "mutations stacked per mutant")
        ->capture_default_str();
    generate->add_option("--payload", gen.payload,
                         "attack payload (default per content type)");

    cli::NormalizeOptions norm;
    auto *norm_cmd = app.add_subcommand("normalize",
                                        "normalize-or-reject .http requests");
    norm_cmd->add_option("--in", norm.input, ".http file or corpus directory")
        ->required();
    norm_cmd->add_option("--out", norm.out_dir,
                         "directory for normalized output and report");

    cli::DiffOptions diff;
    auto *diff_cmd =
        app.add_subcommand("diff", "run the WAF/framework differential matrix");
    diff_cmd->add_option("--in", diff.in_dir, "corpus directory")->required();
    diff_cmd->add_option("--wafs", diff.wafs,
                         "fail-open-strict|fail-closed-strict|raw-scan|all")
        ->capture_default_str();
    diff_cmd->add_option("--frameworks", diff.frameworks,
                         "framework model names or 'all'")
        ->capture_default_str();
    diff_cmd->add_option("--report", diff.report_path, "JSONL output path");

    cli::MinimizeOptions mini;
    auto *mini_cmd = app.add_subcommand(
        "minimize", "reduce bypasses to minimal mutation sets and classify");
    mini_cmd->add_option("--in", mini.in_dir, "corpus directory with manifest")
        ->required();
    mini_cmd->add_option("--waf", mini.waf, "waf model")->capture_default_str();
    mini_cmd->add_option("--frameworks", mini.frameworks, "framework models")
        ->capture_default_str();
    mini_cmd->add_option("--report", mini.report_path, "JSONL output path");

    cli::ReportOptions rep;
    auto *rep_cmd = app.add_subcommand("report", "summarize a JSONL report");
    rep_cmd->add_option("--in", rep.records_path, "records file")->required();

    std::string listen = "127.0.0.1:8080";
    std::string upstream;
    std::string log_path;
    auto *serve_cmd =
        app.add_subcommand("serve", "run the normalizing reverse proxy");
    serve_cmd->add_option("--listen", listen, "listen host:port")
        ->capture_default_str();
    serve_cmd->add_option("--upstream", upstream, "upstream host:port")
        ->required();
    serve_cmd->add_option("--log", log_path, "JSONL decision log path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : cli::kUsageError;
    }

    if (*generate) {
        gen.seed = seed;
        return cli::cmd_generate(gen, std::cout, std::cerr);
    }
    if (*norm_cmd) {
        norm.policy_file = policy_file;
        return cli::cmd_normalize(norm, std::cout, std::cerr);
    }
    if (*diff_cmd) {
        diff.rules_file = rules_file;
        diff.jobs = jobs;
        return cli::cmd_diff(diff, std::cout, std::cerr);
    }
    if (*mini_cmd)
        return cli::cmd_minimize(mini, std::cout, std::cerr);
    if (*rep_cmd)
        return cli::cmd_report(rep, std::cout, std::cerr);
    if (*serve_cmd) {
        ProxyConfig cfg;
        if (!split_hostport(listen, cfg.listen_host, cfg.listen_port)) {
            std::cerr << "serve: malformed --listen address\n";
            return cli::kUsageError;
        }
        if (!split_hostport(upstream, cfg.upstream_host, cfg.upstream_port)) {
            std::cerr << "serve: malformed --upstream address\n";
            return cli::kUsageError;
        }
        if (!policy_file.empty()) {
            auto text = read_file(policy_file);
            if (!text) {
                std::cerr << text.error().message << "\n";
                return cli::kUsageError;
            }
            auto parsed = parse_policy(*text);
            if (!parsed) {
                std::cerr << "policy: " << parsed.error() << "\n";
                return cli::kUsageError;
            }
            cfg.policy = *parsed;
        }
        cfg.max_body_bytes = cfg.policy.max_body_bytes;
        cfg.log_path = log_path;
        return serve(cfg);
    }
    return cli::kUsageError;
}
