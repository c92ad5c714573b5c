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

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "wafdiff/cli.hpp"

using namespace wafdiff;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    explicit TempDir(const char *tag) {
        path = fs::temp_directory_path() /
               (Bytes("wafdiff_cli_") + tag + "_" + std::to_string(::getpid()));
        std::error_code ec;
        fs::remove_all(path, ec);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

Bytes file_text(const fs::path &p) {
    auto r = read_file(p);
    REQUIRE(r.ok());
    return *r;
}

size_t count_lines_with(BytesView text, BytesView needle) {
    size_t count = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        BytesView line = eol == BytesView::npos ? text.substr(pos)
                                                : text.substr(pos, eol - pos);
        pos = eol == BytesView::npos ? text.size() : eol + 1;
        if (line.find(needle) != BytesView::npos)
            ++count;
    }
    return count;
}

} // namespace

TEST_CASE("generate/diff/minimize/report pipeline is deterministic") {
    TempDir dir_a("pipeline_a");
    TempDir dir_b("pipeline_b");
    std::ostringstream out, err;

    cli::GenerateOptions gen;
    gen.classes = "all";
    gen.per_class = 2;
    gen.seed = 42;

    for (const auto &dir : {dir_a.path, dir_b.path}) {
        gen.out_dir = (dir / "corpus").string();
        REQUIRE(cli::cmd_generate(gen, out, err) == cli::kOk);

        cli::DiffOptions diff;
        diff.in_dir = (dir / "corpus").string();
        diff.wafs = "all";
        diff.frameworks = "all";
        diff.report_path = (dir / "diff.jsonl").string();
        diff.jobs = 2;
        REQUIRE(cli::cmd_diff(diff, out, err) == cli::kOk);

        cli::MinimizeOptions mini;
        mini.in_dir = (dir / "corpus").string();
        mini.report_path = (dir / "bypasses.jsonl").string();
        REQUIRE(cli::cmd_minimize(mini, out, err) == cli::kOk);
    }

    CHECK(file_text(dir_a.path / "corpus" / "manifest.jsonl") ==
          file_text(dir_b.path / "corpus" / "manifest.jsonl"));
    CHECK(file_text(dir_a.path / "diff.jsonl") ==
          file_text(dir_b.path / "diff.jsonl"));
    CHECK(file_text(dir_a.path / "bypasses.jsonl") ==
          file_text(dir_b.path / "bypasses.jsonl"));

    std::ostringstream report_out;
    cli::ReportOptions rep;
    rep.records_path = (dir_a.path / "diff.jsonl").string();
    REQUIRE(cli::cmd_report(rep, report_out, err) == cli::kOk);
    CHECK(report_out.str().find("outcomes:") != Bytes::npos);
}

TEST_CASE("normalize-then-diff leaves no bypasses in the multipart corpus") {
    TempDir dir("shield");
    std::ostringstream out, err;

    cli::GenerateOptions gen;
    gen.out_dir = (dir.path / "corpus").string();
    gen.classes = "multipart";
    gen.per_class = 5;
    gen.seed = 42;
    REQUIRE(cli::cmd_generate(gen, out, err) == cli::kOk);

    cli::DiffOptions before;
    before.in_dir = gen.out_dir;
    before.report_path = (dir.path / "before.jsonl").string();
    REQUIRE(cli::cmd_diff(before, out, err) == cli::kOk);
    CHECK(count_lines_with(file_text(dir.path / "before.jsonl"),
                           "\"outcome\":\"bypass\"") > 0);

    cli::NormalizeOptions norm;
    norm.input = gen.out_dir;
    norm.out_dir = (dir.path / "normalized").string();
    REQUIRE(cli::cmd_normalize(norm, out, err) == cli::kOk);
    Bytes norm_report = file_text(dir.path / "normalized" /
                                  "normalize_report.jsonl");
    CHECK(count_lines_with(norm_report, "\"outcome\":\"passed-through\"") == 0);

    cli::DiffOptions after;
    after.in_dir = (dir.path / "normalized").string();
    after.report_path = (dir.path / "after.jsonl").string();
    REQUIRE(cli::cmd_diff(after, out, err) == cli::kOk);
    CHECK(count_lines_with(file_text(dir.path / "after.jsonl"),
                           "\"outcome\":\"bypass\"") == 0);
}

TEST_CASE("normalize handles a single file and empty directories") {
    TempDir dir("single");
    std::ostringstream out, err;

    Bytes octets = "POST / HTTP/1.1\r\nContent-Type: application/json\r\n"
                   "Content-Length: 9\r\n\r\n{\"a\": 1 }";
    REQUIRE(write_file(dir.path / "one.http", octets).ok());

    cli::NormalizeOptions norm;
    norm.input = (dir.path / "one.http").string();
    norm.out_dir = (dir.path / "out").string();
    REQUIRE(cli::cmd_normalize(norm, out, err) == cli::kOk);
    CHECK(file_text(dir.path / "out" / "one.http")
              .find("{\"a\":1}") != Bytes::npos);

    fs::create_directories(dir.path / "empty");
    cli::NormalizeOptions empty;
    empty.input = (dir.path / "empty").string();
    std::ostringstream out2;
    REQUIRE(cli::cmd_normalize(empty, out2, err) == cli::kOk);
    CHECK(out2.str().find("(0 requests)") != Bytes::npos);
}

TEST_CASE("resolvers reject unknown names") {
    CHECK_FALSE(cli::resolve_classes("bogus_class").ok());
    CHECK_FALSE(cli::resolve_wafs("bogus", "").ok());
    CHECK_FALSE(cli::resolve_frameworks("bogus").ok());
    CHECK(cli::resolve_classes("multipart")->size() == 12);
    CHECK(cli::resolve_classes("field_name_hack,content_type_removal")->size() == 2);
    CHECK(cli::resolve_wafs("all", "")->size() == 3);
    CHECK(cli::resolve_frameworks("strict-mirror")->size() == 1);
}

TEST_CASE("corpus round-trips through its manifest") {
    TempDir dir("roundtrip");
    std::ostringstream out, err;
    cli::GenerateOptions gen;
    gen.out_dir = (dir.path / "c").string();
    gen.classes = "json";
    gen.per_class = 2;
    REQUIRE(cli::cmd_generate(gen, out, err) == cli::kOk);

    auto loaded = read_corpus_with_manifest(dir.path / "c");
    REQUIRE(loaded.ok());
    CHECK(loaded->size() >= 5);
    for (const auto &entry : *loaded) {
        CHECK_FALSE(entry.specs.empty());
        CHECK(entry.seed.content_type == SeedContentType::Json);
        CHECK_FALSE(entry.seed.payload.empty());
    }
}
