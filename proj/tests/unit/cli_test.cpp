// Exercises the CLI surface through the real binary (path via the
// LOOKAHEAD_CLI environment variable, set by CTest). Skips when run outside
// the test harness.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lookahead/corpus_io.hpp"

using namespace lookahead;

namespace {

const char* cli_path() { return std::getenv("LOOKAHEAD_CLI"); }

struct CommandResult {
    int exit_code = -1;
    std::string stdout_text;
};

CommandResult run_cli(const std::string& args, const std::string& stdin_text = "") {
    const std::string out_path = "cli_stdout.tmp";
    std::string cmd = std::string(cli_path()) + " " + args + " > " + out_path + " 2>cli_stderr.tmp";
    if (!stdin_text.empty()) {
        std::ofstream in("cli_stdin.tmp");
        in << stdin_text;
        in.close();
        cmd += " < cli_stdin.tmp";
    }
    const int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream out(out_path);
    std::ostringstream ss;
    ss << out.rdbuf();
    result.stdout_text = ss.str();
    return result;
}

nlohmann::json last_json_line(const std::string& text) {
    std::istringstream lines(text);
    std::string line, last;
    while (std::getline(lines, line)) {
        if (!line.empty()) last = line;
    }
    return nlohmann::json::parse(last);
}

}  // namespace

TEST_CASE("cli surface: synth-data, build-vocab, precondition and usage errors") {
    if (!cli_path()) {
        MESSAGE("LOOKAHEAD_CLI not set; skipping CLI surface test");
        return;
    }
    namespace fs = std::filesystem;
    fs::create_directories("cli_work");

    // synth-data emits a result line and a loadable corpus
    auto synth = run_cli("synth-data --seed 5 --n 30 --out cli_work/corpus.jsonl");
    REQUIRE(synth.exit_code == 0);
    const auto synth_json = last_json_line(synth.stdout_text);
    CHECK(synth_json.at("ok") == true);
    CHECK(synth_json.at("n_dialogues") == 30);
    CHECK(load_jsonl("cli_work/corpus.jsonl").size() == 30);
    CHECK(fs::exists("cli_work/corpus.jsonl.config.json"));  // effective config sidecar

    // identical invocation reproduces the corpus byte for byte
    auto synth2 = run_cli("synth-data --seed 5 --n 30 --out cli_work/corpus2.jsonl");
    REQUIRE(synth2.exit_code == 0);
    std::ifstream a("cli_work/corpus.jsonl"), b("cli_work/corpus2.jsonl");
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);

    // build-vocab
    auto bv = run_cli("build-vocab --in cli_work/corpus.jsonl --out cli_work/vocab.json");
    REQUIRE(bv.exit_code == 0);
    CHECK(last_json_line(bv.stdout_text).at("vocab_size").get<int>() > 4);
    CHECK(load_vocab("cli_work/vocab.json").size() > 4);

    // RL training without --init is a precondition error (exit 3)
    auto rl = run_cli(
        "train --variant rl-lookahead --data cli_work/corpus.jsonl --out cli_work/x.json");
    CHECK(rl.exit_code == 3);

    // unknown flags and missing required options are usage errors (exit 1)
    CHECK(run_cli("train --frobnicate 1").exit_code == 1);
    CHECK(run_cli("no-such-command").exit_code == 1);

    // malformed data is a data error (exit 2)
    {
        std::ofstream bad("cli_work/bad.jsonl");
        bad << "{not json\n";
    }
    CHECK(run_cli("build-vocab --in cli_work/bad.jsonl --out cli_work/y.json").exit_code == 2);

    fs::remove_all("cli_work");
    for (const char* f : {"cli_stdout.tmp", "cli_stderr.tmp", "cli_stdin.tmp"}) {
        std::remove(f);
    }
}

TEST_CASE("cli chat answers deterministically under a fixed checkpoint") {
    if (!cli_path()) {
        MESSAGE("LOOKAHEAD_CLI not set; skipping CLI chat test");
        return;
    }
    namespace fs = std::filesystem;
    fs::create_directories("cli_chat");
    REQUIRE(run_cli("synth-data --seed 3 --n 40 --out cli_chat/corpus.jsonl").exit_code == 0);
    REQUIRE(run_cli("train --variant seq2seq --data cli_chat/corpus.jsonl "
                    "--out cli_chat/model.json --policy_epochs 3 --embed_dim 16")
                .exit_code == 0);

    const std::string script = "i lost my job last week\nthat makes it all feel worse\n";
    auto chat1 = run_cli("chat --checkpoint cli_chat/model.json", script);
    auto chat2 = run_cli("chat --checkpoint cli_chat/model.json", script);
    REQUIRE(chat1.exit_code == 0);
    CHECK(chat1.stdout_text == chat2.stdout_text);  // greedy determinism
    const auto result = last_json_line(chat1.stdout_text);
    CHECK(result.at("command") == "chat");
    CHECK(result.at("turns") == 2);

    fs::remove_all("cli_chat");
    for (const char* f : {"cli_stdout.tmp", "cli_stderr.tmp", "cli_stdin.tmp"}) {
        std::remove(f);
    }
}
