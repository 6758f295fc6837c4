#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* binary() {
    const char* b = std::getenv("OBSLAB_BIN");
    return b ? b : "./obslab";
}

fs::path workdir() {
    static fs::path d = [] {
        fs::path p = fs::temp_directory_path() / ("obslab_cli_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string write_config(const std::string& name, const std::string& text) {
    fs::path p = workdir() / (name + ".cfg.json");
    std::ofstream(p) << text;
    return p.string();
}

int run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " \"" + binary() + "\" " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::string text = slurp(p);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find("\r\n", pos);
        std::string line = text.substr(pos, end - pos);
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        rows.push_back(fields);
        pos = end + 2;
    }
    return rows;
}

std::string out(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("content on the h_0 Cantor set") {
    auto cfg = write_config("content", R"({"experiment": "content", "seed": 1, "params": {"depth": 8}})");
    REQUIRE(run("content --config " + cfg + " --out " + out("content")) == 0);
    json j = json::parse(slurp(out("content") + ".json"));
    CHECK(j["summary"]["upper"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j["summary"]["lower"]["value"].get<double>() >= 0.20);
    CHECK(j["violations"] == 0);
    CHECK(j["config"]["params"]["depth"] == 8);
    CHECK(j["config"]["params"]["family"] == "h_alpha");
    CHECK(j["seed"] == 1);
    auto rows = csv_rows(out("content") + ".csv");
    CHECK(rows.size() == 10);
    CHECK(rows[0][0] == "depth");
}

TEST_CASE("config errors exit 2 and write nothing") {
    struct Case {
        const char* name;
        const char* text;
        const char* experiment;
    };
    const Case cases[] = {
        {"malformed", R"({"experiment": "content", )", "content"},
        {"unknown_key", R"({"experiment": "content", "colour": 1})", "content"},
        {"unknown_param", R"({"params": {"depht": 8}})", "content"},
        {"wrong_type", R"({"params": {"depth": "eight"}})", "content"},
        {"float_for_int", R"({"params": {"depth": 8.5}})", "content"},
        {"mismatch", R"({"experiment": "remez"})", "content"},
        {"bad_value", R"({"params": {"eps": -1.0}})", "counterexample"},
        {"negative_seed", R"({"seed": -4})", "content"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.name);
        auto cfg = write_config(c.name, c.text);
        CHECK(run(std::string(c.experiment) + " --config " + cfg + " --out " + out(c.name)) == 2);
        CHECK(!fs::exists(out(c.name) + ".csv"));
        CHECK(!fs::exists(out(c.name) + ".json"));
    }
    CHECK(run("no-such-experiment --config " + write_config("x", "{}")) == 2);
    CHECK(run("content") == 2);
    CHECK(run("content --config " + (workdir() / "missing.json").string() + " --out " + out("missing")) == 2);
    CHECK(!fs::exists(out("missing") + ".json"));
}

TEST_CASE("counterexample ratio bounds") {
    auto cfg = write_config("cex", R"({"experiment": "counterexample", "params": {"eps": 1.0, "levels": 4, "T": 1.0}})");
    REQUIRE(run("counterexample --config " + cfg + " --out " + out("cex")) == 0);
    auto rows = csv_rows(out("cex") + ".csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[0][2] == "ln_ratio");
    for (int k = 2; k <= 4; ++k) CHECK(rows[k][9] == "1");
    // Level 2 is still a double; levels 3 and 4 print as towers.
    CHECK(std::stod(rows[2][2]) < -1e6);
    CHECK(rows[3][2].rfind("-exp^1(", 0) == 0);
    CHECK(rows[4][2].rfind("-exp^2(", 0) == 0);
}

TEST_CASE("violations exit 1, numerical failures exit 3") {
    auto cfg = write_config("slice_hi", R"({"experiment": "slicing", "params": {"c": 1e6}})");
    CHECK(run("slicing --config " + cfg + " --out " + out("slice_hi")) == 1);
    json j = json::parse(slurp(out("slice_hi") + ".json"));
    CHECK(j["violations"].get<int>() > 0);

    auto bad = write_config("nofeasible", R"({"experiment": "lr-schedule", "params": {"T": 1e-300}})");
    CHECK(run("lr-schedule --config " + bad + " --out " + out("nofeasible")) == 3);
    CHECK(!fs::exists(out("nofeasible") + ".json"));
}

TEST_CASE("seed and output overrides") {
    auto cfg = write_config("heat", R"({"experiment": "heat-ratio", "seed": 5, "output": "unused", "params": {"trials": 2}})");
    REQUIRE(run("heat-ratio --config " + cfg + " --seed 9 --out " + out("heat9")) == 0);
    json j = json::parse(slurp(out("heat9") + ".json"));
    CHECK(j["seed"] == 9);
    CHECK(j["config"]["seed"] == 9);
    CHECK(j["config"]["output"] == out("heat9"));
    REQUIRE(run("heat-ratio --config " + cfg + " --out " + out("heat5")) == 0);
    CHECK(slurp(out("heat9") + ".csv") != slurp(out("heat5") + ".csv"));
}

TEST_CASE("byte-identical reports across thread counts") {
    const char* docs[][2] = {
        {"heat-ratio", R"({"params": {"trials": 3}})"},
        {"cartan", R"({"params": {"trials": 12, "samples": 2000}})"},
        {"capacity", R"({"params": {"depth_max": 4}})"},
        {"slicing", R"({"params": {"offsets": 200}})"},
    };
    for (const auto& d : docs) {
        CAPTURE(d[0]);
        auto cfg = write_config(std::string("det_") + d[0], d[1]);
        std::string a = out(std::string("det1_") + d[0]), b = out(std::string("det3_") + d[0]);
        REQUIRE(run(std::string(d[0]) + " --config " + cfg + " --seed 4 --out " + a, "OBSLAB_THREADS=1") == 0);
        REQUIRE(run(std::string(d[0]) + " --config " + cfg + " --seed 4 --out " + b, "OBSLAB_THREADS=3") == 0);
        CHECK(slurp(a + ".csv") == slurp(b + ".csv"));
        // The output prefix is part of the embedded config; compare the rest.
        json ja = json::parse(slurp(a + ".json")), jb = json::parse(slurp(b + ".json"));
        ja["config"].erase("output");
        jb["config"].erase("output");
        CHECK(ja.dump() == jb.dump());
    }
}
