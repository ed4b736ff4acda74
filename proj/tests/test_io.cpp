#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "naive_reference.hpp"
#include "tsnn/config.hpp"
#include "tsnn/csv.hpp"
#include "tsnn/experiments.hpp"

using namespace tsnn;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) {
        std::ofstream out(path);
        out << content;
    }
};

}  // namespace

TEST_CASE("csv with empty fields and NA tokens") {
    TempFile f("tsnn_io_basic.csv");
    f.write("1,,3\n4,5,NA\n");
    ObservedMatrix x = read_matrix_csv(f.path);
    REQUIRE(x.rows() == 2);
    REQUIRE(x.cols() == 3);
    REQUIRE(x.observed(0, 0));
    REQUIRE(!x.observed(0, 1));
    REQUIRE(x.observed(0, 2));
    REQUIRE(x.observed(1, 0));
    REQUIRE(x.observed(1, 1));
    REQUIRE(!x.observed(1, 2));
    REQUIRE(x.values(1, 1) == 5.0);
}

TEST_CASE("empty file errors") {
    TempFile f("tsnn_io_empty.csv");
    f.write("");
    REQUIRE_THROWS_AS(read_matrix_csv(f.path), Error);
}

TEST_CASE("ragged rows error with the offending row") {
    TempFile f("tsnn_io_ragged.csv");
    f.write("1,2\n3\n");
    try {
        read_matrix_csv(f.path);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("unparseable and non-finite tokens error") {
    TempFile f("tsnn_io_bad.csv");
    f.write("1,abc\n");
    REQUIRE_THROWS_AS(read_matrix_csv(f.path), Error);
    f.write("1,inf\n");
    REQUIRE_THROWS_AS(read_matrix_csv(f.path), Error);
}

TEST_CASE("header flag skips one line") {
    TempFile f("tsnn_io_header.csv");
    f.write("c1,c2\n1,2\n");
    ObservedMatrix x = read_matrix_csv(f.path, true);
    REQUIRE(x.rows() == 1);
    REQUIRE(x.values(0, 1) == 2.0);
}

TEST_CASE("write then read round-trips values exactly") {
    Rng rng(137);
    TempFile f("tsnn_io_roundtrip.csv");
    for (int trial = 0; trial < 10; ++trial) {
        ObservedMatrix x = naive::random_matrix(rng, 6);
        // salt with awkward magnitudes
        if (x.observed(0, 0)) x.values(0, 0) = 1.0 / 3.0;
        write_matrix_csv(x, f.path);
        ObservedMatrix y = read_matrix_csv(f.path);
        REQUIRE(y.mask == x.mask);
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                if (x.observed(i, j)) REQUIRE(y.values(i, j) == x.values(i, j));
    }
}

TEST_CASE("format_double round-trips extreme doubles") {
    for (double x : {0.1, -1.0 / 3.0, 1e-300, 1e300, 123456789.123456789, 5e-324}) {
        const std::string s = format_double(x);
        REQUIRE(parse_double(s, "test") == x);
    }
}

TEST_CASE("distance dump uses the inf token") {
    TempFile f("tsnn_io_dist.csv");
    ObservedMatrix x(2, 2);
    x.mask(0, 0) = 1;
    x.values(0, 0) = 1.0;
    x.mask(1, 1) = 1;
    x.values(1, 1) = 2.0;
    write_distance_csv(estimated_row_distances(x), f.path);
    std::ifstream in(f.path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "0,inf");
}

TEST_CASE("unknown config keys are named in the error") {
    json j = {{"n_list", {10}},      {"methods", {"tsnn"}},
              {"mechanism", {{"kind", "mcar"}}}, {"lambda", 1.0},
              {"noise_sd", 0.1},     {"seed", 1},
              {"bogus_knob", 3}};
    try {
        decay_config_from_json(j);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(std::string(e.what()).find("bogus_knob") != std::string::npos);
    }
}

TEST_CASE("missing required fields are named in the error") {
    json j = {{"methods", {"tsnn"}}, {"mechanism", {{"kind", "mcar"}}},
              {"lambda", 1.0},       {"noise_sd", 0.1},
              {"seed", 1}};
    try {
        decay_config_from_json(j);
        FAIL("expected an error");
    } catch (const Error& e) {
        REQUIRE(std::string(e.what()).find("n_list") != std::string::npos);
    }
}

TEST_CASE("noise level must be specified exactly once") {
    json base = {{"n_list", {10}},
                 {"methods", {"tsnn"}},
                 {"mechanism", {{"kind", "mcar"}}},
                 {"lambda", 1.0},
                 {"seed", 1}};
    REQUIRE_THROWS_AS(decay_config_from_json(base), Error);
    base["noise_sd"] = 0.1;
    base["target_snr"] = 2.0;
    REQUIRE_THROWS_AS(decay_config_from_json(base), Error);
}

TEST_CASE("mechanism parsing validates its parameters") {
    REQUIRE_THROWS_AS(mechanism_from_json(json{{"kind", "mcar"}, {"p", 0.0}}, "m"), Error);
    REQUIRE_THROWS_AS(mechanism_from_json(json{{"kind", "other"}}, "m"), Error);
    Mechanism mnar = mechanism_from_json(json{{"kind", "mnar"}}, "m");
    REQUIRE(mnar.p_dead == 0.2);
}

TEST_CASE("manifest files carry the run description") {
    TempFile f("tsnn_io_manifest.json");
    RunManifest manifest;
    manifest.command = "complete";
    manifest.flags = {{"method", "tsnn"}};
    manifest.seed = 7;
    manifest.outputs = {"out.csv"};
    manifest.duration_ms = 12.5;
    write_manifest(manifest, f.path);

    std::ifstream in(f.path);
    json j;
    in >> j;
    REQUIRE(j.at("command") == "complete");
    REQUIRE(j.at("seed") == 7);
    REQUIRE(j.at("version") == std::string(kVersion));
    REQUIRE(j.at("config_schema_version") == kConfigSchemaVersion);
}
