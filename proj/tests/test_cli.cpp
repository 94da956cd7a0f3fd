#include "emcal/cli.hpp"

#include "support.hpp"

#include <doctest.h>

#include <initializer_list>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"emcal"};
    storage.insert(storage.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    testing::WarningCapture quiet;
    const int code = emcal::cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("synthetic stack, calibration and thickness through the command line") {
    testing::TempDir dir;
    const auto stack_dir = (dir / "stack").string();
    const auto out_dir = (dir / "out").string();
    auto r = run({"synth", "stack", "--out", stack_dir, "--size", "96", "--smoothing", "4", "--spacing", "2",
                  "--seed", "3"});
    REQUIRE(r.code == emcal::kExitOk);
    const auto glob = stack_dir + "/sec*.png";

    r = run({"calibrate", "--in", glob, "--dx", "5", "--dy", "5", "--patch-px", "40", "--max-shift", "8",
             "--positions", "5", "--out", out_dir});
    REQUIRE(r.code == emcal::kExitOk);
    for (const char* name : {"calibration.json", "anisotropy.csv", "curve_x.svg", "curve_y.svg"})
        CHECK(fs::exists(fs::path(out_dir) / name));

    r = run({"thickness", "--in", glob, "--dx", "5", "--dy", "5", "--patch-px", "40", "--positions", "5",
             "--model", out_dir + "/calibration.json", "--out", out_dir});
    CHECK(r.code == emcal::kExitOk);
    CHECK(fs::exists(fs::path(out_dir) / "thickness.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "thickness.json"));

    r = run({"thickness", "--in", glob, "--model", (dir / "absent.json").string()});
    CHECK(r.code == emcal::kExitData);
    CHECK(r.err.find("absent.json") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1 and print usage") {
    auto r = run({"thickness"});
    CHECK(r.code == emcal::kExitUsage);
    r = run({"calibrate", "--bogus"});
    CHECK(r.code == emcal::kExitUsage);
    CHECK(r.err.find("--bogus") != std::string::npos);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = run({"calibrate", "--in", "x.png", "--patch-px", "10", "--patch-um", "2"});
    CHECK(r.code == emcal::kExitUsage);
    r = run({"validate", "--only", "no-such-criterion"});
    CHECK(r.code == emcal::kExitUsage);
    r = run({"synth", "pattern", "--out", "/tmp/x", "--compress", "1.5"});
    CHECK(r.code == emcal::kExitUsage);
}

TEST_CASE("data errors exit with code 2") {
    testing::TempDir dir;
    const auto r = run({"calibrate", "--in", (dir / "nothing*.png").string(), "--dx", "5", "--dy", "5", "--out", (dir / "o").string()});
    CHECK(r.code == emcal::kExitData);
    CHECK(r.err.find("no files match") != std::string::npos);
}

TEST_CASE("validate runs a selected criterion") {
    const auto r = run({"validate", "--only", "sdi-invariants"});
    CHECK(r.code == emcal::kExitOk);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("sdi-invariants") != std::string::npos);
}
