#include "railwarn/commands.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace railwarn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kBundled = fs::path(RAILWARN_SOURCE_DIR) / "scenarios" / "grade_crossing.json";

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("railwarn_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

json minimal() {
    return json::parse(R"({
      "duration_ms": 2000,
      "track": [[38.48, -104.35], [38.47, -104.35]],
      "crossing_arclength_m": 500,
      "train": {"speed_mps": 10, "radio": {"power_class": "private"}},
      "rsu": {"position": [38.4755, -104.3498]}
    })");
}

bool has_field(const ValidationError& e, const std::string& field) {
    for (const auto& i : e.issues())
        if (i.field == field)
            return true;
    return false;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("RAILWARN_LOG=quiet \"") + RAILWARN_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config defaults") {
    const auto cfg = config::parse_run_config(minimal());
    CHECK(cfg.scenario.timestep_ms == 100);
    CHECK(cfg.scenario.train.radio.tx_power_dbm == 11.0);
    CHECK(cfg.scenario.train.antenna.kind() == antenna::AntennaKind::Omni);
    REQUIRE(cfg.scenario.rsu);
    CHECK(cfg.scenario.rsu->radio.tx_power_dbm == 11.0); // inherits the train radio
    CHECK(cfg.scenario.rsu->relay_enabled);
    CHECK(cfg.bin_width_m == 50.0);
    CHECK(config::parse_run_config(minimal(), {.seed = 5}).scenario.seed == 5);
}

TEST_CASE("private power class with 23 dBm is rejected") {
    auto doc = minimal();
    doc["train"]["radio"]["tx_power_dbm"] = 23;
    try {
        config::parse_run_config(doc);
        FAIL("accepted mismatched power");
    } catch (const ValidationError& e) {
        CHECK(has_field(e, "train.radio"));
        CHECK(std::string(e.what()).find("private") != std::string::npos);
    }
    doc["train"]["radio"]["override_tx_power"] = true;
    CHECK(config::parse_run_config(doc).scenario.train.radio.tx_power_dbm == 23.0);
}

TEST_CASE("all problems are reported together") {
    auto doc = minimal();
    doc["timestep_ms"] = 30;
    doc["train"]["colour"] = "red";
    doc["train"]["antenna"] = {{"kind", "ula"}, {"num_elements", 0}};
    doc["rsu"].erase("position");
    doc.erase("crossing_arclength_m");
    doc["obus"] = json::array({{{"road", 2}}});
    try {
        config::parse_run_config(doc);
        FAIL("accepted a broken config");
    } catch (const ValidationError& e) {
        for (const char* f : {"train.colour", "train.antenna", "rsu.position", "crossing_arclength_m"})
            CHECK_MESSAGE(has_field(e, f), f);
        CHECK(e.issues().size() >= 4);
    }
}

TEST_CASE("missing and malformed files") {
    const auto dir = scratch("files");
    CHECK_THROWS_AS(config::load_run_config(dir / "nope.json"), ValidationError);
    write(dir / "bad.json", "{ not json");
    CHECK_THROWS_AS(config::load_run_config(dir / "bad.json"), ValidationError);
}

TEST_CASE("bundled scenario runs and writes its outputs") {
    const auto dir = scratch("run");
    const auto report = cli::cmd_run(kBundled, dir);
    CHECK(report.warnings.empty());
    REQUIRE(report.stats);
    for (auto name : {cli::kTraceFile, cli::kPacketsFile, cli::kStatsFile})
        CHECK(fs::exists(dir / name));
    const auto stats = json::parse(slurp(dir / cli::kStatsFile));
    CHECK(stats["scenario_hash"] == report.scenario_hash);
    CHECK(stats["packets"].get<std::size_t>() == report.stats->packets);
    CHECK(slurp(dir / cli::kStatsFile).find("wall") == std::string::npos);
}

TEST_CASE("zero duration surfaces warnings and suppresses stats") {
    const auto dir = scratch("empty");
    auto doc = minimal();
    doc["duration_ms"] = 0;
    write(dir / "cfg.json", doc.dump());
    const auto report = cli::cmd_run(dir / "cfg.json", dir / "out");
    CHECK_FALSE(report.stats);
    CHECK(report.warnings.size() >= 2);
    CHECK_FALSE(fs::exists(dir / "out" / cli::kStatsFile));
    CHECK(fs::exists(dir / "out" / cli::kPacketsFile));
}

TEST_CASE("replay needs GPS only when positions are missing") {
    const auto dir = scratch("replay");
    write(dir / "with.csv", std::string(ingest::kPacketLogHeader) + "\n0,100,38.48,-104.35,1,0\n1,200,38.479,-104.35,0,1\n");
    cli::ReplayOptions opts;
    opts.units.rsus.push_back({38.47, -104.35});
    const auto report = cli::cmd_replay(dir / "with.csv", dir / "out", opts);
    REQUIRE(report.stats);
    CHECK(report.stats->packets == 2);

    write(dir / "without.csv", std::string(ingest::kPacketLogHeader) + "\n0,100,,,1,0\n");
    try {
        cli::cmd_replay(dir / "without.csv", dir / "out2");
        FAIL("replayed without GPS");
    } catch (const ingest::IngestError& e) {
        CHECK(std::string(e.what()).find("GPS") != std::string::npos);
    }
}

TEST_CASE("replay positions rows from an NMEA track") {
    const auto dir = scratch("nmea");
    std::string nmea;
    for (int i = 0; i <= 10; ++i) {
        ingest::GpsFix fix;
        fix.time_ms = 45'000'000 + i * 1000;
        fix.position = {38.48 - i * 0.0002, -104.35};
        fix.quality = 1;
        nmea += ingest::format_nmea_sentence(fix) + "\n";
    }
    write(dir / "track.nmea", nmea);
    write(dir / "log.csv", std::string(ingest::kPacketLogHeader) + "\n0,45000500,,,1,1\n1,45009900,,,0,0\n");
    cli::ReplayOptions opts;
    opts.nmea_path = dir / "track.nmea";
    const auto report = cli::cmd_replay(dir / "log.csv", dir / "out", opts);
    REQUIRE(report.stats);
    const std::string kml = slurp(dir / "out" / cli::kTraceFile);
    CHECK(kml.find("-104.35000000,38.47990000,0") != std::string::npos);
}

TEST_CASE("compare relay and power deltas are non-negative") {
    const auto dir = scratch("compare");
    const auto relay = cli::cmd_compare(kBundled, cli::CompareAxis::Relay, dir / "relay");
    CHECK(relay.leg_with == "relay_on");
    CHECK(fs::exists(dir / "relay" / "relay_on" / cli::kTraceFile));
    CHECK(fs::exists(dir / "relay" / "relay_off" / cli::kTraceFile));
    CHECK(fs::exists(dir / "relay" / cli::kComparisonFile));
    const auto* obu = relay.receiver("obu");
    REQUIRE(obu);
    CHECK(obu->coverage_delta_m() >= 0.0);
    CHECK(obu->pdr_delta() >= 0.0);
    for (const auto& [bin, d] : obu->bin_pdr_delta)
        CHECK(d >= 0.0);

    // deterministic free space: 12 dB more power can only help
    auto doc = minimal();
    doc["rsu"]["radio"] = {{"power_class", "private"}};
    write(dir / "fs.json", doc.dump());
    const auto power = cli::cmd_compare(dir / "fs.json", cli::CompareAxis::Power, dir / "power");
    for (const auto& r : power.receivers) {
        CHECK(r.pdr_delta() >= 0.0);
        for (const auto& [bin, d] : r.bin_pdr_delta)
            CHECK(d >= 0.0);
    }
    const auto j = json::parse(slurp(dir / "power" / cli::kComparisonFile));
    CHECK(j["axis"] == "power");
    CHECK(j["legs"][0] == "public_safety");
}

TEST_CASE("identical runs are byte-identical") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    cli::cmd_run(kBundled, a, {.overrides = {}, .kmz = true});
    cli::cmd_run(kBundled, b, {.overrides = {}, .kmz = true});
    for (auto name : {cli::kTraceFile, cli::kKmzFile, cli::kPacketsFile, cli::kStatsFile})
        CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
}

TEST_CASE("executable exit codes") {
    const auto dir = scratch("exe");
    CHECK(run_cli("run \"" + kBundled.string() + "\" -o \"" + (dir / "ok").string() + "\"") == 0);
    CHECK(fs::exists(dir / "ok" / cli::kTraceFile));

    auto doc = minimal();
    doc["train"]["radio"]["tx_power_dbm"] = 23;
    write(dir / "bad.json", doc.dump());
    CHECK(run_cli("run \"" + (dir / "bad.json").string() + "\" -o \"" + (dir / "bad").string() + "\"") == 2);

    write(dir / "nopos.csv", std::string(ingest::kPacketLogHeader) + "\n0,100,,,1,0\n");
    CHECK(run_cli("replay \"" + (dir / "nopos.csv").string() + "\" -o \"" + (dir / "r").string() + "\"") == 3);
    CHECK(run_cli("compare \"" + kBundled.string() + "\" --axis sideways -o \"" + (dir / "c").string() + "\"") != 0);
}

} // TEST_SUITE
