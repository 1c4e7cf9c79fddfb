#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "echoqm/errors.hpp"
#include "echoqm/io.hpp"
#include "helpers.hpp"

using namespace echoqm;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("echoqm_io_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 2.17e-300, -5.5, 1e21}) {
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(std::nan("")) == "nan");
  }

  TEST_CASE("config round-trip") {
    ProtocolConfig c = testing::small_config(12345678901234ULL, 128, 33.5, 1.5);
    c.kind = DriveKind::two_photon;
    c.povm = PovmKind::ternary;
    c.tau = 0.02;
    c.kappa = 0.004;
    c.fluctuation = FluctuationSpec{0.25, 99};
    c.fluctuation_scope = FluctuationScope::echo;
    c.loss_scope = LossScope::forward;
    CHECK(config_from_json(to_json(c)) == c);
    CHECK(config_from_json(Json::parse(to_json(c).dump())) == c);

    const auto path = scratch_dir() / "config.json";
    write_atomic(path, to_json(c).dump(2));
    CHECK(load_config(path) == c);
    CHECK(config_hash(load_config(path)) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    ProtocolConfig other = c;
    other.seed += 1;
    CHECK(config_hash(other) != config_hash(c));
  }

  TEST_CASE("pulse train round-trip") {
    const PulseTrain t = inject_fluctuations(sample_train(DriveKind::single_photon, 3.0, 0.1, 1.0, 4), {0.1, 2});
    CHECK(pulse_train_from_json(Json::parse(to_json(t).dump())) == t);
  }

  TEST_CASE("config errors") {
    Json j = to_json(testing::small_config(0));
    j["epsilonn"] = 3.0;
    CHECK(code_of([&] { config_from_json(j); }) == ErrorCode::ConfigParse);
    Json typed = to_json(testing::small_config(0));
    typed["dim"] = "many";
    CHECK(code_of([&] { config_from_json(typed); }) == ErrorCode::ConfigParse);
    Json bad = to_json(testing::small_config(0));
    bad["povm"] = "ternary";
    CHECK(code_of([&] { config_from_json(bad); }) == ErrorCode::ConfigValidation);
    const auto path = scratch_dir() / "broken.json";
    write_atomic(path, "{ \"dim\": ");
    CHECK(code_of([&] { load_config(path); }) == ErrorCode::ConfigParse);
    CHECK(code_of([&] { load_config(scratch_dir() / "missing.json"); }) == ErrorCode::IoError);
  }

  TEST_CASE("overrides") {
    ProtocolConfig c = testing::small_config(0);
    apply_override(c, "epsilon=12.5");
    CHECK(c.epsilon == 12.5);
    apply_override(c, "kind=two_photon");
    CHECK(c.kind == DriveKind::two_photon);
    apply_override(c, "fluctuation.delta_eps=0.3");
    REQUIRE(c.fluctuation.has_value());
    CHECK(c.fluctuation->delta_eps == 0.3);
    apply_override(c, "fluctuation.seed=8");
    CHECK(c.fluctuation->seed == 8);
    CHECK(code_of([&] { apply_override(c, "bogus=1"); }) == ErrorCode::ConfigParse);
    CHECK(code_of([&] { apply_override(c, "noequals"); }) == ErrorCode::ConfigParse);
    CHECK(code_of([&] { apply_override(c, "eps_dp=2"); }) == ErrorCode::ConfigValidation);
  }

  TEST_CASE("records csv") {
    const EnsembleSummary s = run_ensemble(testing::small_config(0, 48, 6.0, 0.5), 3, 7);
    const std::string csv = records_csv(s.records);
    CHECK(csv.rfind(std::string(kRecordsHeader) + "\n", 0) == 0);
    const auto parsed = parse_records_csv(csv);
    REQUIRE(parsed.size() == 3);
    CHECK(records_csv(parsed) == csv);
    CHECK(parsed[1].cfi_max == s.records[1].cfi_max);
    CHECK(parsed[2].seed == 9);

    CHECK(code_of([&] { parse_records_csv("a,b,c\n1,2,3\n"); }) == ErrorCode::SchemaMismatch);
    CHECK(code_of([&] { parse_records_csv(std::string(kRecordsHeader) + "\n1,2\n"); }) == ErrorCode::SchemaMismatch);
  }

  TEST_CASE("matrix csv") {
    RMatrix m(2, 3);
    m << 1, 2, 3, 4, 5, std::nan("");
    const std::string text = matrix_csv("r\\c", {0.5, 1}, {10, 20, 30}, m);
    CHECK(text == "r\\c,10,20,30\n0.5,1,2,3\n1,4,5,nan\n");
  }

  TEST_CASE("atomic writes") {
    const auto dir = scratch_dir();
    const auto path = dir / "out.txt";
    write_atomic(path, "first");
    write_atomic(path, "second");
    CHECK(read_file(path) == "second");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      CHECK(entry.path().extension() != ".tmp");
    }
    CHECK(code_of([&] { write_atomic(path / "x.txt", "x"); }) == ErrorCode::IoError);
  }

  TEST_CASE("presets") {
    const ProtocolConfig fig2a = preset("fig2a");
    CHECK(fig2a.epsilon == 100.0);
    CHECK(fig2a.tau == 0.1);
    CHECK(fig2a.T == 2.0);
    CHECK(preset("fig3a_two").povm == PovmKind::ternary);
    CHECK(code_of([] { preset("fig9"); }) == ErrorCode::ConfigValidation);
    for (const auto& [name, c] : presets()) CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("summary json") {
    const EnsembleSummary s = run_ensemble(testing::small_config(0, 48, 6.0, 0.5), 3, 0);
    const Json j = to_json(s);
    CHECK(j.at("records").size() == 3);
    CHECK(j.at("mean_gain").get<double>() == s.mean_gain);
  }
}
