#include "doctest.h"

#include <cmath>

#include "decaylab/errors.hpp"
#include "decaylab/io.hpp"

using namespace decaylab;
using io::json;

TEST_CASE("steepness JSON round trip") {
  for (const auto& L : {SteepnessFunction::power_law(1.5), SteepnessFunction::log_type(2, 4),
                        SteepnessFunction::double_log_type(1, std::exp(3.0), 1.0)}) {
    const json j = io::to_json(L);
    CHECK(io::steepness_from_json(j) == L);
    CHECK(io::steepness_from_json(json::parse(io::dump(j))) == L);
  }
  const auto L = io::steepness_from_json(json{{"kind", "LogType"}, {"kappa", 1}, {"M", 4}, {"a", 3}});
  CHECK(L.a() == 3.0);
  CHECK_THROWS_AS(io::steepness_from_json(json{{"kind", "LogType"}, {"kappa", 1}, {"M", 4}, {"s0", 1}}), InputError);
  CHECK_THROWS_AS(io::steepness_from_json(json{{"kind", "LogType"}, {"M", 4}}), InputError);
  CHECK_THROWS_AS(io::steepness_from_json(json{{"kind", "Nope"}}), InputError);
  CHECK_THROWS_AS(io::steepness_from_json(json::array()), InputError);
}

TEST_CASE("envelope JSON round trip") {
  for (const auto& e : {DecayEnvelope::stretched_exp(2.0, 1.0, 2.0), DecayEnvelope::double_exp(1.0, 0.5, 1.0, 2.0),
                        DecayEnvelope::table({0, 1, 3}, {0, 2, 9})})
    CHECK(io::envelope_from_json(io::to_json(e)) == e);
  CHECK(io::envelope_from_json(json{{"kind", "StretchedExp"}, {"alpha", 1}, {"beta", 2}}).c0() == 1.0);
  CHECK_THROWS_AS(io::envelope_from_json(json{{"kind", "Table"}, {"s", {0, 1}}}), InputError);
}

TEST_CASE("non-finite numbers become null") {
  BoundCheck b;
  b.C = std::numeric_limits<double>::infinity();
  CHECK(io::to_json(b)["C"].is_null());
}

TEST_CASE("checksum") {
  // published FNV-1a 64-bit test vectors
  CHECK(io::hex64(io::fnv1a64("")) == "cbf29ce484222325");
  CHECK(io::hex64(io::fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(io::hex64(io::fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("CSV reader") {
  auto t = io::read_csv("t,v\n1,2\n3,4.5e-3\n");
  CHECK(t.error.empty());
  CHECK(t.header == std::vector<std::string>{"t", "v"});
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][1] == 4.5e-3);
  CHECK_FALSE(io::read_csv("t,v\n1,2\n3\n").error.empty());
  CHECK_FALSE(io::read_csv("t,v\n1,abc\n").error.empty());
  CHECK_FALSE(io::read_csv("").error.empty());
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "decaylab_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  io::write_file(dir / "x.txt", "hello\n");
  CHECK(io::read_file(dir / "x.txt") == "hello\n");
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), InputError);
  std::filesystem::remove_all(dir.parent_path());
}
