#include "doctest.h"
#include "json.hpp"
#include "roa/serialize.hpp"

using namespace roa;

TEST_CASE("numbers") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(kInf) == "inf");
  CHECK(format_number(-kInf) == "-inf");
}

TEST_CASE("segment tables list both limits at breakpoints") {
  const Segment s = Segment::from_samples(1.0, 1, {-1.0, -0.5, -0.5, 0.0}, {0.0, 0.0, 1.0, 1.0});
  const auto j = nlohmann::json::parse(segment_table_json(s, 5));
  const auto& th = j.at("theta");
  const auto& v = j.at("values");
  int hits = 0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    if (th[i].get<double>() == -0.5) {
      CHECK(v[i][0].get<double>() == (hits == 0 ? 0.0 : 1.0));
      ++hits;
    }
  }
  CHECK(hits == 2);
}

TEST_CASE("classification json is stable") {
  Classification c{Verdict::NonConvergent, kInf, "blowup"};
  const std::string a = to_json(c);
  CHECK(a == to_json(c));
  const auto j = nlohmann::json::parse(a);
  CHECK(j.at("final_norm").is_null());
  CHECK(j.at("verdict") == "nonconvergent");
}
