#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ultracomb/error.h"
#include "ultracomb/io.h"
#include "ultracomb/random.h"
#include "ultracomb/samplers.h"

using namespace ultracomb;

TEST_CASE("comb JSON round trip") {
  auto rng = Random_source{81};
  for (auto rep = 0; rep < 100; ++rep) {
    auto c = sample_kingman_comb(20, rng);
    auto text = comb_to_json(c).dump();
    REQUIRE(comb_from_json(parse_json(text)) == c);
  }
  auto truncated = padic_comb(3, 3);
  auto j = comb_to_json(truncated);
  CHECK(j.contains("truncation"));
  CHECK(comb_from_json(j) == truncated);
  CHECK(!comb_to_json(Comb{1.0, 2.0, {{0.5, 1.0}}}).contains("truncation"));
}

TEST_CASE("comb JSON schema") {
  auto j = parse_json(R"({"interval_length": 2, "origin_height": 3, "teeth": [{"pos": 1, "h": 2}], "note": "x"})");
  auto c = comb_from_json(j);
  CHECK(c.size() == 1);
  CHECK(c.teeth()[0] == Tooth{1.0, 2.0});
  CHECK_THROWS_AS(comb_from_json(parse_json(R"({"origin_height": 3, "teeth": []})")), Validation_error);
  CHECK_THROWS_AS(comb_from_json(parse_json(R"({"interval_length": "a", "origin_height": 3, "teeth": []})")),
                  Validation_error);
  CHECK_THROWS_AS(comb_from_json(parse_json(R"({"interval_length": 1, "origin_height": 1, "teeth": [{"pos": 0.5, "h": 2}]})")),
                  Validation_error);
  CHECK_THROWS_AS(parse_json("{"), Validation_error);
}

TEST_CASE("mutation JSON") {
  auto ms = std::vector<Mutation>{{k_origin_branch, 2.5}, {0, 0.25}, {3, 1.0}};
  auto j = mutations_to_json(ms);
  CHECK(j[0]["branch"] == "origin");
  CHECK(j[1]["branch"] == 0);
  CHECK(mutations_from_json(j) == ms);
  auto wrapped = Json{{"config", Json::object()}, {"mutations", j}};
  CHECK(mutations_from_json(wrapped) == ms);
  CHECK_THROWS_AS(mutations_from_json(parse_json(R"([{"branch": "left", "depth": 1}])")), Validation_error);
  CHECK_THROWS_AS(mutations_from_json(parse_json(R"([{"depth": 1}])")), Validation_error);
}

TEST_CASE("contour JSON") {
  auto h = Contour_function{{{0.0, 0.0, 6.0}, {2.0, 4.0, 6.0}, {7.0, 1.0, 6.0}}};
  auto back = contour_from_json(contour_to_json(h));
  REQUIRE(back.jumps().size() == 3);
  CHECK(back.jumps()[2].time == 7.0);
  CHECK(back.jumps()[2].before == 1.0);
  auto bare = contour_from_json(parse_json(R"([{"t": 0, "before": 0, "after": 2}])"));
  CHECK(bare.support_end() == 2.0);
  CHECK_THROWS_AS(contour_from_json(parse_json(R"({"points": []})")), Validation_error);
}

TEST_CASE("model spec") {
  auto s = model_spec_from_json(parse_json(R"j({"birth_rate": 2, "lifetime": "exponential(1)", "T": 3, "steps": 500})j"));
  CHECK(s.T == 3.0);
  CHECK(s.steps == 500);
  CHECK(s.model.birth_rate(1.0) == 2.0);
  CHECK(s.model.lifetime.kind == Lifetime::Kind::exponential);
  auto grid = model_spec_from_json(parse_json(R"({"birth_rate": {"grid": [[0, 1], [2, 3]]}, "T": 1})"));
  CHECK(grid.model.birth_rate(1.0) == doctest::Approx(2.0));
  CHECK(grid.model.birth_rate(-1.0) == 1.0);
  CHECK(grid.model.birth_rate(5.0) == 3.0);
  CHECK(grid.model.lifetime.kind == Lifetime::Kind::immortal);
  CHECK_THROWS_AS(model_spec_from_json(parse_json(R"({"lifetime": "immortal"})")), Validation_error);
  CHECK_THROWS_AS(model_spec_from_json(parse_json(R"({"birth_rate": {"grid": [[1, 1], [0, 2]]}})")), Validation_error);
  CHECK_THROWS_AS(model_spec_from_json(parse_json(R"({"birth_rate": 1, "steps": -3})")), Validation_error);
}

TEST_CASE("W CSV") {
  auto w = solve_W(Population_model::constant(1.0, Lifetime::exponential(1.0)), 2.0, 16);
  auto csv = w_to_csv(w);
  auto in = std::istringstream{csv};
  auto line = std::string{};
  std::getline(in, line);
  CHECK(line == "t,W,nu_tail");
  auto rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 17);
}

TEST_CASE("file helpers") {
  auto dir = std::filesystem::temp_directory_path() / "ultracomb_io_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "x.txt";
  write_text_file(path, "hello\n");
  CHECK(read_text_file(path) == "hello\n");
  CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), Io_error);
  CHECK_THROWS_AS(write_text_file(dir / "no" / "such" / "dir.txt", "x"), Io_error);
  std::filesystem::remove_all(dir);
}
