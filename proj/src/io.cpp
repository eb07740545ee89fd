#include "ultracomb/io.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ultracomb/error.h"

namespace ultracomb {

namespace {

auto number(const Json& j, const char* key) -> double {
  if (!j.contains(key)) throw Validation_error{std::string{"missing field '"} + key + "'"};
  const auto& v = j.at(key);
  if (!v.is_number()) throw Validation_error{std::string{"field '"} + key + "' must be a number"};
  return v.get<double>();
}

}  // namespace

auto comb_to_json(const Comb& c) -> Json {
  auto teeth = Json::array();
  for (const auto& t : c.teeth()) teeth.push_back({{"pos", t.position}, {"h", t.height}});
  auto j = Json{{"interval_length", c.interval_length()}, {"origin_height", c.origin_height()}, {"teeth", teeth}};
  if (c.truncation() > 0.0) j["truncation"] = c.truncation();
  return j;
}

auto comb_from_json(const Json& j) -> Comb {
  if (!j.is_object()) throw Validation_error{"comb JSON must be an object"};
  auto teeth = std::vector<Tooth>{};
  if (j.contains("teeth")) {
    if (!j.at("teeth").is_array()) throw Validation_error{"'teeth' must be an array"};
    for (const auto& t : j.at("teeth")) teeth.push_back({number(t, "pos"), number(t, "h")});
  }
  auto truncation = j.contains("truncation") ? number(j, "truncation") : 0.0;
  return Comb{number(j, "interval_length"), number(j, "origin_height"), std::move(teeth), truncation};
}

auto mutations_to_json(std::span<const Mutation> ms) -> Json {
  auto out = Json::array();
  for (const auto& m : ms) {
    auto branch = m.branch == k_origin_branch ? Json("origin") : Json(m.branch);
    out.push_back({{"branch", branch}, {"depth", m.depth}});
  }
  return out;
}

auto mutations_from_json(const Json& j) -> std::vector<Mutation> {
  const auto& list = j.is_object() && j.contains("mutations") ? j.at("mutations") : j;
  if (!list.is_array()) throw Validation_error{"mutation JSON must be an array"};
  auto out = std::vector<Mutation>{};
  for (const auto& m : list) {
    if (!m.is_object() || !m.contains("branch")) throw Validation_error{"mutation entry needs 'branch'"};
    const auto& b = m.at("branch");
    auto branch = std::ptrdiff_t{};
    if (b.is_string() && b.get<std::string>() == "origin") {
      branch = k_origin_branch;
    } else if (b.is_number_integer() && b.get<std::int64_t>() >= 0) {
      branch = b.get<std::ptrdiff_t>();
    } else {
      throw Validation_error{"mutation branch must be \"origin\" or a tooth index"};
    }
    out.push_back({branch, number(m, "depth")});
  }
  return out;
}

auto contour_to_json(const Contour_function& h) -> Json {
  auto points = Json::array();
  for (const auto& p : h.jumps()) points.push_back({{"t", p.time}, {"before", p.before}, {"after", p.after}});
  return Json{{"breakpoints", points}, {"support_end", h.support_end()}};
}

auto contour_from_json(const Json& j) -> Contour_function {
  const auto& list = j.is_object() && j.contains("breakpoints") ? j.at("breakpoints") : j;
  if (!list.is_array()) throw Validation_error{"contour JSON needs a 'breakpoints' array"};
  auto jumps = std::vector<Contour_jump>{};
  for (const auto& p : list) jumps.push_back({number(p, "t"), number(p, "before"), number(p, "after")});
  return Contour_function{std::move(jumps)};
}

auto model_spec_from_json(const Json& j) -> Model_spec {
  if (!j.is_object()) throw Validation_error{"model spec must be an object"};
  auto spec = Model_spec{};
  spec.T = number(j, "T");
  if (j.contains("steps")) {
    if (!j.at("steps").is_number_integer() || j.at("steps").get<std::int64_t>() < 1) {
      throw Validation_error{"'steps' must be a positive integer"};
    }
    spec.steps = j.at("steps").get<std::size_t>();
  }
  auto lifetime = Lifetime::immortal();
  if (j.contains("lifetime")) {
    if (!j.at("lifetime").is_string()) throw Validation_error{"'lifetime' must be a string"};
    lifetime = Lifetime::parse(j.at("lifetime").get<std::string>());
  }
  if (!j.contains("birth_rate")) throw Validation_error{"missing field 'birth_rate'"};
  const auto& b = j.at("birth_rate");
  if (b.is_number()) {
    spec.model = Population_model::constant(b.get<double>(), lifetime);
    return spec;
  }
  if (!b.is_object() || !b.contains("grid") || !b.at("grid").is_array() || b.at("grid").empty()) {
    throw Validation_error{"'birth_rate' must be a number or {\"grid\": [[t, b], ...]}"};
  }
  auto times = std::vector<double>{};
  auto rates = std::vector<double>{};
  for (const auto& p : b.at("grid")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw Validation_error{"birth rate grid entries must be [t, b] pairs"};
    }
    times.push_back(p[0].get<double>());
    rates.push_back(p[1].get<double>());
    if (times.size() > 1 && !(times.back() > times[times.size() - 2])) {
      throw Validation_error{"birth rate grid times must increase"};
    }
    if (!(rates.back() >= 0.0)) throw Validation_error{"birth rates must be nonnegative"};
  }
  spec.model.lifetime = lifetime;
  spec.model.birth_rate = [times, rates](double t) {
    if (t <= times.front()) return rates.front();
    if (t >= times.back()) return rates.back();
    auto i = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
    auto w = (t - times[i]) / (times[i + 1] - times[i]);
    return rates[i] + w * (rates[i + 1] - rates[i]);
  };
  return spec;
}

auto w_to_csv(const W_solution& w) -> std::string {
  auto os = std::ostringstream{};
  os << std::setprecision(17) << "t,W,nu_tail\n";
  for (auto i = std::size_t{0}; i <= w.steps(); ++i) {
    auto v = w.values()[i];
    os << w.time(i) << ',' << v << ',' << 1.0 / v << '\n';
  }
  return os.str();
}

auto parse_json(const std::string& text) -> Json {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Validation_error{std::string{"invalid JSON: "} + e.what()};
  }
}

auto read_text_file(const std::filesystem::path& path) -> std::string {
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) throw Io_error{"cannot read " + path.string()};
  auto os = std::ostringstream{};
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = std::ofstream{path, std::ios::binary | std::ios::trunc};
  if (!out) throw Io_error{"cannot write " + path.string()};
  out << text;
  if (!out.flush()) throw Io_error{"failed writing " + path.string()};
}

}  // namespace ultracomb
