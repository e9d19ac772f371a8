#include "natop/json_io.hpp"
#include "natop/random.hpp"

#include <doctest.h>

using namespace natop;

namespace {

template <class T>
const T& as(const Document& d) {
  return std::get<T>(d.value);
}

Document round_trip(const Document& d) { return from_json(Json::parse(to_json(d).dump())); }

}  // namespace

TEST_CASE("documents round trip") {
  RationalRng rng(501);
  for (int m = 1; m <= 3; ++m) {
    const auto g = random_diffeo(rng, m, 3);
    CHECK(as<DiffeoJet>(round_trip(make_document(g))) == g);
    for (bool symmetric : {true, false}) {
      const auto l = random_connection(rng, m, 2, symmetric);
      const auto back = round_trip(make_document(l));
      CHECK(back.kind == "connection");
      CHECK(as<ConnectionJet>(back) == l);
    }
    const auto t = random_tensor(rng, m, IndexSignature({Variance::upper, Variance::lower, Variance::lower},
                                                        {{Symmetry::antisymmetric, {1, 2}}}),
                                 2);
    CHECK(as<TensorJet>(round_trip(make_document(t))) == t);
    const auto gm = random_tensor(rng, m, metric_signature(), 1);
    const auto gback = round_trip(make_document(gm, "metric"));
    CHECK(gback.kind == "metric");
    CHECK(as<TensorJet>(gback) == gm);
    const auto tor = random_tensor(rng, m, torsion_signature(), 1);
    CHECK(as<TensorJet>(round_trip(make_document(tor, "torsion"))) == tor);
    const auto s = random_fibre_point(rng, m);
    CHECK(as<CotangentFibrePoint>(round_trip(make_document(s))) == s);
  }
  const auto l = random_connection(rng, 3, 3, true);
  const auto ws = curvature_differentials(l, 0, 2);
  const auto cd = round_trip(make_curvature_document(ws));
  CHECK(cd.kind == "curvature");
  CHECK(cd.order() == 2);
  const auto& diff = as<Differential>(cd);
  for (std::size_t i = 0; i < ws.size(); ++i) CHECK(diff.values[i] == ws[i].w);
}

TEST_CASE("component keys are one-based with a derivative bar") {
  auto l = ConnectionJet::zero(2, 1, true);
  auto parts = l.parts();
  parts[1].set({1, 0, 1, 0}, make_rational(-3, 4));
  const auto j = to_json(make_document(ConnectionJet(2, true, parts)));
  CHECK(j.at("kind") == "connection");
  CHECK(j.at("symmetric") == true);
  REQUIRE(j.at("components").size() == 1);
  const auto& [key, value] = *j.at("components").items().begin();
  CHECK(key == "2,1,2|1");
  CHECK(value == "-3/4");
}

TEST_CASE("symmetric entries may be written in any order") {
  const Json j = Json::parse(R"({"schema":1,"kind":"metric","dim":2,"order":0,
    "components":{"1,2|":"5","1,1|":"1"}})");
  const auto g = as<TensorJet>(from_json(j));
  CHECK(g.part(0).at({1, 0}) == 5);
  CHECK(g.part(0).at({0, 0}) == 1);
}

TEST_CASE("fibre point keys") {
  const Json j = Json::parse(R"({"schema":1,"kind":"fibre-point","dim":2,"order":0,
    "components":{"xdot|2":"1/2","lu|1,2":"-1"}})");
  const auto p = as<CotangentFibrePoint>(from_json(j));
  CHECK(p.xdot.at({1}) == make_rational(1, 2));
  CHECK(p.lu.at({0, 1}) == -1);
  CHECK(p.ll.is_zero());
  CHECK(to_json(make_document(p)).at("components").contains("xdot|2"));
}

TEST_CASE("malformed documents are rejected") {
  const std::vector<std::string> bad{
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{},"extra":1})",
      R"({"schema":1,"kind":"spinor","dim":2,"order":0,"components":{}})",
      R"({"schema":2,"kind":"metric","dim":2,"order":0,"components":{}})",
      R"({"schema":1,"kind":"metric","dim":0,"order":0,"components":{}})",
      R"({"schema":1,"kind":"metric","dim":17,"order":0,"components":{}})",
      R"({"schema":1,"kind":"metric","order":0,"components":{}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"3,1|":"1"}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"0,1|":"1"}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"1|":"1"}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"1,1":"1"}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"1,1|1":"1"}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"1,1|":1}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"1,1|":"1/0"}})",
      R"({"schema":1,"kind":"metric","dim":2,"order":0,"components":{"1,2|":"1","2,1|":"2"}})",
      R"({"schema":1,"kind":"torsion","dim":2,"order":0,"components":{"1,2,2|":"1"}})",
      R"({"schema":1,"kind":"torsion","dim":2,"order":0,"components":{"1,1,2|":"1","1,2,1|":"1"}})",
      R"({"schema":1,"kind":"diffeo","dim":2,"order":1,"components":{"1|1":"1","1|2":"1","2|1":"1","2|2":"1"}})",
      R"({"schema":1,"kind":"connection","dim":2,"order":0,"components":{},"symmetric":"yes"})",
      R"({"schema":1,"kind":"fibre-point","dim":2,"order":0,"components":{"xy|1":"1"}})",
      R"({"schema":1,"kind":"fibre-point","dim":2,"order":0,"components":{"ll|1":"1"}})",
      R"({"schema":1,"kind":"tensor","dim":2,"order":0,"components":{}})",
      R"({"schema":1,"kind":"tensor","dim":2,"order":0,"components":{},"signature":{"variances":"ux"}})",
      R"([1,2,3])",
  };
  for (const auto& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(from_json(Json::parse(text)), DocumentError);
  }
}

TEST_CASE("antisymmetric entries may be given with either sign consistently") {
  const Json j = Json::parse(R"({"schema":1,"kind":"torsion","dim":2,"order":0,
    "components":{"1,1,2|":"1","1,2,1|":"-1"}})");
  CHECK(as<TensorJet>(from_json(j)).part(0).at({0, 1, 0}) == -1);
}

TEST_CASE("connections default to non-symmetric") {
  const Json j = Json::parse(R"({"schema":1,"kind":"connection","dim":2,"order":0,
    "components":{"1,1,2|":"1"}})");
  const auto l = as<ConnectionJet>(from_json(j));
  CHECK_FALSE(l.symmetric());
  CHECK(l.part(0).at({0, 0, 1}) == 1);
  CHECK(l.part(0).at({0, 1, 0}) == 0);
}

TEST_CASE("signature round trip") {
  const IndexSignature s({Variance::lower, Variance::upper, Variance::lower, Variance::lower},
                         {{Symmetry::antisymmetric, {2, 3}}});
  const Json j = signature_to_json(s);
  CHECK(j.at("variances") == "lull");
  CHECK(j.at("groups")[0].at("slots") == Json::array({3, 4}));
  CHECK(signature_from_json(j) == s);
}

TEST_CASE("missing files") { CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), DocumentError); }
