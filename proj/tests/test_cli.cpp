#include "natop/cli.hpp"
#include "natop/json_io.hpp"
#include "natop/random.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace natop;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("natop_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string write_doc(const std::string& name, const Document& d) { return write_file(name, to_json(d).dump()); }

}  // namespace

TEST_CASE("check-identities on random jets") {
  const auto r = run_cli({"check-identities", "--dim", "3", "--order", "2", "--count", "100", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("bianchi1: pass, bianchi2: pass, ricci: pass\n", 0) == 0);
  CHECK(r.out.find("trials: 100") != std::string::npos);
  const auto j = run_cli({"check-identities", "--dim", "2", "--order", "1", "--count", "5", "--json"});
  CHECK(j.code == 0);
  CHECK(Json::parse(j.out).at("pass") == true);
}

TEST_CASE("check-identities rejects a perturbed curvature document") {
  RationalRng rng(601);
  auto ws = curvature_differentials(random_connection(rng, 3, 2, true), 0, 1);
  ws[0].w.set({0, 0, 1, 2}, ws[0].w.at({0, 0, 1, 2}) + 1);
  const auto path = write_doc("bad_curvature.json", make_curvature_document(ws));
  const auto r = run_cli({"check-identities", "--input", path});
  CHECK(r.code == 1);
  CHECK(r.out.find("bianchi1: FAIL") != std::string::npos);

  ws = curvature_differentials(random_connection(rng, 3, 2, true), 0, 1);
  CHECK(run_cli({"check-identities", "--input", write_doc("good_curvature.json", make_curvature_document(ws))}).code == 0);
}

TEST_CASE("classify reports the family dimension") {
  const auto r = run_cli({"classify", "--dim", "3"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j.at("dimension") == 14);
  CHECK(j.at("relations_hold") == true);
  CHECK(j.at("term_counts").at("phi_uu") == 0);
  const auto tf = Json::parse(run_cli({"classify", "--dim", "3", "--torsion-free"}).out);
  CHECK(tf.at("dimension") == 5);
}

TEST_CASE("curvature of a flat jet is zero") {
  const auto path = write_doc("flat.json", make_document(ConnectionJet::zero(2, 2, true)));
  const auto r = run_cli({"curvature", "--input", path});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j.at("kind") == "curvature");
  CHECK(j.at("order") == 1);
  CHECK(j.at("components").empty());
}

TEST_CASE("curvature uses the symmetric part") {
  RationalRng rng(603);
  const auto l = random_connection(rng, 2, 2, false);
  const auto a = run_cli({"curvature", "--input", write_doc("ns.json", make_document(l))});
  const auto b = run_cli({"curvature", "--input", write_doc("s.json", make_document(split_connection(l).first))});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("reconstruct and reduce round trips") {
  RationalRng rng(605);
  const auto path = write_doc("sym.json", make_document(random_connection(rng, 2, 2, true)));
  const auto rec = run_cli({"reconstruct", "--input", path});
  CHECK(rec.code == 0);
  CHECK(Json::parse(rec.out).at("roundtrip") == true);
  const auto red = run_cli({"reduce", "--input", path, "--k", "3"});
  CHECK(red.code == 0);
  CHECK(Json::parse(red.out).at("membership") == true);
  const auto t = write_doc("t.json", make_document(random_tensor(rng, 2, TensorJet::valence(1, 1), 2)));
  const auto l1 = write_doc("l1.json", make_document(random_connection(rng, 2, 1, true)));
  const auto red2 = run_cli({"reduce", "--input", l1, "--tensor", t, "--k", "3"});
  CHECK(red2.code == 0);
  CHECK(Json::parse(red2.out).at("membership") == true);
}

TEST_CASE("act composes with the library action") {
  RationalRng rng(607);
  const auto g = random_diffeo(rng, 2, 3);
  const auto l = random_connection(rng, 2, 1, false);
  const auto r = run_cli({"act", "--input", write_doc("l.json", make_document(l)), "--diffeo",
                          write_doc("g.json", make_document(g))});
  REQUIRE(r.code == 0);
  CHECK(std::get<ConnectionJet>(from_json(Json::parse(r.out)).value) == act_on_connection(g, l));
  const auto short_g = write_doc("g2.json", make_document(g.truncated(2)));
  CHECK(run_cli({"act", "--input", write_doc("l.json", make_document(l)), "--diffeo", short_g}).code == 2);
}

TEST_CASE("evaluate-family parameters") {
  const auto flat = write_doc("flat1.json", make_document(ConnectionJet::zero(2, 1, true)));
  const auto r = run_cli({"evaluate-family", "--input", flat, "--xdot", "1,2", "--param", "A=1/2"});
  REQUIRE(r.code == 0);
  const auto p = std::get<CotangentFibrePoint>(from_json(Json::parse(r.out)).value);
  CHECK(p.ll.at({0, 1}) == 1);
  CHECK(p.ll.at({1, 1}) == 2);
  CHECK(p.lu.is_zero());
  CHECK(run_cli({"evaluate-family", "--input", flat, "--xdot", "1,2", "--param", "Q=1"}).code == 2);
  CHECK(run_cli({"evaluate-family", "--input", flat, "--xdot", "1"}).code == 2);
  const auto forms = run_cli({"evaluate-family", "--dim", "2", "--forms"});
  CHECK(forms.code == 0);
  CHECK(Json::parse(forms.out).size() == 15);
}

TEST_CASE("usage and input errors exit with 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"classify", "--bogus"}).code == 2);
  CHECK(run_cli({"curvature"}).code == 2);
  CHECK(run_cli({"curvature", "--input", "/nonexistent/x.json"}).code == 2);
  CHECK(run_cli({"curvature", "--input", write_file("bad.json", "{not json")}).code == 2);
  CHECK(run_cli({"curvature", "--input", write_file("unk.json", R"({"schema":1,"kind":"connection","dim":2,"order":1,"components":{},"color":1})")}).code == 2);
  const auto deep = write_doc("deep.json", make_document(ConnectionJet::zero(2, 4, true)));
  CHECK(run_cli({"curvature", "--input", deep}).code == 2);
  CHECK(run_cli({"curvature", "--input", deep, "--max-order", "5"}).code == 0);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("output is deterministic and --out writes a file") {
  const std::vector<std::string> args{"check-identities", "--dim", "2", "--order", "2", "--count", "10", "--seed", "3"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.out == b.out);
  const auto path = (scratch_dir() / "report.txt").string();
  auto with_out = args;
  with_out.push_back("--out");
  with_out.push_back(path);
  const auto c = run_cli(with_out);
  CHECK(c.code == 0);
  CHECK(c.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == a.out);
}

#ifdef NATOP_CLI_PATH
TEST_CASE("installed binary runs") {
  const std::string cmd = std::string(NATOP_CLI_PATH) + " classify --dim 2 --torsion-free > " +
                          (scratch_dir() / "bin.json").string();
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(Json::parse(std::ifstream(scratch_dir() / "bin.json")).at("dimension") == 5);
}
#endif
