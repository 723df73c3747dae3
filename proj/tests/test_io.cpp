#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "csbm/io.hpp"

using namespace csbm;

namespace {

void check_same(const Instance& a, const Instance& b) {
  CHECK(a.params == b.params);
  CHECK(a.seed == b.seed);
  CHECK(a.graph == b.graph);
  CHECK(a.covariates == b.covariates);
  CHECK(a.truth == b.truth);
}

void check_same(const GaussianInstance& a, const GaussianInstance& b) {
  CHECK(a.params == b.params);
  CHECK(a.seed == b.seed);
  CHECK(a.matrix_a == b.matrix_a);
  CHECK(a.covariates == b.covariates);
  CHECK(a.truth == b.truth);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("csbm_test_io_" + name);
}

}  // namespace

TEST_CASE("parse_format") {
  CHECK(parse_format("json") == Format::kJson);
  CHECK(parse_format("bin") == Format::kBinary);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("round trips are exact") {
  const Instance sparse = sample_contextual(derive_params(120, 90, 4, 1.1, 0.7), 3);
  const GaussianInstance dense = sample_gaussian(derive_gaussian_params(40, 30, 1.0, 0.5), 4);

  check_same(sparse, std::get<Instance>(from_json(to_json(sparse))));
  check_same(sparse, std::get<Instance>(decode_binary(encode_binary(sparse))));
  check_same(dense, std::get<GaussianInstance>(from_json(to_json(dense))));
  check_same(dense, std::get<GaussianInstance>(decode_binary(encode_binary(dense))));

  // Text serialization keeps every double bit.
  const auto text = to_json(sparse).dump();
  check_same(sparse, std::get<Instance>(from_json(nlohmann::json::parse(text))));

  for (const Format f : {Format::kJson, Format::kBinary}) {
    const auto path = temp_path(f == Format::kJson ? "a.json" : "a.bin");
    write_instance(path.string(), sparse, f);
    check_same(sparse, std::get<Instance>(read_instance(path.string())));
    write_instance(path.string(), dense, f);
    check_same(dense, std::get<GaussianInstance>(read_instance(path.string())));
    std::filesystem::remove(path);
  }
}

TEST_CASE("encoding is deterministic") {
  const Instance a = sample_contextual(derive_params(80, 60, 4, 1.0, 0.5), 5);
  const Instance b = sample_contextual(derive_params(80, 60, 4, 1.0, 0.5), 5);
  CHECK(encode_binary(a) == encode_binary(b));
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("malformed containers are rejected") {
  const Instance inst = sample_contextual(derive_params(50, 40, 4, 1.0, 0.5), 6);
  const std::string bytes = encode_binary(inst);
  CHECK_THROWS(decode_binary("XXXX" + bytes.substr(4)));
  CHECK_THROWS(decode_binary(bytes.substr(0, bytes.size() - 3)));
  CHECK_THROWS(decode_binary(bytes + "\x01"));
  CHECK_THROWS(decode_binary(""));

  nlohmann::json j = to_json(inst);
  j["format"] = "other";
  CHECK_THROWS(from_json(j));
  j = to_json(inst);
  j["version"] = 99;
  CHECK_THROWS(from_json(j));
  j = to_json(inst);
  j["edges"].push_back({0, 0});
  CHECK_THROWS(from_json(j));
  j = to_json(inst);
  j["v"][0] = 0;
  CHECK_THROWS(from_json(j));

  CHECK_THROWS(read_instance(temp_path("missing").string()));
}

TEST_CASE("params json") {
  const ModelParams prm = derive_params(100, 80, 3, 0.5, 0.25);
  CHECK(params_from_json(params_to_json(prm)) == prm);
}
