#include "csbm/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csbm {

static_assert(std::endian::native == std::endian::little, "binary container assumes little-endian");

namespace {

constexpr char kMagic[4] = {'C', 'S', 'B', 'M'};
constexpr std::uint32_t kVersion = 1;

const ModelParams& params_of(const AnyInstance& inst) {
  return std::visit([](const auto& x) -> const ModelParams& { return x.params; }, inst);
}

nlohmann::json header(const AnyInstance& inst) {
  nlohmann::json j;
  j["format"] = "csbm-instance";
  j["version"] = kVersion;
  j["kind"] = std::holds_alternative<Instance>(inst) ? "contextual" : "gaussian";
  j["params"] = params_to_json(params_of(inst));
  j["seed"] = std::visit([](const auto& x) { return x.seed; }, inst);
  if (const auto* sparse = std::get_if<Instance>(&inst)) j["num_edges"] = sparse->graph.num_edges();
  return j;
}

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), m.rows(), m.cols()) = m;
  return out;
}

Eigen::MatrixXd from_row_major(const std::vector<double>& data, std::int64_t rows, std::int64_t cols) {
  if (static_cast<std::int64_t>(data.size()) != rows * cols) {
    throw std::runtime_error("instance container: matrix has wrong size");
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data(), rows, cols);
}

Latents latents(const std::vector<int>& v, const std::vector<double>& u, const ModelParams& p) {
  if (static_cast<std::int64_t>(v.size()) != p.n || static_cast<std::int64_t>(u.size()) != p.p) {
    throw std::runtime_error("instance container: latent sizes do not match params");
  }
  for (int x : v) {
    if (x != 1 && x != -1) throw std::runtime_error("instance container: labels must be +-1");
  }
  Latents out;
  out.v = v;
  out.u = Eigen::Map<const Eigen::VectorXd>(u.data(), p.p);
  return out;
}

AnyInstance assemble(const nlohmann::json& head, std::vector<std::pair<std::int32_t, std::int32_t>> edges,
                     const std::vector<double>& matrix_a, const std::vector<double>& covariates,
                     const std::vector<int>& v, const std::vector<double>& u) {
  if (head.at("format") != "csbm-instance" || head.at("version") != kVersion) {
    throw std::runtime_error("instance container: unknown format or version");
  }
  const ModelParams params = params_from_json(head.at("params"));
  const auto seed = head.at("seed").get<std::uint64_t>();
  const auto kind = head.at("kind").get<std::string>();
  if (kind == "contextual") {
    Instance inst;
    inst.params = params;
    inst.seed = seed;
    inst.graph = Graph(params.n, std::move(edges));
    inst.covariates = from_row_major(covariates, params.p, params.n);
    inst.truth = latents(v, u, params);
    return inst;
  }
  if (kind == "gaussian") {
    GaussianInstance inst;
    inst.params = params;
    inst.seed = seed;
    inst.matrix_a = from_row_major(matrix_a, params.n, params.n);
    inst.covariates = from_row_major(covariates, params.p, params.n);
    inst.truth = latents(v, u, params);
    return inst;
  }
  throw std::runtime_error("instance container: unknown kind " + kind);
}

template <typename T>
void put(std::string& out, const T* data, std::size_t count) {
  out.append(reinterpret_cast<const char*>(data), count * sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  std::vector<T> take(std::size_t count) {
    if (count > (bytes_.size() - pos_) / sizeof(T)) throw std::runtime_error("binary container: truncated");
    std::vector<T> out(count);
    std::memcpy(out.data(), bytes_.data() + pos_, count * sizeof(T));
    pos_ += count * sizeof(T);
    return out;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "json") return Format::kJson;
  if (name == "bin") return Format::kBinary;
  throw ConfigError("unknown format '" + name + "' (expected json or bin)");
}

nlohmann::json params_to_json(const ModelParams& p) {
  return {{"n", p.n},         {"p", p.p},         {"d", p.d},
          {"lambda", p.lambda}, {"mu", p.mu},     {"gamma", p.gamma},
          {"c_in", p.c_in},   {"c_out", p.c_out}};
}

ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  p.n = j.at("n").get<std::int64_t>();
  p.p = j.at("p").get<std::int64_t>();
  p.d = j.at("d").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.mu = j.at("mu").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.c_in = j.at("c_in").get<double>();
  p.c_out = j.at("c_out").get<double>();
  if (p.n < 2 || p.p < 2) throw std::runtime_error("instance container: bad dimensions");
  return p;
}

nlohmann::json to_json(const AnyInstance& inst) {
  nlohmann::json j = header(inst);
  std::visit(
      [&j](const auto& x) {
        j["v"] = x.truth.v;
        j["u"] = std::vector<double>(x.truth.u.data(), x.truth.u.data() + x.truth.u.size());
        j["covariates"] = row_major(x.covariates);
      },
      inst);
  if (const auto* sparse = std::get_if<Instance>(&inst)) {
    j["edges"] = sparse->graph.edge_list();
  } else {
    j["matrix_a"] = row_major(std::get<GaussianInstance>(inst).matrix_a);
  }
  return j;
}

AnyInstance from_json(const nlohmann::json& j) {
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  std::vector<double> matrix_a;
  if (j.contains("edges")) edges = j.at("edges").get<decltype(edges)>();
  if (j.contains("matrix_a")) matrix_a = j.at("matrix_a").get<std::vector<double>>();
  return assemble(j, std::move(edges), matrix_a, j.at("covariates").get<std::vector<double>>(),
                  j.at("v").get<std::vector<int>>(), j.at("u").get<std::vector<double>>());
}

std::string encode_binary(const AnyInstance& inst) {
  const std::string head = header(inst).dump();
  std::string out(kMagic, 4);
  put(out, &kVersion, 1);
  const std::uint64_t head_len = head.size();
  put(out, &head_len, 1);
  out += head;
  if (const auto* sparse = std::get_if<Instance>(&inst)) {
    for (const auto& [a, b] : sparse->graph.edge_list()) {
      put(out, &a, 1);
      put(out, &b, 1);
    }
  } else {
    const auto a = row_major(std::get<GaussianInstance>(inst).matrix_a);
    put(out, a.data(), a.size());
  }
  std::visit(
      [&out](const auto& x) {
        const auto b = row_major(x.covariates);
        put(out, b.data(), b.size());
        for (int label : x.truth.v) {
          const auto byte = static_cast<std::int8_t>(label);
          put(out, &byte, 1);
        }
        put(out, x.truth.u.data(), static_cast<std::size_t>(x.truth.u.size()));
      },
      inst);
  return out;
}

AnyInstance decode_binary(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("binary container: bad magic");
  }
  Reader reader(bytes);
  reader.take<char>(4);
  if (reader.take<std::uint32_t>(1)[0] != kVersion) throw std::runtime_error("binary container: bad version");
  const auto head_len = reader.take<std::uint64_t>(1)[0];
  const auto head_chars = reader.take<char>(head_len);
  const auto head = nlohmann::json::parse(std::string(head_chars.begin(), head_chars.end()));
  const ModelParams params = params_from_json(head.at("params"));
  const auto n = static_cast<std::size_t>(params.n);
  const auto p = static_cast<std::size_t>(params.p);

  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  std::vector<double> matrix_a;
  if (head.at("kind") == "contextual") {
    const auto m = head.at("num_edges").get<std::size_t>();
    const auto flat = reader.take<std::int32_t>(2 * m);
    edges.reserve(m);
    for (std::size_t e = 0; e < m; ++e) edges.emplace_back(flat[2 * e], flat[2 * e + 1]);
  } else {
    matrix_a = reader.take<double>(n * n);
  }
  const auto covariates = reader.take<double>(p * n);
  const auto v8 = reader.take<std::int8_t>(n);
  const auto u = reader.take<double>(p);
  if (!reader.done()) throw std::runtime_error("binary container: trailing bytes");
  return assemble(head, std::move(edges), matrix_a, covariates, std::vector<int>(v8.begin(), v8.end()), u);
}

void write_instance(const std::string& path, const AnyInstance& inst, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == Format::kJson) {
    out << to_json(inst).dump() << '\n';
  } else {
    const std::string bytes = encode_binary(inst);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

AnyInstance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return decode_binary(bytes);
  return from_json(nlohmann::json::parse(bytes));
}

}  // namespace csbm
