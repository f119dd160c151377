#include "kpcr/model_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kpcr/csv.hpp"
#include "kpcr/errors.hpp"

namespace kpcr {

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw NumericError("model file: malformed matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw NumericError("model file: ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

json model_to_json(const FittedForecaster& f) {
  json model;
  model["standardization"] = {{"columns", f.standardization.columns},
                              {"mean", vector_to_json(f.standardization.mean)},
                              {"sd", vector_to_json(f.standardization.sd)},
                              {"dropped", f.standardization.dropped}};
  model["kernel"] = {{"family", to_string(f.kernel.family)},
                     {"gamma", f.kernel.gamma},
                     {"degree", f.kernel.degree}};
  model["training_matrix"] = matrix_to_json(f.training_matrix);
  model["centering"] = {{"column_means", vector_to_json(f.centering.column_means)},
                        {"grand_mean", f.centering.grand_mean}};
  model["eigenvalues"] = vector_to_json(f.eigenvalues);
  model["basis"] = matrix_to_json(f.basis);
  model["glm"] = {{"link", f.glm.link == Link::logit ? "logit" : "identity"},
                  {"coefficients", vector_to_json(f.glm.coefficients)},
                  {"iterations", f.glm.iterations},
                  {"gradient_norm", f.glm.gradient_norm},
                  {"converged", f.glm.converged},
                  {"separated", f.glm.separated}};
  model["costs"] = {{"fp", f.costs.cost_fp}, {"fn", f.costs.cost_fn}};
  model["threshold"] = f.threshold;
  model["provenance"] = {{"seed", f.provenance.seed},
                         {"grid", f.provenance.grid},
                         {"audit", f.provenance.audit}};
  return model;
}

FittedForecaster model_from_json(const json& model) {
  FittedForecaster f;
  const auto& std_params = model.at("standardization");
  f.standardization.columns = std_params.at("columns").get<std::vector<std::string>>();
  f.standardization.mean = vector_from_json(std_params.at("mean"));
  f.standardization.sd = vector_from_json(std_params.at("sd"));
  f.standardization.dropped = std_params.at("dropped").get<std::vector<std::string>>();

  const auto& kernel = model.at("kernel");
  f.kernel.family = kernel_family_from_string(kernel.at("family").get<std::string>());
  f.kernel.gamma = kernel.at("gamma").get<double>();
  f.kernel.degree = kernel.at("degree").get<int>();

  f.training_matrix = matrix_from_json(model.at("training_matrix"));
  f.centering.column_means = vector_from_json(model.at("centering").at("column_means"));
  f.centering.grand_mean = model.at("centering").at("grand_mean").get<double>();
  f.eigenvalues = vector_from_json(model.at("eigenvalues"));
  f.basis = matrix_from_json(model.at("basis"));

  const auto& glm = model.at("glm");
  const std::string link = glm.at("link").get<std::string>();
  if (link != "logit" && link != "identity") {
    throw NumericError("model file: unknown link '" + link + "'");
  }
  f.glm.link = link == "logit" ? Link::logit : Link::identity;
  f.glm.coefficients = vector_from_json(glm.at("coefficients"));
  f.glm.iterations = glm.at("iterations").get<int>();
  f.glm.gradient_norm = glm.at("gradient_norm").get<double>();
  f.glm.converged = glm.at("converged").get<bool>();
  f.glm.separated = glm.at("separated").get<bool>();

  f.costs.cost_fp = model.at("costs").at("fp").get<double>();
  f.costs.cost_fn = model.at("costs").at("fn").get<double>();
  f.threshold = model.at("threshold").get<double>();
  f.provenance.seed = model.at("provenance").at("seed").get<std::uint64_t>();
  f.provenance.grid = model.at("provenance").at("grid").get<std::string>();
  f.provenance.audit = model.at("provenance").at("audit").get<std::string>();
  return f;
}

}  // namespace

void save_model(const FittedForecaster& forecaster, const std::string& path) {
  forecaster.validate();
  const json model = model_to_json(forecaster);
  json envelope;
  envelope["format"] = "kpcr-model";
  envelope["version"] = kModelFormatVersion;
  envelope["checksum"] = hex64(fnv1a64(model.dump()));
  envelope["model"] = model;
  write_file_atomic(path, envelope.dump(2) + "\n");
}

FittedForecaster load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();

  json envelope;
  try {
    envelope = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw NumericError(std::string("model file is corrupt (not valid JSON): ") + e.what());
  }
  try {
    if (envelope.value("format", "") != "kpcr-model") {
      throw ValidationError("not a kpcr model file: " + path);
    }
    const int version = envelope.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ValidationError("unsupported model format version " + std::to_string(version) +
                            " (this build reads version " +
                            std::to_string(kModelFormatVersion) + ")");
    }
    const std::string expected = envelope.at("checksum").get<std::string>();
    const std::string actual = hex64(fnv1a64(envelope.at("model").dump()));
    if (expected != actual) {
      throw NumericError("model file checksum mismatch (expected " + expected + ", computed " +
                         actual + "); refusing to load a damaged model");
    }
    FittedForecaster f = model_from_json(envelope.at("model"));
    f.validate();
    return f;
  } catch (const json::exception& e) {
    throw NumericError(std::string("model file is corrupt: ") + e.what());
  }
}

}  // namespace kpcr
