#include "dmac/io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmac/error.hpp"
#include "dmac/format.hpp"

namespace dmac {
namespace {

using nlohmann::json;

std::ofstream OpenOut(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  return os;
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path);
  return is;
}

template <typename Derived>
json MatrixToJson(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Derived>
json VectorToJson(const Eigen::MatrixBase<Derived>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename Derived>
void VectorFromJson(const json& j, const std::string& key,
                    Eigen::MatrixBase<Derived>& v) {
  const std::string err = "model field '" + key + "' must be an array of " +
                          std::to_string(v.size()) + " numbers";
  if (!j.is_array() || j.size() != static_cast<std::size_t>(v.size())) {
    throw Error(ErrorKind::kIo, err);
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw Error(ErrorKind::kIo, err);
    v(i) = e.get<double>();
  }
}

template <typename Derived>
void MatrixFromJson(const json& j, const std::string& key,
                    Eigen::MatrixBase<Derived>& m) {
  const std::string err = "model field '" + key + "' must be a " +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + " array of rows";
  if (!j.is_array() || j.size() != static_cast<std::size_t>(m.rows())) {
    throw Error(ErrorKind::kIo, err);
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(m.cols())) {
      throw Error(ErrorKind::kIo, err);
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw Error(ErrorKind::kIo, err);
      m(i, c) = v.get<double>();
    }
  }
}

}  // namespace

void WriteDatasetCsv(const std::string& path, const TrainingDataset& dataset) {
  std::ofstream os = OpenOut(path);
  os << "V_a,P_a,thrust_N\n";
  for (Eigen::Index i = 0; i < dataset.inputs.rows(); ++i) {
    os << FormatDouble(dataset.inputs(i, 0)) << ','
       << FormatDouble(dataset.inputs(i, 1)) << ','
       << FormatDouble(dataset.targets(i)) << '\n';
  }
}

TrainingDataset ReadDatasetCsv(const std::string& path) {
  std::ifstream is = OpenIn(path);
  std::string line;
  if (!std::getline(is, line) || line != "V_a,P_a,thrust_N") {
    throw Error(ErrorKind::kIo, path + ": expected header V_a,P_a,thrust_N");
  }
  std::vector<std::array<double, 3>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 3> row{};
    std::istringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c < 3; ++c) {
      if (!std::getline(ss, cell, ',')) {
        throw Error(ErrorKind::kIo, path + ":" + std::to_string(line_no) +
                                        ": expected 3 columns");
      }
      try {
        std::size_t used = 0;
        row[c] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::kIo, path + ":" + std::to_string(line_no) +
                                        ": not a number '" + cell + "'");
      }
    }
    rows.push_back(row);
  }
  TrainingDataset d;
  d.inputs.resize(static_cast<Eigen::Index>(rows.size()), 2);
  d.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.inputs(r, 0) = rows[i][0];
    d.inputs(r, 1) = rows[i][1];
    d.targets(r) = rows[i][2];
  }
  return d;
}

void WriteModelJson(const std::string& path, const NeuralOutputModel& model) {
  json j;
  j["w1"] = MatrixToJson(model.w1);
  j["b1"] = VectorToJson(model.b1);
  j["w2"] = MatrixToJson(model.w2);
  j["b2"] = VectorToJson(model.b2);
  j["w3"] = MatrixToJson(model.w3);
  j["b3"] = model.b3;
  j["sigma"] = "tansig";
  j["input_order"] = {"V_a", "P_a"};
  std::ofstream os = OpenOut(path);
  os << j.dump(2) << '\n';
}

NeuralOutputModel ReadModelJson(const std::string& path) {
  std::ifstream is = OpenIn(path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIo, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kIo, path + ": expected object");
  for (const char* key : {"w1", "b1", "w2", "b2", "w3", "b3"}) {
    if (!j.contains(key)) {
      throw Error(ErrorKind::kIo, path + ": missing '" + key + "'");
    }
  }
  if (j.value("sigma", "tansig") != "tansig") {
    throw Error(ErrorKind::kIo, path + ": only sigma = tansig is supported");
  }
  if (j.contains("input_order") &&
      j["input_order"] != json::array({"V_a", "P_a"})) {
    throw Error(ErrorKind::kIo, path + ": input_order must be [V_a, P_a]");
  }
  NeuralOutputModel m;
  MatrixFromJson(j["w1"], "w1", m.w1);
  VectorFromJson(j["b1"], "b1", m.b1);
  MatrixFromJson(j["w2"], "w2", m.w2);
  VectorFromJson(j["b2"], "b2", m.b2);
  MatrixFromJson(j["w3"], "w3", m.w3);
  if (!j["b3"].is_number()) {
    throw Error(ErrorKind::kIo, path + ": 'b3' must be a number");
  }
  m.b3 = j["b3"].get<double>();
  if (!m.AllFinite()) {
    throw Error(ErrorKind::kIo, path + ": non-finite weights");
  }
  return m;
}

void WriteHistoryCsv(const std::string& path,
                     const std::vector<EpochStats>& history) {
  std::ofstream os = OpenOut(path);
  os << "epoch,train_mse,validation_mse,test_mse,mu\n";
  for (const auto& e : history) {
    os << e.epoch << ',' << FormatDouble(e.train_mse) << ','
       << FormatDouble(e.validation_mse) << ',' << FormatDouble(e.test_mse)
       << ',' << FormatDouble(e.mu) << '\n';
  }
}

}  // namespace dmac
