#include "qustat/json_io.hpp"

#include "qustat/error.hpp"

namespace qustat {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re"))
    throw ValidationError("matrix JSON needs \"dim\" and \"re\"");
  for (const auto& [key, _] : j.items())
    if (key != "dim" && key != "re" && key != "im")
      throw ValidationError("matrix JSON: unknown field \"" + key + "\"");
  if (!j.at("dim").is_number_integer() || j.at("dim").get<long long>() <= 0)
    throw ValidationError("matrix JSON: dim must be a positive integer");
  const auto dim = j.at("dim").get<Eigen::Index>();
  auto read = [&](const nlohmann::json& rows, Matrix& m, bool imag) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim)
      throw ValidationError("matrix JSON: expected dim rows");
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& row = rows[i];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
        throw ValidationError("matrix JSON: expected dim columns");
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (!row[c].is_number()) throw ValidationError("matrix JSON: non-numeric entry");
        const double v = row[c].get<double>();
        if (imag)
          m(i, c) += Complex(0.0, v);
        else
          m(i, c) = v;
      }
    }
  };
  Matrix m = Matrix::Zero(dim, dim);
  read(j.at("re"), m, false);
  if (j.contains("im")) read(j.at("im"), m, true);
  return m;
}

}  // namespace qustat
