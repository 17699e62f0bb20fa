#pragma once

#include <json.hpp>

#include "qustat/types.hpp"

namespace qustat {

/// {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace qustat
