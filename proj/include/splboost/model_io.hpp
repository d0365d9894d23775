#pragma once

#include <filesystem>
#include <iosfwd>

#include "splboost/ensemble.hpp"

namespace splboost {

void save_model(const Ensemble& ensemble, std::ostream& out);
void save_model(const Ensemble& ensemble, const std::filesystem::path& path);

Ensemble load_model(std::istream& in);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace splboost
