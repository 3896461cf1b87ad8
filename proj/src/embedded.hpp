#pragma once

// Data files under data/ compiled into the library (see src/CMakeLists.txt).

#include <span>
#include <string_view>
#include <utility>

namespace farmlens::embedded {

std::string_view stopwords_en();

// (preset name, JSON text) for every data/presets/*.json, sorted by name.
std::span<const std::pair<std::string_view, std::string_view>> presets();

} // namespace farmlens::embedded
